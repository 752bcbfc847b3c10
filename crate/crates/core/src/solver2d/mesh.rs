use alloc::vec::Vec;
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use crate::geometry::Point2;
use crate::{Error, Result};

/// Relative slack for "already on the grid" decisions.
const GRID_TOL: f64 = 1e-9;

/// Axis-aligned box `(x_min, x_max) × (y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) && x_min < x_max && y_min < y_max;
        if !ok {
            return Err(Error::invalid("box needs finite bounds with x_min < x_max and y_min < y_max"));
        }
        Ok(Rect { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.x_min <= other.x_min && self.x_max >= other.x_max && self.y_min <= other.y_min && self.y_max >= other.y_max
    }
}

/// Horizontal crack `{(x, y0) : x_a < x < x_b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackSegment {
    pub x_a: f64,
    pub x_b: f64,
    pub y0: f64,
}

impl CrackSegment {
    pub fn new(x_a: f64, x_b: f64, y0: f64) -> Result<Self> {
        if !(x_a.is_finite() && x_b.is_finite() && y0.is_finite() && x_a < x_b) {
            return Err(Error::invalid("crack segment needs finite x_a < x_b and y0"));
        }
        Ok(CrackSegment { x_a, x_b, y0 })
    }

    pub fn length(&self) -> f64 {
        self.x_b - self.x_a
    }
}

/// Role of a mesh node with respect to the crack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSide {
    Regular,
    /// Interior crack node, upper face (`y → y0+`).
    Plus,
    /// Duplicate of an interior crack node, lower face (`y → y0−`).
    Minus,
    /// Crack endpoint; shared by both faces.
    Tip,
}

/// Node on the crack line, ordered by arc length `s` from `x_a`. At the
/// tips `plus == minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackNode {
    pub s: f64,
    pub plus: usize,
    pub minus: usize,
}

/// Uniform triangulation of a box with one horizontal crack. Grid nodes are
/// numbered row by row; the lower-face copies of the interior crack nodes
/// follow. Every square is split along its lower-left to upper-right
/// diagonal, and squares directly below the crack use the lower-face copies.
#[derive(Debug, Clone)]
pub struct CrackMesh {
    rect: Rect,
    h: f64,
    nx: usize,
    ny: usize,
    segment: CrackSegment,
    snapped: bool,
    ia: usize,
    ib: usize,
    j0: usize,
    triangles: Vec<[usize; 3]>,
    crack: Vec<CrackNode>,
}

fn grid_count(extent: f64, h: f64, what: &str) -> Result<usize> {
    let f = extent / h;
    let n = f.round();
    if (f - n).abs() > GRID_TOL * f.max(1.0) || n < 2.0 {
        return Err(Error::invalid(alloc::format!("box {what} {extent} is not a multiple (≥ 2) of h = {h}")));
    }
    Ok(n as usize)
}

fn snap(v: f64, origin: f64, h: f64) -> (i64, bool) {
    let f = (v - origin) / h;
    let k = f.round();
    (k as i64, (f - k).abs() > GRID_TOL * f.abs().max(1.0))
}

impl CrackMesh {
    /// Builds the mesh; crack coordinates off the grid are snapped to the
    /// nearest grid line and [`CrackMesh::snapped`] reports it.
    pub fn build(rect: Rect, h: f64, segment: CrackSegment) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain { what: "h", value: h, range: "(0, +inf)" });
        }
        let nx = grid_count(rect.width(), h, "width")?;
        let ny = grid_count(rect.height(), h, "height")?;
        let (ia, sa) = snap(segment.x_a, rect.x_min, h);
        let (ib, sb) = snap(segment.x_b, rect.x_min, h);
        let (j0, sy) = snap(segment.y0, rect.y_min, h);
        if ia <= 0 || ib >= nx as i64 || j0 <= 0 || j0 >= ny as i64 {
            return Err(Error::invalid("crack segment touches or leaves the outer boundary"));
        }
        if ib <= ia {
            return Err(Error::invalid("crack segment is shorter than one grid cell after snapping"));
        }
        let (ia, ib, j0) = (ia as usize, ib as usize, j0 as usize);
        let snapped_segment = CrackSegment {
            x_a: rect.x_min + ia as f64 * h,
            x_b: rect.x_min + ib as f64 * h,
            y0: rect.y_min + j0 as f64 * h,
        };
        let mut mesh = CrackMesh {
            rect,
            h,
            nx,
            ny,
            segment: snapped_segment,
            snapped: sa || sb || sy,
            ia,
            ib,
            j0,
            triangles: Vec::with_capacity(2 * nx * ny),
            crack: Vec::with_capacity(ib - ia + 1),
        };
        for i in ia..=ib {
            let plus = mesh.grid_node(i, j0);
            let minus = mesh.minus_copy(i).unwrap_or(plus);
            mesh.crack.push(CrackNode { s: (i - ia) as f64 * h, plus, minus });
        }
        for j in 0..ny {
            for i in 0..nx {
                let below_crack = j + 1 == j0;
                let top = |ii: usize| -> usize {
                    match (below_crack, mesh.minus_copy(ii)) {
                        (true, Some(m)) => m,
                        _ => mesh.grid_node(ii, j + 1),
                    }
                };
                let ll = mesh.grid_node(i, j);
                let lr = mesh.grid_node(i + 1, j);
                let ur = top(i + 1);
                let ul = top(i);
                mesh.triangles.push([ll, lr, ur]);
                mesh.triangles.push([ll, ur, ul]);
            }
        }
        Ok(mesh)
    }

    fn minus_copy(&self, i: usize) -> Option<usize> {
        (i > self.ia && i < self.ib).then(|| self.grid_nodes() + (i - self.ia - 1))
    }

    pub fn grid_node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    fn grid_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn node_count(&self) -> usize {
        self.grid_nodes() + self.duplicated_count()
    }

    /// Number of lower-face copies, i.e. strictly interior crack nodes.
    pub fn duplicated_count(&self) -> usize {
        self.ib - self.ia - 1
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Cells along x and y.
    pub fn cells(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// The crack after snapping to the grid.
    pub fn segment(&self) -> CrackSegment {
        self.segment
    }

    pub fn snapped(&self) -> bool {
        self.snapped
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn crack_nodes(&self) -> &[CrackNode] {
        &self.crack
    }

    pub fn tip_nodes(&self) -> [usize; 2] {
        [self.crack[0].plus, self.crack[self.crack.len() - 1].plus]
    }

    fn grid_ij(&self, node: usize) -> (usize, usize) {
        if node < self.grid_nodes() {
            (node % (self.nx + 1), node / (self.nx + 1))
        } else {
            (self.ia + 1 + node - self.grid_nodes(), self.j0)
        }
    }

    pub fn node_point(&self, node: usize) -> Point2 {
        let (i, j) = self.grid_ij(node);
        Point2::new(self.rect.x_min + i as f64 * self.h, self.rect.y_min + j as f64 * self.h)
    }

    pub fn node_side(&self, node: usize) -> NodeSide {
        if node >= self.grid_nodes() {
            return NodeSide::Minus;
        }
        let (i, j) = self.grid_ij(node);
        if j != self.j0 || i < self.ia || i > self.ib {
            NodeSide::Regular
        } else if i == self.ia || i == self.ib {
            NodeSide::Tip
        } else {
            NodeSide::Plus
        }
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = self.grid_ij(node);
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    /// `u₊ − u₋` at every crack node (zero at the tips).
    pub fn jumps(&self, nodal: &[f64]) -> Vec<f64> {
        self.crack.iter().map(|c| nodal[c.plus] - nodal[c.minus]).collect()
    }
}
