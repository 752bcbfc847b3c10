//! Planar curve geometry: monotone polar parametrizations and polylines.
//!
//! A monotone curve is written as `x0 + r (cos φ(r), sin φ(r))` for
//! `r ∈ (0, R)`, so the distance from `x0` grows strictly along the curve.
//! Polylines are the discrete carrier used by the transport and quadrature
//! code.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Segment-distance tolerance for the self-intersection test, relative to the
/// curve's bounding-box size (floored at 1).
pub const INTERSECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Like [`Point2::new`] but rejects non-finite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::invalid("point coordinates must be finite"))
        }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl core::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl core::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

/// Tabulated angular profile: `φ` and `φ′` given at strictly increasing
/// radii and interpolated piecewise-linearly (extrapolated linearly past the
/// outermost breakpoints).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPhi {
    radii: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl TabulatedPhi {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::invalid("tabulated profile needs at least one breakpoint"));
        }
        if radii.len() != values.len() || radii.len() != derivs.len() {
            return Err(Error::invalid(
                "tabulated profile: radii, values and derivatives differ in length",
            ));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("tabulated breakpoints must be strictly increasing"));
        }
        if radii
            .iter()
            .chain(&values)
            .chain(&derivs)
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("tabulated profile contains non-finite entries"));
        }
        Ok(TabulatedPhi { radii, values, derivs })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    // Segment index `i` such that r is interpolated between breakpoints i, i+1.
    // A breakpoint belongs to the segment on its right.
    fn segment(&self, r: f64) -> Option<usize> {
        let n = self.radii.len();
        if n == 1 {
            return None;
        }
        let idx = self.radii.partition_point(|&x| x <= r);
        Some(idx.clamp(1, n - 1) - 1)
    }

    fn interp(&self, table: &[f64], r: f64) -> f64 {
        match self.segment(r) {
            None => table[0],
            Some(i) => {
                let (r0, r1) = (self.radii[i], self.radii[i + 1]);
                let t = (r - r0) / (r1 - r0);
                table[i] + t * (table[i + 1] - table[i])
            }
        }
    }
}

/// Angular profile `φ` of a monotone curve.
#[derive(Debug, Clone, PartialEq)]
pub enum AngularProfile {
    Constant(f64),
    /// `φ(r) = slope·r + offset`.
    Linear { slope: f64, offset: f64 },
    Tabulated(TabulatedPhi),
}

impl AngularProfile {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            AngularProfile::Constant(c) => *c,
            AngularProfile::Linear { slope, offset } => slope * r + offset,
            AngularProfile::Tabulated(t) => t.interp(&t.values, r),
        }
    }

    /// `φ′(r)`; at a tabulated breakpoint this is the right limit.
    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            AngularProfile::Constant(_) => 0.0,
            AngularProfile::Linear { slope, .. } => *slope,
            AngularProfile::Tabulated(t) => t.interp(&t.derivs, r),
        }
    }
}

/// Curve `{ x0 + (r cos φ(r), r sin φ(r)) : 0 < r < R }`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCurve {
    origin: Point2,
    extent: f64,
    phi: AngularProfile,
}

impl MonotoneCurve {
    /// `extent` may be `f64::INFINITY` for unbounded curves.
    pub fn new(origin: Point2, extent: f64, phi: AngularProfile) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::invalid("curve origin must be finite"));
        }
        if !(extent > 0.0) {
            return Err(Error::Domain {
                what: "extent_R",
                value: extent,
                range: "(0, +inf]",
            });
        }
        match &phi {
            AngularProfile::Constant(c) if !c.is_finite() => {
                return Err(Error::invalid("constant angle must be finite"))
            }
            AngularProfile::Linear { slope, offset } if !(slope.is_finite() && offset.is_finite()) => {
                return Err(Error::invalid("linear profile coefficients must be finite"))
            }
            AngularProfile::Tabulated(t) => {
                let first = t.radii[0];
                let last = *t.radii.last().unwrap();
                if !(first > 0.0 && last < extent) {
                    return Err(Error::invalid("tabulated breakpoints must lie inside (0, extent_R)"));
                }
            }
            _ => {}
        }
        Ok(MonotoneCurve { origin, extent, phi })
    }

    /// Straight segment of length `length` leaving `origin` in direction `angle`.
    pub fn interval(origin: Point2, length: f64, angle: f64) -> Result<Self> {
        MonotoneCurve::new(origin, length, AngularProfile::Constant(angle))
    }

    /// Archimedean spiral `φ(r) = slope·r + offset` about the plane origin.
    pub fn spiral(slope: f64, offset: f64, extent: f64) -> Result<Self> {
        MonotoneCurve::new(Point2::ORIGIN, extent, AngularProfile::Linear { slope, offset })
    }

    /// Reads a monotone polar profile off a polyline whose distance from `x0`
    /// increases strictly along the vertices. The first vertex must be `x0`
    /// itself (radius 0) or lie beyond it; `φ′` is estimated by differences of
    /// the unwrapped polar angle.
    pub fn from_polyline(poly: &PolylineCurve, x0: Point2) -> Result<Self> {
        if !poly.is_monotone_from(x0) {
            return Err(Error::invalid("polyline is not monotone with respect to the given x0"));
        }
        let verts = poly.vertices();
        let radii: Vec<f64> = verts.iter().map(|v| v.dist(x0)).collect();
        let extent = *radii.last().unwrap();
        let mut angles = Vec::with_capacity(verts.len());
        let mut prev: Option<f64> = None;
        for v in verts {
            let d = *v - x0;
            if d.norm() == 0.0 {
                angles.push(f64::NAN);
                continue;
            }
            let mut a = d.y.atan2(d.x);
            if let Some(p) = prev {
                a += TAU * ((p - a) / TAU).round();
            }
            prev = Some(a);
            angles.push(a);
        }
        let keep: Vec<usize> = (0..verts.len())
            .filter(|&i| radii[i] > 0.0 && radii[i] < extent)
            .collect();
        if keep.is_empty() {
            // Two-vertex polyline: a straight segment.
            let d = verts[verts.len() - 1] - x0;
            return MonotoneCurve::interval(x0, extent, d.y.atan2(d.x));
        }
        let mut r = Vec::with_capacity(keep.len());
        let mut phi = Vec::with_capacity(keep.len());
        let mut dphi = Vec::with_capacity(keep.len());
        for &i in &keep {
            let lo = if i > 0 && !angles[i - 1].is_nan() { i - 1 } else { i };
            let hi = (i + 1).min(verts.len() - 1);
            let slope = if hi > lo {
                (angles[hi] - angles[lo]) / (radii[hi] - radii[lo])
            } else {
                0.0
            };
            r.push(radii[i]);
            phi.push(angles[i]);
            dphi.push(slope);
        }
        MonotoneCurve::new(
            x0,
            extent,
            AngularProfile::Tabulated(TabulatedPhi::new(r, phi, dphi)?),
        )
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn phi(&self) -> &AngularProfile {
        &self.phi
    }

    pub fn is_bounded(&self) -> bool {
        self.extent.is_finite()
    }

    fn check_open(&self, r: f64) -> Result<()> {
        if r > 0.0 && r < self.extent {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "r",
                value: r,
                range: "(0, extent_R)",
            })
        }
    }

    /// `x0 + (r cos φ(r), r sin φ(r))` for `0 < r < R`.
    pub fn monotone_point(&self, r: f64) -> Result<Point2> {
        self.check_open(r)?;
        Ok(self.point_unchecked(r))
    }

    /// Same as [`MonotoneCurve::monotone_point`] but accepts the closed range
    /// `[0, R]` (the endpoints of the curve).
    pub fn point_closed(&self, r: f64) -> Result<Point2> {
        if r >= 0.0 && r <= self.extent && r.is_finite() {
            Ok(self.point_unchecked(r))
        } else {
            Err(Error::Domain {
                what: "r",
                value: r,
                range: "[0, extent_R]",
            })
        }
    }

    fn point_unchecked(&self, r: f64) -> Point2 {
        if r == 0.0 {
            return self.origin;
        }
        let (s, c) = self.phi.value(r).sin_cos();
        Point2::new(self.origin.x + r * c, self.origin.y + r * s)
    }

    /// Arc-length element `j(r) = √(1 + (r φ′(r))²)`.
    pub fn arc_element(&self, r: f64) -> Result<f64> {
        self.check_open(r)?;
        Ok(self.arc_element_unchecked(r))
    }

    pub(crate) fn arc_element_unchecked(&self, r: f64) -> f64 {
        1.0f64.hypot(r * self.phi.derivative(r))
    }

    /// `∫₀^upto j(r) dr` by composite 16-point Gauss–Legendre on 64 panels.
    pub fn arc_length(&self, upto: f64) -> Result<f64> {
        if !(upto > 0.0 && upto <= self.extent && upto.is_finite()) {
            return Err(Error::Domain {
                what: "upto",
                value: upto,
                range: "(0, extent_R]",
            });
        }
        let rule = GaussLegendre::new(16);
        let panels = 64;
        let h = upto / panels as f64;
        Ok((0..panels)
            .map(|p| {
                let a = p as f64 * h;
                rule.integrate(a, a + h, |r| self.arc_element_unchecked(r))
            })
            .sum())
    }

    /// Polyline through the origin, the `n` interior radii `R·k/(n+1)`
    /// (`k = 1..n`) and the far endpoint. Unbounded curves need a truncation
    /// radius, which then plays the role of `R`.
    pub fn sample_polyline(&self, n: usize, truncation: Option<f64>) -> Result<PolylineCurve> {
        if n < 2 {
            return Err(Error::Domain {
                what: "n",
                value: n as f64,
                range: "n >= 2",
            });
        }
        let radius = match (self.extent.is_finite(), truncation) {
            (_, Some(t)) if t > 0.0 && t <= self.extent && t.is_finite() => t,
            (_, Some(t)) => {
                return Err(Error::Domain {
                    what: "truncation",
                    value: t,
                    range: "(0, extent_R]",
                })
            }
            (true, None) => self.extent,
            (false, None) => {
                return Err(Error::invalid(
                    "unbounded curve: sample_polyline needs a truncation radius",
                ))
            }
        };
        let mut verts = Vec::with_capacity(n + 2);
        verts.push(self.origin);
        for k in 1..=n {
            verts.push(self.point_unchecked(radius * k as f64 / (n + 1) as f64));
        }
        verts.push(self.point_unchecked(radius));
        PolylineCurve::new(verts)
    }
}

/// Open polyline with a cumulative chord-length table.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineCurve {
    vertices: Vec<Point2>,
    cumulative: Vec<f64>,
}

impl PolylineCurve {
    /// Validates at least two vertices, distinct consecutive vertices and the
    /// absence of contacts between non-adjacent segments.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("polyline needs at least two vertices"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polyline vertices must be finite"));
        }
        let mut cumulative = Vec::with_capacity(vertices.len());
        cumulative.push(0.0);
        for (k, w) in vertices.windows(2).enumerate() {
            let len = w[0].dist(w[1]);
            if !(len > 0.0) {
                return Err(Error::invalid(alloc::format!(
                    "polyline vertices {k} and {} coincide",
                    k + 1
                )));
            }
            let prev = cumulative[k];
            cumulative.push(prev + len);
        }
        check_simple(&vertices)?;
        Ok(PolylineCurve { vertices, cumulative })
    }

    /// Samples the arc `(R sin θ, R(1 − cos θ))`, `θ ∈ [ε, 2π − ε]`, at `n`
    /// equally spaced angles including both endpoints. The underlying circle
    /// passes through the origin, which the arc omits.
    pub fn circular_arc(radius: f64, epsilon: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain {
                what: "radius",
                value: radius,
                range: "(0, +inf)",
            });
        }
        if !(epsilon > 0.0 && epsilon < PI) {
            return Err(Error::Domain {
                what: "epsilon",
                value: epsilon,
                range: "(0, pi)",
            });
        }
        if n < 2 {
            return Err(Error::Domain {
                what: "n",
                value: n as f64,
                range: "n >= 2",
            });
        }
        let span = TAU - 2.0 * epsilon;
        let verts = (0..n)
            .map(|k| {
                let t = epsilon + span * k as f64 / (n - 1) as f64;
                Point2::new(radius * t.sin(), radius * (1.0 - t.cos()))
            })
            .collect();
        PolylineCurve::new(verts)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cumulative_length(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Total chord length.
    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn first(&self) -> Point2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2 {
        self.vertices[self.vertices.len() - 1]
    }

    /// Discrete monotonicity: `|v_k − x0|` strictly increasing over vertices.
    pub fn is_monotone_from(&self, x0: Point2) -> bool {
        self.vertices
            .windows(2)
            .all(|w| w[1].dist(x0) > w[0].dist(x0))
    }

    /// Point at arc length `s` (linear interpolation along chords).
    pub fn point_at(&self, s: f64) -> Point2 {
        let n = self.cumulative.len();
        let idx = self.cumulative.partition_point(|&c| c <= s).clamp(1, n - 1) - 1;
        let (s0, s1) = (self.cumulative[idx], self.cumulative[idx + 1]);
        let t = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
        let (a, b) = (self.vertices[idx], self.vertices[idx + 1]);
        a + (b - a).scale(t)
    }
}

fn check_simple(verts: &[Point2]) -> Result<()> {
    for w in verts.windows(3) {
        let u = w[0] - w[1];
        let v = w[2] - w[1];
        if u.cross(v).abs() <= INTERSECTION_TOL * u.norm() * v.norm() && u.dot(v) > 0.0 {
            return Err(Error::invalid("polyline folds back onto itself"));
        }
    }
    let segs = verts.len() - 1;
    if segs < 3 {
        return Ok(());
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in verts {
        xmin = xmin.min(v.x);
        xmax = xmax.max(v.x);
        ymin = ymin.min(v.y);
        ymax = ymax.max(v.y);
    }
    let tol = INTERSECTION_TOL * (xmax - xmin).max(ymax - ymin).max(1.0);

    let lo = |i: usize| verts[i].x.min(verts[i + 1].x);
    let hi = |i: usize| verts[i].x.max(verts[i + 1].x);
    let mut order: Vec<usize> = (0..segs).collect();
    order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)));

    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let start = lo(i) - tol;
        active.retain(|&j| hi(j) >= start);
        for &j in &active {
            if i.abs_diff(j) <= 1 {
                continue;
            }
            let d = segment_distance(verts[i], verts[i + 1], verts[j], verts[j + 1]);
            if d <= tol {
                return Err(Error::invalid(alloc::format!(
                    "polyline segments {} and {} intersect",
                    i.min(j),
                    i.max(j)
                )));
            }
        }
        active.push(i);
    }
    Ok(())
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.dist(a + ab.scale(t))
}

fn segment_distance(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> f64 {
    let d1 = (p1 - p0).cross(q0 - p0);
    let d2 = (p1 - p0).cross(q1 - p0);
    let d3 = (q1 - q0).cross(p0 - q0);
    let d4 = (q1 - q0).cross(p1 - q0);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(p0, q0, q1)
        .min(point_segment_distance(p1, q0, q1))
        .min(point_segment_distance(q0, p0, p1))
        .min(point_segment_distance(q1, p0, p1))
}
