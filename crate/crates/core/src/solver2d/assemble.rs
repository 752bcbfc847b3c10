use alloc::vec;
use alloc::vec::Vec;

use super::mesh::CrackMesh;
use crate::sparse_eig::{CsrMatrix, TripletBuilder};
use crate::strength::StrengthProfile;
use crate::{Error, Result};

/// Discrete form `uᵀ(K − B)u` against the mass `M`, restricted to the free
/// (non-Dirichlet) nodes.
#[derive(Debug, Clone)]
pub struct FormAssembly {
    /// `∫∇u·∇v`.
    pub k: CsrMatrix,
    /// `∫ω[u][v]ds` by the trapezoid rule on crack edges.
    pub b: CsrMatrix,
    /// `∫uv`.
    pub m: CsrMatrix,
    /// `ω` against arc length from the left crack tip.
    pub omega: StrengthProfile,
    dof_of_node: Vec<Option<usize>>,
    node_of_dof: Vec<usize>,
    crack_weights: Vec<f64>,
}

/// Stiffness and mass of the P1 element with corners `p`.
fn element(p: [(f64, f64); 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let area2 = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1);
    let area = 0.5 * area2;
    // ∇λ_i = (y_{i+1} − y_{i+2}, x_{i+2} − x_{i+1}) / 2A
    let g: [(f64, f64); 3] = core::array::from_fn(|i| {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        ((a.1 - b.1) / area2, (b.0 - a.0) / area2)
    });
    let k = core::array::from_fn(|i| core::array::from_fn(|j| area * (g[i].0 * g[j].0 + g[i].1 * g[j].1)));
    let m = core::array::from_fn(|i| core::array::from_fn(|j| area / 12.0 * if i == j { 2.0 } else { 1.0 }));
    (k, m)
}

/// Assembles stiffness, interface and mass matrices and eliminates the
/// Dirichlet nodes on the outer boundary.
pub fn assemble(mesh: &CrackMesh, omega: &StrengthProfile) -> Result<FormAssembly> {
    let length = mesh.segment().length();
    omega
        .check_covers(length, 1e-9 * length)
        .map_err(|e| Error::invalid(alloc::format!("strength profile does not match the crack: {e}")))?;

    let nn = mesh.node_count();
    let mut dof_of_node = vec![None; nn];
    let mut node_of_dof = Vec::with_capacity(nn);
    for (node, slot) in dof_of_node.iter_mut().enumerate() {
        if !mesh.is_boundary(node) {
            *slot = Some(node_of_dof.len());
            node_of_dof.push(node);
        }
    }
    let n = node_of_dof.len();

    let mut kb = TripletBuilder::with_capacity(n, 9 * mesh.triangles().len());
    let mut mb = TripletBuilder::with_capacity(n, 9 * mesh.triangles().len());
    for t in mesh.triangles() {
        let p = t.map(|v| {
            let q = mesh.node_point(v);
            (q.x, q.y)
        });
        let (ke, me) = element(p);
        for a in 0..3 {
            let Some(da) = dof_of_node[t[a]] else { continue };
            for b in 0..3 {
                let Some(db) = dof_of_node[t[b]] else { continue };
                kb.push(da, db, ke[a][b]);
                mb.push(da, db, me[a][b]);
            }
        }
    }

    // trapezoid weights ω(s_k)·(ds_left + ds_right)/2 per crack node
    let nodes = mesh.crack_nodes();
    let mut crack_weights = vec![0.0; nodes.len()];
    for e in 0..nodes.len() - 1 {
        let ds = nodes[e + 1].s - nodes[e].s;
        crack_weights[e] += 0.5 * ds * omega.at(nodes[e].s);
        crack_weights[e + 1] += 0.5 * ds * omega.at(nodes[e + 1].s);
    }
    let mut bb = TripletBuilder::with_capacity(n, 4 * nodes.len());
    for (c, &w) in nodes.iter().zip(&crack_weights) {
        if c.plus == c.minus {
            continue;
        }
        let (p, m) = (dof_of_node[c.plus].unwrap(), dof_of_node[c.minus].unwrap());
        bb.push(p, p, w);
        bb.push(m, m, w);
        bb.push(p, m, -w);
        bb.push(m, p, -w);
    }

    Ok(FormAssembly {
        k: kb.build(),
        b: bb.build(),
        m: mb.build(),
        omega: omega.clone(),
        dof_of_node,
        node_of_dof,
        crack_weights,
    })
}

impl FormAssembly {
    pub fn n_dofs(&self) -> usize {
        self.node_of_dof.len()
    }

    /// The same assembly for the strength `factor · ω`; only `B` changes.
    pub fn with_scaled_strength(&self, factor: f64) -> FormAssembly {
        FormAssembly {
            b: self.b.scaled(factor),
            omega: self.omega.scaled(factor),
            crack_weights: self.crack_weights.iter().map(|w| factor * w).collect(),
            ..self.clone()
        }
    }

    /// `K − B`.
    pub fn operator(&self) -> CsrMatrix {
        self.k.add_scaled(&self.b, -1.0).expect("K and B share the dof space")
    }

    pub fn dof_of(&self, node: usize) -> Option<usize> {
        self.dof_of_node[node]
    }

    pub fn node_of(&self, dof: usize) -> usize {
        self.node_of_dof[dof]
    }

    /// Free-node values of a nodal vector.
    pub fn restrict(&self, nodal: &[f64]) -> Vec<f64> {
        self.node_of_dof.iter().map(|&v| nodal[v]).collect()
    }

    /// Nodal vector with zeros on the Dirichlet boundary.
    pub fn extend(&self, dofs: &[f64]) -> Vec<f64> {
        self.dof_of_node.iter().map(|d| d.map_or(0.0, |d| dofs[d])).collect()
    }

    /// Trapezoid `∫ω|j|²ds` for jumps given at every crack node, tips
    /// included.
    pub fn interface_form(&self, jumps: &[f64]) -> Result<f64> {
        if jumps.len() != self.crack_weights.len() {
            return Err(Error::DimensionMismatch { expected: self.crack_weights.len(), found: jumps.len() });
        }
        Ok(self.crack_weights.iter().zip(jumps).map(|(w, j)| w * j * j).sum())
    }

    /// `uᵀ(K − B)u` for free-node values `u`.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        Ok(self.k.quadratic_form(u)? - self.b.quadratic_form(u)?)
    }
}
