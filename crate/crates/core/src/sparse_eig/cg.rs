use alloc::vec;
use alloc::vec::Vec;

use super::{dot, norm, CsrMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Stop once `‖Ax − b‖ ≤ tol·‖b‖`.
    pub tol: f64,
    /// Defaults to `10 n` when `None`.
    pub max_iter: Option<usize>,
    /// Scale by the inverse diagonal.
    pub jacobi: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { tol: 1e-10, max_iter: None, jacobi: true }
    }
}

#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `‖Ax − b‖ / ‖b‖`.
    pub relative_residual: f64,
}

/// Solves `Ax = b` for symmetric positive definite `A` with default options.
pub fn cg_solve(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    cg_solve_with(a, b, &CgOptions { tol, ..CgOptions::default() }).map(|s| s.x)
}

/// Preconditioned conjugate gradients. Non-positive curvature `pᵀAp ≤ 0`
/// means `A` is not positive definite and is reported as non-convergence.
pub fn cg_solve_with(a: &CsrMatrix, b: &[f64], opts: &CgOptions) -> Result<CgSolution> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgSolution { x, iterations: 0, relative_residual: 0.0 });
    }
    let inv_diag: Vec<f64> = if opts.jacobi {
        a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect()
    } else {
        vec![1.0; n]
    };
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 1..=max_iter {
        a.matvec_into(&p, &mut ap);
        let curv = dot(&p, &ap);
        if !(curv > 0.0) {
            return Err(Error::NoConvergence { method: "cg", iterations: it, residual: res });
        }
        let alpha = rz / curv;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm(&r) / bnorm;
        if res <= opts.tol {
            return Ok(CgSolution { x, iterations: it, relative_residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { method: "cg", iterations: max_iter, residual: res })
}
