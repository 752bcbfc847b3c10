use alloc::sync::Arc;
use alloc::vec::Vec;

use super::assemble::FormAssembly;
use super::mesh::{CrackMesh, Rect};
use crate::rng::DEFAULT_SEED;
use crate::sparse_eig::{smallest_eigenpairs, EigOptions, Multigrid, Preconditioner};
use crate::strength::StrengthProfile;
use crate::Result;

/// Eigensolver residual tolerance used unless overridden.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;
/// `λ₁` below `−VERDICT_TOL` counts as a negative eigenvalue.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub count: usize,
    pub tol: f64,
    pub verdict_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Warm start, in free-node (dof) numbering.
    pub initial: Option<Vec<Vec<f64>>>,
    /// Only the sign of `λ₁` is wanted: stop as soon as a Ritz value proves
    /// `λ₁ < −verdict_tol`.
    pub sign_only: bool,
    /// `None` builds a multigrid cycle for the stiffness matrix per call.
    pub preconditioner: Option<Preconditioner>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            count: 1,
            tol: DEFAULT_EIG_TOL,
            verdict_tol: DEFAULT_VERDICT_TOL,
            max_iter: 20_000,
            seed: DEFAULT_SEED,
            initial: None,
            sign_only: false,
            preconditioner: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericVerdict {
    NoNegativeFound { tol: f64 },
    NegativeEigenvalue { lambda1: f64 },
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Ascending. When the run stopped early on a sign certificate this
    /// holds the certifying Ritz values (upper bounds).
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub rect: Rect,
    pub h: f64,
    pub omega: StrengthProfile,
    pub verdict: NumericVerdict,
    /// Eigenvalues are converged (false when stopped on a sign certificate).
    pub converged: bool,
    pub iterations: usize,
    /// Lowest eigenvector in free-node numbering, `M`-normalized.
    pub ground_state: Vec<f64>,
}

impl SpectralReport {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Ground state on every mesh node (zero on the boundary).
    pub fn ground_state_nodal(&self, asm: &FormAssembly) -> Vec<f64> {
        asm.extend(&self.ground_state)
    }
}

/// The `count` smallest eigenvalues of `(K − B)x = λMx` with a sign verdict
/// on `λ₁`.
pub fn lowest_eigenvalues(mesh: &CrackMesh, asm: &FormAssembly, opts: &SolveOptions) -> Result<SpectralReport> {
    let preconditioner = match &opts.preconditioner {
        Some(p) => p.clone(),
        None => stiffness_multigrid(asm)?,
    };
    let eig = EigOptions {
        preconditioner,
        tol: opts.tol,
        max_iter: opts.max_iter,
        seed: opts.seed,
        initial: opts.initial.clone(),
        stop_below: opts.sign_only.then_some(-opts.verdict_tol),
        ..EigOptions::default()
    };
    let r = smallest_eigenpairs(&asm.operator(), &asm.m, opts.count, &eig)?;
    let lambda1 = r.eigenvalues[0];
    let verdict = if lambda1 < -opts.verdict_tol {
        NumericVerdict::NegativeEigenvalue { lambda1 }
    } else {
        NumericVerdict::NoNegativeFound { tol: opts.verdict_tol }
    };
    Ok(SpectralReport {
        converged: !r.stopped_early,
        eigenvalues: r.eigenvalues,
        residual_norms: r.residual_norms,
        rect: mesh.rect(),
        h: mesh.h(),
        omega: asm.omega.clone(),
        verdict,
        iterations: r.iterations,
        ground_state: r.eigenvectors.into_iter().next().unwrap_or_default(),
    })
}

/// Multigrid cycle for `K`, reusable across strengths on the same mesh.
pub fn stiffness_multigrid(asm: &FormAssembly) -> Result<Preconditioner> {
    Ok(Preconditioner::Multigrid(Arc::new(Multigrid::new(&asm.k)?)))
}
