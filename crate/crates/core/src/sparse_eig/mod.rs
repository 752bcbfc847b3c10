//! Symmetric sparse linear algebra: CSR storage, conjugate gradients,
//! LOBPCG for the smallest eigenpairs of `Kx = λMx`, and a dense reference
//! eigensolver used as a test oracle.

mod amg;
mod cg;
mod csr;
pub mod dense;
mod lobpcg;

pub use amg::Multigrid;
pub use cg::{cg_solve, cg_solve_with, CgOptions, CgSolution};
pub use csr::{CsrMatrix, TripletBuilder};
pub use lobpcg::{rayleigh_quotient, smallest_eigenpairs, EigOptions, EigResult, Preconditioner};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    num_traits::Float::sqrt(dot(a, a))
}
