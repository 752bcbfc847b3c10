//! Numerical core for two-dimensional Schrödinger operators with
//! δ′-interactions supported on open planar curves.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; file formats, plotting and the command-line front
//! end live in the `dplab` crate.
//!
//! Layout:
//!
//! * [`geometry`]: monotone curves `x0 + r(cos φ(r), sin φ(r))` and polylines.
//! * [`moebius`]: linear fractional maps, Jacobians, curve and strength transport.
//! * [`loop1d`]: the point δ′-interaction on a loop and on the line.
//! * [`thresholds`]: closed-form non-negativity thresholds and verdicts.
//! * [`sparse_eig`]: CSR matrices, CG, LOBPCG and a dense oracle.
//! * [`solver2d`]: crack meshes, form assembly, disc-form quadrature and
//!   critical-strength bracketing.

#![no_std]
// `num_traits::Float` is only needed without std's inherent float methods
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod geometry;
pub mod loop1d;
pub mod moebius;
pub mod quadrature;
pub mod rng;
pub mod solver2d;
pub mod sparse_eig;
pub mod strength;
pub mod thresholds;

pub use error::{Error, Result};
pub use geometry::{AngularProfile, MonotoneCurve, Point2, PolylineCurve};
pub use moebius::{ExtComplex, Moebius};
pub use strength::StrengthProfile;
