//! Crack-mesh finite elements for the form `‖∇u‖² − (ω[u], [u])` on a
//! Dirichlet box, disc-form quadrature and critical-strength bracketing.

mod assemble;
mod critical;
mod disc_form;
mod mesh;
mod spectrum;

use alloc::vec::Vec;

pub use assemble::{assemble, FormAssembly};
pub use critical::{estimate_critical_strength, CriticalBracket, CriticalSample};
pub use disc_form::{evaluate_disc_form, DiscForm, DiscStrength, JumpTestField};
pub use mesh::{CrackMesh, CrackNode, CrackSegment, NodeSide, Rect};
pub use spectrum::{
    lowest_eigenvalues, stiffness_multigrid, NumericVerdict, SolveOptions, SpectralReport, DEFAULT_EIG_TOL, DEFAULT_VERDICT_TOL,
};

use crate::geometry::{Point2, PolylineCurve};
use crate::moebius::Moebius;
use crate::strength::StrengthProfile;
use crate::{Error, Result};

/// A horizontal preimage `Γ` of a curve under `m`, as a crack segment with
/// the pulled-back strength `ω(m(z))·√J_m(z)` tabulated from its left end.
pub fn lft_segment_problem<F>(m: &Moebius, poly_gamma: &PolylineCurve, omega: F) -> Result<(CrackSegment, StrengthProfile)>
where
    F: Fn(Point2) -> f64,
{
    let verts = poly_gamma.vertices();
    let y0 = verts[0].y;
    let tol = 1e-9 * poly_gamma.length().max(y0.abs());
    if verts.iter().any(|v| (v.y - y0).abs() > tol) {
        return Err(Error::invalid("the preimage curve is not a horizontal segment"));
    }
    let increasing = verts.windows(2).all(|w| w[1].x > w[0].x);
    let decreasing = verts.windows(2).all(|w| w[1].x < w[0].x);
    let oriented = match (increasing, decreasing) {
        (true, _) => verts.iter().map(|v| Point2::new(v.x, y0)).collect::<Vec<_>>(),
        (_, true) => verts.iter().rev().map(|v| Point2::new(v.x, y0)).collect(),
        _ => return Err(Error::invalid("the preimage segment folds back on itself")),
    };
    let poly = PolylineCurve::new(oriented)?;
    let profile = m.pullback_strength(&poly, omega)?;
    let segment = CrackSegment::new(poly.first().x, poly.last().x, y0)?;
    Ok((segment, profile))
}
