use alloc::vec::Vec;
use core::f64::consts::PI;

use super::assemble::{assemble, FormAssembly};
use super::mesh::{CrackMesh, CrackSegment, Rect};
use super::spectrum::{lowest_eigenvalues, stiffness_multigrid, NumericVerdict, SolveOptions};
use crate::strength::StrengthProfile;
use crate::{Error, Result};

/// Internal bisection runs this many times finer than the requested width.
const REFINE_FACTOR: f64 = 100.0;

/// One solve of the bracketing run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSample {
    pub omega: f64,
    /// Converged `λ₁`, or the certifying Ritz value when `converged` is false.
    pub lambda1: f64,
    pub negative: bool,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalBracket {
    /// `λ₁(omega_lo) ≥ −verdict_tol`.
    pub omega_lo: f64,
    /// `λ₁(omega_hi) < −verdict_tol`.
    pub omega_hi: f64,
    pub estimate: f64,
    pub h: f64,
    /// In the order they were computed.
    pub samples: Vec<CriticalSample>,
}

impl CriticalBracket {
    pub fn width(&self) -> f64 {
        self.omega_hi - self.omega_lo
    }
}

struct Prober<'a> {
    mesh: &'a CrackMesh,
    /// Assembly at unit strength; `B` scales linearly with constant `ω`.
    unit: FormAssembly,
    base: SolveOptions,
    samples: Vec<CriticalSample>,
}

impl Prober<'_> {
    fn negative_at(&mut self, omega: f64) -> Result<bool> {
        let asm = self.unit.with_scaled_strength(omega);
        // no warm start: the y-even ground state does not depend on ω and
        // would converge at once, hiding the odd mode that carries the jump
        let opts = SolveOptions { count: 1, sign_only: true, ..self.base.clone() };
        let rep = lowest_eigenvalues(self.mesh, &asm, &opts)?;
        let negative = matches!(rep.verdict, NumericVerdict::NegativeEigenvalue { .. });
        self.samples.push(CriticalSample {
            omega,
            lambda1: rep.lambda1(),
            negative,
            converged: rep.converged,
            iterations: rep.iterations,
        });
        self.check_monotone()?;
        Ok(negative)
    }

    /// Converged values must not increase with `ω`, and no negative verdict
    /// may sit below a non-negative one.
    fn check_monotone(&self) -> Result<()> {
        let last = self.samples.last().unwrap();
        for s in &self.samples[..self.samples.len() - 1] {
            let (lo, hi) = if s.omega < last.omega { (s, last) } else { (last, s) };
            if lo.omega == hi.omega {
                continue;
            }
            let sign_flip = lo.negative && !hi.negative;
            let slack = self.base.verdict_tol.max(1e-6 * lo.lambda1.abs().max(hi.lambda1.abs()));
            let rising = lo.converged && hi.converged && hi.lambda1 > lo.lambda1 + slack;
            if sign_flip || rising {
                return Err(Error::NonMonotone {
                    omega_lo: lo.omega,
                    lambda_lo: lo.lambda1,
                    omega_hi: hi.omega,
                    lambda_hi: hi.lambda1,
                });
            }
        }
        Ok(())
    }
}

/// Brackets the smallest constant `ω` for which the crack `segment` inside
/// `rect` produces a negative eigenvalue at mesh width `h`.
///
/// The search starts from `[1/(2πL), π/(2L)]` and bisects on the sign of
/// `λ₁` down to `tol_omega / 100`; the returned bracket has width
/// `tol_omega`, is centred on the estimate and has both endpoint signs
/// re-checked.
pub fn estimate_critical_strength(
    rect: Rect,
    segment: CrackSegment,
    h: f64,
    tol_omega: f64,
    opts: &SolveOptions,
) -> Result<CriticalBracket> {
    if !(tol_omega > 0.0 && tol_omega.is_finite()) {
        return Err(Error::Domain { what: "tol_omega", value: tol_omega, range: "(0, +inf)" });
    }
    let mesh = CrackMesh::build(rect, h, segment)?;
    let length = mesh.segment().length();
    let (mut lo, mut hi) = (1.0 / (2.0 * PI * length), PI / (2.0 * length));
    let unit = assemble(&mesh, &StrengthProfile::Constant(1.0))?;
    let mut base = opts.clone();
    if base.preconditioner.is_none() {
        // the stiffness does not depend on ω
        base.preconditioner = Some(stiffness_multigrid(&unit)?);
    }
    let mut probe = Prober { mesh: &mesh, unit, base, samples: Vec::new() };

    if probe.negative_at(lo)? {
        return Err(Error::invalid(
            "λ1 is already negative at the subcritical bound; the mesh is too coarse",
        ));
    }
    if !probe.negative_at(hi)? {
        return Err(Error::invalid(
            "λ1 is not negative at the bound-state strength of the segment; enlarge the box",
        ));
    }
    let inner = tol_omega / REFINE_FACTOR;
    while hi - lo > inner {
        let mid = 0.5 * (lo + hi);
        if probe.negative_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let estimate = 0.5 * (lo + hi);
    let omega_lo = estimate - 0.5 * tol_omega;
    let omega_hi = estimate + 0.5 * tol_omega;
    // endpoints outside the bisection interval follow from monotonicity,
    // but are solved again as a consistency check
    if omega_lo > 0.0 && probe.negative_at(omega_lo)? {
        return Err(inconsistent(&probe, omega_lo));
    }
    if !probe.negative_at(omega_hi)? {
        return Err(inconsistent(&probe, omega_hi));
    }
    Ok(CriticalBracket { omega_lo, omega_hi, estimate, h: mesh.h(), samples: probe.samples })
}

fn inconsistent(probe: &Prober<'_>, omega: f64) -> Error {
    let at = probe.samples.last().unwrap();
    let other = probe
        .samples
        .iter()
        .filter(|s| s.negative != at.negative)
        .min_by(|a, b| (a.omega - omega).abs().total_cmp(&(b.omega - omega).abs()))
        .unwrap_or(at);
    let (lo, hi) = if other.omega < at.omega { (other, at) } else { (at, other) };
    Error::NonMonotone { omega_lo: lo.omega, lambda_lo: lo.lambda1, omega_hi: hi.omega, lambda_hi: hi.lambda1 }
}
