//! Closed-form non-negativity thresholds and the three-valued verdict.
//!
//! For a monotone curve the form stays non-negative as long as
//! `ω(r) ≤ 1/(2πr j(r))` pointwise; for constant strength this gives the
//! threshold `ω* = inf_r 1/(2πr j(r))`. Transport by a linear fractional map
//! divides the threshold of the preimage curve by `sup √J_M` along it. On an
//! interval of length `L`, strengths above `π/(2L)` are known to produce a
//! bound state.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use crate::geometry::{AngularProfile, MonotoneCurve, Point2, PolylineCurve};
use crate::moebius::{Moebius, POLE_TOL};
use crate::quadrature::golden_min;
use crate::{Error, Result};

/// Grid size for the numeric infimum over tabulated profiles.
pub const INF_GRID: usize = 10_000;
/// Relative tolerance of the golden-section refinements.
pub const REFINE_RTOL: f64 = 1e-10;
/// Points sampled for the tabulated `pointwise_bound` table of a report.
pub const REPORT_SAMPLES: usize = 64;

/// `1/(2πr j(r))` for `0 < r < R`.
pub fn pointwise_bound(curve: &MonotoneCurve, r: f64) -> Result<f64> {
    let j = curve.arc_element(r)?;
    Ok(1.0 / (2.0 * PI * r * j))
}

fn bound_unchecked(curve: &MonotoneCurve, r: f64) -> f64 {
    1.0 / (2.0 * PI * r * curve.arc_element_unchecked(r))
}

/// `ω*(Λ) = inf_{0<r<R} 1/(2πr j(r))` for a bounded monotone curve.
///
/// Constant and linear profiles have a bound that decreases in `r`, so the
/// infimum is the limit at `r = R`. Tabulated profiles are scanned on a grid
/// (log-spaced near zero, uniform elsewhere) and every local minimum is
/// refined by golden-section search.
pub fn omega_star(curve: &MonotoneCurve) -> Result<f64> {
    if !curve.is_bounded() {
        return Err(Error::invalid(
            "omega_star needs a bounded curve (the infimum vanishes for R = +inf)",
        ));
    }
    let big_r = curve.extent();
    match curve.phi() {
        AngularProfile::Constant(_) | AngularProfile::Linear { .. } => Ok(bound_unchecked(curve, big_r)),
        AngularProfile::Tabulated(_) => Ok(numeric_infimum(curve)),
    }
}

fn scan_grid(big_r: f64) -> Vec<f64> {
    // 10% of the points log-spaced on (1e-6 R, 0.01 R], the rest uniform on
    // (0.01 R, R]
    let n_log = INF_GRID / 10;
    let n_uni = INF_GRID - n_log;
    let mut grid = Vec::with_capacity(INF_GRID);
    let (a, b) = ((1e-6f64).ln(), (0.01f64).ln());
    for i in 0..n_log {
        let t = i as f64 / n_log as f64;
        grid.push(big_r * (a + t * (b - a)).exp());
    }
    for i in 1..=n_uni {
        grid.push(big_r * (0.01 + 0.99 * i as f64 / n_uni as f64));
    }
    grid
}

fn numeric_infimum(curve: &MonotoneCurve) -> f64 {
    let grid = scan_grid(curve.extent());
    let vals: Vec<f64> = grid.iter().map(|&r| bound_unchecked(curve, r)).collect();
    let mut best = vals[vals.len() - 1];
    for i in 1..grid.len() - 1 {
        if vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] {
            let (_, v) = golden_min(|r| bound_unchecked(curve, r), grid[i - 1], grid[i + 1], REFINE_RTOL);
            best = best.min(v).min(vals[i]);
        }
    }
    best
}

/// `sup √J_M` over a polyline: dense vertex scan followed by golden-section
/// refinement on the two chords adjacent to the best vertex.
pub fn sup_sqrt_jacobian(m: &Moebius, poly: &PolylineCurve) -> Result<f64> {
    let verts = poly.vertices();
    let sj = |p: Point2| -> Result<f64> {
        let z = Complex64::new(p.x, p.y);
        if let Some(pole) = m.pole() {
            let distance = (z - pole).norm();
            if distance <= POLE_TOL {
                return Err(Error::Pole { x: p.x, y: p.y, distance });
            }
        }
        m.sqrt_jacobian(z)
    };
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, &v) in verts.iter().enumerate() {
        let s = sj(v)?;
        if s > best.0 {
            best = (s, k);
        }
    }
    let k = best.1;
    let mut sup = best.0;
    for (a, b) in [(k.wrapping_sub(1), k), (k, k + 1)] {
        if a >= verts.len() || b >= verts.len() {
            continue;
        }
        let (pa, pb) = (verts[a], verts[b]);
        let along = |t: f64| pa + (pb - pa).scale(t);
        let (_, neg) = golden_min(
            |t| sj(along(t)).map(|v| -v).unwrap_or(f64::INFINITY),
            0.0,
            1.0,
            REFINE_RTOL,
        );
        sup = sup.max(-neg);
    }
    Ok(sup)
}

/// `ω*(Γ) / sup_Γ √J_M`.
pub fn lft_threshold(gamma_star: f64, m: &Moebius, poly_gamma: &PolylineCurve) -> Result<f64> {
    Ok(gamma_star / sup_sqrt_jacobian(m, poly_gamma)?)
}

/// Strength above which an interval of length `L` carries a bound state.
pub fn interval_bound_state_threshold(length: f64) -> f64 {
    PI / (2.0 * length)
}

/// Ground state `π²/L² − 4ω²` of the strip `(0, L) × ℝ` with Dirichlet
/// sides and a full-line δ′-interaction across it.
pub fn strip_ground_state(length: f64, omega: f64) -> f64 {
    PI * PI / (length * length) - 4.0 * omega * omega
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Direct,
    ViaLft { sup_sqrt_jacobian: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    /// `(r, 1/(2πr j(r)))` samples on the (preimage) curve.
    pub pointwise_bound: Vec<(f64, f64)>,
    pub omega_star: f64,
    pub provenance: Provenance,
}

/// Curves the classifier knows how to handle.
#[derive(Debug, Clone)]
pub enum CurveDescriptor {
    Interval { length: f64 },
    Monotone(MonotoneCurve),
    /// `Λ = M(Γ)` with `Γ` monotone; `samples` interior points are used for
    /// the supremum of `√J_M` along `Γ`.
    LftOfMonotone { gamma: MonotoneCurve, m: Moebius, samples: usize },
}

impl CurveDescriptor {
    fn base_curve(&self) -> Result<MonotoneCurve> {
        match self {
            CurveDescriptor::Interval { length } => {
                if !(*length > 0.0) {
                    return Err(Error::Domain { what: "L", value: *length, range: "(0, +inf)" });
                }
                MonotoneCurve::interval(Point2::ORIGIN, *length, 0.0)
            }
            CurveDescriptor::Monotone(c) => Ok(c.clone()),
            CurveDescriptor::LftOfMonotone { gamma, .. } => Ok(gamma.clone()),
        }
    }

    /// Threshold with its pointwise-bound table and provenance.
    pub fn threshold_report(&self) -> Result<ThresholdReport> {
        let base = self.base_curve()?;
        let star = omega_star(&base)?;
        let big_r = base.extent();
        let pointwise_bound = (1..=REPORT_SAMPLES)
            .map(|k| {
                let r = big_r * k as f64 / (REPORT_SAMPLES + 1) as f64;
                (r, bound_unchecked(&base, r))
            })
            .collect();
        match self {
            CurveDescriptor::LftOfMonotone { m, samples, .. } => {
                let poly = base.sample_polyline((*samples).max(2), None)?;
                let sup = sup_sqrt_jacobian(m, &poly)?;
                Ok(ThresholdReport {
                    pointwise_bound,
                    omega_star: star / sup,
                    provenance: Provenance::ViaLft { sup_sqrt_jacobian: sup },
                })
            }
            _ => Ok(ThresholdReport { pointwise_bound, omega_star: star, provenance: Provenance::Direct }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictTag {
    ProvablyNonnegative,
    BoundStateExists,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub tag: VerdictTag,
    /// Threshold that decided the verdict.
    pub witness: Option<f64>,
}

/// Verdict for a constant strength `omega`.
pub fn classify(curve: &CurveDescriptor, omega: f64) -> Result<Verdict> {
    let star = curve.threshold_report()?.omega_star;
    if omega <= star {
        return Ok(Verdict { tag: VerdictTag::ProvablyNonnegative, witness: Some(star) });
    }
    if let CurveDescriptor::Interval { length } = curve {
        let upper = interval_bound_state_threshold(*length);
        if omega > upper {
            return Ok(Verdict { tag: VerdictTag::BoundStateExists, witness: Some(upper) });
        }
    }
    Ok(Verdict { tag: VerdictTag::Unknown, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TabulatedPhi;
    use approx::assert_relative_eq;
    use std::vec;

    fn interval(l: f64) -> MonotoneCurve {
        MonotoneCurve::interval(Point2::ORIGIN, l, 0.0).unwrap()
    }

    #[test]
    fn pointwise_values() {
        assert_relative_eq!(pointwise_bound(&interval(1.0), 0.5).unwrap(), 1.0 / PI, max_relative = 1e-15);
        let spiral = MonotoneCurve::spiral(1.0, 0.0, 10.0).unwrap();
        let b1 = pointwise_bound(&spiral, 1.0).unwrap();
        assert_relative_eq!(b1, 1.0 / (2.0 * PI * 2f64.sqrt()), max_relative = 1e-15);
        assert!((b1 - 0.11254).abs() < 1e-5);
        assert_relative_eq!(
            pointwise_bound(&spiral, 2.0).unwrap(),
            1.0 / (4.0 * PI * 5f64.sqrt()),
            max_relative = 1e-15
        );
        assert!(pointwise_bound(&spiral, 0.0).is_err());
    }

    #[test]
    fn omega_star_closed_forms() {
        assert_relative_eq!(omega_star(&interval(1.0)).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(omega_star(&interval(2.0)).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-15);
        let spiral = MonotoneCurve::spiral(1.0, 0.0, 1.0).unwrap();
        let star = omega_star(&spiral).unwrap();
        assert_relative_eq!(star, 1.0 / (2.0 * PI * 2f64.sqrt()), max_relative = 1e-15);
        // brute-force grid search agrees
        let grid_min = (1..100_000)
            .map(|i| pointwise_bound(&spiral, i as f64 / 100_000.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(grid_min >= star && grid_min - star < 1e-5);
        assert!(omega_star(&MonotoneCurve::spiral(1.0, 0.0, f64::INFINITY).unwrap()).is_err());
    }

    #[test]
    fn omega_star_tabulated_matches_closed_form() {
        let n = 2000;
        let radii: Vec<f64> = (1..=n).map(|k| k as f64 / (n + 1) as f64).collect();
        let vals = radii.clone();
        let ders = vec![1.0; n];
        let phi = AngularProfile::Tabulated(TabulatedPhi::new(radii, vals, ders).unwrap());
        let c = MonotoneCurve::new(Point2::ORIGIN, 1.0, phi).unwrap();
        assert_relative_eq!(omega_star(&c).unwrap(), 1.0 / (2.0 * PI * 2f64.sqrt()), max_relative = 1e-12);
    }

    #[test]
    fn omega_star_tabulated_interior_minimum() {
        // φ′ peaks in the middle so the bound has an interior minimum
        let n = 400;
        let radii: Vec<f64> = (1..=n).map(|k| 2.0 * k as f64 / (n + 1) as f64).collect();
        let ders: Vec<f64> = radii.iter().map(|&r| 30.0 * (-(r - 1.0) * (r - 1.0) * 20.0).exp()).collect();
        let vals = vec![0.0; n];
        let phi = AngularProfile::Tabulated(TabulatedPhi::new(radii, vals, ders).unwrap());
        let c = MonotoneCurve::new(Point2::ORIGIN, 2.0, phi).unwrap();
        let star = omega_star(&c).unwrap();
        let brute = (1..200_000)
            .map(|i| bound_unchecked(&c, 2.0 * i as f64 / 200_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!(star <= brute + 1e-12);
        assert_relative_eq!(star, brute, max_relative = 1e-6);
        assert!(star < bound_unchecked(&c, 2.0));
    }

    #[test]
    fn scaling_law() {
        let spiral = MonotoneCurve::spiral(1.3, 0.2, 1.5).unwrap();
        let star = omega_star(&spiral).unwrap();
        for t in [0.25, 3.0] {
            // tΛ has φ_t(r) = φ(r/t)
            let scaled = MonotoneCurve::spiral(1.3 / t, 0.2, 1.5 * t).unwrap();
            assert_relative_eq!(omega_star(&scaled).unwrap(), star / t, max_relative = 1e-10);
        }
    }

    #[test]
    fn pointwise_dominates_infimum() {
        let spiral = MonotoneCurve::spiral(2.0, 0.0, 1.0).unwrap();
        let star = omega_star(&spiral).unwrap();
        for i in 1..1000 {
            assert!(pointwise_bound(&spiral, i as f64 / 1000.0).unwrap() >= star);
        }
    }

    #[test]
    fn lft_threshold_example() {
        for (radius, eps) in [(1.0, PI / 2.0), (2.0, PI / 2.0), (1.0, PI / 3.0)] {
            let arc = PolylineCurve::circular_arc(radius, eps, 1001).unwrap();
            let m = Moebius::inversion();
            let gamma = m.inverse().map_polyline(&arc).unwrap();
            let gcurve = MonotoneCurve::from_polyline(&gamma, gamma.first()).unwrap();
            let gstar = omega_star(&gcurve).unwrap();
            assert_relative_eq!(gstar, radius / (2.0 * PI / (eps / 2.0).tan()), max_relative = 1e-10);
            let sup = sup_sqrt_jacobian(&m, &gamma).unwrap();
            assert!((sup - 4.0 * radius * radius).abs() < 1e-6);
            let w = lft_threshold(gstar, &m, &gamma).unwrap();
            assert_relative_eq!(w, (eps / 2.0).tan() / (8.0 * PI * radius), max_relative = 1e-6);
        }
        let seg = PolylineCurve::new(vec![Point2::ORIGIN, Point2::new(1.0, 0.0)]).unwrap();
        assert_eq!(lft_threshold(0.3, &Moebius::identity(), &seg).unwrap(), 0.3);
    }

    #[test]
    fn interval_thresholds() {
        assert_relative_eq!(interval_bound_state_threshold(1.0), PI / 2.0);
        assert_relative_eq!(interval_bound_state_threshold(2.0), PI / 4.0);
        let mut prev = f64::INFINITY;
        for l in [0.5, 1.0, 2.0, 10.0, 1e3] {
            let t = interval_bound_state_threshold(l);
            assert!(t < prev);
            assert!(omega_star(&interval(l)).unwrap() < t);
            prev = t;
        }
        assert!((strip_ground_state(1.0, 2.0) - (PI * PI - 16.0)).abs() < 1e-14);
        assert_eq!(strip_ground_state(1.0, PI / 2.0), 0.0);
        assert_relative_eq!(strip_ground_state(2.0, 0.0), PI * PI / 4.0);
    }

    #[test]
    fn classify_interval() {
        let c = CurveDescriptor::Interval { length: 1.0 };
        assert_eq!(classify(&c, 0.1).unwrap().tag, VerdictTag::ProvablyNonnegative);
        assert_eq!(classify(&c, 2.0).unwrap().tag, VerdictTag::BoundStateExists);
        assert_eq!(classify(&c, 1.0).unwrap().tag, VerdictTag::Unknown);
        assert_eq!(classify(&c, -3.0).unwrap().tag, VerdictTag::ProvablyNonnegative);
        // monotone in ω
        let mut seen_bound = false;
        for i in 0..400 {
            let tag = classify(&c, -1.0 + 0.01 * i as f64).unwrap().tag;
            if tag == VerdictTag::BoundStateExists {
                seen_bound = true;
            }
            if seen_bound {
                assert_eq!(tag, VerdictTag::BoundStateExists);
            }
        }
    }

    #[test]
    fn classify_never_claims_bound_state_off_interval() {
        let spiral = CurveDescriptor::Monotone(MonotoneCurve::spiral(1.0, 0.0, 1.0).unwrap());
        assert_eq!(classify(&spiral, 100.0).unwrap().tag, VerdictTag::Unknown);
        assert_eq!(classify(&spiral, 0.1).unwrap().tag, VerdictTag::ProvablyNonnegative);
    }

    #[test]
    fn lft_descriptor_report() {
        let gamma = MonotoneCurve::interval(Point2::new(0.5, -0.5), 1.0, PI).unwrap();
        let d = CurveDescriptor::LftOfMonotone { gamma, m: Moebius::inversion(), samples: 1001 };
        let rep = d.threshold_report().unwrap();
        assert_relative_eq!(rep.omega_star, 1.0 / (8.0 * PI), max_relative = 1e-6);
        match rep.provenance {
            Provenance::ViaLft { sup_sqrt_jacobian } => assert!((sup_sqrt_jacobian - 4.0).abs() < 1e-6),
            Provenance::Direct => panic!("expected LFT provenance"),
        }
    }
}
