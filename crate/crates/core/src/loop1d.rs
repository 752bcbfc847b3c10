//! Point δ′-interaction on a loop of length `d` and on the full line.
//!
//! The loop operator is `−ψ″` on `(0, d)` with `ψ′(0+) = ψ′(d−) = ω[ψ]`,
//! `[ψ] = ψ(d−) − ψ(0+)`. A negative eigenvalue `−κ²` exists iff the secular
//! function `Θ(κ) = (2ω/κ)(1 − e^{−κd})/(1 + e^{−κd})` reaches one, which
//! happens iff `dω > 1`.
//!
//! The finite-element path discretizes the form
//! `∫ψ′φ′ − ω[ψ][φ]` with P1 elements. The resulting pencil is tridiagonal
//! plus a rank-one endpoint coupling, so eigenvalues are located exactly by
//! inertia counting (Sturm sequence for the tridiagonal part, Haynsworth
//! inertia additivity for the rank-one term) and bisection.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use crate::quadrature::bisect;
use crate::{Error, Result};

/// Largest relative residual accepted for a finite-element eigenpair.
pub const FE_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    pub d: f64,
    pub omega: f64,
}

impl LoopSpec {
    pub fn new(d: f64, omega: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Domain { what: "d", value: d, range: "(0, +inf)" });
        }
        if !omega.is_finite() {
            return Err(Error::Domain { what: "omega", value: omega, range: "finite" });
        }
        Ok(LoopSpec { d, omega })
    }

    /// `Θ_ω(κ)` for `κ > 0`.
    pub fn theta(&self, kappa: f64) -> f64 {
        2.0 * self.omega / kappa * half_tanh(kappa * self.d)
    }

    /// `dω ≤ 1` (with a few ulps of slack so that e.g. `d = 2π`, `ω = 1/(2π)`
    /// counts as the marginal case).
    pub fn is_subcritical(&self) -> bool {
        self.d * self.omega <= 1.0 + 4.0 * f64::EPSILON
    }
}

// f(x) = (1 − e^{−x})/(1 + e^{−x}), accurate for small x.
fn half_tanh(x: f64) -> f64 {
    -(-x).exp_m1() / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Transcendental,
    /// P1 finite elements on `n` cells.
    FiniteElement(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub method: Method,
}

impl Spectrum1D {
    pub fn lowest(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }
}

/// Root `κ` of `secular(κ) = 1` on the bracket `(1e−14·ω, 2ω]`, or `None`
/// when the bracket holds no sign change. The secular function is passed in
/// so that callers can probe perturbed versions of `Θ`.
pub fn secular_root<F: Fn(f64) -> f64>(spec: &LoopSpec, secular: F) -> Option<f64> {
    if spec.omega <= 0.0 {
        return None;
    }
    let lo = 1e-14 * spec.omega;
    let hi = 2.0 * spec.omega;
    let g = |k: f64| secular(k) - 1.0;
    if !(g(lo) > 0.0 && g(hi) <= 0.0) {
        return None;
    }
    // tanh(ωd) rounds to 1 for long loops, leaving the root at 2ω
    if g(hi) == 0.0 {
        return Some(hi);
    }
    bisect(g, lo, hi, 1e-12)
}

/// The negative eigenvalue of the loop model: empty iff `dω ≤ 1`, otherwise
/// the single value `−κ²` with `Θ(κ) = 1`.
pub fn loop_negative_eigenvalues(spec: &LoopSpec) -> Spectrum1D {
    loop_negative_eigenvalues_with(spec, |k| spec.theta(k))
}

/// [`loop_negative_eigenvalues`] with a caller-supplied secular function in
/// place of `Θ`.
pub fn loop_negative_eigenvalues_with<F: Fn(f64) -> f64>(spec: &LoopSpec, secular: F) -> Spectrum1D {
    let eigenvalues = if spec.is_subcritical() {
        Vec::new()
    } else {
        secular_root(spec, secular).map(|k| vec![-k * k]).unwrap_or_default()
    };
    Spectrum1D { eigenvalues, method: Method::Transcendental }
}

/// Lowest eigenvalue `−4ω²` of the full-line point δ′-interaction, `None`
/// when `ω ≤ 0` (no bound state).
pub fn line_delta_prime_eigenvalue(omega: f64) -> Option<f64> {
    (omega > 0.0).then(|| -4.0 * omega * omega)
}

/// Symmetric pencil `(K − ω v vᵀ, M)` with `K`, `M` tridiagonal and
/// `v = e_plus − e_minus`.
#[derive(Debug, Clone)]
pub struct RankOnePencil {
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    m_diag: Vec<f64>,
    m_off: Vec<f64>,
    omega: f64,
    minus: usize,
    plus: usize,
}

impl RankOnePencil {
    pub fn dim(&self) -> usize {
        self.k_diag.len()
    }

    /// P1 discretization of the loop form on `n` uniform cells.
    pub fn loop_fe(spec: &LoopSpec, n: usize) -> Self {
        let h = spec.d / n as f64;
        let nodes = n + 1;
        let mut k_diag = vec![2.0 / h; nodes];
        let mut m_diag = vec![2.0 * h / 3.0; nodes];
        k_diag[0] = 1.0 / h;
        k_diag[n] = 1.0 / h;
        m_diag[0] = h / 3.0;
        m_diag[n] = h / 3.0;
        RankOnePencil {
            k_diag,
            k_off: vec![-1.0 / h; n],
            m_diag,
            m_off: vec![h / 6.0; n],
            omega: spec.omega,
            minus: 0,
            plus: n,
        }
    }

    /// P1 discretization of the line form on `(−W, W)` with Dirichlet ends
    /// and the interaction at `x = 0`, where the node is split into `0−` and
    /// `0+` copies.
    pub fn line_fe(omega: f64, half_width: f64, h: f64) -> Result<Self> {
        let m = (half_width / h).round() as usize;
        if m < 2 || ((m as f64) * h - half_width).abs() > 1e-9 * half_width {
            return Err(Error::invalid("line FE: half_width must be a multiple of h (at least 2h)"));
        }
        // left: x = −W + i h, i = 1..=m (last is 0−); right: x = i h, i = 0..m (first is 0+)
        let nodes = 2 * m;
        let mut k_diag = vec![2.0 / h; nodes];
        let mut m_diag = vec![2.0 * h / 3.0; nodes];
        let mut k_off = vec![-1.0 / h; nodes - 1];
        let mut m_off = vec![h / 6.0; nodes - 1];
        let minus = m - 1;
        let plus = m;
        k_diag[minus] = 1.0 / h;
        k_diag[plus] = 1.0 / h;
        m_diag[minus] = h / 3.0;
        m_diag[plus] = h / 3.0;
        k_off[minus] = 0.0;
        m_off[minus] = 0.0;
        Ok(RankOnePencil { k_diag, k_off, m_diag, m_off, omega, minus, plus })
    }

    // LDLᵀ of K − σM. Returns (#negative pivots, vᵀ(K − σM)⁻¹v).
    fn factor(&self, sigma: f64) -> (usize, f64) {
        let n = self.dim();
        let mut neg = 0;
        let mut d_prev = 0.0;
        let mut y_prev = 0.0;
        let mut quad = 0.0;
        for i in 0..n {
            let t = self.k_diag[i] - sigma * self.m_diag[i];
            let v_i = if i == self.plus {
                1.0
            } else if i == self.minus {
                -1.0
            } else {
                0.0
            };
            let (mut d, y) = if i == 0 {
                (t, v_i)
            } else {
                let e = self.k_off[i - 1] - sigma * self.m_off[i - 1];
                let l = e / d_prev;
                (t - l * e, v_i - l * y_prev)
            };
            if d == 0.0 {
                d = -f64::EPSILON * (t.abs() + f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                neg += 1;
            }
            quad += y * y / d;
            d_prev = d;
            y_prev = y;
        }
        (neg, quad)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let (neg_t, quad) = self.factor(sigma);
        if self.omega == 0.0 {
            return neg_t;
        }
        // Haynsworth: In[[T, v], [vᵀ, 1/ω]] = In(T) + In(1/ω − vᵀT⁻¹v)
        //                                    = In(1/ω) + In(T − ω v vᵀ)
        let schur = 1.0 / self.omega - quad;
        let up = usize::from(schur < 0.0);
        let down = usize::from(self.omega < 0.0);
        (neg_t + up).saturating_sub(down)
    }

    fn lower_bound(&self) -> f64 {
        let n = self.dim();
        let mu = (0..n)
            .map(|i| {
                let left = if i > 0 { self.m_off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.m_off[i].abs() } else { 0.0 };
                self.m_diag[i] - left - right
            })
            .fold(f64::INFINITY, f64::min);
        -2.0 * self.omega.abs() / mu.max(f64::MIN_POSITIVE) - 1.0
    }

    /// Eigenvalue with zero-based index `index`, by bisection on the inertia
    /// count.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let target = index + 1;
        let mut lo = self.lower_bound();
        let mut hi = 1.0;
        while self.count_below(hi) < target {
            hi *= 2.0;
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
            let scale = lo.abs().max(hi.abs());
            if hi - lo <= 2.0 * f64::EPSILON * scale || hi - lo <= 1e-300 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply_k(&self, x: &[f64], out: &mut [f64]) {
        tridiag_mul(&self.k_diag, &self.k_off, x, out);
        let jump = x[self.plus] - x[self.minus];
        out[self.plus] -= self.omega * jump;
        out[self.minus] += self.omega * jump;
    }

    fn apply_m(&self, x: &[f64], out: &mut [f64]) {
        tridiag_mul(&self.m_diag, &self.m_off, x, out);
    }

    // (K − ωvvᵀ − σM)⁻¹ b by Sherman–Morrison on the tridiagonal solve.
    fn shifted_solve(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let diag: Vec<f64> = (0..n).map(|i| self.k_diag[i] - sigma * self.m_diag[i]).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| self.k_off[i] - sigma * self.m_off[i]).collect();
        let tb = tridiag_solve(&diag, &off, b);
        if self.omega == 0.0 {
            return tb;
        }
        let mut v = vec![0.0; n];
        v[self.plus] = 1.0;
        v[self.minus] = -1.0;
        let tv = tridiag_solve(&diag, &off, &v);
        let vt_tb = tb[self.plus] - tb[self.minus];
        let vt_tv = tv[self.plus] - tv[self.minus];
        let coef = self.omega * vt_tb / (1.0 - self.omega * vt_tv);
        tb.iter().zip(&tv).map(|(a, b)| a + coef * b).collect()
    }

    // three steps of shifted inverse iteration just below `lambda`
    fn inverse_vector(&self, lambda: f64) -> Option<Vec<f64>> {
        let n = self.dim();
        let sigma = lambda - 1e-9 * lambda.abs().max(1.0);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let mut mx = vec![0.0; n];
        for _ in 0..3 {
            self.apply_m(&x, &mut mx);
            x = self.shifted_solve(sigma, &mx);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return None;
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        Some(x)
    }

    /// Relative residual `‖(K − λM)x‖ / ((‖K‖ + |λ|‖M‖)‖x‖)` of the vector
    /// produced by three steps of shifted inverse iteration at `lambda`.
    pub fn residual(&self, lambda: f64) -> f64 {
        let Some(x) = self.inverse_vector(lambda) else {
            return f64::INFINITY;
        };
        let n = self.dim();
        let mut kx = vec![0.0; n];
        let mut mx = vec![0.0; n];
        self.apply_k(&x, &mut kx);
        self.apply_m(&x, &mut mx);
        let r = kx
            .iter()
            .zip(&mx)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let k_norm = inf_norm(&self.k_diag, &self.k_off) + 2.0 * self.omega.abs();
        let m_norm = inf_norm(&self.m_diag, &self.m_off);
        r / (k_norm + lambda.abs() * m_norm)
    }

    /// Rayleigh quotient with the numerator summed as row sums plus squared
    /// differences, so that nearly constant vectors lose no digits.
    fn rayleigh(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        for i in 0..n {
            let left = if i > 0 { self.k_off[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.k_off[i] } else { 0.0 };
            num += (self.k_diag[i] + left + right) * x[i] * x[i];
            if i + 1 < n {
                num -= self.k_off[i] * (x[i + 1] - x[i]).powi(2);
            }
        }
        num -= self.omega * (x[self.plus] - x[self.minus]).powi(2);
        let mut mx = vec![0.0; n];
        self.apply_m(x, &mut mx);
        num / x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>()
    }

    /// The `k` smallest eigenvalues, each checked by an inverse-iteration
    /// residual.
    pub fn smallest(&self, k: usize) -> Result<Vec<f64>> {
        let k = k.min(self.dim());
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let lambda = self.eigenvalue(i);
            let res = self.residual(lambda);
            if !(res <= FE_RESIDUAL_TOL) {
                return Err(Error::NoConvergence {
                    method: "inertia bisection",
                    iterations: i,
                    residual: res,
                });
            }
            // bisection on the inertia loses ~ε‖K‖/‖M‖ absolutely; the
            // Rayleigh quotient of the converged vector does not
            let refined = self.inverse_vector(lambda).map(|x| self.rayleigh(&x));
            match refined {
                Some(q) if (q - lambda).abs() <= 1e-6 * lambda.abs().max(1.0) => out.push(q),
                _ => out.push(lambda),
            }
        }
        Ok(out)
    }
}

fn tridiag_mul(diag: &[f64], off: &[f64], x: &[f64], out: &mut [f64]) {
    let n = diag.len();
    for i in 0..n {
        let mut s = diag[i] * x[i];
        if i > 0 {
            s += off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            s += off[i] * x[i + 1];
        }
        out[i] = s;
    }
}

fn inf_norm(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max)
}

// Thomas algorithm (symmetric tridiagonal, no pivoting).
fn tridiag_solve(diag: &[f64], off: &[f64], b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = b.to_vec();
    let mut denom = diag[0];
    if denom == 0.0 {
        denom = f64::EPSILON;
    }
    x[0] /= denom;
    for i in 1..n {
        c[i - 1] = off[i - 1] / denom;
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom == 0.0 {
            denom = f64::EPSILON;
        }
        x[i] = (x[i] - off[i - 1] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// The `k` smallest eigenvalues of the P1 discretization of the loop form on
/// `n ≥ 16` uniform cells.
pub fn loop_fe_spectrum(spec: &LoopSpec, n: usize, k: usize) -> Result<Spectrum1D> {
    if n < 16 {
        return Err(Error::Domain { what: "n", value: n as f64, range: "n >= 16" });
    }
    if k == 0 {
        return Err(Error::Domain { what: "k", value: 0.0, range: "k >= 1" });
    }
    let pencil = RankOnePencil::loop_fe(spec, n);
    Ok(Spectrum1D {
        eigenvalues: pencil.smallest(k)?,
        method: Method::FiniteElement(n),
    })
}

/// The `k` smallest eigenvalues of the truncated full-line problem on
/// `(−W, W)` with Dirichlet ends and mesh width `h`.
pub fn line_fe_spectrum(omega: f64, half_width: f64, h: f64, k: usize) -> Result<Spectrum1D> {
    let pencil = RankOnePencil::line_fe(omega, half_width, h)?;
    let n = pencil.dim();
    Ok(Spectrum1D {
        eigenvalues: pencil.smallest(k)?,
        method: Method::FiniteElement(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    // Independent coding of f(x) = (1 − e^{−x})/(1 + e^{−x}) = tanh(x/2).
    fn f_tanh(x: f64) -> f64 {
        (0.5 * x).tanh()
    }

    #[test]
    fn theta_value() {
        let s = LoopSpec::new(1.0, 1.0).unwrap();
        let expected = 2.0 * (1.0 - (-1f64).exp()) / (1.0 + (-1f64).exp());
        assert_relative_eq!(s.theta(1.0), expected, max_relative = 1e-15);
        assert_relative_eq!(s.theta(1.0), 2.0 * f_tanh(1.0), max_relative = 1e-15);
        assert!((s.theta(1.0) - 0.924234).abs() < 1e-6);
    }

    #[test]
    fn theta_small_kappa_limit() {
        let s = LoopSpec::new(1.7, 0.9).unwrap();
        assert!((s.theta(1e-8) - 1.7 * 0.9).abs() < 1e-6);
    }

    #[test]
    fn theta_zero_strength() {
        let s = LoopSpec::new(2.0, 0.0).unwrap();
        for k in [1e-3, 1.0, 10.0] {
            assert_eq!(s.theta(k), 0.0);
        }
        assert!(loop_negative_eigenvalues(&s).eigenvalues.is_empty());
    }

    #[test]
    fn theta_decreasing_and_below_d_omega() {
        let s = LoopSpec::new(2.5, 0.8).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..2000 {
            let k = i as f64 * 0.005;
            let t = s.theta(k);
            assert!(t < prev);
            assert!(t < s.d * s.omega);
            assert!(t >= 0.0);
            prev = t;
        }
    }

    #[test]
    fn marginal_case_has_no_negative_eigenvalue() {
        let s = LoopSpec::new(2.0 * PI, 1.0 / (2.0 * PI)).unwrap();
        assert!(loop_negative_eigenvalues(&s).eigenvalues.is_empty());
    }

    #[test]
    fn supercritical_root() {
        let s = LoopSpec::new(1.0, 2.0).unwrap();
        let sp = loop_negative_eigenvalues(&s);
        assert_eq!(sp.eigenvalues.len(), 1);
        let kappa = (-sp.eigenvalues[0]).sqrt();
        assert!(kappa > 0.0 && kappa < 4.0);
        assert!((s.theta(kappa) - 1.0).abs() <= 1e-12);
        // κ = 4 tanh(κ/2), checked against the independent coding
        assert!((kappa - 4.0 * f_tanh(kappa)).abs() < 1e-11);
    }

    #[test]
    fn long_loop_approaches_line() {
        let s = LoopSpec::new(50.0, 1.0).unwrap();
        let kappa = (-loop_negative_eigenvalues(&s).eigenvalues[0]).sqrt();
        assert!((kappa - 2.0).abs() < 1e-6);
        assert_eq!(line_delta_prime_eigenvalue(1.0), Some(-4.0));
        assert_eq!(line_delta_prime_eigenvalue(0.5), Some(-1.0));
        assert_eq!(line_delta_prime_eigenvalue(0.0), None);
        assert_eq!(line_delta_prime_eigenvalue(-1.0), None);
    }

    #[test]
    fn root_exists_iff_supercritical() {
        let mut rng = SeededRng::new(41);
        for _ in 0..200 {
            let d = rng.range(0.1, 10.0);
            let omega = rng.range(-1.0, 3.0) / d;
            let s = LoopSpec::new(d, omega).unwrap();
            let n = loop_negative_eigenvalues(&s).eigenvalues.len();
            assert_eq!(n == 1, d * omega > 1.0, "d = {d}, omega = {omega}");
        }
    }

    #[test]
    fn scaling_law() {
        // λ(d, ω) = t²·λ(td, ω/t)
        let s = LoopSpec::new(1.3, 1.9).unwrap();
        let lam = loop_negative_eigenvalues(&s).eigenvalues[0];
        for t in [0.5, 2.0, 3.7] {
            let st = LoopSpec::new(t * s.d, s.omega / t).unwrap();
            let lt = loop_negative_eigenvalues(&st).eigenvalues[0];
            assert_relative_eq!(lam, t * t * lt, max_relative = 1e-10);
        }
    }

    #[test]
    fn fe_subcritical_nonnegative() {
        let s = LoopSpec::new(2.0 * PI, 1.0 / (2.0 * PI)).unwrap();
        let sp = loop_fe_spectrum(&s, 2048, 2).unwrap();
        assert!(sp.eigenvalues[0] >= -1e-8, "{:?}", sp.eigenvalues);
    }

    #[test]
    fn constant_mode_stays_at_zero_on_fine_short_loops() {
        // constants solve the loop problem for every ω
        for omega in [-3.0, 2.0, 20.0] {
            let sp = loop_fe_spectrum(&LoopSpec::new(0.2, omega).unwrap(), 2048, 2).unwrap();
            let zero = if omega * 0.2 > 1.0 { sp.eigenvalues[1] } else { sp.eigenvalues[0] };
            assert!(zero.abs() < 1e-10, "{omega}: {:?}", sp.eigenvalues);
        }
    }

    #[test]
    fn fe_matches_transcendental() {
        let s = LoopSpec::new(1.0, 2.0).unwrap();
        let exact = loop_negative_eigenvalues(&s).eigenvalues[0];
        let fe = loop_fe_spectrum(&s, 4096, 1).unwrap().eigenvalues[0];
        assert_relative_eq!(fe, exact, max_relative = 1e-3);
    }

    #[test]
    fn fe_neumann_spectrum() {
        let d = 2.0 * PI;
        let s = LoopSpec::new(d, 0.0).unwrap();
        let sp = loop_fe_spectrum(&s, 2048, 3).unwrap();
        assert!(sp.eigenvalues[0].abs() < 1e-8);
        assert_relative_eq!(sp.eigenvalues[1], (PI / d).powi(2), max_relative = 1e-3);
        assert_relative_eq!(sp.eigenvalues[2], (2.0 * PI / d).powi(2), max_relative = 1e-3);
    }

    #[test]
    fn fe_converges_at_second_order() {
        let s = LoopSpec::new(1.0, 2.0).unwrap();
        let exact = loop_negative_eigenvalues(&s).eigenvalues[0];
        let ns = [64usize, 128, 256, 512];
        let errs: std::vec::Vec<f64> = ns
            .iter()
            .map(|&n| (loop_fe_spectrum(&s, n, 1).unwrap().eigenvalues[0] - exact).abs())
            .collect();
        // least-squares slope of log(err) against log(n)
        let xs: std::vec::Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let ys: std::vec::Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let mx = xs.iter().sum::<f64>() / 4.0;
        let my = ys.iter().sum::<f64>() / 4.0;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope + 2.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn fe_rejects_small_grids() {
        let s = LoopSpec::new(1.0, 1.0).unwrap();
        assert!(loop_fe_spectrum(&s, 8, 1).is_err());
        assert!(loop_fe_spectrum(&s, 32, 0).is_err());
    }

    #[test]
    fn line_fe_oracle() {
        let sp = line_fe_spectrum(1.0, 20.0, 0.01, 1).unwrap();
        assert!((sp.eigenvalues[0] + 4.0).abs() < 1e-2, "{:?}", sp.eigenvalues);
    }

    #[test]
    fn inertia_count_matches_dense_spectrum() {
        // small loop pencil, compare count with the dense oracle
        use crate::sparse_eig::dense::{generalized_eigenvalues, DenseMatrix};
        let s = LoopSpec::new(1.5, 1.7).unwrap();
        let n = 20;
        let p = RankOnePencil::loop_fe(&s, n);
        let dim = p.dim();
        let mut k = DenseMatrix::zeros(dim);
        let mut m = DenseMatrix::zeros(dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            let mut col = vec![0.0; dim];
            p.apply_k(&e, &mut col);
            for j in 0..dim {
                k.set(j, i, col[j]);
            }
            p.apply_m(&e, &mut col);
            for j in 0..dim {
                m.set(j, i, col[j]);
            }
        }
        let all = generalized_eigenvalues(&k, &m).unwrap();
        for (i, &lam) in all.iter().enumerate().take(6) {
            assert_relative_eq!(p.eigenvalue(i), lam, max_relative = 1e-10, epsilon = 1e-10);
        }
    }
}
