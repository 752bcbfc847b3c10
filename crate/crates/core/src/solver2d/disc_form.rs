//! Quadrature of `‖∇u‖²_{D_R} − (ω[u], [u])_Λ` for test fields that jump
//! across a monotone curve running from the disc centre to its boundary.
//!
//! Fields live in cut-polar coordinates around the curve origin `x0`: with
//! `t = θ − φ(r)` taken in `(0, 2π)`, the curve sits at `t = 0` (upper face)
//! and `t = 2π` (lower face), and
//!
//! ```text
//! u = c(r) · ( b(x, y) + a(r) s(t) ),   s(t) = 1 − t/2π + Σ d_k sin(k t / 2)
//! ```
//!
//! so `[u] = c(r) a(r)`. `b` is a quadratic background, `a(r) = r·p(r/R)`
//! and `c` is either 1 or the cut-off `(1 − (r/R)²)²`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use crate::geometry::{MonotoneCurve, Point2, PolylineCurve};
use crate::quadrature::GaussLegendre;
use crate::rng::SeededRng;
use crate::solver2d::mesh::NodeSide;
use crate::strength::StrengthProfile;
use crate::{Error, Result};

/// Relative slack when checking that the polyline stays in the disc.
const DISC_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct JumpTestField {
    curve: MonotoneCurve,
    radius: f64,
    /// `c0 + c1 X + c2 Y + c3 X² + c4 XY + c5 Y²` with `(X, Y) = (x − x0)/R`.
    background: [f64; 6],
    /// `p_k` in `a(r) = r Σ p_k (r/R)^k`.
    amplitude: Vec<f64>,
    /// `d_k` for `k = 1, 2, …`.
    modes: Vec<f64>,
    cutoff: bool,
}

/// Strength along the curve for the interface term.
#[derive(Clone, Copy)]
pub enum DiscStrength<'a> {
    /// Against arc length along the polyline.
    Profile(&'a StrengthProfile),
    /// As a function of the distance `r` to the disc centre. Vertices with
    /// zero jump are skipped, so `ω` may blow up at `r = 0`.
    Radial(&'a dyn Fn(f64) -> f64),
}

/// Gradient and interface parts of the disc form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscForm {
    pub gradient: f64,
    pub interface: f64,
}

impl DiscForm {
    pub fn value(&self) -> f64 {
        self.gradient - self.interface
    }

    /// Natural size of the form, `‖∇u‖² + (ω[u], [u])`.
    pub fn scale(&self) -> f64 {
        self.gradient + self.interface
    }
}

impl JumpTestField {
    pub fn new(
        curve: MonotoneCurve,
        radius: f64,
        background: [f64; 6],
        amplitude: Vec<f64>,
        modes: Vec<f64>,
        cutoff: bool,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain { what: "R", value: radius, range: "(0, +inf)" });
        }
        if curve.extent() < radius * (1.0 - DISC_TOL) {
            return Err(Error::invalid("the curve must reach the boundary of the disc"));
        }
        if background.iter().chain(&amplitude).chain(&modes).any(|v| !v.is_finite()) {
            return Err(Error::invalid("test field coefficients must be finite"));
        }
        Ok(JumpTestField { curve, radius, background, amplitude, modes, cutoff })
    }

    /// Seeded random field: background and amplitude coefficients in
    /// `[-1, 1)`, three sine modes of size up to 1/2.
    pub fn random(curve: MonotoneCurve, radius: f64, rng: &mut SeededRng, cutoff: bool) -> Result<Self> {
        let background = core::array::from_fn(|_| rng.symmetric());
        let amplitude = (0..3).map(|_| rng.symmetric()).collect();
        let modes = (0..3).map(|_| 0.5 * rng.symmetric()).collect();
        Self::new(curve, radius, background, amplitude, modes, cutoff)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn curve(&self) -> &MonotoneCurve {
        &self.curve
    }

    fn cut(&self, r: f64) -> (f64, f64) {
        if !self.cutoff {
            return (1.0, 0.0);
        }
        let rho = r / self.radius;
        let q = 1.0 - rho * rho;
        (q * q, -4.0 * rho * q / self.radius)
    }

    fn amp(&self, r: f64) -> (f64, f64) {
        let rho = r / self.radius;
        let (mut p, mut dp) = (0.0, 0.0);
        for (k, &c) in self.amplitude.iter().enumerate().rev() {
            p = p * rho + c;
            dp = dp * rho + (k + 1) as f64 * c;
        }
        (r * p, dp)
    }

    fn profile(&self, t: f64) -> (f64, f64) {
        let mut s = 1.0 - t / (2.0 * PI);
        let mut ds = -1.0 / (2.0 * PI);
        for (k, &d) in self.modes.iter().enumerate() {
            let half = 0.5 * (k + 1) as f64;
            s += d * (half * t).sin();
            ds += d * half * (half * t).cos();
        }
        (s, ds)
    }

    fn background_at(&self, p: Point2) -> (f64, Point2) {
        let o = self.curve.origin();
        let (x, y) = ((p.x - o.x) / self.radius, (p.y - o.y) / self.radius);
        let c = &self.background;
        let v = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
        let g = Point2::new(c[1] + 2.0 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2.0 * c[5] * y);
        (v, g.scale(1.0 / self.radius))
    }

    fn point(&self, r: f64, t: f64) -> (Point2, f64) {
        let theta = t + self.curve.phi().value(r);
        let o = self.curve.origin();
        (Point2::new(o.x + r * theta.cos(), o.y + r * theta.sin()), theta)
    }

    /// Value and gradient at cut-polar coordinates `(r, t)`, `0 < r ≤ R`.
    pub fn eval_polar(&self, r: f64, t: f64) -> (f64, Point2) {
        let (p, theta) = self.point(r, t);
        let (b, gb) = self.background_at(p);
        let (a, da) = self.amp(r);
        let (s, ds) = self.profile(t);
        let (c, dc) = self.cut(r);
        let dphi = self.curve.phi().derivative(r);
        let inner = b + a * s;
        // jump part in the polar frame; a/r stays finite as r → 0
        let a_over_r = if r > 0.0 { a / r } else { self.amplitude.first().copied().unwrap_or(0.0) };
        let g_r = da * s - a * ds * dphi;
        let g_t = a_over_r * ds;
        let (er, et) = (Point2::new(theta.cos(), theta.sin()), Point2::new(-theta.sin(), theta.cos()));
        let grad_inner = gb + er.scale(g_r) + et.scale(g_t);
        let grad = er.scale(dc * inner) + grad_inner.scale(c);
        (c * inner, grad)
    }

    /// `[u]` at distance `r` from the centre.
    pub fn jump(&self, r: f64) -> f64 {
        self.cut(r).0 * self.amp(r).0
    }

    /// Field value at a Cartesian point; `side` picks the face for points
    /// on the curve. Zero outside the disc when the cut-off is on.
    pub fn value(&self, p: Point2, side: NodeSide) -> f64 {
        let o = self.curve.origin();
        let r = p.dist(o);
        if r >= self.radius {
            return if self.cutoff { 0.0 } else { self.eval_far(p) };
        }
        if r == 0.0 {
            return self.cut(0.0).0 * self.background_at(p).0;
        }
        let theta = (p.y - o.y).atan2(p.x - o.x);
        let t = match side {
            NodeSide::Plus => 0.0,
            NodeSide::Minus => 2.0 * PI,
            NodeSide::Regular | NodeSide::Tip => wrap(theta - self.curve.phi().value(r)),
        };
        self.eval_polar(r, t).0
    }

    fn eval_far(&self, p: Point2) -> f64 {
        let o = self.curve.origin();
        let theta = (p.y - o.y).atan2(p.x - o.x);
        let t = wrap(theta - self.curve.phi().value(self.radius));
        self.background_at(p).0 + self.amp(p.dist(o)).0 * self.profile(t).0
    }
}

fn wrap(t: f64) -> f64 {
    num_traits::Euclid::rem_euclid(&t, &(2.0 * PI))
}

/// Evaluates the disc form: Gauss–Legendre on `(r, t) ∈ (0, R) × (0, 2π)`
/// with `quad_n` nodes per direction for the gradient term, trapezoid rule
/// over the polyline vertices for the interface term.
pub fn evaluate_disc_form(
    u: &JumpTestField,
    poly: &PolylineCurve,
    omega: DiscStrength<'_>,
    quad_n: usize,
) -> Result<DiscForm> {
    if quad_n < 2 {
        return Err(Error::Domain { what: "quad_n", value: quad_n as f64, range: "[2, +inf)" });
    }
    let o = u.curve.origin();
    let big_r = u.radius;
    if let Some(v) = poly.vertices().iter().find(|v| v.dist(o) > big_r * (1.0 + DISC_TOL)) {
        return Err(Error::invalid(alloc::format!(
            "polyline leaves the disc of radius {big_r} at ({}, {})",
            v.x,
            v.y
        )));
    }
    let rule = GaussLegendre::new(quad_n);
    let mut gradient = 0.0;
    for (r, wr) in rule.on(0.0, big_r) {
        for (t, wt) in rule.on(0.0, 2.0 * PI) {
            let (_, g) = u.eval_polar(r, t);
            gradient += wr * wt * r * g.dot(g);
        }
    }
    let s = poly.cumulative_length();
    let weight = |k: usize| -> f64 {
        let r = poly.vertices()[k].dist(o);
        let j = u.jump(r.min(big_r));
        if j == 0.0 {
            return 0.0;
        }
        let w = match omega {
            DiscStrength::Profile(p) => p.at(s[k]),
            DiscStrength::Radial(f) => f(r),
        };
        w * j * j
    };
    let mut interface = 0.0;
    let mut prev = weight(0);
    for k in 1..poly.len() {
        let cur = weight(k);
        interface += 0.5 * (s[k] - s[k - 1]) * (prev + cur);
        prev = cur;
    }
    Ok(DiscForm { gradient, interface })
}
