//! Linear fractional transformations `z ↦ (az + b)/(cz + d)` on the extended
//! complex plane, their Jacobians, and transport of curves and strengths.

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::geometry::{Point2, PolylineCurve};
use crate::strength::StrengthProfile;
use crate::{Error, Result};

/// Vertices closer than this to the pole are rejected by the transport maps.
pub const POLE_TOL: f64 = 1e-9;

/// Relative floor on `|ad − bc|` after normalization.
pub const DET_TOL: f64 = 1e-14;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn new(re: f64, im: f64) -> Self {
        ExtComplex::Finite(Complex64::new(re, im))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl From<Point2> for ExtComplex {
    fn from(p: Point2) -> Self {
        ExtComplex::new(p.x, p.y)
    }
}

fn to_point(z: Complex64) -> Point2 {
    Point2::new(z.re, z.im)
}

fn to_complex(p: Point2) -> Complex64 {
    Complex64::new(p.x, p.y)
}

/// Linear fractional transformation with coefficients normalized so that the
/// largest has modulus one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid("LFT coefficients must be finite and not all zero"));
        }
        let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
        if (a * d - b * c).norm() <= DET_TOL {
            return Err(Error::invalid("LFT is degenerate: ad - bc = 0"));
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::zero();
        Moebius { a: one, b: zero, c: zero, d: one }
    }

    /// `z ↦ 1/z`.
    pub fn inversion() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::zero();
        Moebius { a: zero, b: one, c: one, d: zero }
    }

    /// `z ↦ k z + t`.
    pub fn affine(k: Complex64, t: Complex64) -> Result<Self> {
        Moebius::new(k, t, Complex64::zero(), Complex64::new(1.0, 0.0))
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// `M⁻¹(∞) = −d/c`, or `None` when `c = 0` (then the pole is `∞`).
    pub fn pole(&self) -> Option<Complex64> {
        if self.c.is_zero() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// `M(∞)`.
    pub fn image_of_infinity(&self) -> ExtComplex {
        if self.c.is_zero() {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(self.a / self.c)
        }
    }

    /// Evaluation with the two-case definition on the Riemann sphere.
    pub fn apply(&self, z: ExtComplex) -> ExtComplex {
        if self.c.is_zero() {
            return match z {
                ExtComplex::Infinity => ExtComplex::Infinity,
                ExtComplex::Finite(z) => ExtComplex::Finite((self.a / self.d) * z + self.b / self.d),
            };
        }
        match z {
            ExtComplex::Infinity => ExtComplex::Finite(self.a / self.c),
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den.is_zero() {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn inverse(&self) -> Moebius {
        Moebius::new(self.d, -self.b, -self.c, self.a).expect("inverse of a valid LFT is valid")
    }

    /// `self ∘ inner`, i.e. `z ↦ self(inner(z))`.
    pub fn compose(&self, inner: &Moebius) -> Moebius {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (inner.a, inner.b, inner.c, inner.d);
        Moebius::new(
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        )
        .expect("composition of valid LFTs is valid")
    }

    /// Holomorphic derivative `M′(z) = (ad − bc)/(cz + d)²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z, 0.0)?;
        let den = self.c * z + self.d;
        Ok(self.determinant() / (den * den))
    }

    /// Area Jacobian `J_M(z) = |M′(z)|² = |ad − bc|²/|cz + d|⁴`.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        self.check_pole(z, 0.0)?;
        let den = (self.c * z + self.d).norm_sqr();
        Ok(self.determinant().norm_sqr() / (den * den))
    }

    pub fn sqrt_jacobian(&self, z: Complex64) -> Result<f64> {
        self.check_pole(z, 0.0)?;
        Ok(self.determinant().norm() / (self.c * z + self.d).norm_sqr())
    }

    fn check_pole(&self, z: Complex64, tol: f64) -> Result<()> {
        if let Some(p) = self.pole() {
            let distance = (z - p).norm();
            if distance <= tol || (self.c * z + self.d).is_zero() {
                return Err(Error::Pole { x: z.re, y: z.im, distance });
            }
        }
        Ok(())
    }

    /// Finite image of a finite point that is at least [`POLE_TOL`] away from
    /// the pole.
    pub fn map_point(&self, p: Point2) -> Result<Point2> {
        let z = to_complex(p);
        self.check_pole(z, POLE_TOL)?;
        match self.apply(ExtComplex::Finite(z)) {
            ExtComplex::Finite(w) => Ok(to_point(w)),
            ExtComplex::Infinity => Err(Error::Pole { x: p.x, y: p.y, distance: 0.0 }),
        }
    }

    /// Vertex-wise image of a polyline.
    pub fn map_polyline(&self, poly: &PolylineCurve) -> Result<PolylineCurve> {
        let verts = poly
            .vertices()
            .iter()
            .map(|&v| self.map_point(v))
            .collect::<Result<Vec<_>>>()?;
        PolylineCurve::new(verts)
    }

    /// Strength on `Γ` induced by `ω` on `Λ = M(Γ)`:
    /// `ω̃(γ_k) = ω(M(γ_k)) √J_M(γ_k)` at every vertex, tabulated against the
    /// arc length of `Γ`.
    pub fn pullback_strength<F>(&self, poly_gamma: &PolylineCurve, omega: F) -> Result<StrengthProfile>
    where
        F: Fn(Point2) -> f64,
    {
        let mut values = Vec::with_capacity(poly_gamma.len());
        for &g in poly_gamma.vertices() {
            let z = to_complex(g);
            self.check_pole(z, POLE_TOL)?;
            let lam = self.map_point(g)?;
            values.push(omega(lam) * self.sqrt_jacobian(z)?);
        }
        StrengthProfile::tabulated(poly_gamma.cumulative_length().to_vec(), values)
    }

    /// Residual `| |∇(u∘M)(z)|² − |∇u(M(z))|² J_M(z) |` with both gradients
    /// taken by central differences of step `h`.
    pub fn gradient_identity_residual<U>(&self, u: U, z: Point2, h: f64) -> Result<f64>
    where
        U: Fn(f64, f64) -> f64,
    {
        let zc = to_complex(z);
        self.check_pole(zc, POLE_TOL)?;
        let v = |x: f64, y: f64| -> Result<f64> {
            let w = self.map_point(Point2::new(x, y))?;
            Ok(u(w.x, w.y))
        };
        let vx = (v(z.x + h, z.y)? - v(z.x - h, z.y)?) / (2.0 * h);
        let vy = (v(z.x, z.y + h)? - v(z.x, z.y - h)?) / (2.0 * h);
        let w = self.map_point(z)?;
        let ux = (u(w.x + h, w.y) - u(w.x - h, w.y)) / (2.0 * h);
        let uy = (u(w.x, w.y + h) - u(w.x, w.y - h)) / (2.0 * h);
        let lhs = vx * vx + vy * vy;
        let rhs = (ux * ux + uy * uy) * self.jacobian(zc)?;
        Ok((lhs - rhs).abs())
    }
}

/// Trapezoidal `∑ ω |jump|² Δs` along a polyline with data given per vertex.
pub fn weighted_jump_integral(poly: &PolylineCurve, omega: &[f64], jump: &[f64]) -> Result<f64> {
    if omega.len() != poly.len() || jump.len() != poly.len() {
        return Err(Error::DimensionMismatch {
            expected: poly.len(),
            found: omega.len().min(jump.len()),
        });
    }
    let s = poly.cumulative_length();
    Ok((0..poly.len() - 1)
        .map(|k| {
            let g0 = omega[k] * jump[k] * jump[k];
            let g1 = omega[k + 1] * jump[k + 1] * jump[k + 1];
            0.5 * (s[k + 1] - s[k]) * (g0 + g1)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;
    use std::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: ExtComplex, b: ExtComplex, tol: f64) -> bool {
        match (a, b) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => true,
            (ExtComplex::Finite(x), ExtComplex::Finite(y)) => (x - y).norm() <= tol * (1.0 + y.norm()),
            _ => false,
        }
    }

    fn random_lft(rng: &mut SeededRng) -> Moebius {
        loop {
            let mut z = || c(rng.symmetric(), rng.symmetric());
            if let Ok(m) = Moebius::new(z(), z(), z(), z()) {
                if m.determinant().norm() > 0.1 {
                    return m;
                }
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let m = Moebius::inversion();
        assert!(close(m.apply(ExtComplex::new(1.0, 1.0)), ExtComplex::new(0.5, -0.5), 1e-15));
        assert!(close(m.apply(ExtComplex::Infinity), ExtComplex::new(0.0, 0.0), 0.0));
        assert!(m.apply(ExtComplex::new(0.0, 0.0)).is_infinite());
    }

    #[test]
    fn identity_and_affine_at_infinity() {
        let id = Moebius::identity();
        let z = ExtComplex::new(3.5, -2.0);
        assert_eq!(id.apply(z), z);
        assert!(id.apply(ExtComplex::Infinity).is_infinite());
        let m = Moebius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!(close(m.apply(ExtComplex::Infinity), ExtComplex::new(2.0, 0.0), 1e-15));
        assert!(m.apply(ExtComplex::new(-3.0, 0.0)).is_infinite());
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Moebius::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
        assert!(Moebius::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn inversion_is_involution() {
        let m = Moebius::inversion();
        let inv = m.inverse();
        let mut rng = SeededRng::new(11);
        for _ in 0..50 {
            let z = ExtComplex::new(rng.symmetric(), rng.symmetric());
            assert!(close(inv.apply(z), m.apply(z), 1e-15));
        }
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let mut rng = SeededRng::new(3);
        let m = random_lft(&mut rng);
        let id = m.compose(&m.inverse());
        for _ in 0..100 {
            let z = ExtComplex::new(3.0 * rng.symmetric(), 3.0 * rng.symmetric());
            assert!(close(id.apply(z), z, 1e-10));
        }
    }

    #[test]
    fn compose_order_is_outer_after_inner() {
        let double = Moebius::affine(c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        let shift = Moebius::affine(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        // double(shift(3)) = 8, shift(double(3)) = 7
        let a = double.compose(&shift).apply(ExtComplex::new(3.0, 0.0));
        let b = shift.compose(&double).apply(ExtComplex::new(3.0, 0.0));
        assert!(close(a, ExtComplex::new(8.0, 0.0), 1e-15));
        assert!(close(b, ExtComplex::new(7.0, 0.0), 1e-15));
    }

    #[test]
    fn group_laws() {
        let mut rng = SeededRng::new(5);
        for _ in 0..20 {
            let (m1, m2, m3) = (random_lft(&mut rng), random_lft(&mut rng), random_lft(&mut rng));
            let left = m1.compose(&m2).compose(&m3);
            let right = m1.compose(&m2.compose(&m3));
            let twice = m1.inverse().inverse();
            for _ in 0..3 {
                let z = ExtComplex::new(rng.symmetric(), rng.symmetric());
                assert!(close(left.apply(z), right.apply(z), 1e-10));
                assert!(close(twice.apply(z), m1.apply(z), 1e-10));
            }
        }
    }

    #[test]
    fn normalization_keeps_unit_scale() {
        let m = Moebius::new(c(1e6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2e6, 0.0)).unwrap();
        let scale = m.coefficients().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_relative_eq!(scale, 1.0, max_relative = 1e-15);
        let comp = m.compose(&m).compose(&m);
        let scale = comp.coefficients().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_relative_eq!(scale, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn jacobian_of_inversion() {
        let m = Moebius::inversion();
        assert_relative_eq!(m.jacobian(c(1.0, 1.0)).unwrap(), 0.25, max_relative = 1e-15);
        assert!(matches!(m.jacobian(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert_eq!(Moebius::identity().jacobian(c(-4.0, 2.0)).unwrap(), 1.0);
    }

    #[test]
    fn jacobian_matches_finite_differences_of_real_part() {
        // J = (∂x M1)² + (∂y M1)² by central differences
        let mut rng = SeededRng::new(17);
        let m = random_lft(&mut rng);
        let h = 1e-5;
        let re = |x: f64, y: f64| m.apply(ExtComplex::new(x, y)).finite().unwrap().re;
        let mut checked = 0;
        while checked < 50 {
            let (x, y) = (2.0 * rng.symmetric(), 2.0 * rng.symmetric());
            if (c(x, y) - m.pole().unwrap()).norm() < 0.3 {
                continue;
            }
            let dx = (re(x + h, y) - re(x - h, y)) / (2.0 * h);
            let dy = (re(x, y + h) - re(x, y - h)) / (2.0 * h);
            let fd = dx * dx + dy * dy;
            let exact = m.jacobian(c(x, y)).unwrap();
            assert_relative_eq!(fd, exact, max_relative = 1e-6);
            checked += 1;
        }
    }

    #[test]
    fn example_arc_maps_to_segment() {
        let arc = PolylineCurve::circular_arc(1.0, PI / 2.0, 201).unwrap();
        let gamma = Moebius::inversion().map_polyline(&arc).unwrap();
        for v in gamma.vertices() {
            assert!((v.y + 0.5).abs() < 1e-12);
        }
        assert!((gamma.first().x - 0.5).abs() < 1e-14);
        assert!((gamma.last().x + 0.5).abs() < 1e-14);
    }

    #[test]
    fn map_polyline_round_trip_and_identity() {
        let arc = PolylineCurve::circular_arc(2.0, PI / 3.0, 301).unwrap();
        let mut rng = SeededRng::new(23);
        let m = Moebius::new(c(1.0, 0.5), c(0.2, 0.0), c(0.3, -0.1), c(1.0, 0.0)).unwrap();
        let _ = &mut rng;
        let back = m.inverse().map_polyline(&m.map_polyline(&arc).unwrap()).unwrap();
        for (a, b) in arc.vertices().iter().zip(back.vertices()) {
            assert!(a.dist(*b) < 1e-9);
        }
        let same = Moebius::identity().map_polyline(&arc).unwrap();
        assert_eq!(same.vertices(), arc.vertices());
    }

    #[test]
    fn map_polyline_rejects_pole() {
        let poly = PolylineCurve::new(vec![Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        assert!(Moebius::inversion().map_polyline(&poly).is_ok());
        let through = PolylineCurve::new(vec![
            Point2::new(-1.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(Moebius::inversion().map_polyline(&through), Err(Error::Pole { .. })));
    }

    #[test]
    fn pullback_identity_and_scaling() {
        let poly = PolylineCurve::new((0..11).map(|k| Point2::new(k as f64 * 0.1, 0.3)).collect()).unwrap();
        let id = Moebius::identity().pullback_strength(&poly, |_| 0.7).unwrap();
        for s in [0.0, 0.33, 1.0] {
            assert_relative_eq!(id.at(s), 0.7, max_relative = 1e-15);
        }
        let double = Moebius::affine(c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        let scaled = double.pullback_strength(&poly, |_| 0.7).unwrap();
        for s in [0.0, 0.33, 1.0] {
            assert_relative_eq!(scaled.at(s), 1.4, max_relative = 1e-15);
        }
    }

    #[test]
    fn pullback_on_example_segment() {
        let arc = PolylineCurve::circular_arc(1.0, PI / 2.0, 401).unwrap();
        let m = Moebius::inversion();
        let gamma = m.inverse().map_polyline(&arc).unwrap();
        let w = 0.3;
        let prof = m.pullback_strength(&gamma, |_| w).unwrap();
        let StrengthProfile::Tabulated { values, .. } = &prof else { panic!() };
        for (g, v) in gamma.vertices().iter().zip(values) {
            assert_relative_eq!(*v, w / (g.x * g.x + g.y * g.y), max_relative = 1e-13);
        }
        // centre vertex is (0, -1/2): √J = 4
        assert_relative_eq!(values[200], 4.0 * w, max_relative = 1e-13);
    }

    #[test]
    fn gradient_identity_examples() {
        let id = Moebius::identity();
        let r = id.gradient_identity_residual(|x, _| x, Point2::new(0.3, 0.4), 1e-4).unwrap();
        assert!(r < 1e-12);
        let m = Moebius::inversion();
        let mut rng = SeededRng::new(29);
        for _ in 0..20 {
            let z = Point2::new(rng.range(0.5, 2.0), rng.range(0.5, 2.0));
            let u = |x: f64, y: f64| x * x - y * y;
            let r = m.gradient_identity_residual(u, z, 1e-4).unwrap();
            let w = m.map_point(z).unwrap();
            let scale = 4.0 * (w.x * w.x + w.y * w.y) * m.jacobian(c(z.x, z.y)).unwrap();
            assert!(r < 1e-6 * scale.max(1.0), "residual {r} at {z:?}");
        }
    }

    #[test]
    fn weighted_jump_integral_checks_lengths() {
        let poly = PolylineCurve::new(vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)]).unwrap();
        assert_eq!(weighted_jump_integral(&poly, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 2.0);
        assert!(weighted_jump_integral(&poly, &[1.0], &[1.0, 1.0]).is_err());
    }
}
