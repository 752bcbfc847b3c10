//! Cell-centred finite differences for the crack problem, used as an
//! independent reference for the finite-element solver.
//!
//! Unknowns sit at cell centres. Each interior face couples its two cells
//! with conductance 1, a face on the Dirichlet boundary couples its cell to
//! a zero ghost with conductance 2 (half-cell distance). A face on the
//! crack carries two trace values `t±`; the energy
//! `2(u₊ − t₊)² + 2(u₋ − t₋)² − ωh(t₊ − t₋)²` is minimised over the traces,
//! which leaves the effective conductance `ωh / (ωh − 1)`.

use dplab_core::rng::SeededRng;
use dplab_core::solver2d::{CrackSegment, Rect};
use dplab_core::sparse_eig::{cg_solve_with, CgOptions, CsrMatrix, TripletBuilder};
use dplab_core::{Error, Result};

const GRID_TOL: f64 = 1e-9;

/// Five-point crack operator `A` with `A u = λ h² u`.
#[derive(Debug, Clone)]
pub struct FdCrackProblem {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub a: CsrMatrix,
}

fn cells(len: f64, h: f64, what: &str) -> Result<usize> {
    let n = (len / h).round();
    if n < 2.0 || (n * h - len).abs() > GRID_TOL * len {
        return Err(Error::Invalid(format!("{what} = {len} is not a multiple of h = {h}")));
    }
    Ok(n as usize)
}

fn grid_index(v: f64, origin: f64, h: f64, what: &str) -> Result<usize> {
    let k = ((v - origin) / h).round();
    if k < 0.0 || (origin + k * h - v).abs() > GRID_TOL * h.max(v.abs()) {
        return Err(Error::Invalid(format!("{what} = {v} is not on a cell face")));
    }
    Ok(k as usize)
}

impl FdCrackProblem {
    pub fn build(rect: Rect, h: f64, segment: CrackSegment, omega: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain { what: "h", value: h, range: "(0, +inf)" });
        }
        if !(omega * h < 1.0) {
            return Err(Error::Invalid(format!("ω·h = {} must stay below 1", omega * h)));
        }
        let nx = cells(rect.width(), h, "box width")?;
        let ny = cells(rect.height(), h, "box height")?;
        let ia = grid_index(segment.x_a, rect.x_min, h, "x_a")?;
        let ib = grid_index(segment.x_b, rect.x_min, h, "x_b")?;
        let j0 = grid_index(segment.y0, rect.y_min, h, "y0")?;
        if ia == 0 || ib >= nx || j0 == 0 || j0 >= ny {
            return Err(Error::Invalid("crack must lie strictly inside the box".into()));
        }
        let crack = omega * h / (omega * h - 1.0);
        let idx = |i: usize, j: usize| j * nx + i;
        let mut b = TripletBuilder::with_capacity(nx * ny, 5 * nx * ny);
        let couple = |b: &mut TripletBuilder, p: usize, q: usize, g: f64| {
            b.push(p, p, g);
            b.push(q, q, g);
            b.push(p, q, -g);
            b.push(q, p, -g);
        };
        for j in 0..ny {
            for i in 0..nx {
                let p = idx(i, j);
                if i + 1 < nx {
                    couple(&mut b, p, idx(i + 1, j), 1.0);
                }
                if j + 1 < ny {
                    // face between rows j and j + 1 sits at y_min + (j + 1) h
                    let on_crack = j + 1 == j0 && i >= ia && i < ib;
                    couple(&mut b, p, idx(i, j + 1), if on_crack { crack } else { 1.0 });
                }
                let ghosts = [i == 0, i + 1 == nx, j == 0, j + 1 == ny].iter().filter(|&&g| g).count();
                if ghosts > 0 {
                    b.push(p, p, 2.0 * ghosts as f64);
                }
            }
        }
        Ok(FdCrackProblem { nx, ny, h, a: b.build() })
    }

    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    fn rayleigh(&self, u: &[f64]) -> f64 {
        let au = self.a.matvec(u).expect("dimensions match");
        dot(u, &au) / (self.h * self.h * dot(u, u))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEigen {
    pub lambda1: f64,
    /// `‖A u − λ h² u‖ / (h² ‖u‖)`.
    pub residual: f64,
    pub iterations: usize,
    pub shift: f64,
}

/// Smallest eigenvalue by shifted inverse iteration with conjugate
/// gradients. The shift starts at `shift` and doubles whenever the shifted
/// matrix turns out indefinite.
pub fn lowest_eigenvalue(p: &FdCrackProblem, shift: f64, rtol: f64, seed: u64) -> Result<FdEigen> {
    let n = p.n();
    let h2 = p.h * p.h;
    let mut shift = shift.max(1.0);
    'retry: for _ in 0..16 {
        let shifted = p.a.add_scaled(&CsrMatrix::identity(n), shift * h2)?;
        let mut rng = SeededRng::new(seed);
        let mut u: Vec<f64> = (0..n).map(|_| rng.symmetric()).collect();
        let mut lambda = p.rayleigh(&u);
        let opts = CgOptions { tol: 1e-12, ..CgOptions::default() };
        for it in 1..=500 {
            let next = match cg_solve_with(&shifted, &u, &opts) {
                Ok(s) => s.x,
                Err(Error::NoConvergence { .. }) => {
                    shift *= 2.0;
                    continue 'retry;
                }
                Err(e) => return Err(e),
            };
            let scale = dot(&next, &next).sqrt();
            u = next.into_iter().map(|v| v / scale).collect();
            let previous = lambda;
            lambda = p.rayleigh(&u);
            if lambda < -shift {
                shift *= 2.0;
                continue 'retry;
            }
            let au = p.a.matvec(&u)?;
            let residual = au.iter().zip(&u).map(|(a, v)| (a - lambda * h2 * v).powi(2)).sum::<f64>().sqrt() / h2;
            if residual <= rtol * lambda.abs().max(1.0) && (lambda - previous).abs() <= 1e-12 * lambda.abs().max(1.0) {
                return Ok(FdEigen { lambda1: lambda, residual, iterations: it, shift });
            }
        }
        return Err(Error::NoConvergence { method: "fd inverse iteration", iterations: 500, residual: f64::NAN });
    }
    Err(Error::Invalid("no positive definite shift found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> CrackSegment {
        CrackSegment::new(0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn zero_strength_is_the_rectangle() {
        // a free slit on the symmetry line leaves the y-even ground state alone
        let rect = Rect::new(-1.0, 2.0, -1.0, 1.0).unwrap();
        let p = FdCrackProblem::build(rect, 1.0 / 32.0, unit(), 0.0).unwrap();
        let e = lowest_eigenvalue(&p, 1.0, 1e-8, 1).unwrap();
        let exact = PI * PI * (1.0 / 9.0 + 1.0 / 4.0);
        assert!(((e.lambda1 - exact) / exact).abs() < 1e-2, "{e:?}");
    }

    #[test]
    fn strong_crack_binds() {
        let rect = Rect::new(-1.0, 2.0, -1.5, 1.5).unwrap();
        let p = FdCrackProblem::build(rect, 1.0 / 16.0, unit(), 2.0).unwrap();
        let e = lowest_eigenvalue(&p, 1.0, 1e-8, 1).unwrap();
        assert!(e.lambda1 < -4.0, "{e:?}");
        assert!(e.shift > 4.0);
    }

    #[test]
    fn rejects_off_grid_crack() {
        let rect = Rect::new(-1.0, 2.0, -1.0, 1.0).unwrap();
        assert!(FdCrackProblem::build(rect, 0.25, CrackSegment::new(0.1, 1.0, 0.0).unwrap(), 1.0).is_err());
        assert!(FdCrackProblem::build(rect, 0.25, unit(), 5.0).is_err());
    }
}
