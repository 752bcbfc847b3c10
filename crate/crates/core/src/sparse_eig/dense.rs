//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, with Cholesky reduction for definite pencils.
//!
//! Intended as a reference for tests and for the small Rayleigh–Ritz
//! problems inside LOBPCG.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use crate::{Error, Result};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            a.set(i, i, 1.0);
        }
        a
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, f(i, j));
            }
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Lower-triangular `L` with `A = LLᵀ`.
    pub fn cholesky(&self) -> Result<DenseMatrix> {
        let n = self.n;
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { row: j, pivot: d });
            }
            let d = d.sqrt();
            l.set(j, j, d);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Ok(l)
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`; empty when not requested.
    pub vectors: Vec<Vec<f64>>,
}

/// All eigenvalues of the symmetric matrix `a`, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(tridiagonal_ql(a, false)?.values)
}

/// Eigenvalues and orthonormal eigenvectors of the symmetric matrix `a`.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<SymmetricEigen> {
    tridiagonal_ql(a, true)
}

/// All eigenvalues of `Ax = λBx` for symmetric `A` and SPD `B`, ascending.
pub fn generalized_eigenvalues(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>> {
    let (c, _) = reduce_pencil(a, b)?;
    symmetric_eigenvalues(&c)
}

/// Eigenpairs of `Ax = λBx`; eigenvectors are `B`-orthonormal.
pub fn generalized_eigen(a: &DenseMatrix, b: &DenseMatrix) -> Result<SymmetricEigen> {
    let (c, l) = reduce_pencil(a, b)?;
    let mut e = symmetric_eigen(&c)?;
    for v in e.vectors.iter_mut() {
        *v = solve_upper_transposed(&l, v);
    }
    Ok(e)
}

fn reduce_pencil(a: &DenseMatrix, b: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    let n = a.n;
    let l = b.cholesky()?;
    // Y = L⁻¹A column by column, then C = L⁻¹Yᵀ = L⁻¹AL⁻ᵀ
    let mut y = DenseMatrix::zeros(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        let s = solve_lower(&l, &col);
        for i in 0..n {
            y.set(i, j, s[i]);
        }
    }
    let mut c = DenseMatrix::zeros(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| y.get(j, i)).collect();
        let s = solve_lower(&l, &col);
        for i in 0..n {
            c.set(i, j, s[i]);
        }
    }
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (c.get(i, j) + c.get(j, i));
            c.set(i, j, m);
            c.set(j, i, m);
        }
    }
    Ok((c, l))
}

fn solve_lower(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l.get(i, k) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    x
}

fn solve_upper_transposed(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    x
}

// Householder reduction (tred2) and implicit QL (tql2), after the EISPACK
// routines as arranged in JAMA. `v` is row-major, columns are eigenvectors.
fn tridiagonal_ql(a: &DenseMatrix, want_vectors: bool) -> Result<SymmetricEigen> {
    let n = a.n;
    if n == 0 {
        return Ok(SymmetricEigen { values: Vec::new(), vectors: Vec::new() });
    }
    let mut v: Vec<f64> = a.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let idx = |i: usize, j: usize| i * n + j;

    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;

    // QL
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence { method: "tql2", iterations: iter, residual: e[l].abs() });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        for k in 0..n {
                            h = v[idx(k, i + 1)];
                            v[idx(k, i + 1)] = s * v[idx(k, i)] + c * h;
                            v[idx(k, i)] = c * v[idx(k, i)] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = if want_vectors {
        order.iter().map(|&k| (0..n).map(|i| v[idx(i, k)]).collect()).collect()
    } else {
        Vec::new()
    };
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use core::f64::consts::PI;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = SeededRng::new(seed);
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.symmetric();
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        a
    }

    fn random_spd(n: usize, seed: u64) -> DenseMatrix {
        let g = random_symmetric(n, seed);
        let mut b = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| g.get(i, k) * g.get(j, k)).sum();
                b.set(i, j, s / n as f64 + if i == j { 1.0 } else { 0.0 });
            }
        }
        b
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let ev = symmetric_eigenvalues(&a).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
        let gv = generalized_eigenvalues(&a, &DenseMatrix::identity(2)).unwrap();
        assert!((gv[0] - 1.0).abs() < 1e-14 && (gv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn laplacian_closed_form() {
        let n = 64;
        let h = 1.0 / (n + 1) as f64;
        let a = DenseMatrix::from_fn(n, |i, j| match i.abs_diff(j) {
            0 => 2.0 / (h * h),
            1 => -1.0 / (h * h),
            _ => 0.0,
        });
        let ev = generalized_eigenvalues(&a, &DenseMatrix::identity(n)).unwrap();
        for (k, &lam) in ev.iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - ((k + 1) as f64 * PI * h).cos());
            assert!((lam - exact).abs() <= 1e-10 * exact.max(1.0), "k={k}: {lam} vs {exact}");
        }
    }

    #[test]
    fn trace_identity_and_vectors() {
        for (n, seed) in [(1, 1), (7, 2), (40, 3), (120, 4)] {
            let a = random_symmetric(n, seed);
            let e = symmetric_eigen(&a).unwrap();
            let sum: f64 = e.values.iter().sum();
            assert!((sum - a.trace()).abs() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            for (lam, v) in e.values.iter().zip(&e.vectors) {
                let av = a.matvec(v);
                let res: f64 = av.iter().zip(v).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
                assert!(res < 1e-10);
                let nv: f64 = v.iter().map(|x| x * x).sum();
                assert!((nv - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generalized_pairs_are_b_orthonormal() {
        let n = 30;
        let a = random_symmetric(n, 9);
        let b = random_spd(n, 10);
        let e = generalized_eigen(&a, &b).unwrap();
        let vals = generalized_eigenvalues(&a, &b).unwrap();
        for (k, (lam, v)) in e.values.iter().zip(&e.vectors).enumerate() {
            assert!((lam - vals[k]).abs() < 1e-12 * lam.abs().max(1.0));
            let av = a.matvec(v);
            let bv = b.matvec(v);
            let res: f64 = av.iter().zip(&bv).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-9, "residual {res}");
            let vbv: f64 = v.iter().zip(&bv).map(|(x, y)| x * y).sum();
            assert!((vbv - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_b_rejected() {
        let a = DenseMatrix::identity(2);
        let b = DenseMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(generalized_eigenvalues(&a, &b), Err(Error::NotPositiveDefinite { row: 1, .. })));
    }

    #[test]
    fn repeated_eigenvalues() {
        let a = DenseMatrix::identity(5);
        let ev = symmetric_eigenvalues(&a).unwrap();
        assert!(ev.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let z = symmetric_eigenvalues(&DenseMatrix::zeros(4)).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
    }
}
