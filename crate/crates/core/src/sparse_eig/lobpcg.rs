//! Blocked locally optimal preconditioned conjugate gradients (LOBPCG) for
//! the smallest eigenpairs of `Kx = λMx`, `K` symmetric and `M` SPD.
//!
//! The search block `[W, P]` is projected out of `X` and orthonormalized
//! by two passes of SVQB (scaled eigen-decomposition of the `M`-Gram
//! matrix), dropping numerically dependent directions, so Rayleigh–Ritz
//! reduces to a standard symmetric eigenproblem. Converged columns are
//! soft-locked: they stay in `X` but get no new search directions.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent once num-traits has std
use num_traits::Float;

use alloc::sync::Arc;

use super::amg::Multigrid;
use super::dense::{generalized_eigen, symmetric_eigen, DenseMatrix};
use super::{dot, norm, CsrMatrix};
use crate::rng::{SeededRng, DEFAULT_SEED};
use crate::{Error, Result};

type Block = Vec<Vec<f64>>;

/// Largest number of eigenpairs a caller may request.
pub const MAX_PAIRS: usize = 10;
/// Relative cut-off of the orthonormalization; below it a direction is
/// treated as linearly dependent.
const DROP_TOL: f64 = 1e-14;
/// Period of full recomputation of `KX`, `MX` to flush recurrence drift.
const REFRESH_EVERY: usize = 32;

/// Approximate inverse applied to the residuals.
#[derive(Debug, Clone, Default)]
pub enum Preconditioner {
    /// `1/|diag K|`.
    #[default]
    Jacobi,
    /// A V-cycle for an SPD matrix spectrally close to `K` (for instance
    /// its stiffness part); it may be shared between solves.
    Multigrid(Arc<Multigrid>),
}

#[derive(Debug, Clone)]
pub struct EigOptions {
    /// Required `‖(K − λM)x‖ / ‖x‖` for every returned pair.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the random starting block.
    pub seed: u64,
    /// Extra block columns beyond the requested count; they speed up
    /// convergence of the last wanted pair and are not returned.
    pub guard: usize,
    /// Starting vectors (warm start); missing columns are random.
    pub initial: Option<Block>,
    /// Stop as soon as the smallest Ritz value falls below this level. A
    /// Ritz value is the Rayleigh quotient of an actual vector, so this
    /// certifies `λ₁` below the level without full convergence.
    pub stop_below: Option<f64>,
    pub preconditioner: Preconditioner,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions { tol: 1e-8, max_iter: 10_000, seed: DEFAULT_SEED, guard: 2, initial: None, stop_below: None, preconditioner: Preconditioner::Jacobi }
    }
}

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `M`-orthonormal, `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Block,
    /// `‖(K − λM)x‖ / ‖x‖` per pair.
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    /// True when the run stopped on [`EigOptions::stop_below`] before the
    /// residual tolerance was met.
    pub stopped_early: bool,
}

/// `xᵀKx / xᵀMx`.
pub fn rayleigh_quotient(k: &CsrMatrix, m: &CsrMatrix, x: &[f64]) -> Result<f64> {
    let den = m.quadratic_form(x)?;
    if !(den > 0.0) {
        return Err(Error::invalid("Rayleigh quotient of a vector with xᵀMx ≤ 0"));
    }
    Ok(k.quadratic_form(x)? / den)
}

/// The `count` smallest eigenpairs of `Kx = λMx`.
///
/// A breakdown (loss of rank in the trial basis, non-finite values) restarts
/// once from a fresh random block; a second breakdown is an error.
pub fn smallest_eigenpairs(k: &CsrMatrix, m: &CsrMatrix, count: usize, opts: &EigOptions) -> Result<EigResult> {
    let n = k.n();
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    if count == 0 || count > MAX_PAIRS || count > n {
        return Err(Error::Domain { what: "eigenpair count", value: count as f64, range: "1..=min(10, n)" });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain { what: "tol", value: opts.tol, range: "(0, +inf)" });
    }
    k.check_symmetric(1e-12)?;
    m.check_symmetric(1e-12)?;
    let block = (count + opts.guard).min(n);
    if 3 * block >= n {
        return dense_fallback(k, m, count);
    }
    match Lobpcg::new(k, m, count, block, opts)?.run(opts.seed, opts.initial.as_ref()) {
        Err(Breakdown) => Lobpcg::new(k, m, count, block, opts)?
            .run(opts.seed ^ 0x9e37_79b9_7f4a_7c15, None)
            .map_err(|_| Error::NoConvergence { method: "lobpcg (breakdown after restart)", iterations: 0, residual: f64::NAN })?,
        Ok(r) => r,
    }
}

// Tiny problems: the full dense solve is cheaper and exact.
fn dense_fallback(k: &CsrMatrix, m: &CsrMatrix, count: usize) -> Result<EigResult> {
    let e = generalized_eigen(&k.to_dense(), &m.to_dense())?;
    let mut res = Vec::with_capacity(count);
    for (lam, v) in e.values.iter().zip(&e.vectors).take(count) {
        res.push(residual(k, m, *lam, v));
    }
    Ok(EigResult {
        eigenvalues: e.values[..count].to_vec(),
        eigenvectors: e.vectors.into_iter().take(count).collect(),
        residual_norms: res,
        iterations: 0,
        stopped_early: false,
    })
}

fn residual(k: &CsrMatrix, m: &CsrMatrix, lam: f64, x: &[f64]) -> f64 {
    let kx = k.matvec(x).unwrap();
    let mx = m.matvec(x).unwrap();
    let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lam * b).collect();
    norm(&r) / norm(x)
}

struct Breakdown;

type Run<T> = core::result::Result<Result<T>, Breakdown>;

struct Lobpcg<'a> {
    k: &'a CsrMatrix,
    m: &'a CsrMatrix,
    count: usize,
    block: usize,
    tol: f64,
    max_iter: usize,
    stop_below: Option<f64>,
    inv_diag: Vec<f64>,
    multigrid: Option<Arc<Multigrid>>,
}

impl<'a> Lobpcg<'a> {
    fn new(k: &'a CsrMatrix, m: &'a CsrMatrix, count: usize, block: usize, opts: &EigOptions) -> Result<Self> {
        let inv_diag = k
            .diagonal()
            .iter()
            .map(|&d| if d.abs() > 0.0 { 1.0 / d.abs() } else { 1.0 })
            .collect();
        Ok(Lobpcg {
            k,
            m,
            count,
            block,
            tol: opts.tol,
            max_iter: opts.max_iter,
            stop_below: opts.stop_below,
            inv_diag,
            multigrid: match &opts.preconditioner {
                Preconditioner::Jacobi => None,
                Preconditioner::Multigrid(mg) => Some(mg.clone()),
            },
        })
    }

    fn apply(&self, a: &CsrMatrix, x: &Block) -> Block {
        x.iter()
            .map(|v| {
                let mut y = vec![0.0; v.len()];
                a.matvec_into(v, &mut y);
                y
            })
            .collect()
    }

    fn run(self, seed: u64, initial: Option<&Block>) -> Run<EigResult> {
        let n = self.k.n();
        let mut rng = SeededRng::new(seed);
        let mut x: Block = Vec::with_capacity(self.block);
        if let Some(init) = initial {
            for v in init.iter().take(self.block) {
                if v.len() != n {
                    return Ok(Err(Error::DimensionMismatch { expected: n, found: v.len() }));
                }
                x.push(v.clone());
            }
        }
        while x.len() < self.block {
            x.push((0..n).map(|_| rng.symmetric()).collect());
        }
        let mut xs = self.span(x);
        orthonormalize(&mut xs, None);
        if xs.len() < self.block {
            return Err(Breakdown);
        }
        let (mut xs, mut lam) = ritz(&xs, self.block).ok_or(Breakdown)?;

        let mut p: Option<Span> = None;
        let mut res = vec![0.0; self.block];

        for iter in 1..=self.max_iter {
            if iter % REFRESH_EVERY == 0 {
                xs = self.span(xs.v);
                orthonormalize(&mut xs, None);
                if xs.len() < self.block {
                    return Err(Breakdown);
                }
                (xs, lam) = ritz(&xs, self.block).ok_or(Breakdown)?;
            }
            let r: Block = (0..self.block)
                .map(|j| xs.kv[j].iter().zip(&xs.mv[j]).map(|(a, b)| a - lam[j] * b).collect())
                .collect();
            for j in 0..self.block {
                res[j] = norm(&r[j]) / norm(&xs.v[j]);
            }
            #[cfg(test)]
            if iter % 50 == 0 && std::env::var("LOBPCG_TRACE").is_ok() {
                std::eprintln!("{iter} {:?} {:?} p={}", &lam, &res, p.as_ref().map_or(0, |p| p.len()));
            }
            if lam.iter().chain(&res).any(|v| !v.is_finite()) {
                return Err(Breakdown);
            }
            if let Some(level) = self.stop_below {
                if lam[0] < level {
                    return Ok(Ok(self.finish(xs.v, lam, res, iter, true)));
                }
            }
            if res[..self.count].iter().all(|&v| v <= self.tol) {
                // confirm with freshly computed products
                let fresh = self.span(xs.v.clone());
                let lam_f = rayleigh(&fresh);
                let res_f: Vec<f64> = (0..self.block)
                    .map(|j| {
                        let r: Vec<f64> =
                            fresh.kv[j].iter().zip(&fresh.mv[j]).map(|(a, b)| a - lam_f[j] * b).collect();
                        norm(&r) / norm(&fresh.v[j])
                    })
                    .collect();
                if res_f[..self.count].iter().all(|&v| v <= self.tol) {
                    return Ok(Ok(self.finish(fresh.v, lam_f, res_f, iter, false)));
                }
                xs = fresh;
                lam = lam_f;
                continue;
            }

            let active: Vec<usize> = (0..self.block).filter(|&j| res[j] > self.tol).collect();
            let w: Block = active
                .iter()
                .map(|&j| match &self.multigrid {
                    Some(mg) => mg.apply(&r[j]),
                    None => r[j].iter().zip(&self.inv_diag).map(|(a, d)| a * d).collect(),
                })
                .collect();
            let mut z = self.span(w);
            if let Some(p) = p.take() {
                z.extend(p);
            }
            orthonormalize(&mut z, Some(&xs));
            let nz = z.len();
            let mut s = xs;
            s.extend(z);
            let (coef, theta) = ritz_coefficients(&s).ok_or(Breakdown)?;
            let new_x = s.transform(&coef[..self.block]);
            // P: the search-direction part of each active Ritz vector
            p = if nz > 0 {
                let pc: Block = active
                    .iter()
                    .map(|&j| {
                        let mut c = coef[j].clone();
                        c[..self.block].fill(0.0);
                        c
                    })
                    .collect();
                Some(s.transform(&pc))
            } else {
                None
            };
            xs = new_x;
            lam = theta[..self.block].to_vec();
        }
        let worst = res[..self.count].iter().fold(0.0f64, |a, &b| a.max(b));
        Ok(Err(Error::NoConvergence { method: "lobpcg", iterations: self.max_iter, residual: worst }))
    }

    fn span(&self, v: Block) -> Span {
        let mv = self.apply(self.m, &v);
        let kv = self.apply(self.k, &v);
        Span { v, mv, kv }
    }

    fn finish(&self, x: Block, lam: Vec<f64>, res: Vec<f64>, iter: usize, early: bool) -> EigResult {
        let mut order: Vec<usize> = (0..self.block).collect();
        order.sort_by(|&a, &b| lam[a].total_cmp(&lam[b]));
        let pick: Vec<usize> = order.into_iter().take(self.count).collect();
        EigResult {
            eigenvalues: pick.iter().map(|&j| lam[j]).collect(),
            eigenvectors: pick.iter().map(|&j| x[j].clone()).collect(),
            residual_norms: pick.iter().map(|&j| res[j]).collect(),
            iterations: iter,
            stopped_early: early,
        }
    }
}

/// Vectors together with their images under `M` and `K`.
struct Span {
    v: Block,
    mv: Block,
    kv: Block,
}

impl Span {
    fn len(&self) -> usize {
        self.v.len()
    }

    fn transform(&self, coef: &[Vec<f64>]) -> Span {
        Span { v: combine(&self.v, coef), mv: combine(&self.mv, coef), kv: combine(&self.kv, coef) }
    }

    fn extend(&mut self, other: Span) {
        self.v.extend(other.v);
        self.mv.extend(other.mv);
        self.kv.extend(other.kv);
    }

    fn retain(&mut self, keep: &[bool]) {
        for b in [&mut self.v, &mut self.mv, &mut self.kv] {
            let mut it = keep.iter();
            b.retain(|_| *it.next().unwrap());
        }
    }
}

fn rayleigh(s: &Span) -> Vec<f64> {
    (0..s.len()).map(|j| dot(&s.v[j], &s.kv[j]) / dot(&s.v[j], &s.mv[j])).collect()
}

/// Rows per cache block in the block kernels below.
const CHUNK: usize = 1024;

/// Linear combinations of the columns of `cols`; `coef[j]` holds the
/// weights of output column `j`.
fn combine(cols: &Block, coef: &[Vec<f64>]) -> Block {
    let n = cols.first().map_or(0, |c| c.len());
    let mut out = vec![vec![0.0; n]; coef.len()];
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        for (o, c) in out.iter_mut().zip(coef) {
            let o = &mut o[start..end];
            for (w, col) in c.iter().zip(cols) {
                if *w != 0.0 {
                    for (a, b) in o.iter_mut().zip(&col[start..end]) {
                        *a += w * b;
                    }
                }
            }
        }
    }
    out
}

/// `dst[j] −= Σ_i coef[j][i] src[i]`.
fn subtract_combination(dst: &mut Block, src: &Block, coef: &[Vec<f64>]) {
    let n = src.first().map_or(0, |c| c.len());
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        for (d, c) in dst.iter_mut().zip(coef) {
            let d = &mut d[start..end];
            for (w, col) in c.iter().zip(src) {
                for (a, b) in d.iter_mut().zip(&col[start..end]) {
                    *a -= w * b;
                }
            }
        }
    }
}

/// `out[i][j] = a[i]·b[j]`.
fn cross(a: &Block, b: &Block) -> Vec<Vec<f64>> {
    let n = a.first().map_or(0, |c| c.len());
    let mut out = vec![vec![0.0; b.len()]; a.len()];
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        for (row, ai) in out.iter_mut().zip(a) {
            for (o, bj) in row.iter_mut().zip(b) {
                *o += dot(&ai[start..end], &bj[start..end]);
            }
        }
    }
    out
}

fn gram(a: &Block, b: &Block) -> DenseMatrix {
    let c = cross(a, b);
    DenseMatrix::from_fn(a.len(), |i, j| 0.5 * (c[i][j] + c[j][i]))
}

/// Makes `z` `M`-orthonormal and `M`-orthogonal to `against` (assumed
/// orthonormal). Two passes of projection plus SVQB; directions that are
/// numerically dependent are dropped.
fn orthonormalize(z: &mut Span, against: Option<&Span>) {
    let before: Vec<f64> = (0..z.len()).map(|c| dot(&z.v[c], &z.mv[c])).collect();
    for pass in 0..2 {
        if let Some(x) = against {
            // coef[c][i] = (Mx_i)·z_c
            let coef = cross(&z.v, &x.mv);
            subtract_combination(&mut z.v, &x.v, &coef);
            subtract_combination(&mut z.mv, &x.mv, &coef);
            subtract_combination(&mut z.kv, &x.kv, &coef);
        }
        if pass == 0 {
            // columns that were (almost) inside span(X) carry only noise
            let keep: Vec<bool> = (0..z.len())
                .map(|c| {
                    let after = dot(&z.v[c], &z.mv[c]);
                    after > DROP_TOL * before[c] && after > 0.0
                })
                .collect();
            z.retain(&keep);
        }
        if z.len() == 0 {
            return;
        }
        let g = gram(&z.v, &z.mv);
        let q = z.len();
        let scale: Vec<f64> = (0..q).map(|i| 1.0 / g.get(i, i).sqrt()).collect();
        let g_hat = DenseMatrix::from_fn(q, |i, j| scale[i] * g.get(i, j) * scale[j]);
        let Ok(e) = symmetric_eigen(&g_hat) else {
            z.retain(&vec![false; q]);
            return;
        };
        let theta_max = e.values.last().copied().unwrap_or(0.0);
        let t: Block = (0..q)
            .filter(|&c| e.values[c] > DROP_TOL * theta_max)
            .map(|c| {
                let f = 1.0 / e.values[c].sqrt();
                (0..q).map(|i| scale[i] * e.vectors[c][i] * f).collect()
            })
            .collect();
        *z = z.transform(&t);
    }
}

/// Rayleigh–Ritz on an `M`-orthonormal span: coefficient columns of all
/// Ritz vectors and their Ritz values, ascending.
fn ritz_coefficients(s: &Span) -> Option<(Block, Vec<f64>)> {
    let a = gram(&s.v, &s.kv);
    let e = symmetric_eigen(&a).ok()?;
    if e.values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((e.vectors, e.values))
}

/// Ritz vectors of `s` for the `block` smallest Ritz values.
fn ritz(s: &Span, block: usize) -> Option<(Span, Vec<f64>)> {
    let (coef, theta) = ritz_coefficients(s)?;
    if coef.len() < block {
        return None;
    }
    Some((s.transform(&coef[..block]), theta[..block].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_eig::dense::generalized_eigenvalues;
    use crate::sparse_eig::TripletBuilder;
    use core::f64::consts::PI;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let h = 1.0 / (n + 1) as f64;
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            b.push(i, i, 2.0 / (h * h));
            if i + 1 < n {
                b.push(i, i + 1, -1.0 / (h * h));
                b.push(i + 1, i, -1.0 / (h * h));
            }
        }
        b.build()
    }

    #[test]
    fn diagonal_problem() {
        let n = 40;
        let d: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let k = CsrMatrix::from_diagonal(&d);
        let m = CsrMatrix::identity(n);
        let r = smallest_eigenpairs(&k, &m, 3, &EigOptions::default()).unwrap();
        for (i, lam) in r.eigenvalues.iter().enumerate() {
            assert!((lam - (i + 1) as f64).abs() < 1e-10);
            assert!(r.residual_norms[i] <= 1e-8);
        }
    }

    #[test]
    fn laplacian_closed_form() {
        let n = 512;
        let h = 1.0 / (n + 1) as f64;
        let k = laplacian_1d(n);
        let m = CsrMatrix::identity(n);
        let r = smallest_eigenpairs(&k, &m, 3, &EigOptions::default()).unwrap();
        for (i, lam) in r.eigenvalues.iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - ((i + 1) as f64 * PI * h).cos());
            assert!(((lam - exact) / exact).abs() < 1e-8, "{lam} vs {exact}");
        }
    }

    #[test]
    fn random_pencil_matches_dense() {
        let n = 80;
        let mut rng = SeededRng::new(21);
        let mut kt = Vec::new();
        let mut mt = Vec::new();
        for i in 0..n {
            mt.push((i, i, 1.0 + rng.uniform()));
            kt.push((i, i, 4.0 * rng.symmetric()));
            for j in 0..i {
                if rng.uniform() < 0.15 {
                    let v = rng.symmetric();
                    kt.push((i, j, v));
                    kt.push((j, i, v));
                }
                if rng.uniform() < 0.05 {
                    let v = 0.1 * rng.symmetric();
                    mt.push((i, j, v));
                    mt.push((j, i, v));
                }
            }
        }
        let k = CsrMatrix::from_triplets(n, &kt).unwrap();
        let m = CsrMatrix::from_triplets(n, &mt).unwrap();
        let dense = generalized_eigenvalues(&k.to_dense(), &m.to_dense()).unwrap();
        let r = smallest_eigenpairs(&k, &m, 4, &EigOptions { tol: 1e-10, ..EigOptions::default() }).unwrap();
        for (i, lam) in r.eigenvalues.iter().enumerate() {
            assert!((lam - dense[i]).abs() < 1e-8, "{lam} vs {}", dense[i]);
        }
    }

    #[test]
    fn rayleigh_sandwich() {
        let k = laplacian_1d(200);
        let m = CsrMatrix::identity(200);
        let r = smallest_eigenpairs(&k, &m, 1, &EigOptions::default()).unwrap();
        let mut rng = SeededRng::new(3);
        for _ in 0..20 {
            let probe: Vec<f64> = (0..200).map(|_| rng.symmetric()).collect();
            assert!(r.eigenvalues[0] <= rayleigh_quotient(&k, &m, &probe).unwrap());
        }
    }

    #[test]
    fn deterministic_and_warm_start() {
        let k = laplacian_1d(300);
        let m = CsrMatrix::identity(300);
        let a = smallest_eigenpairs(&k, &m, 2, &EigOptions::default()).unwrap();
        let b = smallest_eigenpairs(&k, &m, 2, &EigOptions::default()).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        let warm = EigOptions { initial: Some(a.eigenvectors.clone()), ..EigOptions::default() };
        let c = smallest_eigenpairs(&k, &m, 2, &warm).unwrap();
        assert!(c.iterations < a.iterations);
        assert!((c.eigenvalues[0] - a.eigenvalues[0]).abs() < 1e-9 * a.eigenvalues[0]);
    }

    #[test]
    fn early_stop_certifies_negative() {
        let mut d: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        d[50] = -3.0;
        let k = CsrMatrix::from_diagonal(&d);
        let m = CsrMatrix::identity(100);
        let r = smallest_eigenpairs(&k, &m, 1, &EigOptions { stop_below: Some(-1e-6), ..EigOptions::default() })
            .unwrap();
        assert!(r.eigenvalues[0] < -1e-6);
        assert!(r.eigenvalues[0] >= -3.0 - 1e-12);
    }

    #[test]
    fn rejects_bad_requests() {
        let k = laplacian_1d(50);
        let m = CsrMatrix::identity(50);
        assert!(smallest_eigenpairs(&k, &m, 0, &EigOptions::default()).is_err());
        assert!(smallest_eigenpairs(&k, &m, 11, &EigOptions::default()).is_err());
        assert!(smallest_eigenpairs(&k, &CsrMatrix::identity(49), 1, &EigOptions::default()).is_err());
        let asym = CsrMatrix::from_triplets(50, &[(0, 1, 1.0)]).unwrap();
        assert!(smallest_eigenpairs(&asym, &m, 1, &EigOptions::default()).is_err());
    }

    #[test]
    fn small_problem_uses_dense_path() {
        let k = CsrMatrix::from_diagonal(&[3.0, 1.0, 2.0, 5.0]);
        let m = CsrMatrix::identity(4);
        let r = smallest_eigenpairs(&k, &m, 2, &EigOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14 && (r.eigenvalues[1] - 2.0).abs() < 1e-14);
    }
}
