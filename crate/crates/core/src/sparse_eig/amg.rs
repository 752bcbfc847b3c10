//! Smoothed-aggregation algebraic multigrid for SPD matrices, applied as a
//! symmetric V(1,1) cycle with Gauss–Seidel smoothing. Used to precondition
//! LOBPCG with the stiffness matrix.

use alloc::vec;
use alloc::vec::Vec;

use super::dense::DenseMatrix;
use super::CsrMatrix;
use crate::{Error, Result};

/// Levels are added until the coarse matrix is at most this large.
const MAX_COARSE: usize = 400;
const MAX_LEVELS: usize = 25;
/// Strength-of-connection threshold on the finest level; halved per level.
const THETA: f64 = 0.08;
const UNASSIGNED: usize = usize::MAX;

/// Rectangular CSR, used for the prolongators.
#[derive(Debug, Clone)]
struct Sparse {
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Clone, Copy)]
struct View<'a> {
    ncols: usize,
    row_ptr: &'a [usize],
    col_idx: &'a [usize],
    values: &'a [f64],
}

impl<'a> View<'a> {
    fn of_square(a: &'a CsrMatrix) -> Self {
        View { ncols: a.n(), row_ptr: a.row_ptr(), col_idx: a.col_idx(), values: a.values() }
    }

    fn of(s: &'a Sparse) -> Self {
        View { ncols: s.ncols, row_ptr: &s.row_ptr, col_idx: &s.col_idx, values: &s.values }
    }

    fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn row(&self, i: usize) -> (&'a [usize], &'a [f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }
}

impl Sparse {
    fn transpose(&self, nrows: usize) -> Sparse {
        let mut count = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            count[j + 1] += 1;
        }
        for j in 0..self.ncols {
            count[j + 1] += count[j];
        }
        let row_ptr = count.clone();
        let mut next = count;
        let mut col_idx = vec![0; self.col_idx.len()];
        let mut values = vec![0.0; self.values.len()];
        for i in 0..nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                col_idx[next[j]] = i;
                values[next[j]] = self.values[k];
                next[j] += 1;
            }
        }
        Sparse { ncols: nrows, row_ptr, col_idx, values }
    }

    /// `y += self · x`.
    fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                *yi += self.values[k] * x[self.col_idx[k]];
            }
        }
    }
}

/// Gustavson's row-by-row product with sorted output columns.
fn spmm(a: View<'_>, b: View<'_>) -> Sparse {
    let mut marker = vec![UNASSIGNED; b.ncols];
    let mut acc = vec![0.0; b.ncols];
    let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    let mut cols: Vec<usize> = Vec::new();
    for i in 0..a.nrows() {
        cols.clear();
        let (ac, av) = a.row(i);
        for (&k, &va) in ac.iter().zip(av) {
            let (bc, bv) = b.row(k);
            for (&j, &vb) in bc.iter().zip(bv) {
                if marker[j] != i {
                    marker[j] = i;
                    acc[j] = 0.0;
                    cols.push(j);
                }
                acc[j] += va * vb;
            }
        }
        cols.sort_unstable();
        for &j in &cols {
            col_idx.push(j);
            values.push(acc[j]);
        }
        row_ptr.push(col_idx.len());
    }
    Sparse { ncols: b.ncols, row_ptr, col_idx, values }
}

/// Greedy aggregation on the strong-connection graph: seed aggregates from
/// untouched neighbourhoods, attach the rest to a strongest aggregated
/// neighbour, then group whatever is left.
fn aggregate(a: &CsrMatrix, diag: &[f64], theta: f64) -> (Vec<usize>, usize) {
    let n = a.n();
    let strong = |i: usize| {
        let (cols, vals) = a.row(i);
        cols.iter().zip(vals).filter_map(move |(&j, &v)| {
            (j != i && v != 0.0 && v.abs() >= theta * (diag[i] * diag[j]).sqrt()).then_some((j, v.abs()))
        })
    };
    let mut agg = vec![UNASSIGNED; n];
    let mut count = 0;
    for i in 0..n {
        if agg[i] == UNASSIGNED && strong(i).all(|(j, _)| agg[j] == UNASSIGNED) {
            agg[i] = count;
            for (j, _) in strong(i) {
                agg[j] = count;
            }
            count += 1;
        }
    }
    let seeded = agg.clone();
    for i in 0..n {
        if agg[i] == UNASSIGNED {
            let best = strong(i)
                .filter(|&(j, _)| seeded[j] != UNASSIGNED)
                .max_by(|x, y| x.1.total_cmp(&y.1));
            if let Some((j, _)) = best {
                agg[i] = seeded[j];
            }
        }
    }
    for i in 0..n {
        if agg[i] == UNASSIGNED {
            agg[i] = count;
            for (j, _) in strong(i) {
                if agg[j] == UNASSIGNED {
                    agg[j] = count;
                }
            }
            count += 1;
        }
    }
    (agg, count)
}

/// `P = (I − ω D⁻¹A) P₀` with `P₀` the aggregate indicator and
/// `ω = 4 / (3ρ)`, `ρ` the Gershgorin bound of `D⁻¹A`.
fn smoothed_prolongator(a: &CsrMatrix, diag: &[f64], agg: &[usize], count: usize) -> Sparse {
    let n = a.n();
    let rho = (0..n)
        .map(|i| a.row(i).1.iter().map(|v| v.abs()).sum::<f64>() / diag[i])
        .fold(0.0, f64::max);
    let omega = 4.0 / (3.0 * rho);
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for i in 0..n {
        entries.clear();
        entries.push((agg[i], 1.0));
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            entries.push((agg[j], -omega * v / diag[i]));
        }
        entries.sort_unstable_by_key(|e| e.0);
        let mut last = UNASSIGNED;
        for &(c, v) in entries.iter() {
            if c == last {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                last = c;
            }
        }
        row_ptr.push(col_idx.len());
    }
    Sparse { ncols: count, row_ptr, col_idx, values }
}

#[derive(Debug, Clone)]
struct Level {
    a: CsrMatrix,
    diag: Vec<f64>,
    p: Sparse,
    pt: Sparse,
}

/// Multigrid hierarchy; [`Multigrid::apply`] approximates `A⁻¹r`.
#[derive(Debug, Clone)]
pub struct Multigrid {
    levels: Vec<Level>,
    /// Cholesky factor of the coarsest matrix.
    coarse: DenseMatrix,
}

impl Multigrid {
    /// Builds the hierarchy; `a` must be symmetric positive definite.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let mut levels = Vec::new();
        let mut a = a.clone();
        let mut theta = THETA;
        while a.n() > MAX_COARSE && levels.len() < MAX_LEVELS {
            let diag = a.diagonal();
            if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
                return Err(Error::NotPositiveDefinite { row: i, pivot: diag[i] });
            }
            let (agg, count) = aggregate(&a, &diag, theta);
            if count == 0 || 10 * count > 9 * a.n() {
                break;
            }
            let p = smoothed_prolongator(&a, &diag, &agg, count);
            let pt = p.transpose(a.n());
            let ap = spmm(View::of_square(&a), View::of(&p));
            let ac = spmm(View::of(&pt), View::of(&ap));
            let coarse = CsrMatrix::from_parts(count, ac.row_ptr, ac.col_idx, ac.values);
            levels.push(Level { a, diag, p, pt });
            a = coarse;
            theta *= 0.5;
        }
        if a.n() > 8 * MAX_COARSE {
            return Err(Error::invalid("multigrid coarsening stalled"));
        }
        let coarse = a.to_dense().cholesky()?;
        Ok(Multigrid { levels, coarse })
    }

    /// Number of levels including the coarsest.
    pub fn levels(&self) -> usize {
        self.levels.len() + 1
    }

    /// Total non-zeros of all level matrices over those of the finest.
    pub fn operator_complexity(&self) -> f64 {
        let Some(fine) = self.levels.first() else { return 1.0 };
        let n_c = self.coarse.n();
        let total: usize = self.levels.iter().map(|l| l.a.nnz()).sum::<usize>() + n_c * n_c;
        total as f64 / fine.a.nnz() as f64
    }

    /// One V(1,1) cycle for `Ax = r` from a zero guess.
    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        self.cycle(0, r)
    }

    fn cycle(&self, level: usize, b: &[f64]) -> Vec<f64> {
        let Some(l) = self.levels.get(level) else { return self.coarse_solve(b) };
        let n = l.a.n();
        let mut x = vec![0.0; n];
        gauss_seidel(&l.a, &l.diag, b, &mut x, false);
        let mut r = vec![0.0; n];
        l.a.matvec_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let mut rc = vec![0.0; l.p.ncols];
        l.pt.mul_add(&r, &mut rc);
        let ec = self.cycle(level + 1, &rc);
        l.p.mul_add(&ec, &mut x);
        gauss_seidel(&l.a, &l.diag, b, &mut x, true);
        x
    }

    fn coarse_solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.coarse;
        let n = l.n();
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l.get(i, k) * y[k]).sum();
            y[i] = (y[i] - s) / l.get(i, i);
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l.get(k, i) * y[k]).sum();
            y[i] = (y[i] - s) / l.get(i, i);
        }
        y
    }
}

fn gauss_seidel(a: &CsrMatrix, diag: &[f64], b: &[f64], x: &mut [f64], backward: bool) {
    let n = a.n();
    let mut sweep = |i: usize| {
        let (cols, vals) = a.row(i);
        let mut s = b[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                s -= v * x[j];
            }
        }
        x[i] = s / diag[i];
    };
    if backward {
        (0..n).rev().for_each(&mut sweep);
    } else {
        (0..n).for_each(&mut sweep);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::sparse_eig::{dot, norm, TripletBuilder};

    fn laplacian_2d(m: usize) -> CsrMatrix {
        let mut b = TripletBuilder::new(m * m);
        for j in 0..m {
            for i in 0..m {
                let k = j * m + i;
                b.push(k, k, 4.0);
                if i > 0 {
                    b.push(k, k - 1, -1.0);
                }
                if i + 1 < m {
                    b.push(k, k + 1, -1.0);
                }
                if j > 0 {
                    b.push(k, k - m, -1.0);
                }
                if j + 1 < m {
                    b.push(k, k + m, -1.0);
                }
            }
        }
        b.build()
    }

    #[test]
    fn transpose_and_product() {
        // [[1, 2], [0, 3], [4, 0]]
        let p = Sparse { ncols: 2, row_ptr: vec![0, 2, 3, 4], col_idx: vec![0, 1, 1, 0], values: vec![1.0, 2.0, 3.0, 4.0] };
        let pt = p.transpose(3);
        let ptp = spmm(View::of(&pt), View::of(&p));
        // PᵀP = [[17, 2], [2, 13]]
        assert_eq!(ptp.col_idx, vec![0, 1, 0, 1]);
        assert_eq!(ptp.values, vec![17.0, 2.0, 2.0, 13.0]);
    }

    #[test]
    fn v_cycle_contracts_fast() {
        let a = laplacian_2d(96);
        let mg = Multigrid::new(&a).unwrap();
        assert!(mg.levels() >= 3);
        let oc = mg.operator_complexity();
        assert!(oc > 1.0 && oc < 3.0, "{oc}");
        let mut rng = SeededRng::new(3);
        let b: Vec<f64> = (0..a.n()).map(|_| rng.symmetric()).collect();
        // stationary iteration x ← x + V(b − Ax)
        let mut x = vec![0.0; a.n()];
        let mut prev = norm(&b);
        let mut factor = 0.0f64;
        for it in 0..8 {
            let ax = a.matvec(&x).unwrap();
            let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
            let cur = norm(&r);
            if it > 0 {
                factor = factor.max(cur / prev);
            }
            prev = cur;
            let e = mg.apply(&r);
            x.iter_mut().zip(&e).for_each(|(xi, ei)| *xi += ei);
        }
        assert!(factor < 0.5, "{factor}");
    }

    #[test]
    fn preconditioner_is_symmetric_positive() {
        let a = laplacian_2d(40);
        let mg = Multigrid::new(&a).unwrap();
        let mut rng = SeededRng::new(9);
        for _ in 0..5 {
            let x: Vec<f64> = (0..a.n()).map(|_| rng.symmetric()).collect();
            let y: Vec<f64> = (0..a.n()).map(|_| rng.symmetric()).collect();
            let (bx, by) = (mg.apply(&x), mg.apply(&y));
            assert!((dot(&bx, &y) - dot(&x, &by)).abs() < 1e-10 * norm(&x) * norm(&y));
            assert!(dot(&bx, &x) > 0.0);
        }
    }

    #[test]
    fn small_matrix_is_solved_directly() {
        let a = laplacian_2d(10);
        let mg = Multigrid::new(&a).unwrap();
        assert_eq!(mg.levels(), 1);
        let b = vec![1.0; 100];
        let x = mg.apply(&b);
        let r: Vec<f64> = a.matvec(&x).unwrap().iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm(&r) < 1e-12);
    }

    #[test]
    fn rejects_non_positive_diagonal() {
        let mut a = laplacian_2d(30);
        a = a.scaled(-1.0);
        assert!(Multigrid::new(&a).is_err());
    }
}
