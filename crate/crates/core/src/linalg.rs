//! Dense real matrix primitives.
//!
//! Everything here works on small square matrices (`n <= 8` in practice), so
//! the algorithms favour transparency over blocking or cache tricks:
//! per-block LU for minors, bottom-up Gram–Schmidt on rows for the
//! triangular-times-orthogonal split, and cyclic Jacobi for symmetric
//! eigenproblems.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use crate::{Error, Result};

/// Numerical thresholds shared by the decompositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on `max |B B^T - I|` for a matrix to count as orthogonal.
    pub ortho_tol: f64,
    /// Minors (and residual norms) below this are treated as zero.
    pub minor_tol: f64,
    /// Relative off-diagonal target for the Jacobi eigensolver.
    pub eig_tol: f64,
    pub max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ortho_tol: 1e-10,
            minor_tol: 1e-12,
            eig_tol: 1e-12,
            max_sweeps: 50,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.ortho_tol) || !positive(self.minor_tol) || !positive(self.eig_tol) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be finite and strictly positive: {self:?}"
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidArgument(
                "max_sweeps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A real `n x n` matrix stored row-major. Entries are always finite.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "matrix order must be at least 1".into(),
            ));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        assert!(n > 0, "matrix order must be at least 1");
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Permutation matrix `sum_i E_{perm[i], i}` (0-based), so column `i`
    /// carries its one in row `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n);
        for (i, &p) in perm.iter().enumerate() {
            m.data[p * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `max |self - other|` over entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "order mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |self - self^T|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == 0.0))
    }

    /// Submatrix with the given (0-based) rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Determinant of the submatrix on `rows x cols`; the empty minor is 1.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> f64 {
        debug_assert_eq!(rows.len(), cols.len());
        if rows.is_empty() {
            return 1.0;
        }
        lu_det(self.submatrix(rows, cols), rows.len())
    }

    pub fn det(&self) -> f64 {
        lu_det(self.data.clone(), self.n)
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.n).map(|i| self.row(i)))
            .finish()
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "order mismatch");
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[l * n + j];
                }
            }
        }
        out
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "order mismatch");
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "order mismatch");
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// LU with partial pivoting, in place. Returns the row permutation and the
/// permutation parity, or `None` if an exact zero pivot is met.
fn lu_in_place(a: &mut [f64], n: usize) -> Option<(Vec<usize>, bool)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut even = true;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            perm.swap(pivot, col);
            even = !even;
        }
        let p = a[col * n + col];
        for i in col + 1..n {
            let factor = a[i * n + col] / p;
            a[i * n + col] = factor;
            for j in col + 1..n {
                a[i * n + j] -= factor * a[col * n + j];
            }
        }
    }
    Some((perm, even))
}

pub(crate) fn lu_det(mut a: Vec<f64>, n: usize) -> f64 {
    match lu_in_place(&mut a, n) {
        None => 0.0,
        Some((_, even)) => {
            let prod: f64 = (0..n).map(|i| a[i * n + i]).product();
            if even {
                prod
            } else {
                -prod
            }
        }
    }
}

/// Solves `a x = rhs` for a row-major `n x n` system. `None` if singular.
pub(crate) fn lu_solve(mut a: Vec<f64>, n: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    let (perm, _) = lu_in_place(&mut a, n)?;
    let mut x: Vec<f64> = perm.iter().map(|&p| rhs[p]).collect();
    for i in 0..n {
        for j in 0..i {
            x[i] -= a[i * n + j] * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= a[i * n + j] * x[j];
        }
        x[i] /= a[i * n + i];
    }
    Some(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinorDirection {
    /// Top-left blocks `B[0..r, 0..r]`.
    Leading,
    /// Bottom-right blocks `B[n-r..n, n-r..n]`.
    Trailing,
}

/// Entry `r - 1` is the determinant of the `r x r` leading (or trailing)
/// block, each block factored independently.
pub fn minor_sequence(b: &SquareMatrix, direction: MinorDirection) -> Vec<f64> {
    let n = b.n();
    (1..=n)
        .map(|r| {
            let idx: Vec<usize> = match direction {
                MinorDirection::Leading => (0..r).collect(),
                MinorDirection::Trailing => (n - r..n).collect(),
            };
            b.minor(&idx, &idx)
        })
        .collect()
}

/// `max |B B^T - I|`.
pub fn orthogonality_defect(b: &SquareMatrix) -> f64 {
    (&(b * &b.transpose()) - &SquareMatrix::identity(b.n())).max_abs()
}

pub fn is_orthogonal(b: &SquareMatrix, tol: f64) -> bool {
    orthogonality_defect(b) <= tol
}

pub(crate) fn require_orthogonal(b: &SquareMatrix, tol: f64) -> Result<()> {
    let defect = orthogonality_defect(b);
    if defect <= tol {
        Ok(())
    } else {
        Err(Error::NotOrthogonal { defect })
    }
}

/// Relative invertibility test: `|det g| > minor_tol * max|g_ij|^n`.
pub(crate) fn check_invertible(g: &SquareMatrix, tol: &Tolerances) -> Result<()> {
    let det = g.det();
    let threshold = tol.minor_tol * g.max_abs().powi(g.n() as i32);
    if det.abs() > threshold {
        Ok(())
    } else {
        Err(Error::SingularInput { det, threshold })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Splits `g = b k` with `b` upper triangular (positive diagonal) and `k`
/// orthogonal.
///
/// Rows of `k` are produced from the last row of `g` upwards: row `i` of `g`
/// lies in the span of rows `i..n` of `k`, so it is orthogonalized against
/// the rows already built and normalized. Each projection sweep is run twice
/// and the coefficients accumulated into `b`.
pub fn gram_schmidt_rows_bottom_up(
    g: &SquareMatrix,
    tol: &Tolerances,
) -> Result<(SquareMatrix, SquareMatrix)> {
    check_invertible(g, tol)?;
    let n = g.n();
    let mut b = SquareMatrix::zeros(n);
    let mut k = SquareMatrix::zeros(n);
    for i in (0..n).rev() {
        let mut v = g.row(i).to_vec();
        for _pass in 0..2 {
            for j in i + 1..n {
                let kj = &k.data[j * n..(j + 1) * n];
                let c = dot(&v, kj);
                for (vl, kl) in v.iter_mut().zip(kj) {
                    *vl -= c * kl;
                }
                b.data[i * n + j] += c;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm < tol.minor_tol {
            return Err(Error::NumericalBreakdown { row: i, norm });
        }
        b.data[i * n + i] = norm;
        for (l, vl) in v.iter().enumerate() {
            k.data[i * n + l] = vl / norm;
        }
    }
    Ok((b, k))
}

/// Eigen-decomposition `S = Q diag(values) Q^T` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Orthogonal; column `i` is the eigenvector for `values[i]`.
    pub vectors: SquareMatrix,
    pub values: Vec<f64>,
}

impl SymEigen {
    /// `Q diag(f(values)) Q^T`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SquareMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|l| q.get(i, l) * fv[l] * q.get(j, l)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> SquareMatrix {
        self.map_values(|v| v)
    }
}

fn frobenius(data: &[f64]) -> f64 {
    data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// The input is symmetrized as `(S + S^T) / 2` first; asymmetry beyond
/// `ortho_tol * max|S|` is rejected.
pub fn jacobi_sym_eig(s: &SquareMatrix, tol: &Tolerances) -> Result<SymEigen> {
    let n = s.n();
    let scale = s.max_abs();
    let asymmetry = s.asymmetry();
    if asymmetry > tol.ortho_tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let mut a = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, 0.5 * (s.get(i, j) + s.get(j, i)));
        }
    }
    let norm = frobenius(&a.data);
    let target = tol.eig_tol * norm;
    let mut q = SquareMatrix::identity(n);

    let off = |a: &SquareMatrix| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a.get(i, j) * a.get(i, j);
                }
            }
        }
        acc.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == tol.max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                off: off(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a.get(p, r);
                if apr == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let arr = a.get(r, r);
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                // A <- J^T A J with J the (p, r) rotation.
                for l in 0..n {
                    let alp = a.get(l, p);
                    let alr = a.get(l, r);
                    a.set(l, p, c * alp - sn * alr);
                    a.set(l, r, sn * alp + c * alr);
                }
                for l in 0..n {
                    let apl = a.get(p, l);
                    let arl = a.get(r, l);
                    a.set(p, l, c * apl - sn * arl);
                    a.set(r, l, sn * apl + c * arl);
                }
                a.set(p, r, 0.0);
                a.set(r, p, 0.0);
                for l in 0..n {
                    let qlp = q.get(l, p);
                    let qlr = q.get(l, r);
                    q.set(l, p, c * qlp - sn * qlr);
                    q.set(l, r, sn * qlp + c * qlr);
                }
            }
        }
    }
    Ok(SymEigen {
        values: a.diagonal(),
        vectors: q,
    })
}

/// Singular value decomposition `g = U diag(sigma) V^T` by one-sided
/// (Hestenes) Jacobi.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: SquareMatrix,
    pub sigma: Vec<f64>,
    pub v: SquareMatrix,
}

/// Cyclic Jacobi on `g^T g` carried out implicitly: each rotation that would
/// annihilate an off-diagonal entry of `g^T g` is applied to the columns of
/// `g` (and accumulated into `V`), so the squared matrix is never formed.
/// Sweeps stop once every column pair satisfies
/// `|<w_p, w_q>| <= eig_tol * |w_p| |w_q|`.
pub fn jacobi_svd(g: &SquareMatrix, tol: &Tolerances) -> Result<Svd> {
    let n = g.n();
    let mut w = g.clone();
    let mut v = SquareMatrix::identity(n);
    let col_dot = |m: &SquareMatrix, p: usize, q: usize| -> f64 {
        (0..n).map(|i| m.get(i, p) * m.get(i, q)).sum()
    };
    let mut sweeps = 0;
    loop {
        let mut worst = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_dot(&w, p, p);
                let beta = col_dot(&w, q, q);
                let gamma = col_dot(&w, p, q);
                let scale = (alpha * beta).sqrt();
                if scale == 0.0 {
                    continue;
                }
                worst = worst.max(gamma.abs() / scale);
                if gamma.abs() <= tol.eig_tol * scale {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for i in 0..n {
                        let mp = m.get(i, p);
                        let mq = m.get(i, q);
                        m.set(i, p, c * mp - s * mq);
                        m.set(i, q, s * mp + c * mq);
                    }
                }
            }
        }
        if worst <= tol.eig_tol {
            break;
        }
        sweeps += 1;
        if sweeps == tol.max_sweeps {
            return Err(Error::NoConvergence { sweeps, off: worst });
        }
    }
    let sigma: Vec<f64> = (0..n).map(|j| col_dot(&w, j, j).sqrt()).collect();
    let mut u = w;
    for (j, &sj) in sigma.iter().enumerate() {
        if sj == 0.0 {
            return Err(Error::SingularInput {
                det: 0.0,
                threshold: 0.0,
            });
        }
        for i in 0..n {
            u.set(i, j, u.get(i, j) / sj);
        }
    }
    Ok(Svd { u, sigma, v })
}
