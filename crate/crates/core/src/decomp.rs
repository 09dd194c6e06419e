//! Iwasawa `G = NAK` and Cartan `G = K exp(p0)` factorizations of `GL_n(R)`.

use crate::linalg::{
    gram_schmidt_rows_bottom_up, is_orthogonal, jacobi_svd, SquareMatrix, Tolerances,
};
use crate::rng::{self, Domain, Gaussian};
use crate::{Error, Result};

/// `g = n_part * diag(a_part) * k_part`.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    /// Upper triangular with unit diagonal.
    pub n_part: SquareMatrix,
    /// Diagonal of the `A` factor, all entries positive.
    pub a_part: Vec<f64>,
    /// Orthogonal.
    pub k_part: SquareMatrix,
}

impl IwasawaFactors {
    pub fn reconstruct(&self) -> SquareMatrix {
        let na = scale_columns(&self.n_part, &self.a_part);
        &na * &self.k_part
    }
}

/// `g = k_part * p_part` with `p_part` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct CartanFactors {
    pub k_part: SquareMatrix,
    pub p_part: SquareMatrix,
}

impl CartanFactors {
    pub fn reconstruct(&self) -> SquareMatrix {
        &self.k_part * &self.p_part
    }
}

fn scale_columns(m: &SquareMatrix, d: &[f64]) -> SquareMatrix {
    let n = m.n();
    let mut out = m.clone();
    for i in 0..n {
        for (j, dj) in d.iter().enumerate() {
            out.set(i, j, m.get(i, j) * dj);
        }
    }
    out
}

pub fn iwasawa(g: &SquareMatrix, tol: &Tolerances) -> Result<IwasawaFactors> {
    let (b, k) = gram_schmidt_rows_bottom_up(g, tol)?;
    let a = b.diagonal();
    let n = g.n();
    let mut unipotent = SquareMatrix::identity(n);
    for i in 0..n {
        for (j, aj) in a.iter().enumerate().skip(i + 1) {
            unipotent.set(i, j, b.get(i, j) / aj);
        }
    }
    Ok(IwasawaFactors {
        n_part: unipotent,
        a_part: a,
        k_part: k,
    })
}

/// The orthogonal Iwasawa factor of `g`.
pub fn kappa(g: &SquareMatrix, tol: &Tolerances) -> Result<SquareMatrix> {
    Ok(gram_schmidt_rows_bottom_up(g, tol)?.1)
}

/// The `A` component of `g` as a vector of positive reals.
pub fn h_projection(g: &SquareMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(gram_schmidt_rows_bottom_up(g, tol)?.0.diagonal())
}

/// Both Iwasawa projections from a single factorization: `(H(g), kappa(g))`.
pub fn h_and_kappa(g: &SquareMatrix, tol: &Tolerances) -> Result<(Vec<f64>, SquareMatrix)> {
    let (b, k) = gram_schmidt_rows_bottom_up(g, tol)?;
    Ok((b.diagonal(), k))
}

/// Exponents of the half-sum of positive roots: `(n - 2i + 1) / 2`, `i = 1..n`.
pub fn rho_exponents(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| (n as f64 - 2.0 * i as f64 + 1.0) / 2.0)
        .collect()
}

/// `a^rho = prod_i a_i^((n - 2i + 1) / 2)`.
pub fn rho_power(a: &[f64]) -> Result<f64> {
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| v.is_nan() || **v <= 0.0) {
        return Err(Error::NonPositiveEntry { index, value });
    }
    Ok(a.iter()
        .zip(rho_exponents(a.len()))
        .map(|(ai, e)| ai.powf(e))
        .product())
}

/// `g = k p` with `p = (g^T g)^(1/2)`.
///
/// The square root comes from the Jacobi diagonalization of `g^T g`, run
/// one-sided on the columns of `g` ([`jacobi_svd`]): with `g = U S V^T`,
/// `p = V S V^T` and `k = U V^T`.
pub fn cartan(g: &SquareMatrix, tol: &Tolerances) -> Result<CartanFactors> {
    crate::linalg::check_invertible(g, tol)?;
    let svd = jacobi_svd(g, tol)?;
    let n = g.n();
    let v = &svd.v;
    let mut p = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..n)
                .map(|l| v.get(i, l) * svd.sigma[l] * v.get(j, l))
                .sum();
            p.set(i, j, s);
            p.set(j, i, s);
        }
    }
    let mut k = &svd.u * &v.transpose();
    if !is_orthogonal(&k, tol.ortho_tol) {
        k = gram_schmidt_rows_bottom_up(&k, tol)?.1;
    }
    Ok(CartanFactors {
        k_part: k,
        p_part: p,
    })
}

const SPD_SHIFT: f64 = 1e-6;

/// A seeded element of `exp(p0)`: `A^T A + 1e-6 I` for Gaussian `A`.
pub fn exp_p0_sample(n: usize, seed: u64) -> SquareMatrix {
    let mut gauss = Gaussian::new(rng::stream(Domain::SpdSample, seed, 0));
    exp_p0_from(n, &mut gauss)
}

pub(crate) fn exp_p0_from<R: rand::Rng>(n: usize, gauss: &mut Gaussian<R>) -> SquareMatrix {
    assert!(n >= 1, "matrix order must be at least 1");
    let mut data = vec![0.0; n * n];
    gauss.fill(&mut data);
    let a = SquareMatrix::new(n, data).expect("Gaussian entries are finite");
    let mut s = &a.transpose() * &a;
    for i in 0..n {
        s.set(i, i, s.get(i, i) + SPD_SHIFT);
    }
    // A^T A is symmetric in exact arithmetic; pin it bitwise.
    for i in 0..n {
        for j in 0..i {
            s.set(i, j, s.get(j, i));
        }
    }
    s
}
