//! The image of the positive definite matrices under the Iwasawa projection
//! `kappa: G -> K`.
//!
//! An orthogonal `B` lies in `kappa(exp p0)` iff all its leading principal
//! minors are positive, iff all its trailing principal minors are positive.
//! [`membership`] decides by the leading minors and reports the trailing ones
//! for cross-checking; [`preimage_in_p0`] builds an explicit positive definite
//! `p` with `kappa(p) = B`.

use crate::decomp::kappa;
use crate::linalg::{
    jacobi_sym_eig, lu_solve, minor_sequence, require_orthogonal, MinorDirection, SquareMatrix,
    Tolerances,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub in_image: bool,
    pub leading_minors: Vec<f64>,
    pub trailing_minors: Vec<f64>,
    /// Some minor in either sequence has magnitude below `minor_tol`.
    pub boundary: bool,
}

impl MembershipReport {
    pub fn min_leading(&self) -> f64 {
        self.leading_minors
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_trailing(&self) -> f64 {
        self.trailing_minors
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

fn first_nonpositive_leading(b: &SquareMatrix, tol: &Tolerances) -> Option<(usize, f64)> {
    minor_sequence(b, MinorDirection::Leading)
        .into_iter()
        .enumerate()
        .find(|(_, v)| v.is_nan() || *v <= tol.minor_tol)
        .map(|(i, v)| (i + 1, v))
}

/// Unit upper triangular `C` with `B C` symmetric.
///
/// Column `j` of `C` is `(x, 1, 0, ..., 0)` where `x` solves the
/// `(j-1) x (j-1)` system `(BC)_{ij} = (BC)_{ji}`, `i < j`, whose matrix is
/// the leading block of `B`. Requires every leading minor of `B` to exceed
/// `minor_tol`.
pub fn symmetrize_right(b: &SquareMatrix, tol: &Tolerances) -> Result<SquareMatrix> {
    if let Some((r, value)) = first_nonpositive_leading(b, tol) {
        return Err(Error::MinorNotPositive { r, value });
    }
    let n = b.n();
    let mut c = SquareMatrix::identity(n);
    // bc[i][j] for i > j, filled column by column as C grows.
    let mut bc = SquareMatrix::zeros(n);
    for j in 0..n {
        if j > 0 {
            let idx: Vec<usize> = (0..j).collect();
            let system = b.submatrix(&idx, &idx);
            let rhs: Vec<f64> = (0..j).map(|i| bc.get(j, i) - b.get(i, j)).collect();
            let x =
                lu_solve(system, j, &rhs).ok_or(Error::MinorNotPositive { r: j, value: 0.0 })?;
            for (i, xi) in x.into_iter().enumerate() {
                c.set(i, j, xi);
            }
        }
        // Rows below j of column j of BC, needed by later columns.
        for i in j + 1..n {
            let v: f64 = (0..=j).map(|l| b.get(i, l) * c.get(l, j)).sum();
            bc.set(i, j, v);
        }
    }
    Ok(c)
}

/// Decides membership of an orthogonal `B` in `kappa(exp p0)`.
pub fn membership(b: &SquareMatrix, tol: &Tolerances) -> Result<MembershipReport> {
    require_orthogonal(b, tol.ortho_tol)?;
    let leading_minors = minor_sequence(b, MinorDirection::Leading);
    let trailing_minors = minor_sequence(b, MinorDirection::Trailing);
    let boundary = leading_minors
        .iter()
        .chain(&trailing_minors)
        .any(|v| v.abs() < tol.minor_tol);
    let in_image = !boundary && leading_minors.iter().all(|&v| v > tol.minor_tol);
    Ok(MembershipReport {
        in_image,
        leading_minors,
        trailing_minors,
        boundary,
    })
}

const PREIMAGE_TOL: f64 = 1e-8;

/// Positive definite `p` with `kappa(p) = B`, namely `p = b^{-1} B` where
/// `b = symmetrize_right(B^T)`.
///
/// The result is checked for symmetry, positive definiteness and the
/// `kappa` round trip; any failure is reported as `VerificationFailure`.
pub fn preimage_in_p0(b: &SquareMatrix, tol: &Tolerances) -> Result<SquareMatrix> {
    let n = b.n();
    let upper = symmetrize_right(&b.transpose(), tol)?;
    // p = upper^{-1} B by back substitution (upper is unit upper triangular).
    let mut p = SquareMatrix::zeros(n);
    for col in 0..n {
        for i in (0..n).rev() {
            let mut v = b.get(i, col);
            for l in i + 1..n {
                v -= upper.get(i, l) * p.get(l, col);
            }
            p.set(i, col, v);
        }
    }

    let scale = p.max_abs().max(1.0);
    let asymmetry = p.asymmetry();
    if asymmetry > PREIMAGE_TOL * scale {
        return Err(Error::VerificationFailure(format!(
            "preimage asymmetry {asymmetry:e} exceeds {:e}",
            PREIMAGE_TOL * scale
        )));
    }
    let eig = jacobi_sym_eig(
        &p,
        &Tolerances {
            ortho_tol: PREIMAGE_TOL,
            ..*tol
        },
    )
    .map_err(|e| Error::VerificationFailure(format!("eigensolver on preimage: {e}")))?;
    if let Some(lmin) = eig.values.iter().cloned().reduce(f64::min) {
        if lmin.is_nan() || lmin <= 0.0 {
            return Err(Error::VerificationFailure(format!(
                "preimage is not positive definite (lambda_min = {lmin:e})"
            )));
        }
    }
    // det p = 1 by construction, so only exact breakdown should stop the
    // round trip; the relative singularity cutoff is meant for raw input.
    let verify_tol = Tolerances {
        minor_tol: f64::MIN_POSITIVE,
        ..*tol
    };
    let roundtrip = kappa(&p, &verify_tol)
        .map_err(|e| Error::VerificationFailure(format!("kappa of preimage: {e}")))?
        .max_abs_diff(b);
    if roundtrip > PREIMAGE_TOL {
        return Err(Error::VerificationFailure(format!(
            "kappa round trip error {roundtrip:e} exceeds {PREIMAGE_TOL:e}"
        )));
    }
    Ok(p)
}
