//! Numerical toolkit for the Iwasawa projection of `GL_n(R)`, the lowest
//! `K`-types of its principal series, and Monte Carlo evaluation of the
//! Eisenstein integral for principal matrix coefficients.
//!
//! Module layout follows the computation bottom-up:
//!
//! * [`linalg`]: dense matrices, minors, bottom-up Gram–Schmidt, Jacobi.
//! * [`decomp`]: `G = NAK` with the projections `H` and `kappa`, and `G = K exp(p0)`.
//! * [`kappa_image`]: the image of the positive definite matrices under `kappa`.
//! * [`reps`]: characters of `M` and `A`, the Weyl group, compound matrices
//!   and lowest `K`-types.
//! * [`eisenstein`]: Haar sampling on `O(n)`, Monte Carlo estimates and the
//!   verification suites built on them.

pub mod decomp;
pub mod eisenstein;
mod error;
pub mod kappa_image;
pub mod linalg;
pub mod reps;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{SquareMatrix, Tolerances};
