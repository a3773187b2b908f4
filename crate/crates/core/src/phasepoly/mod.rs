//! Laurent polynomial algebra: complex coefficients, multivariate Laurent
//! polynomials with positive/negative degree tracking, reduction modulo
//! `Y^g − 1`, and dense polynomial matrices.

mod coeff;
mod laurent;
mod matrix;

pub use coeff::{Coeff, GaussianRational, FLOAT_ZERO};
pub use laurent::{Degree, DegreePair, Exponents, LaurentPoly, Monomial};
pub use matrix::PolyMatrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("variable `{0}` evaluated at zero under a negative power")]
    ZeroAtNegativePower(String),
    #[error("dimension mismatch: {left:?} against {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("rows have different lengths")]
    Ragged,
}
