//! Dense matrix value type and the factorization primitives the rest of the
//! crate is built on.
//!
//! Factorizations are delegated to `faer` (sequential mode); this module owns
//! the contracts: sign conventions, rank tolerance and error reporting.

mod dense;
mod factor;

pub use dense::DenseMatrix;
pub use factor::{
    cholesky_upper, condition_number, lstsq, max_principal_angle, orthonormality_error,
    pinv_apply, singular_values, smallest_singular_value, solve_square, spectral_norm, svd,
    thin_qr, QrFactors, Side, SvdFactors, RANK_TOL,
};
