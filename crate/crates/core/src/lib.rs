//! Generalized CUR (GCUR) decomposition of matrix pairs.
//!
//! The pipeline is: generalized SVD of `(A, B)` ([`gsvd`]), greedy DEIM index
//! selection on its factors ([`deim`]), and Stewart-optimal middle matrices
//! ([`gcur`]). [`curfac`] holds the single-matrix DEIM-CUR it generalizes,
//! [`synth`] the seeded test-problem generators and [`method`] a registry of
//! low-rank approximation strategies selectable by name.

pub mod curfac;
pub mod deim;
pub mod error;
pub mod gcur;
pub mod gsvd;
pub mod matkit;
pub mod method;
pub mod synth;

pub use error::{Error, Result};
pub use matkit::DenseMatrix;
