//! Numerical toolkit for traces on the weak-`l_1` operator ideal.
//!
//! Eigenvalue and singular-value sequences are handled as [`BlockSequence`]s
//! that can be evaluated pointwise or through exact dyadic block sums. On top
//! of that sit the normalised block-sum functional `Phi`, estimators for the
//! range of all Banach limits, the measurability classifier and the residue
//! pipeline for radial symbols.

// `!(x > 0.0)` guards are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod generators;
pub mod measurability;
pub mod residue;
pub mod sequence;
pub mod summation;
pub mod transforms;

pub use error::{Error, Result};
pub use sequence::{BlockSequence, Granularity, Truncation};
pub use summation::SummationMode;
