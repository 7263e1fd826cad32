//! Compact, maximally diverse diagnostic bases of wrong programs.
//!
//! Wrong submissions to a programming problem are reduced to failure
//! signatures (which golden tests each one fails). A problem's signatures
//! form a binary matrix; [`prefilter`] drops trivial rows and unusable
//! problems, [`wrongselect`] picks a GF(2) row basis minimising average
//! pairwise Jaccard similarity, and [`judgemetrics`] scores generated tests
//! against the chosen codes. [`pipeline`] ties the stages together over a
//! corpus of verdict records.

pub mod fraction;
pub mod judgemetrics;
pub mod pipeline;
pub mod prefilter;
pub mod rng;
pub mod sigmatrix;
pub mod wrongselect;

use thiserror::Error;

pub use sigmatrix::{Signature, Verdict, VerdictMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);
