//! Shared-factor extended tensor trains (SF-ETT): a tensor train core whose
//! modes are compressed by Tucker factors, with one factor shared across the
//! trailing modes. Includes SVD-based rounding, the Riemannian geometry of the
//! fixed-rank manifold, and two solvers built on it.

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod ett;
pub mod linalg;
pub mod oracle;
pub mod problems;
pub mod sfett;
pub mod solvers;
pub mod tangent;
pub mod tt;

#[cfg(test)]
mod testing;

pub use dense::DenseTensor;
pub use error::{Error, Result};
pub use ett::Ett;
pub use linalg::{truncated_svd, Mat, SvdResult, Truncation};
pub use sfett::{quasi_optimality_constant, RoundingOrder, SfEttRank, SfEttTensor};
pub use solvers::{locg, rayleigh_ritz, rstgd, IterRecord, LocgOptions, RstgdOptions, SolveTrace, Target};
pub use tangent::{Ambient, EuclideanPartials, Foot, TangentVector};
pub use tt::{Orth, TtOperator, TtTensor};
