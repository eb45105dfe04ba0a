//! Experiment commands and file tools for SF-ETT tensors.

pub mod approx;
pub mod eigs;
pub mod io;
pub mod report;
pub mod schedule;

pub use approx::{cmd_approx, ApproxConfig, ApproxReport, ApproxRow, FuncKind};
pub use eigs::{cmd_eigs, EigsConfig, EigsReport, OpKind};
pub use report::without_timing;
pub use schedule::rank_schedule;
