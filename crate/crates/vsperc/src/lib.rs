//! Command-line driver, file formats and a thread-pool trial runner for
//! [`vsperc_core`].

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;
pub mod record;
pub mod suites;

pub use parallel::ParallelRunner;
