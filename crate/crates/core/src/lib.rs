//! Spectral and Monte Carlo core for vacant-set level-set percolation on the
//! (d+1)-regular tree.
//!
//! The crate is `no_std` (it needs `alloc`) and splits into three layers:
//!
//! * [`params`] holds the closed-form constants of the tree: the Gaussian law
//!   `ν`, the one-step Mehler kernel, interlacement vacancy probabilities,
//!   ball capacities and the critical interlacement level `u_*`.
//! * [`spectral`] discretizes the truncated operator `L_h` on `L²(ν)` with a
//!   Nyström scheme and extracts its Perron eigenpair. Everything that depends
//!   on `λ_h` (the critical height `h_*`, `λ(u,a)`, the critical line,
//!   parabola arcs, second-moment bounds) is built on top of it.
//! * [`sim`] samples the free field, the interlacement vacant set and the
//!   Lupu edge percolation on finite tree balls, and turns them into Bernoulli
//!   estimators with reproducible per-trial random streams.
//!
//! [`diagram`] assembles the `(u, a)` phase diagram from the spectral layer.
//!
//! Trial loops are driven through [`runner::TrialRunner`]; the core ships a
//! sequential runner and companion crates can plug in a thread pool without
//! changing any result.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod diagram;
pub mod error;
pub mod math;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod runner;
pub mod sim;
pub mod spectral;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use params::{Level, TreeParams, VacancyConstants};
pub use quadrature::{GridOptions, QuadratureGrid};
pub use runner::{Sequential, Tally, TrialRunner};
pub use sim::Seed;
pub use spectral::{CriticalHeight, DiscreteOperator, SpectralOptions, SpectralPair};
pub use stats::McEstimate;
