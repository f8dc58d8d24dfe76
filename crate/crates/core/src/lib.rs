//! Bayesian entropy estimation for severely undersampled discrete data.
//!
//! The crate estimates the Shannon entropy (in nats) of an unknown discrete
//! distribution from a handful of samples, in the regime where many symbols
//! have never been observed. It provides:
//!
//! - finite-alphabet estimators: plugin, Miller-Madow, fixed-concentration
//!   Dirichlet posterior moments, the NSB mixture and its asymptotic form
//!   ([`dirichlet`]);
//! - closed-form Pitman-Yor prior and posterior entropy moments together with
//!   the partition evidence ([`pitman_yor`]);
//! - the Pitman-Yor mixture (PYM) and Dirichlet-process mixture (DPM)
//!   estimators, which put an approximately flat prior on entropy and
//!   integrate over the process parameters numerically ([`pym`]);
//! - exact posterior sampling of entropy by stick-breaking ([`sampler`]);
//! - synthetic test distributions with known entropy ([`synthetic`]).
//!
//! ```
//! use pym_entropy::{CountData, PymConfig};
//!
//! let counts = CountData::from_samples("abracadabra".chars());
//! let est = pym_entropy::pym::pym_estimate(&counts, &PymConfig::default()).unwrap();
//! assert!(est.mean > 0.0 && est.std.unwrap() > 0.0);
//! ```
//!
//! Runnable walkthroughs for each capability live under `examples/`; the
//! `pym-entropy` binary exposes the same functionality on the command line.

#![forbid(unsafe_code)]

pub mod cli;
pub mod counts;
pub mod dirichlet;
mod error;
pub mod estimate;
pub mod optimize;
pub mod pitman_yor;
pub mod pym;
pub mod quadrature;
pub mod sampler;
pub mod special;
pub mod synthetic;

pub use counts::{CountData, Multiplicities};
pub use error::{Error, Result};
pub use estimate::{Diagnostics, EntropyEstimate};
pub use pitman_yor::PyParams;
pub use pym::{GammaPrior, HGammaParams, PymConfig};
pub use sampler::RngSeed;
