//! Bayesian updating of beam finite-element models from measured natural
//! frequencies.
//!
//! The crate is organized bottom-up:
//!
//! * [`fem`]: 3D Euler-Bernoulli beam elements, global assembly and the
//!   generalized eigenproblem.
//! * [`bayes`]: Gaussian likelihood of measured frequencies, Gaussian prior
//!   and the unnormalized log-posterior.
//! * [`mcdwis`]: Monte Carlo dynamically weighted importance sampling with
//!   adaptive pruned-enriched population control.
//! * [`amh`]: adaptive Metropolis-Hastings baseline.
//! * [`report`], [`synthetic`], [`experiment`]: experiment harness.

// NaN must fail these checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amh;
pub mod bayes;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod math;
pub mod mcdwis;
pub mod params;
pub mod report;
pub mod rng;
pub mod synthetic;

pub use error::{Error, Result};
pub use params::{ParameterSpace, UpdatingVector};
