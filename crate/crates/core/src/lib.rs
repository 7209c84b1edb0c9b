//! Algorithmic-belief sequential decision making.
//!
//! The crate evaluates and maximizes the algorithmic information ratio (AIR)
//! and its model-index variant (MAIR), builds the posterior-sampling agents
//! that follow from them, and ships the classical baselines and environment
//! schedules used to compare them. Everything here is `no_std` with `alloc`;
//! file formats, the CLI and the parallel harness live in `algobelief-bench`.
//!
//! Module map:
//!
//! - [`prob`]: policies, models, model classes, divergences.
//! - [`air`]: joint beliefs, AIR value/gradient/maximizer, IR, DEC, identities.
//! - [`saddle`]: minimax solver shared by AMS and MAMS.
//! - [`agents`]: simplified APS, APS, AMS, EXP3, UCB1, Thompson sampling.
//! - [`linear`]: modified IPW estimator and the Gaussian linear bandit agent.
//! - [`mair`]: MAIR, closed-form adaptive beliefs, MAPS and MAMS.
//! - [`envs`]: mean schedules, sampling and regret benchmarks.
//! - [`rng`]: counter-based random streams.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod agents;
pub mod air;
pub mod envs;
mod error;
pub mod linear;
pub mod mair;
pub(crate) mod num;
pub mod prob;
pub mod rng;
pub mod saddle;

pub use error::{Error, Result};
pub use prob::{
    hellinger_sq, kl_bernoulli, kl_categorical, Family, Model, ModelClass, Observation, Policy,
    EPS_MIN,
};
