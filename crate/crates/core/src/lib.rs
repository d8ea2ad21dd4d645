//! Uplink throughput model for a single CDMA macrocell with one embedded
//! microcell acting as a data access point (DAP).
//!
//! Users choose between the two bases by comparing path gains against a
//! desensitivity threshold. Users on the macrocell transmit simultaneously at
//! a fixed rate; users on the DAP take turns, each at the highest rate the
//! interference allows. The crate computes the resulting rate and throughput
//! statistics two ways:
//!
//! * [`montecarlo`]: seeded, reproducible snapshot simulation.
//! * [`analytic`]: binomial tier counts combined with moment-matched
//!   lognormal interference, giving truncated-lognormal rate distributions.
//!
//! [`sweeps`] scans the normalized desensitivity and the population size and
//! locates the point where per-user and total DAP throughput balance.

pub mod analytic;
pub mod ecdf;
pub mod error;
pub mod interference;
pub mod model;
pub mod montecarlo;
pub mod normal;
pub mod params;
pub mod quadrature;
pub mod sweeps;

pub use error::{Error, Result};
pub use params::{Position, SystemParams, Tier, UserDistribution};
