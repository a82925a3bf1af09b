//! Pricing of Bermudan/American-style optimal stopping problems by
//! regression Monte Carlo with randomized neural networks.
//!
//! The library provides:
//!
//! * [`sim`] — simulators for Black-Scholes, Heston and fractional Brownian
//!   motion paths with reproducible per-path random substreams,
//! * [`payoff`] — the exercise payoff families (max-call, geometric put,
//!   basket call, identity, max, mean),
//! * [`features`] — frozen random hidden layers (feedforward, time-augmented
//!   and recurrent) plus the degree-2 polynomial baseline basis,
//! * [`regress`] — rank-robust SVD least squares for the trained readouts,
//! * [`algos`] — the pricers: randomized least squares Monte Carlo,
//!   randomized fitted Q-iteration, the recurrent variant, and the classical
//!   polynomial-basis baselines,
//! * [`oracle`] — closed-form European prices and a Cox-Ross-Rubinstein
//!   binomial tree used as independent ground truth.
//!
//! All numeric code is generic over the scalar type through the [`Real`]
//! trait (`f32` or `f64`); the type aliases at the crate root fix `f64` for
//! everyday use.

pub mod algos;
pub mod error;
pub mod features;
pub mod oracle;
pub mod payoff;
pub mod real;
pub mod regress;
pub mod sim;
pub(crate) mod util;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` instantiations used by the CLI and the benchmark harness.
pub type PathSet64 = sim::PathSet<f64>;
pub type TimeGrid64 = sim::TimeGrid<f64>;
pub type Payoff64 = payoff::Payoff<f64>;
pub type RandomBasis64 = features::RandomBasis<f64>;
pub type RecurrentBasis64 = features::RecurrentBasis<f64>;
pub type PriceEstimate64 = algos::PriceEstimate<f64>;
