//! Simulation and estimation toolkit for studying how a finite tick size
//! changes the statistics of price diffusion.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: price and return series, integration, tick-grid coarse-graining.
//! - [`arch`]: ARCH(1) path generation and the tick coarse-graining sweep.
//! - [`estimators`]: complementary CDF, zero-return frequency, Hill tail
//!   exponent, autocorrelation function and DFA Hurst exponent.
//! - [`clocks`]: real-time, transaction-time and shuffled transaction-time
//!   aggregation of per-trade returns.
//! - [`synth`]: synthetic trade streams with controllable trade-rate and
//!   volatility dynamics.
//! - [`panel`]: paired before/after panels and one-sided t-tests.
//!
//! All operations are pure functions over immutable inputs; random draws
//! are fully determined by explicit 64-bit seeds (see [`rng`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arch;
pub mod clocks;
pub mod error;
pub mod estimators;
pub mod panel;
pub mod rng;
pub mod series;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
pub use series::{PriceSeries, ReturnSeries, TickGrid};
