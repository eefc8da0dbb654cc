//! Tests of stationarity for univariate time series.
//!
//! The library detects departures from (strict or second-order) stationarity by
//! combining CUSUM change-point tests, each sensitive to a different kind of
//! change:
//!
//! - `d` — empirical d.f. test, sensitive to changes in the contemporary
//!   distribution,
//! - `c` — empirical autocopula test at lag `h - 1`, sensitive to changes in
//!   the serial dependence,
//! - `m`, `v`, `a` — U-statistic tests for the mean, the variance and the
//!   autocovariances.
//!
//! Null distributions are approximated with a dependent multiplier bootstrap
//! (a moving average of i.i.d. normals weighted by the Parzen kernel, playing
//! the role of a block bootstrap). Component tests are resampled with *shared*
//! multiplier sequences so that their p-values can be combined with Fisher's
//! or Stouffer's rule into one global verdict.
//!
//! Entry points:
//!
//! - [`testrun::run_test`] — run a preset test on a [`series::Series`],
//! - [`harness::run_experiment`] — seeded Monte Carlo rejection tables,
//! - [`simgen::generate`] — the null/alternative data generators,
//! - the `examples/` directory — one runnable example per capability.

pub mod cli;
pub mod combine;
pub mod empirical;
pub mod error;
pub mod harness;
pub mod multiplier;
pub mod normal;
pub mod rankstats;
pub mod series;
pub mod simgen;
pub mod sostats;
pub mod testrun;

pub use combine::{CombinationSpec, ComponentResult, Preset, Psi, TestReport};
pub use error::{Error, Result};
pub use multiplier::{generate_multipliers, select_bandwidth, BandwidthChoice, MultiplierSet};
pub use series::Series;
pub use testrun::{run_test, TestConfig};
