//! Bernstein-type tail bounds for C-mixing processes and the kernel
//! smoothers whose uniform convergence rates follow from them.
//!
//! The crate has three layers:
//!
//! - [`processes`]: simulators with known ground truth (doubling and
//!   logistic maps, finite Markov chains, lattice moving-average fields)
//!   and regression/modal datasets built on them;
//! - [`bounds`] and [`empirical`]: evaluators for the tail bounds, their
//!   N0 validity thresholds, the Bernstein blocking scheme, the exact
//!   covariance-inequality check on chains, and the chaining conditions
//!   with their Dudley-type entropy integral;
//! - [`smoothers`] and [`harness`]: kernel estimators (density, mean,
//!   two-step variance, conditional mode) and Monte Carlo experiments
//!   that compare empirical tails with the bounds and fit log-log
//!   convergence rates against the theoretical exponents.
//!
//! Everything stochastic is a pure function of (configuration, seed);
//! replications derive per-index seeds so parallel scheduling cannot
//! change any result.

pub mod bounds;
pub mod empirical;
mod error;
pub mod harness;
pub mod io;
pub mod processes;
pub mod seed;
pub mod smoothers;

pub use error::{Error, Result};
