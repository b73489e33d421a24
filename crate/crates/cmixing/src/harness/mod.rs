//! Monte Carlo experiments validating the tail bounds and convergence
//! rates: empirical tail probabilities against the bound evaluators, and
//! log-log rate fits against the theoretical exponents.
//!
//! Replications are independent work units; each derives its own seed from
//! the master seed and the replication index, and aggregation is
//! order-insensitive, so reports are byte-identical for any worker count.

mod rate;
mod tail;

pub use rate::{
    fit_loglog_slope, rate_experiment, BandwidthRule, EstimatorId, ModalConfig, RateExperiment,
    RateReport, RegressionConfig,
};
pub use tail::{
    bound_comparison, clopper_pearson, tail_probability, tail_probability_detailed,
    BoundComparisonConfig, ComparisonRow, TailExperiment, TailPoint,
};

use crate::error::{Error, Result};
use crate::processes::{
    simulate_doubling_map, simulate_logistic_map, simulate_markov_chain, GeneratorMeta,
    SampleGrid, Series, TransitionMatrix,
};
use crate::smoothers::{KernelId, KernelSpec};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Processes the harness can drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ProcessId {
    Doubling,
    Logistic { burn_in: usize },
    /// iid signs, for exact-binomial calibration of the tail machinery.
    Rademacher,
    /// Lazy uniform-refresh chain on `states` labels (k+0.5)/states.
    StickyUniform { states: usize, rho: f64 },
}

impl ProcessId {
    pub fn simulate(&self, n: usize, seed: u64) -> Result<Series> {
        match self {
            ProcessId::Doubling => simulate_doubling_map(n, seed),
            ProcessId::Logistic { burn_in } => simulate_logistic_map(n, seed, *burn_in),
            ProcessId::Rademacher => {
                if n == 0 {
                    return Err(Error::invalid("need n >= 1".to_string()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values = (0..n)
                    .map(|_| if rng.next_u64() & 1 == 0 { -1.0 } else { 1.0 })
                    .collect();
                Ok(Series {
                    values,
                    grid: SampleGrid::time_series(n),
                    generator: GeneratorMeta::Rademacher,
                    seed,
                })
            }
            ProcessId::StickyUniform { states, rho } => {
                let chain = TransitionMatrix::sticky_uniform(*states, *rho)?;
                let labels: Vec<f64> =
                    (0..*states).map(|k| (k as f64 + 0.5) / *states as f64).collect();
                simulate_markov_chain(&chain, &labels, n, seed)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            ProcessId::Doubling => "doubling".to_string(),
            ProcessId::Logistic { .. } => "logistic".to_string(),
            ProcessId::Rademacher => "rademacher".to_string(),
            ProcessId::StickyUniform { states, rho } => format!("sticky:{states},{rho}"),
        }
    }
}

/// Centered bounded statistics with known envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum StatisticId {
    /// h(x) = sin(2 pi x): A = 1, B = 2 pi, variance 1/2 under Uniform[0,1].
    Sin2Pi,
    /// Piecewise-linear step from 0 to 1 across [center-halfwidth,
    /// center+halfwidth], centered under the invariant law.
    SmoothIndicator { center: f64, halfwidth: f64 },
    /// Unscaled Epanechnikov bump K((x - x0)/scale), centered.
    KernelAtPoint { x0: f64, scale: f64 },
    /// The raw value itself (for +-1 processes).
    Identity,
}

/// A statistic with its exact mean under the process's invariant law and
/// the (A, B, sigma^2) envelopes of the centered version.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Statistic {
    pub id: StatisticId,
    pub mean: f64,
    pub a: f64,
    pub b: f64,
    pub sigma2: f64,
    /// Whether sigma2 is exact or the always-sound A^2 fallback.
    pub sigma2_exact: bool,
}

impl Statistic {
    /// Centered evaluation h(z) - mean.
    pub fn eval(&self, z: f64) -> f64 {
        self.raw(z) - self.mean
    }

    fn raw(&self, z: f64) -> f64 {
        match &self.id {
            StatisticId::Sin2Pi => (2.0 * std::f64::consts::PI * z).sin(),
            StatisticId::SmoothIndicator { center, halfwidth } => {
                ramp(z, *center, *halfwidth)
            }
            StatisticId::KernelAtPoint { x0, scale } => {
                let k = KernelSpec::new(KernelId::Epanechnikov, 1);
                k.eval(&[(z - x0) / scale])
            }
            StatisticId::Identity => z,
        }
    }
}

fn ramp(z: f64, center: f64, halfwidth: f64) -> f64 {
    if z <= center - halfwidth {
        0.0
    } else if z >= center + halfwidth {
        1.0
    } else {
        (z - (center - halfwidth)) / (2.0 * halfwidth)
    }
}

/// Resolve a statistic against a process: exact mean and envelopes under
/// the invariant law, or an error when no calibration is known.
pub fn statistic_for(process: &ProcessId, id: &StatisticId) -> Result<Statistic> {
    let uncalibrated = || Error::UncalibratedStatistic {
        statistic: format!("{id:?}"),
        process: process.name(),
    };
    match (process, id) {
        (ProcessId::Doubling, StatisticId::Sin2Pi) => Ok(Statistic {
            id: id.clone(),
            mean: 0.0,
            a: 1.0,
            b: 2.0 * std::f64::consts::PI,
            sigma2: 0.5,
            sigma2_exact: true,
        }),
        (ProcessId::Logistic { .. }, StatisticId::Sin2Pi) => Ok(Statistic {
            // The arcsine law is symmetric about 1/2 and sin(2 pi x) is
            // antisymmetric there, so the mean is exactly 0. The variance
            // has no tidy closed form; fall back to the sound A^2.
            id: id.clone(),
            mean: 0.0,
            a: 1.0,
            b: 2.0 * std::f64::consts::PI,
            sigma2: 1.0,
            sigma2_exact: false,
        }),
        (ProcessId::Doubling, StatisticId::SmoothIndicator { center, halfwidth }) => {
            let (c, w) = (*center, *halfwidth);
            if !(w > 0.0) || c - w < 0.0 || c + w > 1.0 {
                return Err(Error::invalid(
                    "smooth indicator must transition inside [0,1]".to_string(),
                ));
            }
            // Under Uniform[0,1]: mean = 1 - c; second moment by piecewise
            // integration (the ramp contributes 2w/3, the plateau 1-c-w).
            let mean = 1.0 - c;
            let second = 2.0 * w / 3.0 + (1.0 - c - w);
            let sigma2 = second - mean * mean;
            Ok(Statistic {
                id: id.clone(),
                mean,
                a: mean.max(1.0 - mean),
                b: 1.0 / (2.0 * w),
                sigma2,
                sigma2_exact: true,
            })
        }
        (ProcessId::Doubling, StatisticId::KernelAtPoint { x0, scale }) => {
            let (x0, s) = (*x0, *scale);
            if !(s > 0.0) || x0 - s < 0.0 || x0 + s > 1.0 {
                return Err(Error::invalid(
                    "kernel bump must be supported inside [0,1]".to_string(),
                ));
            }
            let k = KernelSpec::new(KernelId::Epanechnikov, 1);
            // Under Uniform[0,1] with the bump inside: mean = s, second
            // moment = s R(K) with R(K) = 3/5 for Epanechnikov.
            let mean = s;
            let sigma2 = s * 0.6 - s * s;
            Ok(Statistic {
                id: id.clone(),
                mean,
                a: (k.sup() - mean).max(mean),
                b: k.lipschitz() / s,
                sigma2,
                sigma2_exact: true,
            })
        }
        (ProcessId::Rademacher, StatisticId::Identity) => Ok(Statistic {
            id: id.clone(),
            mean: 0.0,
            a: 1.0,
            b: 0.0,
            sigma2: 1.0,
            sigma2_exact: true,
        }),
        (ProcessId::StickyUniform { states, .. }, stat_id) => {
            // Finite support: mean and variance are exact sums over the
            // uniform stationary law.
            let probe = Statistic {
                id: stat_id.clone(),
                mean: 0.0,
                a: 0.0,
                b: 0.0,
                sigma2: 0.0,
                sigma2_exact: true,
            };
            let labels: Vec<f64> =
                (0..*states).map(|k| (k as f64 + 0.5) / *states as f64).collect();
            let raws: Vec<f64> = labels.iter().map(|&l| probe.raw(l)).collect();
            let mean = raws.iter().sum::<f64>() / raws.len() as f64;
            let sigma2 =
                raws.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / raws.len() as f64;
            let a = raws.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
            let b = match stat_id {
                StatisticId::Sin2Pi => 2.0 * std::f64::consts::PI,
                StatisticId::SmoothIndicator { halfwidth, .. } => 1.0 / (2.0 * halfwidth),
                StatisticId::KernelAtPoint { scale, .. } => {
                    KernelSpec::new(KernelId::Epanechnikov, 1).lipschitz() / scale
                }
                StatisticId::Identity => 0.0,
            };
            Ok(Statistic { id: stat_id.clone(), mean, a, b, sigma2, sigma2_exact: true })
        }
        _ => Err(uncalibrated()),
    }
}
