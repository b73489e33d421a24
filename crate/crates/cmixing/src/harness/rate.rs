//! Convergence-rate experiments: median interior sup-errors across sample
//! sizes, fitted log-log slopes, and the theoretical target exponents.

use crate::error::{Error, Result};
use crate::harness::ProcessId;
use crate::processes::{make_modal_dataset, make_regression_dataset, RegressionFn, SkewedLaw};
use crate::seed::replication_seed;
use crate::smoothers::{
    bandwidth_geometric, bandwidth_mode, bandwidth_optimal, kde, modal_regression, nw_mean,
    sup_error, two_step_variance, EstimateGrid, KernelId, KernelSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Kde,
    Mean,
    Variance,
    Mode,
}

impl EstimatorId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "kde" => Ok(EstimatorId::Kde),
            "mean" => Ok(EstimatorId::Mean),
            "var" | "variance" => Ok(EstimatorId::Variance),
            "mode" => Ok(EstimatorId::Mode),
            other => Err(Error::invalid(format!("unknown estimator `{other}`"))),
        }
    }

    /// Theoretical sup-norm rate exponent (of N, log factors aside):
    /// -alpha/(2 alpha + D) for kde/mean/variance, -alpha/(2 alpha + D + 1)
    /// for the mode.
    pub fn target_exponent(&self, alpha: f64, dim: usize) -> f64 {
        match self {
            EstimatorId::Mode => -alpha / (2.0 * alpha + dim as f64 + 1.0),
            _ => -alpha / (2.0 * alpha + dim as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BandwidthRule {
    Geometric { gamma: f64 },
    Optimal,
    /// The mode-specific rule with the D+1 denominator.
    ModeRule,
    Fixed { value: f64 },
}

impl BandwidthRule {
    pub fn bandwidth(&self, n: f64, alpha: f64, dim: usize) -> Result<f64> {
        match self {
            BandwidthRule::Geometric { gamma } => bandwidth_geometric(n, alpha, dim, *gamma),
            BandwidthRule::Optimal => bandwidth_optimal(n, alpha, dim),
            BandwidthRule::ModeRule => bandwidth_mode(n, alpha, dim),
            BandwidthRule::Fixed { value } => {
                if *value > 0.0 {
                    Ok(*value)
                } else {
                    Err(Error::invalid("fixed bandwidth must be positive".to_string()))
                }
            }
        }
    }
}

/// Regression layer on top of the covariate process.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionConfig {
    pub mean: RegressionFn,
    pub sigma: RegressionFn,
    pub y_bound: f64,
}

/// Skewed conditional law for modal experiments, plus the y-grid spacing
/// factor (spacing = factor * h^2; must stay at or below 1 so argmax
/// discretization is second-order).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModalConfig {
    pub law: SkewedLaw,
    pub y_spacing_factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateExperiment {
    pub estimator: EstimatorId,
    pub process: ProcessId,
    pub regression: Option<RegressionConfig>,
    pub modal: Option<ModalConfig>,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub bandwidth: BandwidthRule,
    pub kernel: KernelId,
    pub alpha: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    pub ns: Vec<usize>,
    pub bandwidths: Vec<f64>,
    pub median_sup_errors: Vec<f64>,
    pub slope: f64,
    pub slope_se: f64,
    pub target_exponent: f64,
    /// Replications aborted per N (fully undefined estimates).
    pub aborted: Vec<usize>,
    /// Per-N, per-replication sup errors (defined reps only, in
    /// replication order) for raw export.
    pub raw_errors: Vec<Vec<f64>>,
    /// Smallest defined estimate across all replications (variance runs).
    pub min_estimate: Option<f64>,
}

impl RateExperiment {
    fn validate(&self) -> Result<()> {
        if self.ns.len() < 4 {
            return Err(Error::invalid("rate fits need at least 4 sample sizes".to_string()));
        }
        if !self.ns.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("sample sizes must be strictly increasing".to_string()));
        }
        if self.reps == 0 || self.grid_points < 2 {
            return Err(Error::invalid("need reps >= 1 and grid_points >= 2".to_string()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::invalid("alpha must be positive".to_string()));
        }
        match self.estimator {
            EstimatorId::Mean | EstimatorId::Variance if self.regression.is_none() => Err(
                Error::invalid("mean/variance experiments need a regression config".to_string()),
            ),
            EstimatorId::Mode if self.modal.is_none() => {
                Err(Error::invalid("mode experiments need a modal config".to_string()))
            }
            _ => Ok(()),
        }
    }
}

/// Least-squares slope of log(error) on log(N) with its standard error.
pub fn fit_loglog_slope(ns: &[f64], errors: &[f64]) -> (f64, f64) {
    assert_eq!(ns.len(), errors.len());
    assert!(ns.len() >= 3);
    let xs: Vec<f64> = ns.iter().map(|&n| n.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    (slope, se)
}

fn median(sorted: &mut [f64]) -> f64 {
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

struct RepOutcome {
    sup: Option<f64>,
    min_estimate: Option<f64>,
}

fn run_rep(exp: &RateExperiment, n: usize, h: f64, margin: f64, seed: u64) -> Result<RepOutcome> {
    let kernel = KernelSpec::new(exp.kernel, 1);
    if margin >= 0.5 {
        return Err(Error::invalid(format!(
            "bandwidth {h} leaves no interior at n = {n}"
        )));
    }
    let grid = EstimateGrid::interior_1d(margin, exp.grid_points)?;
    let series = exp.process.simulate(n, seed)?;
    match exp.estimator {
        EstimatorId::Kde => {
            let density = series
                .generator
                .marginal_density()
                .ok_or_else(|| Error::invalid("process has no closed-form density".to_string()))?;
            let est = kde(&series.values, 1, h, &kernel, &grid)?;
            let truth: Vec<f64> = (0..grid.len()).map(|i| density.eval(grid.point(i)[0])).collect();
            let wrapped: Vec<Option<f64>> = est.into_iter().map(Some).collect();
            let e = sup_error(&wrapped, &truth);
            Ok(RepOutcome { sup: e.sup, min_estimate: None })
        }
        EstimatorId::Mean => {
            let cfg = exp.regression.as_ref().expect("validated");
            let data = make_regression_dataset(
                &series,
                cfg.mean.clone(),
                cfg.sigma.clone(),
                cfg.y_bound,
                crate::seed::splitmix64(seed ^ 0x5eed),
            )?;
            let out = nw_mean(&data, h, &kernel, &grid)?;
            let truth: Vec<f64> =
                (0..grid.len()).map(|i| cfg.mean.eval(grid.point(i)[0])).collect();
            let e = sup_error(&out.values, &truth);
            Ok(RepOutcome { sup: e.sup, min_estimate: None })
        }
        EstimatorId::Variance => {
            let cfg = exp.regression.as_ref().expect("validated");
            let data = make_regression_dataset(
                &series,
                cfg.mean.clone(),
                cfg.sigma.clone(),
                cfg.y_bound,
                crate::seed::splitmix64(seed ^ 0x5eed),
            )?;
            let out = two_step_variance(&data, h, &kernel, &grid)?;
            let truth: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let s = cfg.sigma.eval(grid.point(i)[0]);
                    s * s
                })
                .collect();
            let e = sup_error(&out.values, &truth);
            let min_est = out
                .values
                .iter()
                .flatten()
                .fold(f64::INFINITY, |m, &v| m.min(v));
            Ok(RepOutcome { sup: e.sup, min_estimate: Some(min_est) })
        }
        EstimatorId::Mode => {
            let cfg = exp.modal.as_ref().expect("validated");
            let data = make_modal_dataset(
                &series,
                &cfg.law,
                crate::seed::splitmix64(seed ^ 0x5eed),
            )?;
            let spacing = cfg.y_spacing_factor.min(1.0) * h * h;
            let y_max = data.y_bound.unwrap_or(1.0);
            let count = ((y_max / spacing).ceil() as usize + 1).max(8);
            let grid_y: Vec<f64> =
                (0..count).map(|i| y_max * i as f64 / (count - 1) as f64).collect();
            let ky = KernelSpec::new(exp.kernel, 1);
            let out = modal_regression(&data, h, &kernel, &ky, &grid, &grid_y)?;
            let mode_fn = data
                .truth
                .as_ref()
                .and_then(|t| t.mode.clone())
                .expect("modal datasets carry a mode truth");
            let truth: Vec<f64> =
                (0..grid.len()).map(|i| mode_fn.eval(grid.point(i)[0])).collect();
            let e = sup_error(&out.values, &truth);
            Ok(RepOutcome { sup: e.sup, min_estimate: None })
        }
    }
}

/// Run the full rate experiment: per N, the median over replications of
/// the interior sup error; then the log-log slope. Replications with fully
/// undefined estimates abort and are counted in `aborted`.
pub fn rate_experiment(exp: &RateExperiment) -> Result<RateReport> {
    exp.validate()?;
    let dim = 1usize;
    let mut bandwidths = Vec::with_capacity(exp.ns.len());
    for &n in &exp.ns {
        bandwidths.push(exp.bandwidth.bandwidth(n as f64, exp.alpha, dim)?);
    }
    // One evaluation region for the whole experiment: the interior margin
    // of the widest bandwidth. Every grid is interior for every N, and the
    // sup is taken over the same set at each N (a per-N margin would widen
    // the region as N grows and change the estimand mid-experiment).
    let kernel = KernelSpec::new(exp.kernel, 1);
    let margin =
        kernel.support_radius() * bandwidths.iter().cloned().fold(f64::MIN, f64::max);
    let jobs: Vec<(usize, usize)> = (0..exp.ns.len())
        .flat_map(|ni| (0..exp.reps).map(move |rep| (ni, rep)))
        .collect();
    let mut outcomes: Vec<(usize, usize, Option<f64>, Option<f64>)> = jobs
        .par_iter()
        .map(|&(ni, rep)| {
            let seed = replication_seed(exp.seed, (ni * exp.reps + rep) as u64);
            match run_rep(exp, exp.ns[ni], bandwidths[ni], margin, seed) {
                Ok(out) => (ni, rep, out.sup, out.min_estimate),
                // A fully undefined estimate aborts the replication.
                Err(_) => (ni, rep, None, None),
            }
        })
        .collect();
    outcomes.sort_by_key(|&(ni, rep, _, _)| (ni, rep));

    let mut medians = Vec::with_capacity(exp.ns.len());
    let mut aborted = vec![0usize; exp.ns.len()];
    let mut raw_errors = vec![Vec::new(); exp.ns.len()];
    let mut min_estimate: Option<f64> = None;
    for &(ni, _, sup, min_est) in &outcomes {
        match sup {
            Some(e) => raw_errors[ni].push(e),
            None => aborted[ni] += 1,
        }
        if let Some(m) = min_est {
            min_estimate = Some(min_estimate.map_or(m, |cur: f64| cur.min(m)));
        }
    }
    for ni in 0..exp.ns.len() {
        if raw_errors[ni].is_empty() {
            return Err(Error::AllUndefined);
        }
        let mut copy = raw_errors[ni].clone();
        medians.push(median(&mut copy));
    }
    let ns_f: Vec<f64> = exp.ns.iter().map(|&n| n as f64).collect();
    let (slope, slope_se) = fit_loglog_slope(&ns_f, &medians);
    Ok(RateReport {
        ns: exp.ns.clone(),
        bandwidths,
        median_sup_errors: medians,
        slope,
        slope_se,
        target_exponent: exp.estimator.target_exponent(exp.alpha, dim),
        aborted,
        raw_errors,
        min_estimate,
    })
}
