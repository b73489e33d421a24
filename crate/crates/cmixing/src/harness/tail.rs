//! Empirical tail probabilities with exact binomial confidence intervals,
//! and side-by-side bound comparison tables.

use crate::bounds::{
    algebraic_bound_1d, geometric_bound_1d, hang_steinwart_bound, ClassBounds,
};
use crate::error::{Error, Result};
use crate::harness::{statistic_for, ProcessId, StatisticId};
use crate::seed::replication_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

/// One tail-probability experiment: `reps` independent series of length
/// `n`, the centered statistic averaged over each, and exceedance
/// frequencies over the `t_grid`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailExperiment {
    pub process: ProcessId,
    pub statistic: StatisticId,
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl TailExperiment {
    fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::invalid(format!(
                "tail experiments need reps >= 100, got {}",
                self.reps
            )));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::invalid("t grid must be non-empty and positive".to_string()));
        }
        if self.n == 0 {
            return Err(Error::invalid("need n >= 1".to_string()));
        }
        Ok(())
    }
}

/// Per-t exceedance estimate with a Clopper-Pearson 99% interval.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailPoint {
    pub t: f64,
    pub exceed: usize,
    pub reps: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion at confidence `1 - alpha`.
pub fn clopper_pearson(k: usize, n: usize, alpha: f64) -> (f64, f64) {
    assert!(n > 0 && k <= n);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(k as f64, (n - k + 1) as f64)
            .expect("valid shapes")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64)
            .expect("valid shapes")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Run the experiment: per replication, the absolute sample mean of the
/// centered statistic; per t, the fraction of replications at or above t.
///
/// Returns the per-t summary and the per-replication |mean| values (for
/// raw CSV export). Replications run in parallel; counts are integer sums,
/// so the result does not depend on scheduling.
pub fn tail_probability_detailed(exp: &TailExperiment) -> Result<(Vec<TailPoint>, Vec<f64>)> {
    exp.validate()?;
    let stat = statistic_for(&exp.process, &exp.statistic)?;
    let abs_means: Vec<f64> = (0..exp.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = replication_seed(exp.seed, rep as u64);
            let series = exp
                .process
                .simulate(exp.n, seed)
                .expect("validated parameters");
            let sum: f64 = series.values.iter().map(|&z| stat.eval(z)).sum();
            (sum / exp.n as f64).abs()
        })
        .collect();
    let points = exp
        .t_grid
        .iter()
        .map(|&t| {
            let exceed = abs_means.iter().filter(|&&m| m >= t).count();
            let p_hat = exceed as f64 / exp.reps as f64;
            let (ci_low, ci_high) = clopper_pearson(exceed, exp.reps, 0.01);
            TailPoint { t, exceed, reps: exp.reps, p_hat, ci_low, ci_high }
        })
        .collect();
    Ok((points, abs_means))
}

/// Summary-only variant of [`tail_probability_detailed`].
pub fn tail_probability(exp: &TailExperiment) -> Result<Vec<TailPoint>> {
    Ok(tail_probability_detailed(exp)?.0)
}

/// Mixing parameters used to evaluate the three comparable bounds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundComparisonConfig {
    pub omega: f64,
    pub mix_b: f64,
    pub gamma: f64,
    /// Algebraic coefficient C(r) = alg_b / r^alg_gamma used for the
    /// fixed-B one-dimensional bound column.
    pub alg_b: f64,
    pub alg_gamma: f64,
}

impl BoundComparisonConfig {
    /// Calibrate the algebraic coefficient to dominate a geometric one:
    /// alg_b = max_{r >= 1} r^alg_gamma nu^{-b r^gamma}.
    pub fn calibrated(omega: f64, mix_b: f64, gamma: f64, alg_gamma: f64) -> Self {
        let mut alg_b = 0.0f64;
        for r in 1..=1000 {
            let r = r as f64;
            alg_b = alg_b.max(r.powf(alg_gamma) * (-mix_b * r.powf(gamma)).exp());
        }
        BoundComparisonConfig { omega, mix_b, gamma, alg_b, alg_gamma }
    }
}

/// One (N, t) row of the comparison table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub t: f64,
    pub empirical: f64,
    /// Geometric bound, clamped.
    pub eq_geometric: f64,
    /// Baseline bound, clamped.
    pub eq_baseline: f64,
    /// Fixed-B algebraic bound, clamped.
    pub eq_algebraic: f64,
    pub n_ge_n0_geometric: bool,
    /// Bounds ordered smallest (sharpest) first.
    pub ordering: String,
}

/// Evaluate the empirical tail alongside the geometric, baseline, and
/// algebraic bounds at each t of the experiment's grid.
pub fn bound_comparison(
    exp: &TailExperiment,
    cfg: &BoundComparisonConfig,
) -> Result<Vec<ComparisonRow>> {
    let stat = statistic_for(&exp.process, &exp.statistic)?;
    let cb = ClassBounds::new(stat.a, stat.b, stat.sigma2)?;
    let (points, _) = tail_probability_detailed(exp)?;
    points
        .iter()
        .map(|pt| {
            let n = exp.n as f64;
            let geo = geometric_bound_1d(n, pt.t, cfg.mix_b, cfg.gamma, &cb, cfg.omega)?;
            let base = hang_steinwart_bound(n, pt.t, cfg.mix_b, cfg.gamma, &cb)?;
            let alg = algebraic_bound_1d(n, pt.t, cfg.alg_b, cfg.alg_gamma, &cb)?;
            let mut ranked = [
                ("geometric", geo.bound),
                ("baseline", base.bound),
                ("algebraic", alg.bound),
            ];
            ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite bounds"));
            Ok(ComparisonRow {
                n: exp.n,
                t: pt.t,
                empirical: pt.p_hat,
                eq_geometric: geo.bound,
                eq_baseline: base.bound,
                eq_algebraic: alg.bound,
                n_ge_n0_geometric: geo.n_ge_n0,
                ordering: ranked.map(|(name, _)| name).join("<="),
            })
        })
        .collect()
}
