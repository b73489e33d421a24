//! Experiment configuration files: TOML with one `[[tail]]` or `[[rate]]`
//! section per experiment. Unknown keys are rejected.

use anyhow::{bail, Context, Result};
use cmixing::harness::{
    BandwidthRule, EstimatorId, ModalConfig, ProcessId, RateExperiment, RegressionConfig,
    StatisticId, TailExperiment,
};
use cmixing::processes::{RegressionFn, SkewedLaw};
use cmixing::smoothers::KernelId;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default)]
    pub tail: Vec<TailSection>,
    #[serde(default)]
    pub rate: Vec<RateSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSection {
    pub name: String,
    pub process: String,
    pub statistic: String,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    /// Bound columns: geometric Eq-style bound needs omega/mix_b/gamma.
    pub omega: f64,
    pub mix_b: f64,
    pub gamma: f64,
    /// Algebraic comparison order; the coefficient is calibrated to
    /// dominate the geometric one when this is set.
    #[serde(default)]
    pub alg_gamma: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub name: String,
    pub estimator: String,
    pub process: String,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub bandwidth: String,
    pub kernel: String,
    pub alpha: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    pub grid_points: usize,
    #[serde(default)]
    pub mean_fn: Option<String>,
    #[serde(default)]
    pub sigma_fn: Option<String>,
    #[serde(default)]
    pub y_bound: Option<f64>,
    #[serde(default)]
    pub mode_center: Option<String>,
    #[serde(default)]
    pub mode_offset: Option<f64>,
    #[serde(default)]
    pub mode_weight: Option<f64>,
    #[serde(default)]
    pub mode_width: Option<f64>,
    #[serde(default)]
    pub y_spacing_factor: Option<f64>,
}

pub fn parse_file(text: &str) -> Result<ExperimentFile> {
    toml::from_str(text).context("invalid experiment config")
}

/// Process grammar: `doubling`, `logistic[:burn_in]`, `rademacher`,
/// `sticky:<states>,<rho>`.
pub fn parse_process(s: &str) -> Result<ProcessId> {
    let (head, args) = split_spec(s);
    match head {
        "doubling" => Ok(ProcessId::Doubling),
        "logistic" => {
            let burn_in = match args {
                Some(a) => a.parse().context("logistic burn-in")?,
                None => 1000,
            };
            Ok(ProcessId::Logistic { burn_in })
        }
        "rademacher" => Ok(ProcessId::Rademacher),
        "sticky" => {
            let args = args.context("sticky needs `sticky:<states>,<rho>`")?;
            let (st, rho) = args
                .split_once(',')
                .context("sticky needs `sticky:<states>,<rho>`")?;
            Ok(ProcessId::StickyUniform {
                states: st.trim().parse().context("sticky states")?,
                rho: rho.trim().parse().context("sticky rho")?,
            })
        }
        other => bail!("unknown process `{other}`"),
    }
}

/// Statistic grammar: `sin2pi`, `indicator:<center>,<halfwidth>`,
/// `kernel-at:<x0>,<scale>`, `identity`.
pub fn parse_statistic(s: &str) -> Result<StatisticId> {
    let (head, args) = split_spec(s);
    match head {
        "sin2pi" => Ok(StatisticId::Sin2Pi),
        "identity" => Ok(StatisticId::Identity),
        "indicator" => {
            let (c, w) = two_floats(args.context("indicator needs `indicator:<c>,<w>`")?)?;
            Ok(StatisticId::SmoothIndicator { center: c, halfwidth: w })
        }
        "kernel-at" => {
            let (x0, sc) = two_floats(args.context("kernel-at needs `kernel-at:<x0>,<s>`")?)?;
            Ok(StatisticId::KernelAtPoint { x0, scale: sc })
        }
        other => bail!("unknown statistic `{other}`"),
    }
}

/// Regression-function grammar: `const:<c>`, `sin2pi`, `sin-het`,
/// `sin-affine:<offset>,<amp>`, `poly:<c0>,<c1>,...`.
pub fn parse_regression_fn(s: &str) -> Result<RegressionFn> {
    let (head, args) = split_spec(s);
    match head {
        "sin2pi" => Ok(RegressionFn::sin2pi()),
        "sin-het" => Ok(RegressionFn::sin_het()),
        "const" => Ok(RegressionFn::Const {
            c: args.context("const needs `const:<c>`")?.parse().context("const value")?,
        }),
        "sin-affine" => {
            let (offset, amp) =
                two_floats(args.context("sin-affine needs `sin-affine:<offset>,<amp>`")?)?;
            Ok(RegressionFn::SinAffine { offset, amp })
        }
        "poly" => {
            let coeffs = args
                .context("poly needs `poly:<c0>,<c1>,...`")?
                .split(',')
                .map(|c| c.trim().parse::<f64>().context("poly coefficient"))
                .collect::<Result<Vec<f64>>>()?;
            Ok(RegressionFn::Poly { coeffs })
        }
        other => bail!("unknown regression function `{other}`"),
    }
}

/// Bandwidth grammar: `optimal`, `geometric` (uses the section's gamma),
/// `mode`, `value:<x>`.
pub fn parse_bandwidth(s: &str, gamma: Option<f64>) -> Result<BandwidthRule> {
    let (head, args) = split_spec(s);
    match head {
        "optimal" => Ok(BandwidthRule::Optimal),
        "mode" => Ok(BandwidthRule::ModeRule),
        "geometric" => Ok(BandwidthRule::Geometric {
            gamma: gamma.context("geometric bandwidth needs `gamma`")?,
        }),
        "value" => Ok(BandwidthRule::Fixed {
            value: args.context("fixed bandwidth needs `value:<x>`")?.parse()?,
        }),
        other => bail!("unknown bandwidth rule `{other}`"),
    }
}

impl TailSection {
    /// Expand into one experiment per sample size.
    pub fn experiments(&self) -> Result<Vec<TailExperiment>> {
        let process = parse_process(&self.process)?;
        let statistic = parse_statistic(&self.statistic)?;
        if self.ns.is_empty() {
            bail!("tail section `{}` has no sample sizes", self.name);
        }
        Ok(self
            .ns
            .iter()
            .map(|&n| TailExperiment {
                process: process.clone(),
                statistic: statistic.clone(),
                n,
                t_grid: self.t_grid.clone(),
                reps: self.reps,
                seed: self.seed,
            })
            .collect())
    }
}

impl RateSection {
    pub fn experiment(&self) -> Result<RateExperiment> {
        let estimator = EstimatorId::parse(&self.estimator)
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        let regression = match (&self.mean_fn, &self.sigma_fn, self.y_bound) {
            (Some(m), Some(s), Some(l)) => Some(RegressionConfig {
                mean: parse_regression_fn(m)?,
                sigma: parse_regression_fn(s)?,
                y_bound: l,
            }),
            (None, None, None) => None,
            _ => bail!(
                "rate section `{}`: mean_fn, sigma_fn and y_bound must be set together",
                self.name
            ),
        };
        let modal = match &self.mode_center {
            Some(center) => Some(ModalConfig {
                law: SkewedLaw {
                    center: parse_regression_fn(center)?,
                    offset: self.mode_offset.context("mode_offset required")?,
                    weight: self.mode_weight.context("mode_weight required")?,
                    width: self.mode_width.context("mode_width required")?,
                },
                y_spacing_factor: self.y_spacing_factor.unwrap_or(0.25),
            }),
            None => None,
        };
        Ok(RateExperiment {
            estimator,
            process: parse_process(&self.process)?,
            regression,
            modal,
            ns: self.ns.clone(),
            reps: self.reps,
            seed: self.seed,
            bandwidth: parse_bandwidth(&self.bandwidth, self.gamma)?,
            kernel: KernelId::parse(&self.kernel).map_err(|e| anyhow::anyhow!(e.to_string()))?,
            alpha: self.alpha,
            grid_points: self.grid_points,
        })
    }
}

fn split_spec(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (s.trim(), None),
    }
}

fn two_floats(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(',').context("expected two comma-separated numbers")?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}
