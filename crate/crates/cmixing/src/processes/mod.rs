//! Simulators for concrete C-mixing processes and regression data built on
//! them, with closed-form ground truth recorded alongside each sample.

mod lattice;
mod maps;
mod markov;
mod regression;

pub use lattice::simulate_lattice_field;
pub use maps::{logistic_orbit, simulate_doubling_map, simulate_logistic_map};
pub use markov::{simulate_markov_chain, TransitionMatrix};
pub use regression::{make_modal_dataset, make_regression_dataset, SkewedLaw};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Decay law of a C-mixing coefficient: C(r) = nu^(-b r^gamma) in the
/// geometric case, C(r) = b / r^gamma in the algebraic case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingSpec {
    Geometric { nu: f64, b: f64, gamma: f64 },
    Algebraic { b: f64, gamma: f64 },
}

impl MixingSpec {
    pub fn geometric(nu: f64, b: f64, gamma: f64) -> Result<Self> {
        if !(nu > 1.0) {
            return Err(Error::invalid(format!("geometric decay needs nu > 1, got {nu}")));
        }
        if !(b > 0.0) || !(gamma > 0.0) {
            return Err(Error::invalid(format!("decay needs b > 0 and gamma > 0, got b={b}, gamma={gamma}")));
        }
        Ok(MixingSpec::Geometric { nu, b, gamma })
    }

    pub fn algebraic(b: f64, gamma: f64) -> Result<Self> {
        if !(b > 0.0) || !(gamma > 0.0) {
            return Err(Error::invalid(format!("decay needs b > 0 and gamma > 0, got b={b}, gamma={gamma}")));
        }
        Ok(MixingSpec::Algebraic { b, gamma })
    }

    /// Evaluate the decay coefficient C(r), r >= 0. Non-negative and
    /// non-increasing; the algebraic law diverges at r = 0.
    pub fn coefficient(&self, r: f64) -> f64 {
        match *self {
            MixingSpec::Geometric { nu, b, gamma } => nu.powf(-b * r.powf(gamma)),
            MixingSpec::Algebraic { b, gamma } => {
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    b / r.powf(gamma)
                }
            }
        }
    }

    pub fn b(&self) -> f64 {
        match *self {
            MixingSpec::Geometric { b, .. } | MixingSpec::Algebraic { b, .. } => b,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            MixingSpec::Geometric { gamma, .. } | MixingSpec::Algebraic { gamma, .. } => gamma,
        }
    }

    /// Decay base nu for geometric laws.
    pub fn nu(&self) -> Option<f64> {
        match *self {
            MixingSpec::Geometric { nu, .. } => Some(nu),
            MixingSpec::Algebraic { .. } => None,
        }
    }
}

/// Index geometry on Z^{d+}: `d_eff` of the `d` directions carry diverging
/// sample counts `n_k`, the remaining `d - d_eff` are fixed at `n0`.
///
/// Derived sizes: m = n0^(d-d_eff), N-hat = prod n_k, N = m * N-hat. Scalar
/// indices 0..N map to lattice vectors row-major with the non-diverging
/// directions slowest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleGrid {
    d: usize,
    d_eff: usize,
    n0: usize,
    n_k: Vec<usize>,
}

impl SampleGrid {
    pub fn new(d: usize, d_eff: usize, n0: usize, n_k: Vec<usize>) -> Result<Self> {
        if d_eff == 0 || d_eff > d {
            return Err(Error::invalid(format!("need 0 < d_eff <= d, got d_eff={d_eff}, d={d}")));
        }
        if n_k.len() != d_eff {
            return Err(Error::invalid(format!(
                "expected {d_eff} diverging counts, got {}",
                n_k.len()
            )));
        }
        if n_k.iter().any(|&n| n == 0) || (d_eff < d && n0 == 0) {
            return Err(Error::invalid("per-direction counts must be positive".to_string()));
        }
        let grid = SampleGrid { d, d_eff, n0, n_k };
        let n_hat = grid.n_hat();
        let min_nk = *grid.n_k.iter().min().expect("non-empty");
        let log = (n_hat as f64).ln();
        if log > min_nk as f64 {
            return Err(Error::GridAssumption { n_hat, log, min_nk });
        }
        Ok(grid)
    }

    /// 1-dimensional grid for a length-`n` time series.
    pub fn time_series(n: usize) -> Self {
        SampleGrid { d: 1, d_eff: 1, n0: 1, n_k: vec![n] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn d_eff(&self) -> usize {
        self.d_eff
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n_k(&self) -> &[usize] {
        &self.n_k
    }

    /// Fixed factor m = n0^(d - d_eff).
    pub fn m(&self) -> u64 {
        (self.n0 as u64).pow((self.d - self.d_eff) as u32)
    }

    /// Product of the diverging counts.
    pub fn n_hat(&self) -> u64 {
        self.n_k.iter().map(|&n| n as u64).product()
    }

    /// Total sample size N = m * N-hat.
    pub fn n(&self) -> u64 {
        self.m() * self.n_hat()
    }

    /// Per-direction lengths, non-diverging directions first.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.n0; self.d - self.d_eff];
        dims.extend_from_slice(&self.n_k);
        dims
    }

    /// Lattice vector (0-based coordinates) of a scalar index in 0..N.
    pub fn lattice_of_scalar(&self, idx: u64) -> Vec<usize> {
        let dims = self.dims();
        let mut rem = idx;
        let mut coords = vec![0usize; dims.len()];
        for (k, &len) in dims.iter().enumerate().rev() {
            coords[k] = (rem % len as u64) as usize;
            rem /= len as u64;
        }
        coords
    }

    /// Scalar index of a lattice vector; inverse of [`lattice_of_scalar`].
    ///
    /// [`lattice_of_scalar`]: SampleGrid::lattice_of_scalar
    pub fn scalar_of_lattice(&self, coords: &[usize]) -> u64 {
        let dims = self.dims();
        debug_assert_eq!(coords.len(), dims.len());
        let mut idx = 0u64;
        for (k, &len) in dims.iter().enumerate() {
            debug_assert!(coords[k] < len);
            idx = idx * len as u64 + coords[k] as u64;
        }
        idx
    }
}

/// Tagged description of what generated a [`Series`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum GeneratorMeta {
    DoublingMap,
    LogisticMap { burn_in: usize },
    MarkovChain { labels: Vec<f64> },
    LatticeField { range: usize },
    Rademacher,
}

impl GeneratorMeta {
    /// Closed-form marginal density of the invariant law, when one exists.
    pub fn marginal_density(&self) -> Option<DensityFn> {
        match self {
            GeneratorMeta::DoublingMap => Some(DensityFn::Uniform01),
            GeneratorMeta::LogisticMap { .. } => Some(DensityFn::Arcsine01),
            _ => None,
        }
    }
}

/// Closed-form densities on [0,1] used as ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityFn {
    Uniform01,
    /// Invariant density of the logistic map: 1 / (pi sqrt(x(1-x))).
    /// Unbounded at the endpoints; evaluate on interior grids only.
    Arcsine01,
}

impl DensityFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DensityFn::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            DensityFn::Arcsine01 => {
                if x > 0.0 && x < 1.0 {
                    1.0 / (std::f64::consts::PI * (x * (1.0 - x)).sqrt())
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            DensityFn::Uniform01 => x,
            DensityFn::Arcsine01 => 2.0 / std::f64::consts::PI * x.sqrt().asin(),
        }
    }
}

/// Simulated process output: N values ordered by the grid's index bijection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Series {
    pub values: Vec<f64>,
    pub grid: SampleGrid,
    pub generator: GeneratorMeta,
    pub seed: u64,
}

impl Series {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Registry of closed-form regression functions (means, noise scales, modes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum RegressionFn {
    Const { c: f64 },
    /// offset + amp * sin(2 pi x)
    SinAffine { offset: f64, amp: f64 },
    /// Polynomial in x with coefficients c0 + c1 x + ...
    Poly { coeffs: Vec<f64> },
    /// offset + amp * |x - center|: Lipschitz but not differentiable, the
    /// genuinely alpha = 1 member of the registry.
    Kink { offset: f64, amp: f64, center: f64 },
}

impl RegressionFn {
    pub fn sin2pi() -> Self {
        RegressionFn::SinAffine { offset: 0.0, amp: 1.0 }
    }

    /// The heteroscedastic scale 0.5 + 0.25 sin(2 pi x).
    pub fn sin_het() -> Self {
        RegressionFn::SinAffine { offset: 0.5, amp: 0.25 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RegressionFn::Const { c } => *c,
            RegressionFn::SinAffine { offset, amp } => {
                offset + amp * (2.0 * std::f64::consts::PI * x).sin()
            }
            RegressionFn::Poly { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
            RegressionFn::Kink { offset, amp, center } => offset + amp * (x - center).abs(),
        }
    }

    /// Upper bound for sup_{x in [0,1]} |f(x)|. Exact for constants and
    /// sine forms, a coefficient-sum bound for polynomials.
    pub fn sup_abs(&self) -> f64 {
        match self {
            RegressionFn::Const { c } => c.abs(),
            RegressionFn::SinAffine { offset, amp } => offset.abs() + amp.abs(),
            RegressionFn::Poly { coeffs } => coeffs.iter().map(|c| c.abs()).sum(),
            RegressionFn::Kink { offset, amp, center } => {
                offset.abs() + amp.abs() * center.max(1.0 - center)
            }
        }
    }

    /// Shift the function by a constant.
    pub fn shifted(&self, delta: f64) -> Self {
        match self {
            RegressionFn::Const { c } => RegressionFn::Const { c: c + delta },
            RegressionFn::SinAffine { offset, amp } => {
                RegressionFn::SinAffine { offset: offset + delta, amp: *amp }
            }
            RegressionFn::Poly { coeffs } => {
                let mut coeffs = coeffs.clone();
                if coeffs.is_empty() {
                    coeffs.push(delta);
                } else {
                    coeffs[0] += delta;
                }
                RegressionFn::Poly { coeffs }
            }
            RegressionFn::Kink { offset, amp, center } => {
                RegressionFn::Kink { offset: offset + delta, amp: *amp, center: *center }
            }
        }
    }
}

/// Ground-truth records attached to a [`Dataset`]: everything needed to
/// score estimators without re-deriving the generating law.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Truth {
    pub density: Option<DensityFn>,
    pub mean: Option<RegressionFn>,
    /// Noise scale sigma(x); the conditional variance is its square.
    pub sigma: Option<RegressionFn>,
    pub mode: Option<RegressionFn>,
}

/// Regression sample (x_i, y_i) with optional truth and the bound L from
/// P(|Y| <= L) = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    /// Covariates, flattened row-major: point i occupies x[i*dim..(i+1)*dim].
    pub x: Vec<f64>,
    pub dim: usize,
    pub y: Vec<f64>,
    pub truth: Option<Truth>,
    pub y_bound: Option<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    /// Covariate-only dataset (density estimation input).
    pub fn from_series(series: &Series) -> Self {
        Dataset {
            x: series.values.clone(),
            dim: 1,
            y: vec![0.0; series.values.len()],
            truth: Some(Truth {
                density: series.generator.marginal_density(),
                ..Truth::default()
            }),
            y_bound: None,
        }
    }
}
