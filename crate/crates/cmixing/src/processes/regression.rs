//! Regression and modal datasets built on a simulated covariate series.

use crate::error::{Error, Result};
use crate::processes::{Dataset, RegressionFn, Series, Truth};
use crate::seed::unit_f64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Build Y_i = m(X_i) + sigma(X_i) eps_i with eps iid Uniform[-sqrt3, sqrt3]
/// (mean 0, variance 1), so conditional mean and variance truths are exact.
///
/// The registry envelope sup|m| + sqrt(3) sup|sigma| must not exceed `l`;
/// then |Y| <= l holds by construction rather than by truncation.
pub fn make_regression_dataset(
    x_series: &Series,
    mean: RegressionFn,
    sigma: RegressionFn,
    l: f64,
    seed: u64,
) -> Result<Dataset> {
    if x_series.values.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::invalid(
            "regression covariates must lie in [0,1]".to_string(),
        ));
    }
    let envelope = mean.sup_abs() + SQRT3 * sigma.sup_abs();
    if envelope > l {
        return Err(Error::EnvelopeViolation { envelope, bound: l });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = x_series
        .values
        .iter()
        .map(|&x| {
            let eps = (2.0 * unit_f64(&mut rng) - 1.0) * SQRT3;
            mean.eval(x) + sigma.eval(x) * eps
        })
        .collect();
    debug_assert!(y.iter().all(|v| v.abs() <= l));
    Ok(Dataset {
        x: x_series.values.clone(),
        dim: 1,
        y,
        truth: Some(Truth {
            density: x_series.generator.marginal_density(),
            mean: Some(mean),
            sigma: Some(sigma),
            mode: None,
        }),
        y_bound: Some(l),
    })
}

/// Skewed conditional law: a mixture of two triangular bumps of common
/// half-width, the dominant one centered at c(x), the minor one at
/// c(x) + offset.
///
/// With weight > 1/2 and offset > 2*width the bumps do not overlap and the
/// conditional mode is exactly c(x), while the conditional mean is
/// c(x) + (1 - weight) * offset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkewedLaw {
    pub center: RegressionFn,
    pub offset: f64,
    pub weight: f64,
    pub width: f64,
}

impl SkewedLaw {
    pub fn validate(&self) -> Result<()> {
        if !(self.weight > 0.5 && self.weight < 1.0) {
            return Err(Error::invalid(format!(
                "mixture weight must lie in (0.5, 1), got {}",
                self.weight
            )));
        }
        if !(self.width > 0.0) {
            return Err(Error::invalid("bump width must be positive".to_string()));
        }
        if self.offset <= 2.0 * self.width {
            return Err(Error::invalid(format!(
                "bump offset {} must exceed twice the width {} so the mode is the dominant center",
                self.offset, self.width
            )));
        }
        Ok(())
    }

    /// Conditional density f(y|x), for tests and oracle checks.
    pub fn conditional_density(&self, x: f64, y: f64) -> f64 {
        let c = self.center.eval(x);
        let tri = |center: f64| {
            let u = (y - center).abs();
            if u < self.width {
                (self.width - u) / (self.width * self.width)
            } else {
                0.0
            }
        };
        self.weight * tri(c) + (1.0 - self.weight) * tri(c + self.offset)
    }
}

/// Draw (X_i, Y_i) with Y | X = x following a [`SkewedLaw`]; truth records
/// carry the exact conditional mode and mean.
pub fn make_modal_dataset(x_series: &Series, law: &SkewedLaw, seed: u64) -> Result<Dataset> {
    law.validate()?;
    if x_series.values.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::invalid(
            "modal covariates must lie in [0,1]".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = x_series
        .values
        .iter()
        .map(|&x| {
            let pick = unit_f64(&mut rng);
            let center = law.center.eval(x)
                + if pick < law.weight { 0.0 } else { law.offset };
            // Triangular noise on (-width, width) as a sum of two uniforms.
            let u1 = unit_f64(&mut rng);
            let u2 = unit_f64(&mut rng);
            center + law.width * (u1 + u2 - 1.0)
        })
        .collect();
    let y_bound = law.center.sup_abs() + law.offset + law.width;
    Ok(Dataset {
        x: x_series.values.clone(),
        dim: 1,
        y,
        truth: Some(Truth {
            density: x_series.generator.marginal_density(),
            mean: Some(law.center.shifted((1.0 - law.weight) * law.offset)),
            sigma: None,
            mode: Some(law.center.clone()),
        }),
        y_bound: Some(y_bound),
    })
}
