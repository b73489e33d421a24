//! Compactly supported polynomial kernels and the kernel estimators of
//! density, conditional mean, conditional variance and conditional mode.

mod estimators;

pub use estimators::{
    conditional_density, kde, modal_regression, nw_mean, sup_error, two_step_variance,
    CondDensity, EstimateOutput, SupError, VarianceOutput,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Kernel menu. All are spherical with support radius M = 1 and polynomial
/// radial profiles, so non-negativity, unit mass, compact support and
/// Lipschitz continuity hold analytically. The flat-top variant floors the
/// Epanechnikov profile away from zero and renormalizes, giving the
/// strictly positive lower bound some variance-estimation results ask of
/// the kernel on its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelId {
    Epanechnikov,
    Quartic,
    Triweight,
    FlatTopEpanechnikov,
}

impl KernelId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "epanechnikov" => Ok(KernelId::Epanechnikov),
            "quartic" | "biweight" => Ok(KernelId::Quartic),
            "triweight" => Ok(KernelId::Triweight),
            "flat-top" | "flat_top_epanechnikov" => Ok(KernelId::FlatTopEpanechnikov),
            other => Err(Error::invalid(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Volume of the D-dimensional unit ball.
fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(dim - 2) * 2.0 * std::f64::consts::PI / dim as f64,
    }
}

/// A spherical kernel K(u) = norm * profile(|u|) on the unit ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelSpec {
    id: KernelId,
    dim: usize,
    /// Multiplier making the kernel integrate to 1.
    norm: f64,
    /// Raw floor of the flat-top profile (0 for the standard kernels).
    floor: f64,
    lip: f64,
    kbar: f64,
    kmin: f64,
}

impl KernelSpec {
    pub fn new(id: KernelId, dim: usize) -> Self {
        assert!(dim >= 1, "kernel dimension must be >= 1");
        match id {
            KernelId::FlatTopEpanechnikov => {
                KernelSpec::flat_top_epanechnikov(dim, 0.2).expect("default floor is valid")
            }
            _ => {
                let v = unit_ball_volume(dim);
                let d = dim as f64;
                let (norm, lip_profile) = match id {
                    // Radial profile (1 - r^2)^k; closed-form mass over the
                    // ball gives the normalizer, max |d profile/dr| the
                    // Lipschitz constant.
                    KernelId::Epanechnikov => ((d + 2.0) / (2.0 * v), 2.0),
                    KernelId::Quartic => {
                        ((d + 2.0) * (d + 4.0) / (8.0 * v), 8.0 / (3.0 * 3f64.sqrt()))
                    }
                    KernelId::Triweight => (
                        (d + 2.0) * (d + 4.0) * (d + 6.0) / (48.0 * v),
                        96.0 / (25.0 * 5f64.sqrt()),
                    ),
                    KernelId::FlatTopEpanechnikov => unreachable!(),
                };
                KernelSpec {
                    id,
                    dim,
                    norm,
                    floor: 0.0,
                    lip: norm * lip_profile,
                    kbar: norm,
                    kmin: 0.0,
                }
            }
        }
    }

    /// Flat-top Epanechnikov: profile max(1 - r^2, floor_frac), renormalized
    /// on the unit ball. `floor_frac` in (0, 1).
    pub fn flat_top_epanechnikov(dim: usize, floor_frac: f64) -> Result<Self> {
        if !(floor_frac > 0.0 && floor_frac < 1.0) {
            return Err(Error::invalid(format!(
                "flat-top floor must lie in (0,1), got {floor_frac}"
            )));
        }
        let d = dim as f64;
        let v = unit_ball_volume(dim);
        // Mass of max(1 - r^2, f) over the ball, via the radial formula
        // int_ball g(|u|) du = D V_D int_0^1 r^{D-1} g(r) dr.
        let rstar = (1.0 - floor_frac).sqrt();
        let inner = rstar.powf(d) / d - rstar.powf(d + 2.0) / (d + 2.0);
        let outer = floor_frac * (1.0 - rstar.powf(d)) / d;
        let mass = d * v * (inner + outer);
        let norm = 1.0 / mass;
        Ok(KernelSpec {
            id: KernelId::FlatTopEpanechnikov,
            dim,
            norm,
            floor: floor_frac,
            lip: norm * 2.0,
            kbar: norm,
            kmin: norm * floor_frac,
        })
    }

    pub fn id(&self) -> KernelId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Support radius M.
    pub fn support_radius(&self) -> f64 {
        1.0
    }

    pub fn lipschitz(&self) -> f64 {
        self.lip
    }

    pub fn sup(&self) -> f64 {
        self.kbar
    }

    /// Infimum over the support; positive only for the flat-top variant.
    pub fn inf_on_support(&self) -> f64 {
        self.kmin
    }

    fn profile(&self, r2: f64) -> f64 {
        // Closed support: the flat-top keeps its floor value at |u| = 1.
        if r2 > 1.0 {
            return 0.0;
        }
        let base = 1.0 - r2;
        match self.id {
            KernelId::Epanechnikov => base,
            KernelId::Quartic => base * base,
            KernelId::Triweight => base * base * base,
            KernelId::FlatTopEpanechnikov => base.max(self.floor),
        }
    }

    /// Radii at which the radial profile is non-smooth; quadrature over the
    /// profile must split here or adaptive refinement can alias the kink.
    fn profile_breakpoints(&self) -> Vec<f64> {
        match self.id {
            KernelId::FlatTopEpanechnikov => vec![(1.0 - self.floor).sqrt()],
            _ => vec![],
        }
    }

    /// Evaluate at a point (length must equal `dim`).
    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let r2: f64 = u.iter().map(|&x| x * x).sum();
        self.norm * self.profile(r2)
    }

    /// Evaluate at squared radius, saving the norm when the caller already
    /// has it.
    pub fn eval_r2(&self, r2: f64) -> f64 {
        self.norm * self.profile(r2)
    }

    /// kappa_alpha = int |u|^alpha K(u) du, by radial quadrature split at
    /// the profile breakpoints.
    pub fn kappa(&self, alpha: f64) -> f64 {
        let d = self.dim as f64;
        let v = unit_ball_volume(self.dim);
        let f = |r: f64| r.powf(alpha + d - 1.0) * self.norm * self.profile(r * r);
        let mut cuts = vec![0.0];
        cuts.extend(self.profile_breakpoints());
        cuts.push(1.0);
        let integral: f64 = cuts
            .windows(2)
            .map(|w| crate::empirical::adaptive_simpson(&f, w[0], w[1], 1e-12))
            .sum();
        d * v * integral
    }

    /// int K(u) du by radial quadrature; equals 1 up to quadrature error.
    pub fn mass(&self) -> f64 {
        self.kappa(0.0)
    }
}

/// Bandwidth attaining the general geometric-mixing rate:
/// h = ((ln N)^{(gamma+1)/gamma} / N)^{1/(2 alpha + D)}.
pub fn bandwidth_geometric(n: f64, alpha: f64, dim: usize, gamma: f64) -> Result<f64> {
    check_bandwidth_args(n, alpha, dim)?;
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    let log_pow = n.ln().powf((gamma + 1.0) / gamma);
    Ok((log_pow / n).powf(1.0 / (2.0 * alpha + dim as f64)))
}

/// Bandwidth attaining the optimal uniform rate (gamma > 1):
/// h = (ln N / N)^{1/(2 alpha + D)}.
pub fn bandwidth_optimal(n: f64, alpha: f64, dim: usize) -> Result<f64> {
    check_bandwidth_args(n, alpha, dim)?;
    Ok((n.ln() / n).powf(1.0 / (2.0 * alpha + dim as f64)))
}

/// Bandwidth for modal regression: h = (ln N / N)^{1/(2 alpha + D + 1)},
/// the joint-density estimate living in D + 1 dimensions.
pub fn bandwidth_mode(n: f64, alpha: f64, dim: usize) -> Result<f64> {
    check_bandwidth_args(n, alpha, dim)?;
    Ok((n.ln() / n).powf(1.0 / (2.0 * alpha + dim as f64 + 1.0)))
}

fn check_bandwidth_args(n: f64, alpha: f64, dim: usize) -> Result<()> {
    if !(n >= 2.0) {
        return Err(Error::invalid(format!("bandwidth rules need N >= 2, got {n}")));
    }
    if !(alpha > 0.0) || dim == 0 {
        return Err(Error::invalid("need alpha > 0 and D >= 1".to_string()));
    }
    Ok(())
}

/// Lipschitz semi-norm of the translation class at bandwidth h, B = lip/h,
/// with the omega that keeps O(1/h) growth admissible for the paper-rule
/// bandwidths.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeminormBound {
    pub b: f64,
    pub omega_suggest: f64,
}

pub fn kernel_seminorm_bound(kernel: &KernelSpec, h: f64) -> Result<SeminormBound> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {h}")));
    }
    Ok(SeminormBound { b: kernel.lipschitz() / h, omega_suggest: 2.0 })
}

/// Evaluation grid with an optional interior margin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateGrid {
    points: Vec<f64>,
    dim: usize,
    interior_margin: f64,
}

impl EstimateGrid {
    pub fn new(points: Vec<f64>, dim: usize, interior_margin: f64) -> Result<Self> {
        if dim == 0 || points.len() % dim != 0 {
            return Err(Error::invalid("grid length must be a multiple of its dimension".to_string()));
        }
        if interior_margin < 0.0 {
            return Err(Error::invalid("interior margin must be non-negative".to_string()));
        }
        if interior_margin > 0.0 {
            let ok = points
                .iter()
                .all(|&p| p >= interior_margin && p <= 1.0 - interior_margin);
            if !ok {
                return Err(Error::invalid(
                    "grid points must lie within the interior margin".to_string(),
                ));
            }
        }
        Ok(EstimateGrid { points, dim, interior_margin })
    }

    /// Evenly spaced 1-d grid over [lo, hi] inclusive.
    pub fn uniform_1d(lo: f64, hi: f64, count: usize) -> Self {
        let points = if count == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()
        };
        EstimateGrid { points, dim: 1, interior_margin: 0.0 }
    }

    /// Interior grid [margin, 1 - margin]; used for sup-norm evaluation
    /// away from boundary bias.
    pub fn interior_1d(margin: f64, count: usize) -> Result<Self> {
        if !(margin >= 0.0) || margin >= 0.5 {
            return Err(Error::invalid(format!("interior margin must lie in [0, 0.5), got {margin}")));
        }
        let mut g = EstimateGrid::uniform_1d(margin, 1.0 - margin, count);
        g.interior_margin = margin;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior_margin(&self) -> f64 {
        self.interior_margin
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_integrate_to_one() {
        for id in [KernelId::Epanechnikov, KernelId::Quartic, KernelId::Triweight] {
            for dim in 1..=3 {
                let k = KernelSpec::new(id, dim);
                assert!((k.mass() - 1.0).abs() < 1e-10, "{id:?} dim {dim}: {}", k.mass());
            }
        }
        let ft = KernelSpec::flat_top_epanechnikov(1, 0.3).unwrap();
        assert!((ft.mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn epanechnikov_values() {
        let k = KernelSpec::new(KernelId::Epanechnikov, 1);
        assert!((k.eval(&[0.0]) - 0.75).abs() < 1e-15);
        assert_eq!(k.eval(&[1.0]), 0.0);
        assert_eq!(k.eval(&[-1.5]), 0.0);
        assert!((k.lipschitz() - 1.5).abs() < 1e-15);
        // kappa_1 = 3/8 in one dimension.
        assert!((k.kappa(1.0) - 0.375).abs() < 1e-10);
    }

    #[test]
    fn lipschitz_holds_sampled() {
        // The flat-top variant is discontinuous at the support boundary by
        // construction (that is the point of the floor), so its modulus is
        // checked on the support interior only.
        for (id, lo, hi) in [
            (KernelId::Epanechnikov, -1.2, 1.2),
            (KernelId::Quartic, -1.2, 1.2),
            (KernelId::Triweight, -1.2, 1.2),
            (KernelId::FlatTopEpanechnikov, -1.0, 1.0),
        ] {
            let k = KernelSpec::new(id, 1);
            let lip = k.lipschitz();
            let step = (hi - lo) / 400.0;
            let pts: Vec<f64> = (0..=400).map(|i| lo + i as f64 * step).collect();
            for w in pts.windows(2) {
                let df = (k.eval(&[w[1]]) - k.eval(&[w[0]])).abs();
                assert!(
                    df <= lip * (w[1] - w[0]) + 1e-12,
                    "{id:?} modulus {} at {}",
                    df / (w[1] - w[0]),
                    w[0]
                );
            }
        }
    }

    #[test]
    fn flat_top_bounded_below() {
        let k = KernelSpec::flat_top_epanechnikov(1, 0.2).unwrap();
        assert!(k.inf_on_support() > 0.0);
        // The floor holds on the whole closed support; outside it the
        // kernel vanishes.
        assert!(k.eval(&[0.999]) >= k.inf_on_support());
        assert!(k.eval(&[1.0]) >= k.inf_on_support());
        assert_eq!(k.eval(&[1.0001]), 0.0);
        let plain = KernelSpec::new(KernelId::Epanechnikov, 1);
        assert_eq!(plain.inf_on_support(), 0.0);
    }

    #[test]
    fn bandwidth_rules() {
        // alpha = 1, D = 1: exponent 1/3.
        let h_geo = bandwidth_geometric(1000.0, 1.0, 1, 1.0).unwrap();
        let h_opt = bandwidth_optimal(1000.0, 1.0, 1).unwrap();
        assert!((h_geo - 0.362_708_691_233_947_67).abs() < 1e-12);
        assert!((h_opt - 0.190_449_124_764_055_48).abs() < 1e-12);
        // gamma -> infinity: the geometric rule approaches the optimal one.
        let h_big = bandwidth_geometric(1000.0, 1.0, 1, 1e9).unwrap();
        assert!((h_big - h_opt).abs() < 1e-6);
        // Mode rule: alpha = 1, D = 1 gives exponent 1/4.
        let h_mode = bandwidth_mode(1000.0, 1.0, 1).unwrap();
        assert!((h_mode - (1000f64.ln() / 1000.0).powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn seminorm_bound_scaling() {
        let k = KernelSpec::new(KernelId::Epanechnikov, 1);
        let s = kernel_seminorm_bound(&k, 0.1).unwrap();
        assert!((s.b - 15.0).abs() < 1e-12);
        assert_eq!(s.omega_suggest, 2.0);
        let wide = kernel_seminorm_bound(&k, 1e9).unwrap();
        assert!(wide.b < 1e-8);
    }

    #[test]
    fn grid_margins_enforced() {
        assert!(EstimateGrid::new(vec![0.05, 0.5], 1, 0.1).is_err());
        let g = EstimateGrid::interior_1d(0.1, 11).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g.point(0)[0] - 0.1).abs() < 1e-15);
        assert!((g.point(10)[0] - 0.9).abs() < 1e-15);
    }
}
