//! The four kernel estimators. Denominator-zero grid points are reported
//! as explicitly undefined, never silently zero, so downstream rate
//! experiments cannot average garbage.

use crate::error::{Error, Result};
use crate::processes::Dataset;
use crate::smoothers::{EstimateGrid, KernelSpec};

/// Estimates with an undefined marker per grid point.
#[derive(Debug, Clone)]
pub struct EstimateOutput {
    pub values: Vec<Option<f64>>,
    pub undefined: usize,
}

/// Variance estimates plus the count of first-stage sample points that had
/// to be dropped (undefined fitted mean).
#[derive(Debug, Clone)]
pub struct VarianceOutput {
    pub values: Vec<Option<f64>>,
    pub undefined: usize,
    pub dropped: usize,
}

/// Conditional density estimates f(y|x) on the product grid, x-major.
#[derive(Debug, Clone)]
pub struct CondDensity {
    pub values: Vec<Option<f64>>,
    pub nx: usize,
    pub ny: usize,
}

impl CondDensity {
    pub fn at(&self, xi: usize, yi: usize) -> Option<f64> {
        self.values[xi * self.ny + yi]
    }
}

/// Sup-norm error over the defined grid points.
#[derive(Debug, Clone, Copy)]
pub struct SupError {
    pub sup: Option<f64>,
    pub undefined: usize,
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {h}")));
    }
    Ok(())
}

/// Indices of data points within kernel range of a 1-d query, given data
/// sorted by x. Returns a half-open range into the sort order.
struct Sorted1d {
    order: Vec<usize>,
    xs: Vec<f64>,
}

impl Sorted1d {
    fn build(x: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite covariates"));
        let xs = order.iter().map(|&i| x[i]).collect();
        Sorted1d { order, xs }
    }

    fn window(&self, center: f64, radius: f64) -> std::ops::Range<usize> {
        let lo = self.xs.partition_point(|&v| v < center - radius);
        let hi = self.xs.partition_point(|&v| v <= center + radius);
        lo..hi
    }
}

/// Kernel density estimate f(x) = (N h^D)^{-1} sum_i K((X_i - x)/h) at each
/// grid point. Non-negative by construction.
pub fn kde(
    x: &[f64],
    dim: usize,
    h: f64,
    kernel: &KernelSpec,
    grid: &EstimateGrid,
) -> Result<Vec<f64>> {
    check_h(h)?;
    if x.is_empty() {
        return Err(Error::EmptyInput("kde data"));
    }
    if dim != kernel.dim() || dim != grid.dim() {
        return Err(Error::invalid("data, kernel and grid dimensions must agree".to_string()));
    }
    let n = x.len() / dim;
    let scale = 1.0 / (n as f64 * h.powi(dim as i32));
    let radius = kernel.support_radius() * h;
    let mut out = Vec::with_capacity(grid.len());
    if dim == 1 {
        let sorted = Sorted1d::build(x);
        for gi in 0..grid.len() {
            let p = grid.point(gi)[0];
            let mut acc = 0.0;
            for si in sorted.window(p, radius) {
                let u = (sorted.xs[si] - p) / h;
                acc += kernel.eval_r2(u * u);
            }
            out.push(acc * scale);
        }
    } else {
        for gi in 0..grid.len() {
            let p = grid.point(gi);
            let mut acc = 0.0;
            for i in 0..n {
                let xi = &x[i * dim..(i + 1) * dim];
                let r2: f64 = xi.iter().zip(p).map(|(&a, &b)| (a - b) * (a - b)).sum();
                acc += kernel.eval_r2(r2 / (h * h));
            }
            out.push(acc * scale);
        }
    }
    Ok(out)
}

fn nw_at_points(data: &Dataset, h: f64, kernel: &KernelSpec, points: &[f64]) -> Vec<Option<f64>> {
    let dim = data.dim;
    let radius = kernel.support_radius() * h;
    let n_pts = points.len() / dim;
    let mut out = Vec::with_capacity(n_pts);
    if dim == 1 {
        let sorted = Sorted1d::build(&data.x);
        for gi in 0..n_pts {
            let p = points[gi];
            let mut num = 0.0;
            let mut den = 0.0;
            for si in sorted.window(p, radius) {
                let u = (sorted.xs[si] - p) / h;
                let w = kernel.eval_r2(u * u);
                num += w * data.y[sorted.order[si]];
                den += w;
            }
            out.push(if den > 0.0 { Some(num / den) } else { None });
        }
    } else {
        for gi in 0..n_pts {
            let p = &points[gi * dim..(gi + 1) * dim];
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..data.len() {
                let xi = data.point(i);
                let r2: f64 = xi.iter().zip(p).map(|(&a, &b)| (a - b) * (a - b)).sum();
                let w = kernel.eval_r2(r2 / (h * h));
                num += w * data.y[i];
                den += w;
            }
            out.push(if den > 0.0 { Some(num / den) } else { None });
        }
    }
    out
}

/// Nadaraya-Watson conditional mean m(x) = sum K_i Y_i / sum K_i. Grid
/// points with zero kernel mass are undefined; an entirely undefined
/// output is an error.
pub fn nw_mean(
    data: &Dataset,
    h: f64,
    kernel: &KernelSpec,
    grid: &EstimateGrid,
) -> Result<EstimateOutput> {
    check_h(h)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("regression data"));
    }
    if data.dim != kernel.dim() || data.dim != grid.dim() {
        return Err(Error::invalid("data, kernel and grid dimensions must agree".to_string()));
    }
    let values = nw_at_points(data, h, kernel, grid.points());
    let undefined = values.iter().filter(|v| v.is_none()).count();
    if undefined == values.len() {
        return Err(Error::AllUndefined);
    }
    Ok(EstimateOutput { values, undefined })
}

/// Two-step conditional variance: smooth the squared residuals
/// R_i = (Y_i - m(X_i))^2 of a first-stage mean fit with the same
/// bandwidth. Non-negative wherever defined; sample points whose fitted
/// mean is undefined are dropped and counted.
pub fn two_step_variance(
    data: &Dataset,
    h: f64,
    kernel: &KernelSpec,
    grid: &EstimateGrid,
) -> Result<VarianceOutput> {
    check_h(h)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("regression data"));
    }
    if data.dim != kernel.dim() || data.dim != grid.dim() {
        return Err(Error::invalid("data, kernel and grid dimensions must agree".to_string()));
    }
    let fitted = nw_at_points(data, h, kernel, &data.x);
    let mut dropped = 0usize;
    let mut x2 = Vec::with_capacity(data.x.len());
    let mut r2 = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        match fitted[i] {
            Some(m) => {
                x2.extend_from_slice(data.point(i));
                let r = data.y[i] - m;
                r2.push(r * r);
            }
            None => dropped += 1,
        }
    }
    if r2.is_empty() {
        return Err(Error::AllUndefined);
    }
    let residual_data = Dataset { x: x2, dim: data.dim, y: r2, truth: None, y_bound: None };
    let values = nw_at_points(&residual_data, h, kernel, grid.points());
    let undefined = values.iter().filter(|v| v.is_none()).count();
    if undefined == values.len() {
        return Err(Error::AllUndefined);
    }
    Ok(VarianceOutput { values, undefined, dropped })
}

/// Conditional density estimate
/// f(y|x) = [ (N h^{D+1})^{-1} sum K_i L_i ] / [ (N h^D)^{-1} sum K_i ]
///        = sum K_i L((Y_i - y)/h) / (h sum K_i),
/// undefined where the x-denominator vanishes.
pub fn conditional_density(
    data: &Dataset,
    h: f64,
    kernel_x: &KernelSpec,
    kernel_y: &KernelSpec,
    grid_x: &EstimateGrid,
    grid_y: &[f64],
) -> Result<CondDensity> {
    check_h(h)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("modal data"));
    }
    if kernel_y.dim() != 1 {
        return Err(Error::invalid("response kernel must be one-dimensional".to_string()));
    }
    if data.dim != kernel_x.dim() || data.dim != grid_x.dim() {
        return Err(Error::invalid("data, kernel and grid dimensions must agree".to_string()));
    }
    let dim = data.dim;
    let radius = kernel_x.support_radius() * h;
    let nx = grid_x.len();
    let ny = grid_y.len();
    let mut values = vec![None; nx * ny];
    let sorted = if dim == 1 { Some(Sorted1d::build(&data.x)) } else { None };
    for xi in 0..nx {
        // Collect the in-window x-weights once per column.
        let mut weights: Vec<(usize, f64)> = Vec::new();
        match &sorted {
            Some(s) => {
                let p = grid_x.point(xi)[0];
                for si in s.window(p, radius) {
                    let u = (s.xs[si] - p) / h;
                    let w = kernel_x.eval_r2(u * u);
                    if w > 0.0 {
                        weights.push((s.order[si], w));
                    }
                }
            }
            None => {
                let p = grid_x.point(xi);
                for i in 0..data.len() {
                    let xi_pt = data.point(i);
                    let r2: f64 = xi_pt.iter().zip(p).map(|(&a, &b)| (a - b) * (a - b)).sum();
                    let w = kernel_x.eval_r2(r2 / (h * h));
                    if w > 0.0 {
                        weights.push((i, w));
                    }
                }
            }
        }
        let den: f64 = weights.iter().map(|&(_, w)| w).sum();
        if den <= 0.0 {
            continue;
        }
        for (yi, &y) in grid_y.iter().enumerate() {
            let mut num = 0.0;
            for &(i, w) in &weights {
                let v = (data.y[i] - y) / h;
                num += w * kernel_y.eval_r2(v * v);
            }
            values[xi * ny + yi] = Some(num / (h * den));
        }
    }
    Ok(CondDensity { values, nx, ny })
}

/// Conditional mode: argmax over the y-grid of the estimated conditional
/// density, ties broken toward the smallest y. Columns with zero kernel
/// mass are undefined.
pub fn modal_regression(
    data: &Dataset,
    h: f64,
    kernel_x: &KernelSpec,
    kernel_y: &KernelSpec,
    grid_x: &EstimateGrid,
    grid_y: &[f64],
) -> Result<EstimateOutput> {
    if grid_y.is_empty() {
        return Err(Error::EmptyInput("mode search grid"));
    }
    let dens = conditional_density(data, h, kernel_x, kernel_y, grid_x, grid_y)?;
    let mut values = Vec::with_capacity(dens.nx);
    for xi in 0..dens.nx {
        let column = &dens.values[xi * dens.ny..(xi + 1) * dens.ny];
        if column[0].is_none() {
            values.push(None);
            continue;
        }
        let mut best = 0usize;
        let mut best_val = column[0].unwrap();
        for (yi, v) in column.iter().enumerate().skip(1) {
            let v = v.unwrap();
            if v > best_val {
                best = yi;
                best_val = v;
            }
        }
        values.push(Some(grid_y[best]));
    }
    let undefined = values.iter().filter(|v| v.is_none()).count();
    if undefined == values.len() {
        return Err(Error::AllUndefined);
    }
    Ok(EstimateOutput { values, undefined })
}

/// Maximum absolute error over defined grid points; undefined points are
/// excluded and counted.
pub fn sup_error(estimates: &[Option<f64>], truth: &[f64]) -> SupError {
    debug_assert_eq!(estimates.len(), truth.len());
    let mut sup: Option<f64> = None;
    let mut undefined = 0usize;
    for (est, &tr) in estimates.iter().zip(truth) {
        match est {
            Some(v) => {
                let err = (v - tr).abs();
                sup = Some(sup.map_or(err, |s: f64| s.max(err)));
            }
            None => undefined += 1,
        }
    }
    SupError { sup, undefined }
}
