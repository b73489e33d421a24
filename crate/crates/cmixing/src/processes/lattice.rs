//! Finite-range moving-average field on Z^d.

use crate::error::{Error, Result};
use crate::processes::{GeneratorMeta, SampleGrid, Series};
use crate::seed::site_noise;

/// Simulate a moving average of iid Uniform[-1,1] innovations over the
/// causal window [0,R]^d: X_v = mean of eps_{v+o}, o in {0..R}^d.
///
/// Two sites share innovations iff their sup-distance is at most R, so the
/// field is m-dependent with C(r) = 0 for r > R (geometric C-mixing).
/// Innovations are addressed by site hash, which makes the field a pure
/// function of (seed, coordinates). Output is ordered by the grid's index
/// bijection.
pub fn simulate_lattice_field(grid: &SampleGrid, range: usize, seed: u64) -> Result<Series> {
    // Re-validate Assumption-6 style constraints for grids built elsewhere.
    let revalidated = SampleGrid::new(
        grid.d(),
        grid.d_eff(),
        grid.n0(),
        grid.n_k().to_vec(),
    )?;
    if &revalidated != grid {
        return Err(Error::invalid("grid failed revalidation".to_string()));
    }
    let n = grid.n();
    let d = grid.d();
    let window = (range + 1).pow(d as u32) as f64;
    let mut values = Vec::with_capacity(n as usize);
    let mut site = vec![0i64; d];
    for idx in 0..n {
        let coords = grid.lattice_of_scalar(idx);
        let mut acc = 0.0;
        let mut offset = vec![0usize; d];
        loop {
            for k in 0..d {
                site[k] = coords[k] as i64 + offset[k] as i64;
            }
            acc += site_noise(seed, &site);
            // Odometer over {0..R}^d.
            let mut k = 0;
            loop {
                if k == d {
                    break;
                }
                offset[k] += 1;
                if offset[k] <= range {
                    break;
                }
                offset[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        values.push(acc / window);
    }
    Ok(Series {
        values,
        grid: grid.clone(),
        generator: GeneratorMeta::LatticeField { range },
        seed,
    })
}
