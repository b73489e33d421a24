//! Bernstein blocking: partition the diverging-direction lattice into
//! arithmetic-progression blocks whose within-block sup-distance is at
//! least the gap P.

use crate::error::{Error, Result};
use crate::processes::SampleGrid;
use serde::{Deserialize, Serialize};

/// Per-direction progression bookkeeping: quotient L = floor(n/P) and
/// remainder r = n - L P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionBlocking {
    pub len: usize,
    pub quotient: usize,
    pub remainder: usize,
}

/// Partition of the scalar indices 1..=N-hat into blocks. Blocks are
/// Cartesian products of per-direction progressions {j, j+P, j+2P, ...};
/// any two distinct lattice indices within a block differ by a nonzero
/// multiple of P in some coordinate, so their sup-distance is >= P.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Blocking {
    pub gap: usize,
    /// Scalar members (1-based) of each block, row-major over the
    /// diverging directions.
    pub blocks: Vec<Vec<u64>>,
    pub directions: Vec<DirectionBlocking>,
    /// Diverging-direction lengths, for coordinate reconstruction.
    pub dims: Vec<usize>,
}

impl Blocking {
    pub fn n_hat(&self) -> u64 {
        self.dims.iter().map(|&n| n as u64).product()
    }

    /// Lattice coordinates (1-based) of a scalar index.
    pub fn lattice_of_scalar(&self, idx: u64) -> Vec<usize> {
        let mut rem = idx - 1;
        let mut coords = vec![0usize; self.dims.len()];
        for (k, &len) in self.dims.iter().enumerate().rev() {
            coords[k] = (rem % len as u64) as usize + 1;
            rem /= len as u64;
        }
        coords
    }
}

/// Build the blocking of the grid's diverging directions with gap `p`.
///
/// Along direction k, start offsets 1..=r_k carry L_k + 1 terms and
/// offsets r_k+1..=P carry L_k terms. A direction shorter than the gap
/// degenerates to single-element progressions (and the offsets past n_k
/// contribute nothing); such blocks are simply smaller, never empty.
pub fn build_blocking(grid: &SampleGrid, p: usize) -> Result<Blocking> {
    if p == 0 {
        return Err(Error::invalid("block gap must be at least 1".to_string()));
    }
    let dims: Vec<usize> = grid.n_k().to_vec();
    let d_eff = dims.len();
    let directions: Vec<DirectionBlocking> = dims
        .iter()
        .map(|&n| DirectionBlocking { len: n, quotient: n / p, remainder: n % p })
        .collect();

    // Per-direction progressions indexed by start offset 1..=P.
    let progressions: Vec<Vec<Vec<usize>>> = directions
        .iter()
        .map(|dir| {
            (1..=p)
                .map(|j| {
                    let terms = if j <= dir.remainder {
                        dir.quotient + 1
                    } else {
                        dir.quotient
                    };
                    (0..terms).map(|l| j + l * p).collect()
                })
                .collect()
        })
        .collect();

    let strides: Vec<u64> = (0..d_eff)
        .map(|k| dims[k + 1..].iter().map(|&n| n as u64).product())
        .collect();

    let mut blocks = Vec::new();
    let mut offsets = vec![0usize; d_eff]; // 0-based offsets into 1..=P
    'outer: loop {
        let parts: Vec<&Vec<usize>> = (0..d_eff)
            .map(|k| &progressions[k][offsets[k]])
            .collect();
        if parts.iter().all(|prog| !prog.is_empty()) {
            let mut members = Vec::with_capacity(parts.iter().map(|pr| pr.len()).product());
            let mut cursor = vec![0usize; d_eff];
            loop {
                let mut scalar = 1u64;
                for k in 0..d_eff {
                    scalar += (parts[k][cursor[k]] as u64 - 1) * strides[k];
                }
                members.push(scalar);
                let mut k = d_eff;
                while k > 0 {
                    cursor[k - 1] += 1;
                    if cursor[k - 1] < parts[k - 1].len() {
                        break;
                    }
                    cursor[k - 1] = 0;
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
            }
            blocks.push(members);
        }
        let mut k = d_eff;
        while k > 0 {
            offsets[k - 1] += 1;
            if offsets[k - 1] < p {
                continue 'outer;
            }
            offsets[k - 1] = 0;
            k -= 1;
        }
        break;
    }

    Ok(Blocking { gap: p, blocks, directions, dims })
}
