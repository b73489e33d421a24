//! Finite-state Markov chains: validation, stationary law, simulation, and
//! the exact phi-mixing coefficient used to calibrate C(r).

use crate::error::{Error, Result};
use crate::processes::{GeneratorMeta, SampleGrid, Series};
use crate::seed::unit_f64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const ROW_SUM_TOL: f64 = 1e-9;
const STATIONARY_TOL: f64 = 1e-14;

/// Row-stochastic transition matrix of an irreducible aperiodic chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    n: usize,
    p: Vec<f64>,
}

impl TransitionMatrix {
    /// Validate and wrap a row-major matrix. Rejects negative entries, rows
    /// not summing to 1, reducible chains (checked by reachability) and
    /// periodic chains.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput("transition matrix"));
        }
        let mut p = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NonStochasticRow { row: i, sum });
            }
            p.extend_from_slice(row);
        }
        let m = TransitionMatrix { n, p };
        m.check_irreducible()?;
        m.check_aperiodic()?;
        Ok(m)
    }

    /// Two-state chain with P(0 -> 1) = p and P(1 -> 0) = q. Its second
    /// eigenvalue is 1 - p - q.
    pub fn two_state(p: f64, q: f64) -> Result<Self> {
        TransitionMatrix::new(vec![vec![1.0 - p, p], vec![q, 1.0 - q]])
    }

    /// Lazy uniform-refresh chain on `n` states: stay with probability
    /// `rho`, otherwise jump to a uniformly chosen state. Doubly stochastic,
    /// so the stationary law is uniform; the second eigenvalue is `rho`.
    pub fn sticky_uniform(n: usize, rho: f64) -> Result<Self> {
        if n == 0 || !(0.0..1.0).contains(&rho) {
            return Err(Error::invalid(format!(
                "sticky chain needs n >= 1 and rho in [0,1), got n={n}, rho={rho}"
            )));
        }
        let off = (1.0 - rho) / n as f64;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { rho + off } else { off })
                    .collect()
            })
            .collect();
        TransitionMatrix::new(rows)
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.p[s * self.n..(s + 1) * self.n]
    }

    fn check_irreducible(&self) -> Result<()> {
        let fwd = self.reachable(false);
        let bwd = self.reachable(true);
        for s in 0..self.n {
            if !fwd[s] || !bwd[s] {
                return Err(Error::ReducibleChain(s));
            }
        }
        Ok(())
    }

    fn reachable(&self, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                let edge = if reverse {
                    self.p[v * self.n + u] > 0.0
                } else {
                    self.p[u * self.n + v] > 0.0
                };
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn check_aperiodic(&self) -> Result<()> {
        // Period = gcd over edges (u,v) of level(u) + 1 - level(v), levels
        // from BFS at state 0. Valid for irreducible chains.
        let mut level = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        level[0] = 0;
        while let Some(u) = queue.pop_front() {
            for v in 0..self.n {
                if self.p[u * self.n + v] > 0.0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g: i64 = 0;
        for u in 0..self.n {
            for v in 0..self.n {
                if self.p[u * self.n + v] > 0.0 {
                    let d = level[u] as i64 + 1 - level[v] as i64;
                    g = gcd(g, d.abs());
                }
            }
        }
        if g != 1 {
            return Err(Error::PeriodicChain(g as usize));
        }
        Ok(())
    }

    /// Stationary distribution by fixed-point iteration of pi <- pi P.
    pub fn stationary(&self) -> Vec<f64> {
        let mut pi = vec![1.0 / self.n as f64; self.n];
        let mut next = vec![0.0; self.n];
        for _ in 0..10_000_000usize {
            for v in next.iter_mut() {
                *v = 0.0;
            }
            for s in 0..self.n {
                let w = pi[s];
                for u in 0..self.n {
                    next[u] += w * self.p[s * self.n + u];
                }
            }
            let diff: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut pi, &mut next);
            if diff < STATIONARY_TOL {
                break;
            }
        }
        pi
    }

    /// r-step transition matrix as a flat row-major vector (r >= 0).
    pub fn power(&self, r: usize) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.n * self.n)
            .map(|k| if k / self.n == k % self.n { 1.0 } else { 0.0 })
            .collect();
        let mut tmp = vec![0.0; self.n * self.n];
        for _ in 0..r {
            for v in tmp.iter_mut() {
                *v = 0.0;
            }
            for i in 0..self.n {
                for k in 0..self.n {
                    let a = out[i * self.n + k];
                    if a != 0.0 {
                        for j in 0..self.n {
                            tmp[i * self.n + j] += a * self.p[k * self.n + j];
                        }
                    }
                }
            }
            std::mem::swap(&mut out, &mut tmp);
        }
        out
    }

    /// Right action (P^r g)(s) = sum_u P^r[s,u] g(u).
    pub fn apply_power(&self, r: usize, g: &[f64]) -> Vec<f64> {
        let pr = self.power(r);
        (0..self.n)
            .map(|s| (0..self.n).map(|u| pr[s * self.n + u] * g[u]).sum())
            .collect()
    }

    /// Exact phi-mixing coefficient at lag r: the largest L1 distance
    /// between a row of P^r and the stationary law. With the zero semi-norm
    /// this is the C(r) for which Definition-style covariance control holds
    /// on the chain (via |sum_u (P^r[s,u] - pi_u) g(u)| <= osc(g)/2 * L1).
    pub fn phi_mixing(&self, r: usize) -> f64 {
        let pi = self.stationary();
        let pr = self.power(r);
        (0..self.n)
            .map(|s| {
                (0..self.n)
                    .map(|u| (pr[s * self.n + u] - pi[u]).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Simulate a stationary chain and emit the real-valued state labels.
pub fn simulate_markov_chain(
    chain: &TransitionMatrix,
    labels: &[f64],
    n: usize,
    seed: u64,
) -> Result<Series> {
    if n == 0 {
        return Err(Error::invalid("chain simulation needs n >= 1".to_string()));
    }
    if labels.len() != chain.n_states() {
        return Err(Error::invalid(format!(
            "got {} labels for {} states",
            labels.len(),
            chain.n_states()
        )));
    }
    let pi = chain.stationary();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = sample_index(&pi, unit_f64(&mut rng));
    let mut values = Vec::with_capacity(n);
    values.push(labels[state]);
    for _ in 1..n {
        state = sample_index(chain.row(state), unit_f64(&mut rng));
        values.push(labels[state]);
    }
    Ok(Series {
        values,
        grid: SampleGrid::time_series(n),
        generator: GeneratorMeta::MarkovChain { labels: labels.to_vec() },
        seed,
    })
}

fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}
