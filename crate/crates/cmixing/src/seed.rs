//! Seed derivation and uniform deviate helpers.
//!
//! Every stochastic routine in this crate draws from a `ChaCha8Rng` seeded
//! through these helpers, so a (config, seed) pair regenerates bit-identical
//! output no matter how replications are scheduled across workers.

use rand::RngCore;

/// SplitMix64 finalizer. Used to hash replication indices and lattice sites.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of an experiment with master seed `master`:
/// `master XOR hash(rep)`. Workers may pick replications up in any order.
pub fn replication_seed(master: u64, rep: u64) -> u64 {
    master ^ splitmix64(rep)
}

/// Uniform deviate in [0,1) with 53 random mantissa bits.
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform deviate in [-1,1).
pub fn symmetric_f64(rng: &mut impl RngCore) -> f64 {
    2.0 * unit_f64(rng) - 1.0
}

/// Hash a lattice site (plus seed) to a uniform deviate in [-1,1].
///
/// Innovations are addressed by coordinates rather than drawn from a stream,
/// so a moving-average field is well defined independently of the order in
/// which sites are evaluated.
pub fn site_noise(seed: u64, coords: &[i64]) -> f64 {
    let mut state = splitmix64(seed ^ 0x6a09_e667_f3bc_c909);
    for &c in coords {
        state = splitmix64(state ^ (c as u64));
    }
    (state >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0
}
