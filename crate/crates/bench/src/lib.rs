//! Shared fixtures for the benchmarks and the step-cost comparison.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use capgen_core::gen::base::sample_additive;
use capgen_core::SetFunction;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn random_capacity(n: usize, seed: u64) -> SetFunction {
    let mut r = rng(seed);
    let nu = sample_additive(n, &mut r).expect("n in range");
    nu.to_set_function()
}

/// Measure-value reads one value adjustment performs: every lower
/// neighbour for the floor, every upper neighbour for the ceiling, and
/// the two extension neighbours.
pub fn adjust_value_reads(n: usize) -> usize {
    n + 2
}

/// Measure-value reads one random-walk step performs: the neighbour, the
/// value beyond it, and the subset-cardinality comparison against the
/// walking subset (no value scan).
pub fn walk_step_reads(_n: usize) -> usize {
    2
}
