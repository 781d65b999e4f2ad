//! Additive-measure sampling and the generic diversification primitives:
//! value adjustment within monotone bounds and single random-walk steps on
//! the induced linear extension.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::linext::LinearExtension;
use crate::setfn::SetFunction;
use crate::subset::Subset;

/// Maximum redraws before a sampling step gives up on avoiding an exact
/// collision with an existing value.
const MAX_REDRAWS: usize = 64;

/// An additive measure: `n` nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveMeasure {
    weights: Vec<f64>,
}

impl AdditiveMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if !(2..=26).contains(&n) {
            return Err(Error::ElementCount(n));
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(format!("weight {w} must be finite and >= 0")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {sum}, expected 1")));
        }
        Ok(AdditiveMeasure { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        AdditiveMeasure::new(vec![1.0 / n as f64; n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, a: Subset) -> f64 {
        a.elements().map(|e| self.weights[e]).sum()
    }

    /// Expands to the full value array. The ground-set value is pinned to
    /// exactly 1 so downstream boundary checks are exact.
    pub fn to_set_function(&self) -> SetFunction {
        let n = self.n();
        let size = 1usize << n;
        let mut values = vec![0.0; size];
        for m in 1..size {
            let low = m.trailing_zeros() as usize;
            values[m] = values[m & (m - 1)] + self.weights[low];
        }
        values[size - 1] = 1.0;
        SetFunction::from_values(n, values).expect("additive expansion is well-formed")
    }
}

/// Everything that determines a generation run besides the class request.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationConfig {
    /// Base seed; every batch item derives its own RNG stream from it.
    pub seed: u64,
    /// Random-walk steps applied per generated measure.
    pub walk_steps: usize,
    /// Fraction in (0, 1) scaling every shift magnitude against its bound.
    pub eta_fraction: f64,
    /// Class-membership tolerance used when verifying emitted measures.
    pub tolerance: f64,
    /// Number of measures per batch.
    pub batch: usize,
    /// Allowable-range adjustment rounds; defaults to `2^n` when `None`.
    pub adjust_rounds: Option<usize>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 0,
            walk_steps: 5,
            eta_fraction: 0.3,
            tolerance: crate::setfn::CLASS_TOL,
            batch: 1,
            adjust_rounds: None,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.eta_fraction.is_finite() || self.eta_fraction <= 0.0 || self.eta_fraction >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "eta fraction {} must lie in (0, 1)",
                self.eta_fraction
            )));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Independent RNG stream for one batch item: same seed, distinct
    /// stream index, so batches can be generated in parallel and still
    /// replay deterministically.
    pub fn rng_for(&self, index: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    pub fn adjust_rounds_for(&self, n: usize) -> usize {
        self.adjust_rounds.unwrap_or(1 << n)
    }
}

/// Direction of a random-walk step along the induced linear extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Uniform draw from the open interval `(0, 1)`.
pub(crate) fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Samples a weight vector uniformly from the open simplex: exponential
/// draws normalized by their sum.
pub fn sample_additive(n: usize, rng: &mut impl Rng) -> Result<AdditiveMeasure> {
    if !(2..=26).contains(&n) {
        return Err(Error::ElementCount(n));
    }
    loop {
        let draws: Vec<f64> = (0..n).map(|_| -open_unit(rng).ln()).collect();
        let sum: f64 = draws.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            continue;
        }
        let weights: Vec<f64> = draws.iter().map(|x| x / sum).collect();
        if weights.iter().all(|&w| w > 0.0) {
            if let Ok(m) = AdditiveMeasure::new(weights) {
                return Ok(m);
            }
        }
    }
}

/// Assigns sorted random values from (0, 1) to a linear extension, giving
/// a capacity comonotone with every other measure drawn from the same
/// extension. Values are redrawn on exact ties so the induced extension
/// equals the input.
pub fn measure_from_extension(ext: &LinearExtension, rng: &mut impl Rng) -> SetFunction {
    let size = ext.len();
    let mut draws: Vec<f64>;
    loop {
        draws = (0..size - 2).map(|_| open_unit(rng)).collect();
        draws.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        if draws.windows(2).all(|w| w[0] < w[1]) && draws.last().map_or(true, |&v| v < 1.0) {
            break;
        }
    }
    let mut values = vec![0.0; size];
    for (k, &v) in draws.iter().enumerate() {
        values[ext.subset_at(k + 1).index()] = v;
    }
    values[ext.subset_at(size - 1).index()] = 1.0;
    SetFunction::from_values(ext.n(), values).expect("sorted assignment is well-formed")
}

/// Monotonicity bounds for the value of a nonempty proper subset:
/// `lo = max_{i in A} mu(A - i)`, `hi = min_{i not in A} mu(A + i)`.
pub fn monotone_bounds(mu: &SetFunction, a: Subset) -> Result<(f64, f64)> {
    if !a.is_proper_nonempty(mu.n()) {
        return Err(Error::NotProperSubset(a));
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for e in 0..mu.n() {
        if a.contains(e) {
            lo = lo.max(mu.value(a.without(e)));
        } else {
            hi = hi.min(mu.value(a.with(e)));
        }
    }
    Ok((lo, hi))
}

/// Draws uniformly from the union of two half-open pieces
/// `[lo_start, lo_end)` and `(hi_start, hi_end]`, avoiding exact
/// collisions with any existing value. Returns `None` when both pieces
/// are empty or collisions persist.
pub(crate) fn draw_outside_band(
    existing: &[f64],
    lo_piece: (f64, f64),
    hi_piece: (f64, f64),
    rng: &mut impl Rng,
) -> Option<f64> {
    let lo_len = (lo_piece.1 - lo_piece.0).max(0.0);
    let hi_len = (hi_piece.1 - hi_piece.0).max(0.0);
    if lo_len <= 0.0 && hi_len <= 0.0 {
        return None;
    }
    for _ in 0..MAX_REDRAWS {
        let t: f64 = rng.random::<f64>() * (lo_len + hi_len);
        let x = if t < lo_len {
            lo_piece.0 + t
        } else {
            // Map onto (hi_start, hi_end], closed at the outer bound.
            hi_piece.1 - (t - lo_len)
        };
        let inside_lo = lo_len > 0.0 && x >= lo_piece.0 && x < lo_piece.1;
        let inside_hi = hi_len > 0.0 && x > hi_piece.0 && x <= hi_piece.1;
        if (inside_lo || inside_hi) && existing.iter().all(|&v| v != x) {
            return Some(x);
        }
    }
    None
}

/// Value adjustment of a nonempty proper subset within its monotone
/// bounds, avoiding the band between its current extension neighbours so
/// a feasible draw always lands in a new linear extension. Returns the
/// input unchanged with `false` when the admissible set is empty.
pub fn adjust_value(
    mu: &SetFunction,
    a: Subset,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    let (int_l, int_u) = monotone_bounds(mu, a)?;
    let ext = LinearExtension::of_measure(mu);
    let p = ext.position(a);
    let prev = mu.value(ext.subset_at(p - 1));
    let next = mu.value(ext.subset_at(p + 1));
    match draw_outside_band(mu.values(), (int_l, prev), (next, int_u), rng) {
        Some(x) => {
            let mut out = mu.clone();
            out.set_value(a, x);
            Ok((out, true))
        }
        None => Ok((mu.clone(), false)),
    }
}

/// Draws strictly inside `(lo, hi)`, avoiding exact collisions with any
/// existing value.
pub(crate) fn draw_strictly_between(
    existing: &[f64],
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> Option<f64> {
    if !(hi > lo) {
        return None;
    }
    for _ in 0..MAX_REDRAWS {
        let x = lo + open_unit(rng) * (hi - lo);
        if x > lo && x < hi && existing.iter().all(|&v| v != x) {
            return Some(x);
        }
    }
    None
}

/// One random-walk step on the induced extension: swaps `a` with its
/// successor (up) or predecessor (down) when they are incomparable, by
/// assigning `mu(a)` a value strictly between the neighbour and the
/// neighbour after it. Blocked steps return the input with `false`.
pub fn random_walk_step(
    mu: &SetFunction,
    a: Subset,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    if !a.is_proper_nonempty(mu.n()) {
        return Err(Error::NotProperSubset(a));
    }
    let ext = LinearExtension::of_measure(mu);
    let p = ext.position(a);
    let last = ext.len() - 1;
    let (lo, hi) = match direction {
        Direction::Up => {
            let succ = ext.subset_at(p + 1);
            if !(a.card() >= succ.card() || !a.is_subset_of(succ)) {
                return Ok((mu.clone(), false));
            }
            let beyond = if p + 2 <= last { mu.value(ext.subset_at(p + 2)) } else { 1.0 };
            (mu.value(succ), beyond)
        }
        Direction::Down => {
            let pred = ext.subset_at(p - 1);
            if !(a.card() <= pred.card() || !a.is_superset_of(pred)) {
                return Ok((mu.clone(), false));
            }
            let beyond = if p >= 2 { mu.value(ext.subset_at(p - 2)) } else { 0.0 };
            (beyond, mu.value(pred))
        }
    };
    match draw_strictly_between(mu.values(), lo, hi, rng) {
        Some(x) => {
            let mut out = mu.clone();
            out.set_value(a, x);
            Ok((out, true))
        }
        None => Ok((mu.clone(), false)),
    }
}

/// Uniformly random nonempty proper subset.
pub fn random_proper_subset(n: usize, rng: &mut impl Rng) -> Subset {
    let full = Subset::full(n).bits();
    Subset(rng.random_range(1..full))
}

pub fn random_direction(rng: &mut impl Rng) -> Direction {
    if rng.random::<bool>() {
        Direction::Up
    } else {
        Direction::Down
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn additive(w: &[f64]) -> AdditiveMeasure {
        AdditiveMeasure::new(w.to_vec()).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_additive(5, &mut rng(7)).unwrap();
        let b = sample_additive(5, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        let c = sample_additive(5, &mut rng(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_weights_are_normalized_and_positive() {
        let mut r = rng(11);
        for _ in 0..10_000 {
            let m = sample_additive(3, &mut r).unwrap();
            let sum: f64 = m.weights().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(m.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn sample_mean_matches_simplex_moments() {
        // Mean of each coordinate on the uniform simplex is 1/n with
        // variance (n-1)/(n^2 (n+1)); check the sample mean within 3 sigma.
        let n = 4;
        let samples = 10_000;
        let mut r = rng(13);
        let mut sums = vec![0.0; n];
        for _ in 0..samples {
            let m = sample_additive(n, &mut r).unwrap();
            for (s, w) in sums.iter_mut().zip(m.weights()) {
                *s += w;
            }
        }
        let var = (n as f64 - 1.0) / ((n * n) as f64 * (n as f64 + 1.0));
        let three_sigma = 3.0 * (var / samples as f64).sqrt();
        for s in sums {
            assert!((s / samples as f64 - 1.0 / n as f64).abs() <= three_sigma);
        }
        assert!(matches!(sample_additive(1, &mut r), Err(Error::ElementCount(1))));
    }

    #[test]
    fn measure_from_extension_round_trips() {
        let mut r = rng(5);
        for _ in 0..200 {
            let nu = sample_additive(4, &mut r).unwrap();
            let ext = LinearExtension::of_measure(&nu.to_set_function());
            let mu = measure_from_extension(&ext, &mut r);
            assert!(mu.check_capacity(1e-12).is_ok());
            assert_eq!(LinearExtension::of_measure(&mu).order(), ext.order());
        }
    }

    #[test]
    fn draws_from_same_extension_are_comonotonic() {
        let mut r = rng(6);
        let nu = sample_additive(4, &mut r).unwrap();
        let ext = LinearExtension::of_measure(&nu.to_set_function());
        let a = measure_from_extension(&ext, &mut r);
        let b = measure_from_extension(&ext, &mut r);
        let argsort = |mu: &SetFunction| LinearExtension::of_measure(mu).order().to_vec();
        assert_eq!(argsort(&a), argsort(&b));
    }

    #[test]
    fn adjust_value_lands_outside_the_neighbor_band() {
        // Additive (0.2, 0.35, 0.45), A = {3}: monotone interval [0, 0.65]
        // minus the band [0.35, 0.55] between its extension neighbours.
        let mu = additive(&[0.2, 0.35, 0.45]).to_set_function();
        let a = Subset(0b100);
        let mut r = rng(21);
        for _ in 0..500 {
            let (out, feasible) = adjust_value(&mu, a, &mut r).unwrap();
            assert!(feasible);
            let x = out.value(a);
            assert!(
                (0.0..0.35).contains(&x) || (0.55 < x && x <= 0.65),
                "draw {x} escaped [0, 0.35) and (0.55, 0.65]"
            );
            assert!(out.is_monotone(1e-12));
            assert_ne!(
                LinearExtension::of_measure(&out).order(),
                LinearExtension::of_measure(&mu).order()
            );
        }
    }

    #[test]
    fn adjust_value_pair_example() {
        // A = {1,2}: interval [0.35, 1] minus [0.45, 0.65].
        let mu = additive(&[0.2, 0.35, 0.45]).to_set_function();
        let a = Subset(0b011);
        let mut r = rng(22);
        for _ in 0..500 {
            let (out, feasible) = adjust_value(&mu, a, &mut r).unwrap();
            assert!(feasible);
            let x = out.value(a);
            assert!(
                (0.35..0.45).contains(&x) || (0.65 < x && x <= 1.0),
                "draw {x} escaped [0.35, 0.45) and (0.65, 1]"
            );
        }
    }

    #[test]
    fn adjust_value_infeasible_returns_input() {
        // n = 2: each singleton is wedged between the empty set and the
        // other singleton's complement band, leaving no admissible slot
        // when the band covers the whole interval.
        let mu = SetFunction::from_values(2, vec![0.0, 0.4, 0.6, 1.0]).unwrap();
        let mut r = rng(23);
        let (out, feasible) = adjust_value(&mu, Subset(0b01), &mut r).unwrap();
        if !feasible {
            assert_eq!(out.values(), mu.values());
        }
    }

    #[test]
    fn walk_up_swaps_incomparable_neighbors() {
        // Extension: empty, {1}, {2}, {3}, {1,2}, ...; A = {3} and its
        // successor {1,2} are incomparable, so the step swaps them.
        let mu = additive(&[0.2, 0.35, 0.45]).to_set_function();
        let a = Subset(0b100);
        let (out, moved) = random_walk_step(&mu, a, Direction::Up, &mut rng(31)).unwrap();
        assert!(moved);
        let before = LinearExtension::of_measure(&mu);
        let after = LinearExtension::of_measure(&out);
        assert_eq!(after.position(a), before.position(a) + 1);
        assert_eq!(after.position(Subset(0b011)), before.position(Subset(0b011)) - 1);
        assert!(out.is_monotone(1e-12));
        // Only the pair swapped.
        let mut expected = before.order().to_vec();
        expected.swap(3, 4);
        assert_eq!(after.order(), expected.as_slice());
    }

    #[test]
    fn walk_up_blocked_by_successor_superset() {
        // A = {1} has successor {2}; then {2}'s successor in the additive
        // extension is {3}, and {1}'s is {2}: incomparable, so pick the
        // blocked case directly: A = {1,2} has successor {1,3}, which is
        // incomparable; instead use A = {2,3} whose successor is N.
        let mu = additive(&[0.2, 0.35, 0.45]).to_set_function();
        let a = Subset(0b110);
        let (out, moved) = random_walk_step(&mu, a, Direction::Up, &mut rng(32)).unwrap();
        assert!(!moved);
        assert_eq!(out.values(), mu.values());
    }

    #[test]
    fn walk_down_swaps_incomparable_neighbors() {
        let mu = additive(&[0.2, 0.35, 0.45]).to_set_function();
        let a = Subset(0b011); // {1,2}, predecessor {3}
        let (out, moved) = random_walk_step(&mu, a, Direction::Down, &mut rng(33)).unwrap();
        assert!(moved);
        let after = LinearExtension::of_measure(&out);
        assert_eq!(after.position(a), 3);
        assert!(out.is_monotone(1e-12));
    }

    #[test]
    fn walk_down_blocked_by_predecessor_subset() {
        let mu = additive(&[0.2, 0.35, 0.45]).to_set_function();
        let a = Subset(0b011); // {1,2}; after moving {3} out of the way,
                               // its predecessor is {2}, a subset: blocked.
        let (stepped, _) = random_walk_step(&mu, Subset(0b100), Direction::Up, &mut rng(34)).unwrap();
        let (out, moved) = random_walk_step(&stepped, a, Direction::Down, &mut rng(35)).unwrap();
        assert!(!moved);
        assert_eq!(out.values(), stepped.values());
    }

    #[test]
    fn walk_rejects_trivial_subsets() {
        let mu = additive(&[0.5, 0.5]).to_set_function();
        assert!(random_walk_step(&mu, Subset::EMPTY, Direction::Up, &mut rng(36)).is_err());
        assert!(random_walk_step(&mu, Subset(0b11), Direction::Up, &mut rng(36)).is_err());
    }

    #[test]
    fn walk_outputs_stay_monotone_under_stress() {
        let mut r = rng(40);
        for _ in 0..200 {
            let nu = sample_additive(4, &mut r).unwrap();
            let ext = LinearExtension::of_measure(&nu.to_set_function());
            let mut mu = measure_from_extension(&ext, &mut r);
            for _ in 0..10 {
                let a = random_proper_subset(4, &mut r);
                let dir = random_direction(&mut r);
                let (next, moved) = random_walk_step(&mu, a, dir, &mut r).unwrap();
                if moved {
                    // Exactly one adjacent transposition.
                    let before = LinearExtension::of_measure(&mu);
                    let after = LinearExtension::of_measure(&next);
                    let diffs: Vec<usize> = (0..before.len())
                        .filter(|&p| before.order()[p] != after.order()[p])
                        .collect();
                    assert_eq!(diffs.len(), 2);
                    assert_eq!(diffs[0] + 1, diffs[1]);
                }
                mu = next;
                assert!(mu.is_monotone(1e-12));
            }
        }
    }
}
