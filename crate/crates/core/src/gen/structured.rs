//! Supermodular, antibuoyant and superadditive measures from additive
//! seeds: shift strategies, allowable-range bounds for single-value
//! adjustments and class-preserving random walks.
//!
//! Every mutating operation re-verifies its class oracle before returning
//! and rolls the step back on failure; the analytic bounds alone decide
//! feasibility, the oracle guards the corrected corner cases.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gen::base::{
    draw_outside_band, draw_strictly_between, monotone_bounds, open_unit, AdditiveMeasure,
    Direction,
};
use crate::linext::LinearExtension;
use crate::setfn::{SetFunction, CLASS_TOL};
use crate::subset::Subset;
use crate::verify;

/// Which inequality family produced an interval endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundConstraint {
    /// Pair excess among subsets below `A` (supermodularity).
    PairExcessBelow,
    /// Pair excess among supersets of `A` (supermodularity).
    PairExcessAbove,
    /// Exchange bound across the boundary of `A` (supermodularity).
    CrossExchange,
    /// Doubled chain steps ending at `A` (antibuoyancy).
    ChainDoubleBelow,
    /// Doubled chain steps starting at `A` (antibuoyancy).
    ChainDoubleAbove,
    /// Midpoint cap between a superset and a subset (antibuoyancy).
    ChainMidpoint,
    /// Sum over a two-part split of `A` (superadditivity).
    DisjointSplit,
    /// Gap to a superset minus its complement part (superadditivity).
    SupersetComplement,
    /// Plain monotonicity against a lower neighbour.
    MonotoneBelow,
    /// Plain monotonicity against an upper neighbour.
    MonotoneAbove,
    /// Interval found by feasibility bisection rather than a formula.
    Validated,
}

/// Closed interval of values for one subset that preserves a class, with
/// the constraints that produced each endpoint.
#[derive(Clone, Debug)]
pub struct RangeBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_from: BoundConstraint,
    pub upper_from: BoundConstraint,
}

impl RangeBounds {
    pub fn is_feasible(&self) -> bool {
        self.lower <= self.upper
    }

    pub fn is_singleton(&self, tol: f64) -> bool {
        (self.upper - self.lower).abs() <= tol
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

fn max_bound(acc: &mut (f64, BoundConstraint), value: f64, from: BoundConstraint) {
    if value > acc.0 {
        *acc = (value, from);
    }
}

fn min_bound(acc: &mut (f64, BoundConstraint), value: f64, from: BoundConstraint) {
    if value < acc.0 {
        *acc = (value, from);
    }
}

// --- shift strategies ---

/// Shifts an additive measure into a supermodular one by subtracting a
/// constant from every proper nonempty subset (non-strict), or a strictly
/// increasing size-indexed sequence of amounts (strict). The shift budget
/// is `eta_fraction * min_i nu({i})`, so positive singleton weights are
/// required.
pub fn shift_supermodular(
    nu: &AdditiveMeasure,
    strict: bool,
    eta_fraction: f64,
    rng: &mut impl Rng,
) -> Result<SetFunction> {
    let budget = shift_budget(nu, eta_fraction)?;
    let n = nu.n();
    let mut mu = nu.to_set_function();
    if !strict || n == 2 {
        for a in Subset::proper_nonempty(n) {
            mu.set_value(a, nu.value(a) - budget);
        }
    } else {
        let etas = increasing_amounts(n - 1, budget, rng);
        // suffix[c] = sum of the amounts for sizes c..=n-1.
        let mut suffix = vec![0.0; n + 1];
        for c in (1..n).rev() {
            suffix[c] = suffix[c + 1] + etas[c - 1];
        }
        for a in Subset::proper_nonempty(n) {
            mu.set_value(a, nu.value(a) - suffix[a.card()]);
        }
    }
    debug_assert!(mu.is_monotone(1e-12));
    Ok(mu)
}

fn shift_budget(nu: &AdditiveMeasure, eta_fraction: f64) -> Result<f64> {
    if !eta_fraction.is_finite() || eta_fraction <= 0.0 || eta_fraction >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eta fraction {eta_fraction} must lie in (0, 1)"
        )));
    }
    let min_w = nu.min_weight();
    if min_w <= 0.0 {
        return Err(Error::Infeasible(
            "shift strategies need every singleton weight positive".into(),
        ));
    }
    Ok(eta_fraction * min_w)
}

/// Strictly increasing positive amounts summing to `budget`.
fn increasing_amounts(count: usize, budget: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut draws: Vec<f64> = (0..count).map(|_| open_unit(rng)).collect();
        draws.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        if draws.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        let sum: f64 = draws.iter().sum();
        return draws.into_iter().map(|d| d * budget / sum).collect();
    }
}

/// Shifts an additive measure into a superadditive (not necessarily
/// supermodular) one. Non-strict: subtract inside a random bundle `B`
/// around a pivot element. Strict: subtract per-co-atom amounts from
/// every proper subset. Both require `n > 3`.
pub fn shift_superadditive(
    nu: &AdditiveMeasure,
    strict: bool,
    eta_fraction: f64,
    rng: &mut impl Rng,
) -> Result<SetFunction> {
    let n = nu.n();
    if n <= 3 {
        return Err(Error::Infeasible(format!(
            "superadditive shifts require n > 3, got n = {n}"
        )));
    }
    if strict {
        return shift_superadditive_strict(nu, eta_fraction);
    }
    // Random bundle with 2 < |B| < n and a pivot with positive weight.
    let full = Subset::full(n);
    let bundle = loop {
        let c = Subset(rng.random_range(1..full.bits()));
        if c.card() > 2 && c.elements().any(|e| nu.weight(e) > 0.0) {
            break c;
        }
    };
    let pivots: Vec<usize> = bundle.elements().filter(|&e| nu.weight(e) > 0.0).collect();
    let pivot = pivots[rng.random_range(0..pivots.len())];
    shift_superadditive_bundle(nu, bundle, pivot, eta_fraction)
}

/// The non-strict bundle shift with explicit parameters: subtracts
/// `eta = eta_fraction * nu({pivot})` from every `A` with
/// `pivot in A subseteq bundle`.
pub fn shift_superadditive_bundle(
    nu: &AdditiveMeasure,
    bundle: Subset,
    pivot: usize,
    eta_fraction: f64,
) -> Result<SetFunction> {
    let n = nu.n();
    if n <= 3 {
        return Err(Error::Infeasible(format!(
            "superadditive shifts require n > 3, got n = {n}"
        )));
    }
    if !bundle.is_proper_nonempty(n) || bundle.card() <= 2 {
        return Err(Error::Infeasible(format!(
            "bundle {bundle} must be a proper subset with more than two elements"
        )));
    }
    if !bundle.contains(pivot) {
        return Err(Error::InvalidParameter(format!(
            "pivot {} not in bundle {bundle}",
            pivot + 1
        )));
    }
    if nu.weight(pivot) <= 0.0 {
        return Err(Error::Infeasible("pivot weight must be positive".into()));
    }
    if !eta_fraction.is_finite() || eta_fraction <= 0.0 || eta_fraction >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eta fraction {eta_fraction} must lie in (0, 1)"
        )));
    }
    let eta = eta_fraction * nu.weight(pivot);
    let mut mu = nu.to_set_function();
    for a in Subset::proper_nonempty(n) {
        if a.contains(pivot) && a.is_subset_of(bundle) {
            mu.set_value(a, nu.value(a) - eta);
        }
    }
    debug_assert!(mu.is_monotone(1e-12));
    Ok(mu)
}

/// The strict shift: every proper nonempty subset `B` loses the sum of
/// per-co-atom amounts `eta_A` over the co-atoms `A` containing `B`, with
/// `eta_A = eta_fraction * min_{i in A} nu({i}) / n`. An
/// inclusion-exclusion argument makes every disjoint-pair inequality
/// strict.
pub fn shift_superadditive_strict(nu: &AdditiveMeasure, eta_fraction: f64) -> Result<SetFunction> {
    let n = nu.n();
    if n <= 3 {
        return Err(Error::Infeasible(format!(
            "superadditive shifts require n > 3, got n = {n}"
        )));
    }
    if nu.min_weight() <= 0.0 {
        return Err(Error::Infeasible(
            "strict superadditive shift needs every singleton weight positive".into(),
        ));
    }
    if !eta_fraction.is_finite() || eta_fraction <= 0.0 || eta_fraction >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eta fraction {eta_fraction} must lie in (0, 1)"
        )));
    }
    // amount[x] belongs to the co-atom omitting element x.
    let amount: Vec<f64> = (0..n)
        .map(|x| {
            let min_in = (0..n)
                .filter(|&i| i != x)
                .map(|i| nu.weight(i))
                .fold(f64::INFINITY, f64::min);
            eta_fraction * min_in / n as f64
        })
        .collect();
    let mut mu = nu.to_set_function();
    for b in Subset::proper_nonempty(n) {
        let drop: f64 = (0..n).filter(|&x| !b.contains(x)).map(|x| amount[x]).sum();
        mu.set_value(b, nu.value(b) - drop);
    }
    debug_assert!(mu.is_monotone(1e-12));
    Ok(mu)
}

// --- allowable ranges ---

/// Interval of values for `mu(A)` that keeps a supermodular measure
/// supermodular (and monotone), every other value fixed.
pub fn supermodular_range(mu: &SetFunction, a: Subset) -> Result<RangeBounds> {
    let (int_l, int_u) = monotone_bounds(mu, a)?;
    let n = mu.n();
    let mut lower = (int_l, BoundConstraint::MonotoneBelow);
    let mut upper = (int_u, BoundConstraint::MonotoneAbove);

    let inside: Vec<usize> = a.elements().collect();
    for (ii, &i) in inside.iter().enumerate() {
        for &j in &inside[ii + 1..] {
            let v = mu.value(a.without(i)) + mu.value(a.without(j))
                - mu.value(a.without(i).without(j));
            max_bound(&mut lower, v, BoundConstraint::PairExcessBelow);
        }
    }
    let outside: Vec<usize> = (0..n).filter(|&e| !a.contains(e)).collect();
    for (ii, &i) in outside.iter().enumerate() {
        for &j in &outside[ii + 1..] {
            let v = mu.value(a.with(i)) + mu.value(a.with(j)) - mu.value(a.with(i).with(j));
            max_bound(&mut lower, v, BoundConstraint::PairExcessAbove);
        }
    }
    for &i in &inside {
        for &j in &outside {
            let v = mu.value(a.with(j)) - mu.value(a.without(i).with(j)) + mu.value(a.without(i));
            min_bound(&mut upper, v, BoundConstraint::CrossExchange);
        }
    }
    Ok(RangeBounds { lower: lower.0, upper: upper.0, lower_from: lower.1, upper_from: upper.1 })
}

/// Interval of values for `mu(A)` preserving antibuoyancy: doubled chain
/// steps from below and above bound it from below, midpoints between a
/// superset and a subset cap it from above.
pub fn antibuoyant_range(mu: &SetFunction, a: Subset) -> Result<RangeBounds> {
    if !a.is_proper_nonempty(mu.n()) {
        return Err(Error::NotProperSubset(a));
    }
    let n = mu.n();
    let mut lower = (f64::NEG_INFINITY, BoundConstraint::ChainDoubleBelow);
    let mut upper = (f64::INFINITY, BoundConstraint::ChainMidpoint);

    let inside: Vec<usize> = a.elements().collect();
    let outside: Vec<usize> = (0..n).filter(|&e| !a.contains(e)).collect();
    for &i in &inside {
        for &j in &inside {
            if i != j {
                let v = 2.0 * mu.value(a.without(j)) - mu.value(a.without(i).without(j));
                max_bound(&mut lower, v, BoundConstraint::ChainDoubleBelow);
            }
        }
    }
    for &i in &outside {
        for &j in &outside {
            if i != j {
                let v = 2.0 * mu.value(a.with(j)) - mu.value(a.with(i).with(j));
                max_bound(&mut lower, v, BoundConstraint::ChainDoubleAbove);
            }
        }
    }
    for &i in &outside {
        for &j in &inside {
            let v = 0.5 * (mu.value(a.with(i)) + mu.value(a.without(j)));
            min_bound(&mut upper, v, BoundConstraint::ChainMidpoint);
        }
    }
    Ok(RangeBounds { lower: lower.0, upper: upper.0, lower_from: lower.1, upper_from: upper.1 })
}

/// Interval of values for `mu(A)` preserving superadditivity: two-part
/// splits of `A` from below, superset gaps (the ground set included) from
/// above.
pub fn superadditive_range(mu: &SetFunction, a: Subset) -> Result<RangeBounds> {
    if !a.is_proper_nonempty(mu.n()) {
        return Err(Error::NotProperSubset(a));
    }
    let mut lower = (0.0, BoundConstraint::MonotoneBelow);
    let mut upper = (f64::INFINITY, BoundConstraint::SupersetComplement);
    for b in a.strict_subsets() {
        if !b.is_empty() {
            let v = mu.value(b) + mu.value(a.minus(b));
            max_bound(&mut lower, v, BoundConstraint::DisjointSplit);
        }
    }
    for d in a.complement(mu.n()).subsets() {
        if !d.is_empty() {
            let c = a.union(d);
            let v = mu.value(c) - mu.value(c.minus(a));
            min_bound(&mut upper, v, BoundConstraint::SupersetComplement);
        }
    }
    Ok(RangeBounds { lower: lower.0, upper: upper.0, lower_from: lower.1, upper_from: upper.1 })
}

// --- class-preserving random walks ---

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StructuredClass {
    Supermodular,
    Antibuoyant,
    Superadditive,
}

impl StructuredClass {
    fn range(self, mu: &SetFunction, a: Subset) -> Result<RangeBounds> {
        match self {
            StructuredClass::Supermodular => supermodular_range(mu, a),
            StructuredClass::Antibuoyant => antibuoyant_range(mu, a),
            StructuredClass::Superadditive => superadditive_range(mu, a),
        }
    }

    fn oracle_passes(self, mu: &SetFunction) -> bool {
        let ok = match self {
            StructuredClass::Supermodular => verify::check_supermodular(mu, CLASS_TOL).pass,
            StructuredClass::Antibuoyant => verify::check_antibuoyant(mu, CLASS_TOL).pass,
            StructuredClass::Superadditive => verify::check_superadditive(mu, CLASS_TOL).pass,
        };
        ok && mu.is_monotone(CLASS_TOL)
    }
}

/// Shared walk body: swap `a` with its extension neighbour when the
/// incomparability condition holds and the neighbour's value sits inside
/// the class range, landing strictly between the neighbour and the next
/// value (clamped by the class range). The class oracle re-checks the
/// result; failures roll back.
fn class_walk(
    class: StructuredClass,
    mu: &SetFunction,
    a: Subset,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    let bounds = class.range(mu, a)?;
    let ext = LinearExtension::of_measure(mu);
    let p = ext.position(a);
    let last = ext.len() - 1;
    let (lo, hi) = match direction {
        Direction::Up => {
            let succ = ext.subset_at(p + 1);
            if !(a.card() >= succ.card() || !a.is_subset_of(succ)) {
                return Ok((mu.clone(), false));
            }
            if mu.value(succ) > bounds.upper {
                return Ok((mu.clone(), false));
            }
            let beyond = if p + 2 <= last { mu.value(ext.subset_at(p + 2)) } else { 1.0 };
            (mu.value(succ), bounds.upper.min(beyond))
        }
        Direction::Down => {
            let pred = ext.subset_at(p - 1);
            if !(a.card() <= pred.card() || !a.is_superset_of(pred)) {
                return Ok((mu.clone(), false));
            }
            if mu.value(pred) < bounds.lower {
                return Ok((mu.clone(), false));
            }
            let beyond = if p >= 2 { mu.value(ext.subset_at(p - 2)) } else { 0.0 };
            (bounds.lower.max(beyond), mu.value(pred))
        }
    };
    match draw_strictly_between(mu.values(), lo, hi, rng) {
        Some(x) => {
            let mut out = mu.clone();
            out.set_value(a, x);
            if class.oracle_passes(&out) {
                Ok((out, true))
            } else {
                Ok((mu.clone(), false))
            }
        }
        None => Ok((mu.clone(), false)),
    }
}

pub fn supermodular_walk(
    mu: &SetFunction,
    a: Subset,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    class_walk(StructuredClass::Supermodular, mu, a, direction, rng)
}

pub fn antibuoyant_walk(
    mu: &SetFunction,
    a: Subset,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    class_walk(StructuredClass::Antibuoyant, mu, a, direction, rng)
}

pub fn superadditive_walk(
    mu: &SetFunction,
    a: Subset,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    class_walk(StructuredClass::Superadditive, mu, a, direction, rng)
}

/// Allowable-range counterpart of the walks: assigns `mu(A)` a fresh
/// value inside the class range, avoiding the band between its current
/// extension neighbours so the linear extension actually changes. The
/// class oracle re-checks the assignment; on failure the draw is bisected
/// toward the current value and finally rolled back.
fn class_adjust(
    class: StructuredClass,
    mu: &SetFunction,
    a: Subset,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    let bounds = class.range(mu, a)?;
    let (int_l, int_u) = monotone_bounds(mu, a)?;
    let lo = bounds.lower.max(int_l);
    let hi = bounds.upper.min(int_u);
    let ext = LinearExtension::of_measure(mu);
    let p = ext.position(a);
    let prev = mu.value(ext.subset_at(p - 1));
    let next = mu.value(ext.subset_at(p + 1));
    let drawn = draw_outside_band(mu.values(), (lo, prev), (next, hi), rng);
    let Some(mut x) = drawn else {
        return Ok((mu.clone(), false));
    };
    let current = mu.value(a);
    for _ in 0..32 {
        let mut out = mu.clone();
        out.set_value(a, x);
        if class.oracle_passes(&out) {
            return Ok((out, true));
        }
        x = 0.5 * (x + current);
    }
    Ok((mu.clone(), false))
}

pub fn supermodular_adjust(
    mu: &SetFunction,
    a: Subset,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    class_adjust(StructuredClass::Supermodular, mu, a, rng)
}

pub fn antibuoyant_adjust(
    mu: &SetFunction,
    a: Subset,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    class_adjust(StructuredClass::Antibuoyant, mu, a, rng)
}

pub fn superadditive_adjust(
    mu: &SetFunction,
    a: Subset,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    class_adjust(StructuredClass::Superadditive, mu, a, rng)
}
