//! k-order measures: direct transforms for the tolerant, interactive and
//! maxitive families, constructive upper extensions that cancel the
//! Möbius / nonadditivity / nonmodularity indices above order k,
//! perturbation ranges (closed-form and feasibility-validated), and
//! random walks restricted to the lower k-order levels.
//!
//! The constructive extension is authoritative everywhere: the closed-form
//! propagation rules are kept only as cross-checked fast paths because they
//! do not cancel the indices in all configurations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gen::base::{draw_strictly_between, Direction};
use crate::gen::structured::{BoundConstraint, RangeBounds};
use crate::setfn::{MobiusRep, SetFunction, EXACT_TOL};
use crate::subset::Subset;

/// k-order family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KOrderClass {
    Additive,
    Nonadditive,
    Nonmodular,
    Maxitive,
    Tolerant,
    Interactive,
}

/// Order parameter plus family; `interaction` is the plateau `K` of the
/// interactive family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KOrderSpec {
    pub k: usize,
    pub class: KOrderClass,
    pub interaction: Option<f64>,
}

impl KOrderSpec {
    pub fn new(class: KOrderClass, k: usize) -> Self {
        KOrderSpec { k, class, interaction: None }
    }

    pub fn interactive(k: usize, cap: f64) -> Self {
        KOrderSpec { k, class: KOrderClass::Interactive, interaction: Some(cap) }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidParameter(format!("k = {} outside 1..={n}", self.k)));
        }
        if self.class == KOrderClass::Interactive {
            if self.k > n - 1 {
                return Err(Error::InvalidParameter(format!(
                    "interactive family requires k <= n - 1, got k = {}",
                    self.k
                )));
            }
            match self.interaction {
                Some(cap) if (0.0..=1.0).contains(&cap) => {}
                Some(cap) => {
                    return Err(Error::InvalidParameter(format!("K = {cap} outside [0, 1]")))
                }
                None => {
                    return Err(Error::InvalidParameter(
                        "interactive family requires the plateau level K".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

// --- direct transforms ---

/// Saturates every subset above order k at 1, keeping the lower values.
pub fn make_k_tolerant(nu: &SetFunction, k: usize) -> Result<SetFunction> {
    if k == 0 || k > nu.n() {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={}", nu.n())));
    }
    let mut mu = nu.clone();
    for a in Subset::all(nu.n()) {
        if a.card() > k {
            mu.set_value(a, 1.0);
        }
    }
    Ok(mu)
}

fn max_at_level(nu: &SetFunction, k: usize) -> f64 {
    Subset::all(nu.n())
        .filter(|a| a.card() == k)
        .map(|a| nu.value(a))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Scales the lower part to peak at `K` and lays the upper orders on the
/// affine ramp from `K` to 1. At `k = n - 1` the ramp collapses to the
/// ground set alone, which is pinned to 1.
pub fn make_k_interactive(nu: &SetFunction, k: usize, cap: f64) -> Result<SetFunction> {
    let n = nu.n();
    KOrderSpec::interactive(k, cap).validate(n)?;
    let peak = max_at_level(nu, k);
    if peak <= 0.0 {
        return Err(Error::Degenerate(format!(
            "no subset of {k} elements has positive value; cannot scale"
        )));
    }
    let mut mu = nu.clone();
    for a in Subset::all(n) {
        let c = a.card();
        if c <= k {
            mu.set_value(a, cap * nu.value(a) / peak);
        } else if k + 1 == n {
            mu.set_value(a, 1.0);
        } else {
            mu.set_value(a, cap + (c as f64 - k as f64 - 1.0) * (1.0 - cap) / (n - k - 1) as f64);
        }
    }
    Ok(mu)
}

/// Scales the lower part to peak at 1 and fills the upper orders with the
/// running maxima of their immediate subsets; equivalent to the maximum
/// over contained k-element subsets.
pub fn make_k_maxitive(nu: &SetFunction, k: usize) -> Result<SetFunction> {
    let n = nu.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={n}")));
    }
    let peak = max_at_level(nu, k);
    if peak <= 0.0 {
        return Err(Error::Degenerate(format!(
            "no subset of {k} elements has positive value; cannot scale"
        )));
    }
    let mut mu = nu.clone();
    for a in Subset::all(n).filter(|a| a.card() <= k) {
        mu.set_value(a, nu.value(a) / peak);
    }
    fill_maxitive_upper(&mut mu, k);
    Ok(mu)
}

/// Upper recursion of the maxitive family, the maximum restricted to
/// subsets of `A` (the unrestricted maximum over same-size subsets would
/// break monotonicity).
fn fill_maxitive_upper(mu: &mut SetFunction, k: usize) {
    let n = mu.n();
    for c in k + 1..=n {
        for a in Subset::all(n).filter(|a| a.card() == c) {
            let best = a
                .elements()
                .map(|e| mu.value(a.without(e)))
                .fold(f64::NEG_INFINITY, f64::max);
            mu.set_value(a, best);
        }
    }
}

// --- constructive upper extension ---

/// Rebuilds every value above order k from the lower part so the family's
/// index vanishes there exactly, without normalizing. Lower-level entries
/// of the input are copied unchanged.
pub fn extend_upper_unnormalized(lower: &SetFunction, spec: &KOrderSpec) -> Result<SetFunction> {
    let n = lower.n();
    spec.validate(n)?;
    let k = spec.k;
    let mut mu = lower.clone();
    match spec.class {
        KOrderClass::Additive => {
            // Zeta of the truncated Möbius: coefficients above order k are
            // dropped, which is exactly what makes them vanish again on the
            // way back.
            let mob = mu.mobius();
            let mut coeff = mob.coefficients().to_vec();
            for a in Subset::all(n) {
                if a.card() > k {
                    coeff[a.index()] = 0.0;
                }
            }
            let rebuilt = MobiusRep::from_coefficients(n, coeff)?.zeta();
            for a in Subset::all(n) {
                if a.card() > k {
                    mu.set_value(a, rebuilt.value(a));
                }
            }
        }
        KOrderClass::Nonadditive => {
            for c in k + 1..=n {
                for a in Subset::all(n).filter(|a| a.card() == c) {
                    let sum: f64 = a.strict_subsets().map(|b| mu.value(b)).sum();
                    mu.set_value(a, sum / ((1u64 << (c - 1)) as f64 - 1.0));
                }
            }
        }
        KOrderClass::Nonmodular => {
            for c in k + 1..=n {
                for a in Subset::all(n).filter(|a| a.card() == c) {
                    let sum: f64 = a
                        .elements()
                        .map(|e| mu.value(Subset::singleton(e)) + mu.value(a.without(e)))
                        .sum();
                    mu.set_value(a, sum / c as f64);
                }
            }
        }
        KOrderClass::Maxitive => fill_maxitive_upper(&mut mu, k),
        KOrderClass::Tolerant => {
            for a in Subset::all(n).filter(|a| a.card() > k) {
                mu.set_value(a, 1.0);
            }
        }
        KOrderClass::Interactive => {
            let cap = spec.interaction.expect("validated spec");
            for a in Subset::all(n).filter(|a| a.card() > k) {
                let v = if k + 1 == n {
                    1.0
                } else {
                    cap + (a.card() as f64 - k as f64 - 1.0) * (1.0 - cap) / (n - k - 1) as f64
                };
                mu.set_value(a, v);
            }
        }
    }
    Ok(mu)
}

/// Constructive extension followed by a monotonicity check and
/// normalization. Monotonicity failures report the violating pair;
/// normalization preserves the vanished indices (they are linear in the
/// values) and the subset ordering.
pub fn extend_upper(lower: &SetFunction, spec: &KOrderSpec) -> Result<SetFunction> {
    let raw = extend_upper_unnormalized(lower, spec)?;
    if let Some((a, b, _)) = raw.monotonicity_violation(EXACT_TOL) {
        return Err(Error::NotMonotone {
            lower: a,
            upper: b,
            lower_value: raw.value(a),
            upper_value: raw.value(b),
        });
    }
    raw.normalize()
}

// --- allowable ranges for lower-order perturbations ---

/// Closed-form interval from the literal bound formulas, and the interval
/// actually validated by feasibility bisection. The two disagree in
/// documented cases; the validated interval is authoritative.
#[derive(Clone, Debug)]
pub struct KOrderRange {
    /// Literal evaluation of the published bound formulas, when the family
    /// has one (index families only).
    pub formula: Option<RangeBounds>,
    /// Largest interval around the current value for which the constructive
    /// extension stays monotone, found by bisection to 1e-9.
    pub validated: RangeBounds,
}

impl KOrderRange {
    /// Endpoint disagreement (lower, upper) between formula and validated
    /// intervals, when a formula exists.
    pub fn discrepancy(&self) -> Option<(f64, f64)> {
        self.formula.as_ref().map(|f| {
            ((f.lower - self.validated.lower).abs(), (f.upper - self.validated.upper).abs())
        })
    }
}

/// True when the perturbed lower part extends to a monotone measure.
fn extension_feasible(mu: &SetFunction, a: Subset, x: f64, spec: &KOrderSpec) -> bool {
    let mut probe = mu.clone();
    probe.set_value(a, x);
    match extend_upper_unnormalized(&probe, spec) {
        Ok(raw) => {
            raw.is_monotone(EXACT_TOL) && raw.value(raw.full_set()) > 0.0
        }
        Err(_) => false,
    }
}

const BISECT_STEPS: usize = 40;

/// Largest feasible interval around the current value, by bisection. The
/// feasible set is an interval because the extension is monotone in the
/// perturbed value for every family.
pub fn validated_range(mu: &SetFunction, a: Subset, spec: &KOrderSpec) -> Result<RangeBounds> {
    spec.validate(mu.n())?;
    if a.is_empty() || a.card() > spec.k {
        return Err(Error::InvalidParameter(format!(
            "perturbation target {a} must satisfy 0 < |A| <= k = {}",
            spec.k
        )));
    }
    let v0 = mu.value(a);
    if !extension_feasible(mu, a, v0, spec) {
        return Err(Error::InvalidParameter(format!(
            "measure is not extendable at its current value mu({a}) = {v0}"
        )));
    }
    let grow = |sign: f64| -> f64 {
        let cap = 2.0;
        if extension_feasible(mu, a, v0 + sign * cap, spec) {
            return cap;
        }
        let mut lo = 0.0;
        let mut hi = cap;
        for _ in 0..BISECT_STEPS {
            if hi - lo <= 1e-9 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if extension_feasible(mu, a, v0 + sign * mid, spec) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(RangeBounds {
        lower: v0 - grow(-1.0),
        upper: v0 + grow(1.0),
        lower_from: BoundConstraint::Validated,
        upper_from: BoundConstraint::Validated,
    })
}

/// Literal closed-form bounds for the three index families; `None` for
/// families without published formulas. Empty minima drop out.
pub fn formula_range(mu: &SetFunction, a: Subset, spec: &KOrderSpec) -> Option<RangeBounds> {
    let n = mu.n();
    let k = spec.k;
    let v0 = mu.value(a);
    let card = a.card();
    if card == 0 || card > k {
        return None;
    }
    // Shared monotone offsets: distance to the nearest lower and upper
    // neighbour of A.
    let down_monotone = v0
        - a.elements().map(|e| mu.value(a.without(e))).fold(f64::NEG_INFINITY, f64::max);
    let up_monotone = (0..n)
        .filter(|&e| !a.contains(e))
        .map(|e| mu.value(a.with(e)))
        .fold(f64::INFINITY, f64::min)
        - v0;

    let mut down = down_monotone;
    let mut up = up_monotone;
    match spec.class {
        KOrderClass::Additive => {
            for b in Subset::all(n) {
                if !(a.is_subset_of(b) && a != b) {
                    continue;
                }
                let bc = b.card();
                if bc == k + 1 {
                    if (k + 1 - card) % 2 == 0 {
                        for j in b.elements() {
                            down = down.min(mu.value(b) - mu.value(b.without(j)));
                        }
                        for j in (0..n).filter(|&e| !b.contains(e)) {
                            up = up.min((mu.value(b.with(j)) - mu.value(b)) / 2.0);
                        }
                    } else {
                        for j in (0..n).filter(|&e| !b.contains(e)) {
                            down = down.min((mu.value(b.with(j)) - mu.value(b)) / 2.0);
                        }
                        for j in b.elements() {
                            up = up.min(mu.value(b) - mu.value(b.without(j)));
                        }
                    }
                } else if bc > k + 1 {
                    let halved_inner = {
                        let max_in_a = a
                            .elements()
                            .map(|e| mu.value(b.without(e)))
                            .fold(f64::NEG_INFINITY, f64::max);
                        let max_in_rest = b
                            .minus(a)
                            .elements()
                            .map(|e| mu.value(b.without(e)))
                            .fold(f64::NEG_INFINITY, f64::max);
                        ((mu.value(b) - max_in_a) / 2.0).min(mu.value(b) - max_in_rest)
                    };
                    let halved_outer = (0..n)
                        .filter(|&e| !b.contains(e))
                        .map(|j| (mu.value(b.with(j)) - mu.value(b)) / 2.0)
                        .fold(f64::INFINITY, f64::min);
                    if (bc - card) % 2 == 0 {
                        down = down.min(halved_inner);
                        up = up.min(halved_outer);
                    } else {
                        down = down.min(halved_outer);
                        up = up.min(halved_inner);
                    }
                }
            }
        }
        KOrderClass::Nonadditive => {
            for b in Subset::all(n) {
                if !(a.is_subset_of(b) && a != b && b.card() > k) {
                    continue;
                }
                let scale = (1u64 << (b.card() - 1)) as f64 - 1.0;
                for i in a.elements() {
                    down = down.min(scale * (mu.value(b) - mu.value(b.without(i))));
                }
                if b.card() < n {
                    let grow = (1u64 << b.card()) as f64 - 1.0;
                    for i in (0..n).filter(|&e| !b.contains(e)) {
                        up = up.min(scale * grow / (scale + 1.0)
                            * (mu.value(b.with(i)) - mu.value(b)));
                    }
                }
            }
        }
        KOrderClass::Nonmodular => {
            if card == 1 {
                for b in Subset::all(n) {
                    if !(a.is_subset_of(b) && a != b) {
                        continue;
                    }
                    if b.card() == k + 1 {
                        for i in b.elements() {
                            down = down
                                .min(b.card() as f64 * (mu.value(b) - mu.value(b.without(i))));
                        }
                    }
                    if b.card() > k {
                        for i in (0..n).filter(|&e| !b.contains(e)) {
                            up = up.min(
                                (b.card() * (b.card() + 1)) as f64
                                    * (mu.value(b.with(i)) - mu.value(b)),
                            );
                        }
                    }
                }
            }
            if card == k {
                for i in (0..n).filter(|&e| !a.contains(e)) {
                    let b = a.with(i);
                    up = up.min(
                        b.card() as f64 / (b.card() as f64 - 1.0) * (mu.value(b) - mu.value(a)),
                    );
                }
            }
        }
        _ => return None,
    }
    Some(RangeBounds {
        lower: v0 - down,
        upper: v0 + up,
        lower_from: BoundConstraint::MonotoneBelow,
        upper_from: BoundConstraint::MonotoneAbove,
    })
}

/// Both intervals for a lower-order perturbation target.
pub fn korder_range(mu: &SetFunction, a: Subset, spec: &KOrderSpec) -> Result<KOrderRange> {
    let validated = validated_range(mu, a, spec)?;
    Ok(KOrderRange { formula: formula_range(mu, a, spec), validated })
}

// --- perturbation ---

/// Sets `mu(A) = new_value` on the lower part, rebuilds everything above
/// order k constructively and normalizes. Values outside the feasible
/// interval are rejected by the extension's monotonicity check.
pub fn perturb_korder(
    mu: &SetFunction,
    a: Subset,
    new_value: f64,
    spec: &KOrderSpec,
) -> Result<SetFunction> {
    spec.validate(mu.n())?;
    if a.is_empty() || a.card() > spec.k {
        return Err(Error::InvalidParameter(format!(
            "perturbation target {a} must satisfy 0 < |A| <= k = {}",
            spec.k
        )));
    }
    if !new_value.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite value {new_value}")));
    }
    let mut lower = mu.clone();
    lower.set_value(a, new_value);
    extend_upper(&lower, spec)
}

/// Closed-form propagation of a single lower-order perturbation
/// (pre-normalization), for the three index families. These rules are
/// fast paths only: they fail to cancel the indices in documented cases,
/// so callers must cross-check against the constructive extension.
pub fn closed_form_propagation(
    mu: &SetFunction,
    a: Subset,
    new_value: f64,
    spec: &KOrderSpec,
) -> Option<SetFunction> {
    let n = mu.n();
    let k = spec.k;
    let card = a.card();
    if card == 0 || card > k {
        return None;
    }
    let delta = new_value - mu.value(a);
    let mut out = mu.clone();
    out.set_value(a, new_value);
    match spec.class {
        KOrderClass::Additive => {
            for b in Subset::all(n) {
                if a.is_subset_of(b) && a != b && b.card() > k {
                    let sign = if (b.card() - card) % 2 == 0 { 1.0 } else { -1.0 };
                    out.set_value(b, mu.value(b) + sign * delta);
                }
            }
        }
        KOrderClass::Nonadditive => {
            for b in Subset::all(n) {
                if a.is_subset_of(b) && a != b && b.card() > k {
                    let scale = (1u64 << (b.card() - 1)) as f64 - 1.0;
                    out.set_value(b, mu.value(b) + delta / scale);
                }
            }
        }
        KOrderClass::Nonmodular => {
            if card == 1 {
                for b in Subset::all(n) {
                    if a.is_subset_of(b) && a != b && b.card() > k {
                        out.set_value(b, mu.value(b) + delta / b.card() as f64);
                    }
                }
            } else if card == k {
                for b in Subset::all(n) {
                    if a.is_subset_of(b) && b.card() == k + 1 {
                        out.set_value(b, mu.value(b) + delta / b.card() as f64);
                    }
                }
            }
        }
        _ => return None,
    }
    Some(out)
}

/// Largest deviation of the closed-form propagation from the constructive
/// extension, pre-normalization. `None` when the family has no closed
/// form.
pub fn propagation_divergence(
    mu: &SetFunction,
    a: Subset,
    new_value: f64,
    spec: &KOrderSpec,
) -> Result<Option<f64>> {
    let Some(fast) = closed_form_propagation(mu, a, new_value, spec) else {
        return Ok(None);
    };
    let mut lower = mu.clone();
    lower.set_value(a, new_value);
    let exact = extend_upper_unnormalized(&lower, spec)?;
    let worst = exact
        .values()
        .iter()
        .zip(fast.values())
        .map(|(e, f)| (e - f).abs())
        .fold(0.0, f64::max);
    Ok(Some(worst))
}

// --- random walk on the lower levels ---

/// Subsets with 1..=k elements sorted by value (ties by mask), the
/// extension restricted to the freely adjustable levels.
fn lower_level_order(mu: &SetFunction, k: usize) -> Vec<Subset> {
    let mut subs: Vec<Subset> =
        Subset::all(mu.n()).filter(|a| (1..=k).contains(&a.card())).collect();
    subs.sort_unstable_by(|&x, &y| {
        mu.value(x).partial_cmp(&mu.value(y)).unwrap().then(x.bits().cmp(&y.bits()))
    });
    subs
}

/// One random-walk step on the lower k-order levels: swap with the
/// neighbouring lower-level subset when incomparable, land inside the
/// validated range, rebuild the upper orders and normalize.
pub fn korder_walk(
    mu: &SetFunction,
    a: Subset,
    direction: Direction,
    spec: &KOrderSpec,
    rng: &mut impl Rng,
) -> Result<(SetFunction, bool)> {
    spec.validate(mu.n())?;
    if a.is_empty() || a.card() > spec.k {
        return Err(Error::InvalidParameter(format!(
            "walk target {a} must satisfy 0 < |A| <= k = {}",
            spec.k
        )));
    }
    let order = lower_level_order(mu, spec.k);
    let p = order.iter().position(|&s| s == a).expect("target is a lower-level subset");
    let bounds = validated_range(mu, a, spec)?;
    let (lo, hi) = match direction {
        Direction::Up => {
            if p + 1 >= order.len() {
                return Ok((mu.clone(), false));
            }
            let succ = order[p + 1];
            if !(a.card() >= succ.card() || !a.is_subset_of(succ)) {
                return Ok((mu.clone(), false));
            }
            if mu.value(succ) > bounds.upper {
                return Ok((mu.clone(), false));
            }
            let beyond =
                if p + 2 < order.len() { mu.value(order[p + 2]) } else { f64::INFINITY };
            (mu.value(succ), bounds.upper.min(beyond))
        }
        Direction::Down => {
            if p == 0 {
                return Ok((mu.clone(), false));
            }
            let pred = order[p - 1];
            if !(a.card() <= pred.card() || !a.is_superset_of(pred)) {
                return Ok((mu.clone(), false));
            }
            if mu.value(pred) < bounds.lower {
                return Ok((mu.clone(), false));
            }
            let beyond = if p >= 2 { mu.value(order[p - 2]) } else { f64::NEG_INFINITY };
            (bounds.lower.max(beyond), mu.value(pred))
        }
    };
    match draw_strictly_between(mu.values(), lo, hi, rng) {
        Some(x) => match perturb_korder(mu, a, x, spec) {
            Ok(out) => Ok((out, true)),
            Err(Error::NotMonotone { .. }) => Ok((mu.clone(), false)),
            Err(e) => Err(e),
        },
        None => Ok((mu.clone(), false)),
    }
}
