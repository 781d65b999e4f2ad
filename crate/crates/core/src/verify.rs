//! Independent brute-force oracles for every measure class.
//!
//! Every check here evaluates the defining inequalities directly from the
//! value array, sharing no machinery with the generators: interaction
//! indices are recomputed from their alternating and plain sums rather
//! than through the transform pipeline. This redundancy is what lets the
//! oracles certify generator output.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gen::psym::Partition;
use crate::setfn::{SetFunction, CLASS_TOL};
use crate::subset::Subset;

/// Generation-facing class request: a tag plus its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureClassSpec {
    pub class: MeasureClass,
    pub k: Option<usize>,
    /// Plateau level `K` for k-interactive measures.
    pub interaction: Option<f64>,
    pub partition: Option<Partition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureClass {
    Normal,
    Supermodular,
    Antibuoyant,
    Superadditive,
    PSymmetric,
    KTolerant,
    KInteractive,
    KMaxitive,
    KAdditive,
    KNonadditive,
    KNonmodular,
}

impl MeasureClass {
    pub const ALL: [MeasureClass; 11] = [
        MeasureClass::Normal,
        MeasureClass::Supermodular,
        MeasureClass::Antibuoyant,
        MeasureClass::Superadditive,
        MeasureClass::PSymmetric,
        MeasureClass::KTolerant,
        MeasureClass::KInteractive,
        MeasureClass::KMaxitive,
        MeasureClass::KAdditive,
        MeasureClass::KNonadditive,
        MeasureClass::KNonmodular,
    ];

    pub fn needs_k(self) -> bool {
        matches!(
            self,
            MeasureClass::KTolerant
                | MeasureClass::KInteractive
                | MeasureClass::KMaxitive
                | MeasureClass::KAdditive
                | MeasureClass::KNonadditive
                | MeasureClass::KNonmodular
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasureClass::Normal => "normal",
            MeasureClass::Supermodular => "supermodular",
            MeasureClass::Antibuoyant => "antibuoyant",
            MeasureClass::Superadditive => "superadditive",
            MeasureClass::PSymmetric => "p-symmetric",
            MeasureClass::KTolerant => "k-tolerant",
            MeasureClass::KInteractive => "k-interactive",
            MeasureClass::KMaxitive => "k-maxitive",
            MeasureClass::KAdditive => "k-additive",
            MeasureClass::KNonadditive => "k-nonadditive",
            MeasureClass::KNonmodular => "k-nonmodular",
        }
    }
}

impl FromStr for MeasureClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown measure class '{s}'")))
    }
}

impl fmt::Display for MeasureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl MeasureClassSpec {
    pub fn plain(class: MeasureClass) -> Self {
        MeasureClassSpec { class, k: None, interaction: None, partition: None }
    }

    pub fn with_k(class: MeasureClass, k: usize) -> Self {
        MeasureClassSpec { class, k: Some(k), interaction: None, partition: None }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.class.needs_k() {
            let k = self
                .k
                .ok_or_else(|| Error::InvalidParameter(format!("class {} requires k", self.class)))?;
            if k == 0 || k > n {
                return Err(Error::InvalidParameter(format!("k = {k} outside 1..={n}")));
            }
            if self.class == MeasureClass::KInteractive {
                if k > n - 1 {
                    return Err(Error::InvalidParameter(format!(
                        "k-interactive requires k <= n - 1, got k = {k}, n = {n}"
                    )));
                }
                let cap = self.interaction.ok_or_else(|| {
                    Error::InvalidParameter("k-interactive requires the plateau level K".into())
                })?;
                if !(0.0..=1.0).contains(&cap) {
                    return Err(Error::InvalidParameter(format!("K = {cap} outside [0, 1]")));
                }
            }
        }
        if self.class == MeasureClass::PSymmetric {
            let p = self
                .partition
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("p-symmetric requires a partition".into()))?;
            if p.n() != n {
                return Err(Error::InvalidPartition(format!(
                    "partition covers {} elements, measure has {n}",
                    p.n()
                )));
            }
        }
        Ok(())
    }
}

/// Violated or tight constraint reported by an oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub subsets: Vec<Subset>,
    pub elements: Vec<usize>,
    pub relation: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        if !self.subsets.is_empty() {
            write!(f, " at ")?;
            for (i, s) in self.subsets.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{s}")?;
            }
        }
        if !self.elements.is_empty() {
            write!(f, " elements ")?;
            for (i, e) in self.elements.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", e + 1)?;
            }
        }
        Ok(())
    }
}

/// Outcome of one class check: worst violation magnitude, the minimum
/// slack across all inequalities (for strictness reporting) and a witness
/// for the worst constraint.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub label: String,
    pub pass: bool,
    pub worst_violation: f64,
    pub min_slack: f64,
    pub witness: Option<Witness>,
    pub tolerance: f64,
}

impl ClassReport {
    fn new(label: impl Into<String>, tol: f64) -> Self {
        ClassReport {
            label: label.into(),
            pass: true,
            worst_violation: 0.0,
            min_slack: f64::INFINITY,
            witness: None,
            tolerance: tol,
        }
    }

    /// Records one inequality of the form `slack >= 0`.
    fn record(&mut self, slack: f64, witness: impl FnOnce() -> Witness) {
        if slack < self.min_slack {
            self.min_slack = slack;
        }
        let violation = (-slack).max(0.0);
        if violation > self.worst_violation {
            self.worst_violation = violation;
            self.witness = Some(witness());
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.worst_violation <= self.tolerance;
        if self.pass {
            self.witness = None;
        }
        self
    }

    fn merge(mut self, other: ClassReport) -> Self {
        if other.worst_violation > self.worst_violation {
            self.worst_violation = other.worst_violation;
            self.witness = other.witness;
        }
        self.min_slack = self.min_slack.min(other.min_slack);
        self.pass = self.pass && other.pass;
        self
    }
}

// --- direct index computations (definitional, no shared transform code) ---

fn mobius_direct(mu: &SetFunction, a: Subset) -> f64 {
    let mut sum = 0.0;
    for c in a.subsets() {
        let sign = if (a.card() - c.card()) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * mu.value(c);
    }
    sum
}

fn nonadditivity_direct(mu: &SetFunction, a: Subset) -> f64 {
    let mut sum = 0.0;
    for c in a.strict_subsets() {
        sum += mu.value(c);
    }
    mu.value(a) - sum / ((1u64 << (a.card() - 1)) as f64 - 1.0)
}

fn nonmodularity_direct(mu: &SetFunction, a: Subset) -> f64 {
    let mut sum = 0.0;
    for e in a.elements() {
        sum += mu.value(Subset::singleton(e)) + mu.value(a.without(e));
    }
    mu.value(a) - sum / a.card() as f64
}

// --- capacity axioms ---

/// Boundary conditions and monotonicity over every (A, i) pair.
pub fn check_capacity_axioms(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("capacity", tol);
    let v0 = mu.value(Subset::EMPTY);
    rep.record(-v0.abs(), || Witness {
        subsets: vec![Subset::EMPTY],
        elements: vec![],
        relation: format!("mu(empty) = {v0}, expected 0"),
    });
    let vn = mu.value(mu.full_set());
    rep.record(-(vn - 1.0).abs(), || Witness {
        subsets: vec![mu.full_set()],
        elements: vec![],
        relation: format!("mu(ground set) = {vn}, expected 1"),
    });
    for a in Subset::all(mu.n()) {
        for e in 0..mu.n() {
            if !a.contains(e) {
                let slack = mu.value(a.with(e)) - mu.value(a);
                rep.record(slack, || Witness {
                    subsets: vec![a, a.with(e)],
                    elements: vec![e],
                    relation: format!("mu({}) > mu({})", a, a.with(e)),
                });
            }
        }
    }
    rep.finish()
}

// --- structural classes ---

/// Supermodularity in second-difference form:
/// `mu(A+i+j) - mu(A+i) - mu(A+j) + mu(A) >= 0` for all `A` and `i != j`
/// outside `A`.
pub fn check_supermodular(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("supermodular", tol);
    second_differences(mu, |a, i, j, d| {
        rep.record(d, || Witness {
            subsets: vec![a],
            elements: vec![i, j],
            relation: format!("second difference at {a} with elements {},{} is {d}", i + 1, j + 1),
        });
    });
    rep.finish()
}

pub fn check_submodular(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("submodular", tol);
    second_differences(mu, |a, i, j, d| {
        rep.record(-d, || Witness {
            subsets: vec![a],
            elements: vec![i, j],
            relation: format!("second difference at {a} with elements {},{} is {d}", i + 1, j + 1),
        });
    });
    rep.finish()
}

fn second_differences(mu: &SetFunction, mut f: impl FnMut(Subset, usize, usize, f64)) {
    let n = mu.n();
    for a in Subset::all(n) {
        for i in 0..n {
            if a.contains(i) {
                continue;
            }
            for j in i + 1..n {
                if a.contains(j) {
                    continue;
                }
                let d = mu.value(a.with(i).with(j)) - mu.value(a.with(i)) - mu.value(a.with(j))
                    + mu.value(a);
                f(a, i, j, d);
            }
        }
    }
}

/// `mu(A u B) >= mu(A) + mu(B)` over every pair of disjoint nonempty sets.
pub fn check_superadditive(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("superadditive", tol);
    disjoint_pairs(mu, |a, b, gap| {
        rep.record(gap, || Witness {
            subsets: vec![a, b],
            elements: vec![],
            relation: format!("mu({} u {}) - mu({a}) - mu({b}) = {gap}", a, b),
        });
    });
    rep.finish()
}

pub fn check_subadditive(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("subadditive", tol);
    disjoint_pairs(mu, |a, b, gap| {
        rep.record(-gap, || Witness {
            subsets: vec![a, b],
            elements: vec![],
            relation: format!("mu({} u {}) - mu({a}) - mu({b}) = {gap}", a, b),
        });
    });
    rep.finish()
}

pub fn check_additive(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("additive", tol);
    disjoint_pairs(mu, |a, b, gap| {
        rep.record(-gap.abs(), || Witness {
            subsets: vec![a, b],
            elements: vec![],
            relation: format!("mu({} u {}) - mu({a}) - mu({b}) = {gap}", a, b),
        });
    });
    rep.finish()
}

fn disjoint_pairs(mu: &SetFunction, mut f: impl FnMut(Subset, Subset, f64)) {
    let n = mu.n();
    for a in Subset::proper_nonempty(n) {
        for b in a.complement(n).subsets() {
            if b.is_empty() || b.bits() < a.bits() {
                continue;
            }
            let gap = mu.value(a.union(b)) - mu.value(a) - mu.value(b);
            f(a, b, gap);
        }
    }
}

/// Antibuoyancy: `mu(A+i+j) + mu(A) >= 2 mu(A+j)` for every `A` and every
/// ordered pair `i != j` outside `A`; marginal contributions grow along
/// chains.
pub fn check_antibuoyant(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("antibuoyant", tol);
    chain_constraints(mu, |a, i, j, slack| {
        rep.record(slack, || Witness {
            subsets: vec![a],
            elements: vec![i, j],
            relation: format!(
                "mu({}) + mu({a}) - 2 mu({}) = {slack}",
                a.with(i).with(j),
                a.with(j)
            ),
        });
    });
    rep.finish()
}

/// Buoyancy (the dual property): marginal contributions shrink along
/// chains.
pub fn check_buoyant(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("buoyant", tol);
    chain_constraints(mu, |a, i, j, slack| {
        rep.record(-slack, || Witness {
            subsets: vec![a],
            elements: vec![i, j],
            relation: format!(
                "mu({}) + mu({a}) - 2 mu({}) = {slack}",
                a.with(i).with(j),
                a.with(j)
            ),
        });
    });
    rep.finish()
}

fn chain_constraints(mu: &SetFunction, mut f: impl FnMut(Subset, usize, usize, f64)) {
    let n = mu.n();
    for a in Subset::all(n) {
        for i in 0..n {
            if a.contains(i) {
                continue;
            }
            for j in 0..n {
                if j == i || a.contains(j) {
                    continue;
                }
                let slack =
                    mu.value(a.with(i).with(j)) + mu.value(a) - 2.0 * mu.value(a.with(j));
                f(a, i, j, slack);
            }
        }
    }
}

pub fn check_symmetric(mu: &SetFunction, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("symmetric", tol);
    let mut level_rep: Vec<Option<Subset>> = vec![None; mu.n() + 1];
    for a in Subset::all(mu.n()) {
        match level_rep[a.card()] {
            None => level_rep[a.card()] = Some(a),
            Some(first) => {
                let gap = (mu.value(a) - mu.value(first)).abs();
                rep.record(-gap, || Witness {
                    subsets: vec![first, a],
                    elements: vec![],
                    relation: format!("mu({first}) != mu({a}) with |gap| = {gap}"),
                });
            }
        }
    }
    rep.finish()
}

pub fn check_p_symmetric(mu: &SetFunction, partition: &Partition, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("p-symmetric", tol);
    let mut class_rep: std::collections::HashMap<Vec<u8>, Subset> = std::collections::HashMap::new();
    for a in Subset::all(mu.n()) {
        let key = partition.blocks().iter().map(|b| a.intersection(*b).card() as u8).collect();
        match class_rep.entry(key) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(a);
            }
            std::collections::hash_map::Entry::Occupied(e) => {
                let first = *e.get();
                let gap = (mu.value(a) - mu.value(first)).abs();
                rep.record(-gap, || Witness {
                    subsets: vec![first, a],
                    elements: vec![],
                    relation: format!("equivalent subsets {first} and {a} differ by {gap}"),
                });
            }
        }
    }
    rep.finish()
}

// --- k-order classes ---

/// Sentinel violation reported when a k-order class has no interaction of
/// the requested order: the measure belongs to a smaller effective k.
fn effective_order_violation(tol: f64) -> f64 {
    2.0 * tol
}

fn check_k_index(
    mu: &SetFunction,
    k: usize,
    tol: f64,
    label: &str,
    index: impl Fn(&SetFunction, Subset) -> f64,
) -> ClassReport {
    let mut rep = ClassReport::new(label, tol);
    let mut max_at_k = 0.0f64;
    for a in Subset::all(mu.n()) {
        if a.card() < 2 {
            continue;
        }
        let v = index(mu, a);
        if a.card() > k {
            rep.record(-v.abs(), || Witness {
                subsets: vec![a],
                elements: vec![],
                relation: format!("{label} index at {a} is {v}, expected 0"),
            });
        } else if a.card() == k {
            max_at_k = max_at_k.max(v.abs());
        }
    }
    // Order-k interaction must actually be present; otherwise the measure
    // is re-tagged with the smaller effective k. Singleton level is exempt:
    // order-1 "interaction" is just the weights.
    if k >= 2 && max_at_k <= tol {
        rep.record(-effective_order_violation(tol), || Witness {
            subsets: vec![],
            elements: vec![],
            relation: format!(
                "no subset of {k} elements has |{label} index| above {tol}: effective order is smaller"
            ),
        });
    }
    rep.finish()
}

pub fn check_k_additive(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    check_k_index(mu, k, tol, "k-additive", |m, a| mobius_direct(m, a))
}

pub fn check_k_nonadditive(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    check_k_index(mu, k, tol, "k-nonadditive", nonadditivity_direct)
}

pub fn check_k_nonmodular(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    check_k_index(mu, k, tol, "k-nonmodular", nonmodularity_direct)
}

/// Values above order k are the maxima of their k-element subsets.
pub fn check_k_maxitive(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("k-maxitive", tol);
    for a in Subset::all(mu.n()) {
        if a.card() <= k {
            continue;
        }
        let mut best = f64::NEG_INFINITY;
        for b in a.subsets() {
            if b.card() == k {
                best = best.max(mu.value(b));
            }
        }
        let gap = (mu.value(a) - best).abs();
        rep.record(-gap, || Witness {
            subsets: vec![a],
            elements: vec![],
            relation: format!("mu({a}) = {} but max over its {k}-subsets is {best}", mu.value(a)),
        });
    }
    rep.finish()
}

/// Dual of k-maxitive: values below order n - k are the minima of their
/// (n-k)-element supersets.
pub fn check_k_minitive(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("k-minitive", tol);
    let n = mu.n();
    for a in Subset::all(n) {
        if a.card() + k >= n {
            continue;
        }
        let mut best = f64::INFINITY;
        for c in a.complement(n).subsets() {
            let sup = a.union(c);
            if sup.card() == n - k {
                best = best.min(mu.value(sup));
            }
        }
        let gap = (mu.value(a) - best).abs();
        rep.record(-gap, || Witness {
            subsets: vec![a],
            elements: vec![],
            relation: format!(
                "mu({a}) = {} but min over its {}-supersets is {best}",
                mu.value(a),
                n - k
            ),
        });
    }
    rep.finish()
}

/// Saturation above order k: every subset with more than k elements has
/// value 1. (The stricter textbook convention also saturates order k
/// itself; `classify` reports that order.)
pub fn check_k_tolerant(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("k-tolerant", tol);
    for a in Subset::all(mu.n()) {
        if a.card() > k {
            let gap = (mu.value(a) - 1.0).abs();
            rep.record(-gap, || Witness {
                subsets: vec![a],
                elements: vec![],
                relation: format!("mu({a}) = {}, expected 1", mu.value(a)),
            });
        }
    }
    rep.finish()
}

/// Dual saturation: every subset with fewer than n - k elements has value 0.
pub fn check_k_intolerant(mu: &SetFunction, k: usize, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("k-intolerant", tol);
    for a in Subset::all(mu.n()) {
        if a.card() + k < mu.n() {
            let gap = mu.value(a).abs();
            rep.record(-gap, || Witness {
                subsets: vec![a],
                elements: vec![],
                relation: format!("mu({a}) = {}, expected 0", mu.value(a)),
            });
        }
    }
    rep.finish()
}

/// Affine interpolation above order k: `mu(A) = K + (|A|-k-1)(1-K)/(n-k-1)`.
pub fn check_k_interactive(mu: &SetFunction, k: usize, cap: f64, tol: f64) -> ClassReport {
    let mut rep = ClassReport::new("k-interactive", tol);
    let n = mu.n();
    for a in Subset::all(n) {
        if a.card() <= k {
            continue;
        }
        let expected = if k + 1 == n {
            1.0
        } else {
            cap + (a.card() as f64 - k as f64 - 1.0) * (1.0 - cap) / (n as f64 - k as f64 - 1.0)
        };
        let gap = (mu.value(a) - expected).abs();
        rep.record(-gap, || Witness {
            subsets: vec![a],
            elements: vec![],
            relation: format!("mu({a}) = {}, expected {expected}", mu.value(a)),
        });
    }
    rep.finish()
}

/// Checks a measure against a class request; capacity axioms are always
/// included.
pub fn check_class(mu: &SetFunction, spec: &MeasureClassSpec, tol: f64) -> ClassReport {
    let axioms = check_capacity_axioms(mu, tol);
    let class = match spec.class {
        MeasureClass::Normal => ClassReport::new("normal", tol).finish(),
        MeasureClass::Supermodular => check_supermodular(mu, tol),
        MeasureClass::Antibuoyant => check_antibuoyant(mu, tol),
        MeasureClass::Superadditive => check_superadditive(mu, tol),
        MeasureClass::PSymmetric => {
            let p = spec.partition.as_ref().expect("validated spec");
            check_p_symmetric(mu, p, tol)
        }
        MeasureClass::KTolerant => check_k_tolerant(mu, spec.k.expect("validated spec"), tol),
        MeasureClass::KInteractive => check_k_interactive(
            mu,
            spec.k.expect("validated spec"),
            spec.interaction.expect("validated spec"),
            tol,
        ),
        MeasureClass::KMaxitive => check_k_maxitive(mu, spec.k.expect("validated spec"), tol),
        MeasureClass::KAdditive => check_k_additive(mu, spec.k.expect("validated spec"), tol),
        MeasureClass::KNonadditive => {
            check_k_nonadditive(mu, spec.k.expect("validated spec"), tol)
        }
        MeasureClass::KNonmodular => check_k_nonmodular(mu, spec.k.expect("validated spec"), tol),
    };
    let mut merged = class.merge(axioms);
    merged.label = spec.class.name().to_string();
    merged
}

// --- classification ---

/// Checkable tags attached to records and mapped under duality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassTag {
    Additive,
    Symmetric,
    Supermodular,
    Submodular,
    Superadditive,
    Subadditive,
    Antibuoyant,
    Buoyant,
    KAdditive(usize),
    KNonadditive(usize),
    KNonmodular(usize),
    KMaxitive(usize),
    KMinitive(usize),
    KTolerant(usize),
    KIntolerant(usize),
    KInteractive(usize),
    UpperKAdditive(usize),
    UpperKNonadditive(usize),
    UpperKNonmodular(usize),
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::Additive => write!(f, "additive"),
            ClassTag::Symmetric => write!(f, "symmetric"),
            ClassTag::Supermodular => write!(f, "supermodular"),
            ClassTag::Submodular => write!(f, "submodular"),
            ClassTag::Superadditive => write!(f, "superadditive"),
            ClassTag::Subadditive => write!(f, "subadditive"),
            ClassTag::Antibuoyant => write!(f, "antibuoyant"),
            ClassTag::Buoyant => write!(f, "buoyant"),
            ClassTag::KAdditive(k) => write!(f, "{k}-additive"),
            ClassTag::KNonadditive(k) => write!(f, "{k}-nonadditive"),
            ClassTag::KNonmodular(k) => write!(f, "{k}-nonmodular"),
            ClassTag::KMaxitive(k) => write!(f, "{k}-maxitive"),
            ClassTag::KMinitive(k) => write!(f, "{k}-minitive"),
            ClassTag::KTolerant(k) => write!(f, "{k}-tolerant"),
            ClassTag::KIntolerant(k) => write!(f, "{k}-intolerant"),
            ClassTag::KInteractive(k) => write!(f, "{k}-interactive"),
            ClassTag::UpperKAdditive(k) => write!(f, "upper-{k}-additive"),
            ClassTag::UpperKNonadditive(k) => write!(f, "upper-{k}-nonadditive"),
            ClassTag::UpperKNonmodular(k) => write!(f, "upper-{k}-nonmodular"),
        }
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let plain = match s {
            "additive" => Some(ClassTag::Additive),
            "symmetric" => Some(ClassTag::Symmetric),
            "supermodular" => Some(ClassTag::Supermodular),
            "submodular" => Some(ClassTag::Submodular),
            "superadditive" => Some(ClassTag::Superadditive),
            "subadditive" => Some(ClassTag::Subadditive),
            "antibuoyant" => Some(ClassTag::Antibuoyant),
            "buoyant" => Some(ClassTag::Buoyant),
            _ => None,
        };
        if let Some(tag) = plain {
            return Ok(tag);
        }
        let parse_k = |rest: &str, text: &str| -> Result<usize> {
            rest.parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad class tag '{text}'")))
        };
        let (prefix, upper) = match s.strip_prefix("upper-") {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        if let Some((k_str, kind)) = prefix.split_once('-') {
            let k = parse_k(k_str, s)?;
            let tag = match (kind, upper) {
                ("additive", false) => ClassTag::KAdditive(k),
                ("nonadditive", false) => ClassTag::KNonadditive(k),
                ("nonmodular", false) => ClassTag::KNonmodular(k),
                ("maxitive", false) => ClassTag::KMaxitive(k),
                ("minitive", false) => ClassTag::KMinitive(k),
                ("tolerant", false) => ClassTag::KTolerant(k),
                ("intolerant", false) => ClassTag::KIntolerant(k),
                ("interactive", false) => ClassTag::KInteractive(k),
                ("additive", true) => ClassTag::UpperKAdditive(k),
                ("nonadditive", true) => ClassTag::UpperKNonadditive(k),
                ("nonmodular", true) => ClassTag::UpperKNonmodular(k),
                _ => return Err(Error::InvalidParameter(format!("bad class tag '{s}'"))),
            };
            return Ok(tag);
        }
        Err(Error::InvalidParameter(format!("bad class tag '{s}'")))
    }
}

/// The tag a measure's dual carries when the measure carries `tag`.
/// Returns `None` for tags whose dual class has no standing name here
/// (k-interactive).
pub fn dual_tag(tag: &ClassTag) -> Option<ClassTag> {
    Some(match tag {
        ClassTag::Additive => ClassTag::Additive,
        ClassTag::Symmetric => ClassTag::Symmetric,
        ClassTag::Supermodular => ClassTag::Submodular,
        ClassTag::Submodular => ClassTag::Supermodular,
        ClassTag::Superadditive => ClassTag::Subadditive,
        ClassTag::Subadditive => ClassTag::Superadditive,
        ClassTag::Antibuoyant => ClassTag::Buoyant,
        ClassTag::Buoyant => ClassTag::Antibuoyant,
        ClassTag::KAdditive(k) => ClassTag::UpperKAdditive(*k),
        ClassTag::UpperKAdditive(k) => ClassTag::KAdditive(*k),
        ClassTag::KNonadditive(k) => ClassTag::UpperKNonadditive(*k),
        ClassTag::UpperKNonadditive(k) => ClassTag::KNonadditive(*k),
        ClassTag::KNonmodular(k) => ClassTag::UpperKNonmodular(*k),
        ClassTag::UpperKNonmodular(k) => ClassTag::KNonmodular(*k),
        ClassTag::KMaxitive(k) => ClassTag::KMinitive(*k),
        ClassTag::KMinitive(k) => ClassTag::KMaxitive(*k),
        ClassTag::KTolerant(k) => ClassTag::KIntolerant(*k),
        ClassTag::KIntolerant(k) => ClassTag::KTolerant(*k),
        ClassTag::KInteractive(_) => return None,
    })
}

/// Checks a single tag. Upper-k tags are verified through the dual's
/// defining index, computed from the dual values directly.
pub fn check_tag(mu: &SetFunction, tag: &ClassTag, tol: f64) -> ClassReport {
    match tag {
        ClassTag::Additive => check_additive(mu, tol),
        ClassTag::Symmetric => check_symmetric(mu, tol),
        ClassTag::Supermodular => check_supermodular(mu, tol),
        ClassTag::Submodular => check_submodular(mu, tol),
        ClassTag::Superadditive => check_superadditive(mu, tol),
        ClassTag::Subadditive => check_subadditive(mu, tol),
        ClassTag::Antibuoyant => check_antibuoyant(mu, tol),
        ClassTag::Buoyant => check_buoyant(mu, tol),
        ClassTag::KAdditive(k) => check_k_additive(mu, *k, tol),
        ClassTag::KNonadditive(k) => check_k_nonadditive(mu, *k, tol),
        ClassTag::KNonmodular(k) => check_k_nonmodular(mu, *k, tol),
        ClassTag::KMaxitive(k) => check_k_maxitive(mu, *k, tol),
        ClassTag::KMinitive(k) => check_k_minitive(mu, *k, tol),
        ClassTag::KTolerant(k) => check_k_tolerant(mu, *k, tol),
        ClassTag::KIntolerant(k) => check_k_intolerant(mu, *k, tol),
        ClassTag::KInteractive(k) => {
            // Recover the plateau from the first level above k.
            let cap = Subset::all(mu.n())
                .find(|a| a.card() == k + 1)
                .map(|a| mu.value(a))
                .unwrap_or(1.0);
            check_k_interactive(mu, *k, cap, tol)
        }
        ClassTag::UpperKAdditive(k) => {
            let mut rep = check_k_additive(&mu.dual(), *k, tol);
            rep.label = "upper-k-additive".into();
            rep
        }
        ClassTag::UpperKNonadditive(k) => {
            let mut rep = check_k_nonadditive(&mu.dual(), *k, tol);
            rep.label = "upper-k-nonadditive".into();
            rep
        }
        ClassTag::UpperKNonmodular(k) => {
            let mut rep = check_k_nonmodular(&mu.dual(), *k, tol);
            rep.label = "upper-k-nonmodular".into();
            rep
        }
    }
}

/// Runs every oracle and returns the tags that pass, with minimal k per
/// k-family. Vacuous orders (k = n for the index families, and the
/// all-ones level for tolerance) are not reported.
pub fn classify(mu: &SetFunction, tol: f64) -> Vec<ClassTag> {
    let n = mu.n();
    let mut tags = Vec::new();
    if check_additive(mu, tol).pass {
        tags.push(ClassTag::Additive);
    }
    if check_symmetric(mu, tol).pass {
        tags.push(ClassTag::Symmetric);
    }
    if check_supermodular(mu, tol).pass {
        tags.push(ClassTag::Supermodular);
    }
    if check_submodular(mu, tol).pass {
        tags.push(ClassTag::Submodular);
    }
    if check_superadditive(mu, tol).pass {
        tags.push(ClassTag::Superadditive);
    }
    if check_subadditive(mu, tol).pass {
        tags.push(ClassTag::Subadditive);
    }
    if check_antibuoyant(mu, tol).pass {
        tags.push(ClassTag::Antibuoyant);
    }
    if check_buoyant(mu, tol).pass {
        tags.push(ClassTag::Buoyant);
    }

    let minimal_k = |vanishes: &dyn Fn(usize) -> bool| -> Option<usize> {
        (1..n).find(|&k| vanishes(k))
    };
    if let Some(k) = minimal_k(&|k| {
        Subset::all(n).filter(|a| a.card() > k).all(|a| mobius_direct(mu, a).abs() <= tol)
    }) {
        tags.push(ClassTag::KAdditive(k));
    }
    if let Some(k) = minimal_k(&|k| {
        Subset::all(n)
            .filter(|a| a.card() > k && a.card() >= 2)
            .all(|a| nonadditivity_direct(mu, a).abs() <= tol)
    }) {
        tags.push(ClassTag::KNonadditive(k));
    }
    if let Some(k) = minimal_k(&|k| {
        Subset::all(n)
            .filter(|a| a.card() > k && a.card() >= 2)
            .all(|a| nonmodularity_direct(mu, a).abs() <= tol)
    }) {
        tags.push(ClassTag::KNonmodular(k));
    }
    if let Some(k) = (1..n).find(|&k| check_k_maxitive(mu, k, tol).pass) {
        tags.push(ClassTag::KMaxitive(k));
    }
    if let Some(k) = (1..n).find(|&k| check_k_minitive(mu, k, tol).pass) {
        tags.push(ClassTag::KMinitive(k));
    }
    // Tolerance order per the saturation definition: minimal k such that
    // every subset of k or more elements has value 1.
    if let Some(k) = (1..n).find(|&k| {
        Subset::all(n).filter(|a| a.card() >= k).all(|a| (mu.value(a) - 1.0).abs() <= tol)
    }) {
        tags.push(ClassTag::KTolerant(k));
    }
    if let Some(k) = (1..n).find(|&k| {
        Subset::all(n).filter(|a| a.card() + k < n).all(|a| mu.value(a).abs() <= tol)
            && n > k
    }) {
        if k < n {
            tags.push(ClassTag::KIntolerant(k));
        }
    }
    // k-interactive: find the smallest k whose upper levels sit on the
    // affine ramp through the level-(k+1) plateau.
    for k in 1..n.saturating_sub(1) {
        let plateau = Subset::all(n).find(|a| a.card() == k + 1).map(|a| mu.value(a));
        if let Some(cap) = plateau {
            if (0.0..=1.0 + tol).contains(&cap) && check_k_interactive(mu, k, cap, tol).pass {
                tags.push(ClassTag::KInteractive(k));
                break;
            }
        }
    }
    tags.sort();
    tags.dedup();
    tags
}

/// Convenience wrapper using the class-membership tolerance.
pub fn classify_default(mu: &SetFunction) -> Vec<ClassTag> {
    classify(mu, CLASS_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::base::AdditiveMeasure;
    use rand_chacha::rand_core::SeedableRng;

    fn additive(w: &[f64]) -> SetFunction {
        AdditiveMeasure::new(w.to_vec()).unwrap().to_set_function()
    }

    #[test]
    fn additive_measure_passes_boundary_classes_with_zero_slack() {
        let mu = additive(&[0.2, 0.35, 0.45]);
        let sup = check_supermodular(&mu, CLASS_TOL);
        assert!(sup.pass);
        assert!(sup.min_slack.abs() < 1e-12);
        assert!(check_submodular(&mu, CLASS_TOL).pass);
        assert!(check_superadditive(&mu, CLASS_TOL).pass);
        assert!(check_subadditive(&mu, CLASS_TOL).pass);
        assert!(check_additive(&mu, CLASS_TOL).pass);
        assert!(check_capacity_axioms(&mu, 1e-12).pass);
    }

    #[test]
    fn uniform_measure_is_symmetric_and_antibuoyant_at_equality() {
        let mu = additive(&[0.25; 4]);
        assert!(check_symmetric(&mu, CLASS_TOL).pass);
        let rep = check_antibuoyant(&mu, CLASS_TOL);
        assert!(rep.pass);
        assert!(rep.min_slack.abs() < 1e-12);
        assert!(check_buoyant(&mu, CLASS_TOL).pass);
    }

    #[test]
    fn classify_additive_includes_expected_tags() {
        let mu = additive(&[0.2, 0.35, 0.45]);
        let tags = classify(&mu, CLASS_TOL);
        for expected in [
            ClassTag::Additive,
            ClassTag::Supermodular,
            ClassTag::Submodular,
            ClassTag::Superadditive,
            ClassTag::Subadditive,
            ClassTag::KAdditive(1),
            ClassTag::KNonadditive(1),
            ClassTag::KNonmodular(1),
        ] {
            assert!(tags.contains(&expected), "missing {expected} in {tags:?}");
        }
        assert!(!tags.contains(&ClassTag::Symmetric));
    }

    #[test]
    fn classify_uniform_adds_symmetry_and_buoyancy_tags() {
        let mu = additive(&[1.0 / 3.0; 3]);
        let tags = classify(&mu, CLASS_TOL);
        assert!(tags.contains(&ClassTag::Symmetric));
        assert!(tags.contains(&ClassTag::Antibuoyant));
        assert!(tags.contains(&ClassTag::Buoyant));
        assert!(tags.contains(&ClassTag::Additive));
    }

    #[test]
    fn supermodular_witness_names_the_violating_triple() {
        // Raise a pair above its bound: mu({1,2}) pushed past l3.
        let mut values = additive(&[0.2, 0.35, 0.45]).values().to_vec();
        values[0b011] = 0.7; // l3 = 0.55 for the additive seed
        let mu = SetFunction::from_values(3, values).unwrap();
        let rep = check_supermodular(&mu, CLASS_TOL);
        assert!(!rep.pass);
        let w = rep.witness.expect("witness");
        assert_eq!(w.elements.len(), 2);
        assert!(rep.worst_violation > 0.1);
    }

    #[test]
    fn mutation_is_caught_by_monotonicity() {
        let mut values = additive(&[0.2, 0.35, 0.45]).values().to_vec();
        values[0b111 - 1] = 1.2; // above mu(N)
        let mu = SetFunction::from_values(3, values).unwrap();
        assert!(!check_capacity_axioms(&mu, CLASS_TOL).pass);
    }

    #[test]
    fn tag_strings_round_trip() {
        let tags = [
            ClassTag::Supermodular,
            ClassTag::KAdditive(2),
            ClassTag::UpperKNonmodular(3),
            ClassTag::KMinitive(1),
            ClassTag::KIntolerant(2),
        ];
        for t in tags {
            let s = t.to_string();
            assert_eq!(s.parse::<ClassTag>().unwrap(), t, "failed on {s}");
        }
        assert!("flavor-2".parse::<ClassTag>().is_err());
    }

    #[test]
    fn dual_tags_swap_super_and_sub() {
        assert_eq!(dual_tag(&ClassTag::Supermodular), Some(ClassTag::Submodular));
        assert_eq!(dual_tag(&ClassTag::KMaxitive(2)), Some(ClassTag::KMinitive(2)));
        assert_eq!(dual_tag(&ClassTag::Additive), Some(ClassTag::Additive));
        assert_eq!(dual_tag(&ClassTag::KInteractive(1)), None);
    }

    #[test]
    fn maxitive_order_is_sharp() {
        let nu = AdditiveMeasure::new(vec![0.2, 0.35, 0.45]).unwrap().to_set_function();
        let mu = crate::gen::korder::make_k_maxitive(&nu, 2).unwrap();
        assert!(check_k_maxitive(&mu, 2, CLASS_TOL).pass);
        let under = check_k_maxitive(&mu, 1, CLASS_TOL);
        assert!(!under.pass);
        assert!(under.witness.is_some());
    }

    #[test]
    fn classify_shifted_measure_drops_additivity() {
        let nu = AdditiveMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        let mu = crate::gen::structured::shift_supermodular(&nu, false, 0.4, &mut rng).unwrap();
        let tags = classify(&mu, CLASS_TOL);
        assert!(tags.contains(&ClassTag::Supermodular));
        assert!(tags.contains(&ClassTag::Superadditive));
        assert!(!tags.contains(&ClassTag::Additive));
        assert!(!tags.contains(&ClassTag::Submodular));
    }

    #[test]
    fn k_minitive_check_mirrors_maxitive_under_duality() {
        // A 1-maxitive measure: values are maxima of singleton scores.
        let w = [0.3, 0.6, 1.0];
        let values: Vec<f64> = (0..8)
            .map(|m| {
                (0..3)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| w[i])
                    .fold(0.0, f64::max)
            })
            .collect();
        let mu = SetFunction::from_values(3, values).unwrap();
        assert!(check_k_maxitive(&mu, 1, CLASS_TOL).pass);
        assert!(check_k_minitive(&mu.dual(), 1, CLASS_TOL).pass);
        assert!(check_tag(&mu.dual(), &ClassTag::KMinitive(1), CLASS_TOL).pass);
    }
}
