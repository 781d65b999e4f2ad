//! Set functions on the subset lattice: the canonical value container,
//! the Möbius/zeta transform pair, the nonadditivity and nonmodularity
//! interaction indices, duality and normalization.

use crate::error::{Error, Result};
use crate::subset::Subset;

/// Tolerance for exact-equality assertions (transform round trips,
/// boundary values, index cancellation before normalization).
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance for class-membership oracles; rounding accumulated by
/// normalization makes the tighter bound unreliable there.
pub const CLASS_TOL: f64 = 1e-9;

/// A set function on `{1, ..., n}` stored as `2^n` values indexed by
/// subset bitmask. When it represents a capacity, `mu(EMPTY) = 0`,
/// `mu(FULL) = 1` and the values are monotone under inclusion.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction {
    n: usize,
    values: Vec<f64>,
}

impl SetFunction {
    /// Wraps a value array without monotonicity checks.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if !(2..=26).contains(&n) {
            return Err(Error::ElementCount(n));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(Error::ValueLength { n, got: values.len(), expected });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { subset: Subset(i as u32), value: v });
            }
        }
        Ok(SetFunction { n, values })
    }

    /// Wraps a value array and checks the capacity axioms: boundary
    /// values and monotonicity within `EXACT_TOL`.
    pub fn capacity(n: usize, values: Vec<f64>) -> Result<Self> {
        let sf = SetFunction::from_values(n, values)?;
        sf.check_capacity(EXACT_TOL)?;
        Ok(sf)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of subsets, `2^n`.
    #[inline]
    pub fn size(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn full_set(&self) -> Subset {
        Subset::full(self.n)
    }

    #[inline]
    pub fn value(&self, a: Subset) -> f64 {
        self.values[a.index()]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn set_value(&mut self, a: Subset, v: f64) {
        self.values[a.index()] = v;
    }

    /// Copy with one value replaced; no validity checks.
    pub fn with_value(&self, a: Subset, v: f64) -> SetFunction {
        let mut out = self.clone();
        out.values[a.index()] = v;
        out
    }

    /// First monotonicity violation beyond `eps` over all covering pairs,
    /// if any. Covering pairs suffice: violations between distant subsets
    /// imply one between neighbours.
    pub fn monotonicity_violation(&self, eps: f64) -> Option<(Subset, Subset, f64)> {
        let mut worst: Option<(Subset, Subset, f64)> = None;
        for a in Subset::all(self.n) {
            let va = self.value(a);
            for e in 0..self.n {
                if !a.contains(e) {
                    let b = a.with(e);
                    let gap = va - self.value(b);
                    if gap > eps && worst.as_ref().map_or(true, |w| gap > w.2) {
                        worst = Some((a, b, gap));
                    }
                }
            }
        }
        worst
    }

    pub fn is_monotone(&self, eps: f64) -> bool {
        self.monotonicity_violation(eps).is_none()
    }

    /// Checks boundary values and monotonicity.
    pub fn check_capacity(&self, eps: f64) -> Result<()> {
        if self.values[0].abs() > eps {
            return Err(Error::Degenerate(format!(
                "mu(empty set) = {}, expected 0",
                self.values[0]
            )));
        }
        let top = self.values[self.size() - 1];
        if (top - 1.0).abs() > eps {
            return Err(Error::Degenerate(format!("mu(ground set) = {top}, expected 1")));
        }
        if let Some((a, b, _)) = self.monotonicity_violation(eps) {
            return Err(Error::NotMonotone {
                lower: a,
                upper: b,
                lower_value: self.value(a),
                upper_value: self.value(b),
            });
        }
        Ok(())
    }

    /// Möbius transform: `m(A) = sum_{C subseteq A} (-1)^{|A minus C|} mu(C)`.
    pub fn mobius(&self) -> MobiusRep {
        let mut coeff = self.values.clone();
        for e in 0..self.n {
            let bit = 1usize << e;
            for mask in 0..self.size() {
                if mask & bit != 0 {
                    coeff[mask] -= coeff[mask ^ bit];
                }
            }
        }
        MobiusRep { n: self.n, coefficients: coeff }
    }

    /// Marginal contribution of element `e` (0-based) to `A`: requires `e` not in `A`.
    pub fn marginal_delta(&self, e: usize, a: Subset) -> Result<f64> {
        if e >= self.n {
            return Err(Error::ElementOutOfRange { element: e + 1, n: self.n });
        }
        if a.contains(e) {
            return Err(Error::ElementInSubset { element: e + 1, subset: a });
        }
        Ok(self.value(a.with(e)) - self.value(a))
    }

    /// Nonadditivity index
    /// `n_mu(A) = mu(A) - sum_{C strict subset of A} mu(C) / (2^{|A|-1} - 1)`,
    /// defined for `|A| >= 2`. The sum includes the empty set.
    pub fn nonadditivity_index(&self, a: Subset) -> Result<f64> {
        if a.card() < 2 {
            return Err(Error::IndexUndefined(a));
        }
        let mut sum = 0.0;
        for c in a.strict_subsets() {
            sum += self.value(c);
        }
        let denom = (1u64 << (a.card() - 1)) as f64 - 1.0;
        Ok(self.value(a) - sum / denom)
    }

    /// Nonmodularity index
    /// `d_mu(A) = mu(A) - sum_{i in A} (mu({i}) + mu(A minus {i})) / |A|`,
    /// defined for `|A| >= 2`.
    pub fn nonmodularity_index(&self, a: Subset) -> Result<f64> {
        if a.card() < 2 {
            return Err(Error::IndexUndefined(a));
        }
        let mut sum = 0.0;
        for e in a.elements() {
            sum += self.value(Subset::singleton(e)) + self.value(a.without(e));
        }
        Ok(self.value(a) - sum / a.card() as f64)
    }

    /// Dual measure `mu^d(A) = 1 - mu(N minus A)`.
    pub fn dual(&self) -> SetFunction {
        let full = self.size() - 1;
        let values = (0..self.size()).map(|m| 1.0 - self.values[full ^ m]).collect();
        SetFunction { n: self.n, values }
    }

    /// Divides every value by `mu(N)`. Rejects `mu(N) <= 0`. The induced
    /// subset ordering and the zero sets of all interaction indices are
    /// unchanged.
    pub fn normalize(&self) -> Result<SetFunction> {
        let total = self.values[self.size() - 1];
        if total <= 0.0 {
            return Err(Error::Degenerate(format!(
                "cannot normalize: mu(ground set) = {total}"
            )));
        }
        let values = self.values.iter().map(|v| v / total).collect();
        Ok(SetFunction { n: self.n, values })
    }

    /// Per-subset interaction indices for `|A| >= 2`.
    pub fn index_report(&self) -> IndexReport {
        let mut nonadd = vec![f64::NAN; self.size()];
        let mut nonmod = vec![f64::NAN; self.size()];
        for a in Subset::all(self.n) {
            if a.card() >= 2 {
                nonadd[a.index()] = self.nonadditivity_index(a).unwrap();
                nonmod[a.index()] = self.nonmodularity_index(a).unwrap();
            }
        }
        IndexReport { n: self.n, nonadditivity: nonadd, nonmodularity: nonmod }
    }
}

/// Möbius coefficients of a set function, same bitmask indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusRep {
    n: usize,
    coefficients: Vec<f64>,
}

impl MobiusRep {
    pub fn from_coefficients(n: usize, coefficients: Vec<f64>) -> Result<Self> {
        let sf = SetFunction::from_values(n, coefficients)?;
        Ok(MobiusRep { n: sf.n, coefficients: sf.values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coefficient(&self, a: Subset) -> f64 {
        self.coefficients[a.index()]
    }

    #[inline]
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Zeta transform, the inverse of [`SetFunction::mobius`]:
    /// `mu(A) = sum_{C subseteq A} m(C)`.
    pub fn zeta(&self) -> SetFunction {
        let mut values = self.coefficients.clone();
        let size = values.len();
        for e in 0..self.n {
            let bit = 1usize << e;
            for mask in 0..size {
                if mask & bit != 0 {
                    values[mask] += values[mask ^ bit];
                }
            }
        }
        SetFunction { n: self.n, values }
    }

    /// Largest `|coefficient|` over subsets with more than `k` elements.
    pub fn max_abs_above(&self, k: usize) -> f64 {
        Subset::all(self.n)
            .filter(|a| a.card() > k)
            .map(|a| self.coefficient(a).abs())
            .fold(0.0, f64::max)
    }
}

/// Nonadditivity and nonmodularity indices of every subset with at least
/// two elements.
#[derive(Clone, Debug)]
pub struct IndexReport {
    n: usize,
    nonadditivity: Vec<f64>,
    nonmodularity: Vec<f64>,
}

impl IndexReport {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` for subsets with fewer than two elements.
    pub fn nonadditivity(&self, a: Subset) -> Option<f64> {
        (a.card() >= 2).then(|| self.nonadditivity[a.index()])
    }

    pub fn nonmodularity(&self, a: Subset) -> Option<f64> {
        (a.card() >= 2).then(|| self.nonmodularity[a.index()])
    }

    pub fn max_abs_nonadditivity_above(&self, k: usize) -> f64 {
        Subset::all(self.n)
            .filter(|a| a.card() > k && a.card() >= 2)
            .map(|a| self.nonadditivity[a.index()].abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_nonmodularity_above(&self, k: usize) -> f64 {
        Subset::all(self.n)
            .filter(|a| a.card() > k && a.card() >= 2)
            .map(|a| self.nonmodularity[a.index()].abs())
            .fold(0.0, f64::max)
    }
}
