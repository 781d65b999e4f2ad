//! Linear extensions of the subset lattice: extraction from measures,
//! neighbour bounds for repositioning, exhaustive enumeration at small `n`
//! and the repetition-ratio diversity metric.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::setfn::SetFunction;
use crate::subset::Subset;

/// An inclusion-respecting total order of all `2^n` subsets.
///
/// `order[p]` is the bitmask at position `p`; `pos[mask]` inverts it.
/// The empty set is always first and the ground set last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearExtension {
    n: usize,
    order: Vec<u32>,
    pos: Vec<u32>,
}

impl LinearExtension {
    /// Builds an extension from an explicit order, validating that it is a
    /// permutation of all subsets and respects inclusion.
    pub fn from_order(n: usize, order: Vec<u32>) -> Result<Self> {
        let size = 1usize << n;
        if order.len() != size {
            return Err(Error::InvalidExtension(format!(
                "order has {} entries, expected {}",
                order.len(),
                size
            )));
        }
        let mut pos = vec![u32::MAX; size];
        for (p, &m) in order.iter().enumerate() {
            if m as usize >= size || pos[m as usize] != u32::MAX {
                return Err(Error::InvalidExtension(format!(
                    "order is not a permutation of all subsets (entry {m})"
                )));
            }
            pos[m as usize] = p as u32;
        }
        let ext = LinearExtension { n, order, pos };
        if !ext.respects_inclusion() {
            return Err(Error::InvalidExtension("order does not respect inclusion".into()));
        }
        Ok(ext)
    }

    /// The extension induced by a capacity: subsets sorted by value
    /// ascending, ties broken by binary order (ascending bitmask).
    pub fn of_measure(mu: &SetFunction) -> LinearExtension {
        let mut order: Vec<u32> = (0..mu.size() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            mu.value(Subset(a))
                .partial_cmp(&mu.value(Subset(b)))
                .expect("set function values are finite")
                .then(a.cmp(&b))
        });
        let mut pos = vec![0u32; mu.size()];
        for (p, &m) in order.iter().enumerate() {
            pos[m as usize] = p as u32;
        }
        LinearExtension { n: mu.n(), order, pos }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn subset_at(&self, p: usize) -> Subset {
        Subset(self.order[p])
    }

    #[inline]
    pub fn position(&self, a: Subset) -> usize {
        self.pos[a.index()] as usize
    }

    #[inline]
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Checks `pos[A] < pos[A + i]` over all covering pairs; by
    /// transitivity this implies the full inclusion invariant.
    pub fn respects_inclusion(&self) -> bool {
        for m in 0..self.order.len() {
            for e in 0..self.n {
                if m & (1 << e) == 0 && self.pos[m] >= self.pos[m | (1 << e)] {
                    return false;
                }
            }
        }
        true
    }

    /// Positions that bound where a nonempty proper subset may move:
    /// `lo = max_{i in A} pos[A - i]`, `hi = min_{i not in A} pos[A + i]`.
    /// Any slot strictly inside `(lo, hi)` keeps the extension valid.
    pub fn neighbor_bounds(&self, a: Subset) -> Result<(usize, usize)> {
        if !a.is_proper_nonempty(self.n) {
            return Err(Error::NotProperSubset(a));
        }
        let mut lo = 0usize;
        let mut hi = usize::MAX;
        for e in 0..self.n {
            if a.contains(e) {
                lo = lo.max(self.position(a.without(e)));
            } else {
                hi = hi.min(self.position(a.with(e)));
            }
        }
        Ok((lo, hi))
    }

    /// Moves `a` to position `target`, which must lie strictly inside its
    /// neighbour bounds; all other subsets keep their relative order.
    pub fn reposition(&self, a: Subset, target: usize) -> Result<LinearExtension> {
        let (lo, hi) = self.neighbor_bounds(a)?;
        if target <= lo || target >= hi {
            return Err(Error::InvalidExtension(format!(
                "target position {target} outside the open window ({lo}, {hi}) for {a}"
            )));
        }
        let p = self.position(a);
        let mut order = self.order.clone();
        order.remove(p);
        order.insert(target, a.bits());
        let mut pos = vec![0u32; order.len()];
        for (q, &m) in order.iter().enumerate() {
            pos[m as usize] = q as u32;
        }
        Ok(LinearExtension { n: self.n, order, pos })
    }
}

/// Fraction of a batch whose extensions duplicate earlier ones:
/// `(len - distinct) / len`.
pub fn repetition_ratio(batch: &[LinearExtension]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let distinct: HashSet<&[u32]> = batch.iter().map(|e| e.order.as_slice()).collect();
    Ok((batch.len() - distinct.len()) as f64 / batch.len() as f64)
}

/// Same ratio over raw order vectors, for callers that never materialize
/// `LinearExtension` values.
pub fn repetition_ratio_orders(batch: &[Vec<u32>]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let distinct: HashSet<&[u32]> = batch.iter().map(|e| e.as_slice()).collect();
    Ok((batch.len() - distinct.len()) as f64 / batch.len() as f64)
}

/// Exhaustively enumerates all linear extensions of the subset lattice.
/// Supported for `n <= 4`; the counts are 1, 2, 48, 1680384 for n = 1..4
/// and explode beyond.
pub fn enumerate_extensions(n: usize) -> Result<ExtensionIter> {
    Ok(ExtensionIter { raw: RawEnumerator::new(n)? })
}

/// Number of linear extensions, streamed without materializing them.
pub fn count_extensions(n: usize) -> Result<u64> {
    let mut raw = RawEnumerator::new(n)?;
    let mut count = 0u64;
    while raw.advance() {
        count += 1;
    }
    Ok(count)
}

pub struct ExtensionIter {
    raw: RawEnumerator,
}

impl Iterator for ExtensionIter {
    type Item = LinearExtension;

    fn next(&mut self) -> Option<LinearExtension> {
        if !self.raw.advance() {
            return None;
        }
        let order = self.raw.order.clone();
        let mut pos = vec![0u32; order.len()];
        for (p, &m) in order.iter().enumerate() {
            pos[m as usize] = p as u32;
        }
        Some(LinearExtension { n: self.raw.n, order, pos })
    }
}

/// Iterative topological-order backtracking over the subset lattice.
/// `placed` and the per-mask predecessor sets are bitmaps over masks, so
/// the availability test is O(1) and memory stays O(2^n).
struct RawEnumerator {
    n: usize,
    size: usize,
    // pred_req[m]: bitmap of the masks m - {i} that must be placed first.
    pred_req: Vec<u32>,
    placed: u32,
    order: Vec<u32>,
    cursor: Vec<u32>,
    depth: usize,
    started: bool,
    finished: bool,
}

impl RawEnumerator {
    fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(Error::EnumerationUnsupported(n));
        }
        let size = 1usize << n;
        let mut pred_req = vec![0u32; size];
        for m in 0..size as u32 {
            for e in 0..n {
                if m & (1 << e) != 0 {
                    pred_req[m as usize] |= 1 << (m ^ (1 << e));
                }
            }
        }
        Ok(RawEnumerator {
            n,
            size,
            pred_req,
            placed: 0,
            order: vec![0; size],
            cursor: vec![0; size],
            depth: 0,
            started: false,
            finished: false,
        })
    }

    #[inline]
    fn available(&self, m: u32) -> bool {
        self.placed & (1 << m) == 0 && self.placed & self.pred_req[m as usize] == self.pred_req[m as usize]
    }

    /// Advances to the next complete extension in `self.order`.
    fn advance(&mut self) -> bool {
        if self.finished {
            return false;
        }
        if self.started {
            // Leave the previously yielded leaf.
            self.depth -= 1;
            self.placed &= !(1 << self.order[self.depth]);
        }
        self.started = true;
        loop {
            let mut cand = self.cursor[self.depth];
            while (cand as usize) < self.size && !self.available(cand) {
                cand += 1;
            }
            if (cand as usize) < self.size {
                self.order[self.depth] = cand;
                self.placed |= 1 << cand;
                self.cursor[self.depth] = cand + 1;
                self.depth += 1;
                if self.depth == self.size {
                    return true;
                }
                self.cursor[self.depth] = 0;
            } else {
                if self.depth == 0 {
                    self.finished = true;
                    return false;
                }
                self.depth -= 1;
                self.placed &= !(1 << self.order[self.depth]);
            }
        }
    }
}
