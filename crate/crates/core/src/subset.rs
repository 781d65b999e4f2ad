//! Subsets of the ground set as bitmasks.
//!
//! The ground set is `{1, ..., n}` with `n <= 26`; bit `i - 1` of the mask
//! encodes element `i`. This layout is shared by every value array in the
//! crate: `values[mask]` is the measure of the subset with that mask.

use std::fmt;

/// A subset of the ground set, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// The full ground set for `n` elements.
    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= 26);
        Subset(((1u64 << n) - 1) as u32)
    }

    /// Subset containing the single element at 0-based index `e`.
    pub fn singleton(e: usize) -> Subset {
        Subset(1 << e)
    }

    pub fn from_elements(elems: &[usize]) -> Subset {
        let mut bits = 0u32;
        for &e in elems {
            bits |= 1 << e;
        }
        Subset(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    /// Position of this subset in a value array.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn card(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_full(self, n: usize) -> bool {
        self == Subset::full(n)
    }

    /// Nonempty and strictly contained in the ground set.
    #[inline]
    pub fn is_proper_nonempty(self, n: usize) -> bool {
        !self.is_empty() && !self.is_full(n)
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Subset {
        Subset(self.0 | 1 << e)
    }

    #[inline]
    pub fn without(self, e: usize) -> Subset {
        Subset(self.0 & !(1 << e))
    }

    #[inline]
    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    #[inline]
    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    #[inline]
    pub fn complement(self, n: usize) -> Subset {
        Subset(Subset::full(n).0 & !self.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & other.0 == self.0
    }

    #[inline]
    pub fn is_superset_of(self, other: Subset) -> bool {
        other.is_subset_of(self)
    }

    /// 0-based indices of the elements, ascending.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    /// All subsets of the ground set, ascending by mask.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << n).map(Subset)
    }

    /// Proper nonempty subsets of the ground set, ascending by mask.
    pub fn proper_nonempty(n: usize) -> impl Iterator<Item = Subset> {
        (1..Subset::full(n).0).map(Subset)
    }

    /// All subsets of `self`, including `self` and the empty set.
    pub fn subsets(self) -> Submasks {
        Submasks { of: self.0, next: Some(0) }
    }

    /// Strict subsets of `self`, including the empty set.
    pub fn strict_subsets(self) -> impl Iterator<Item = Subset> {
        let whole = self;
        self.subsets().filter(move |&s| s != whole)
    }
}

/// Iterator over the elements of a subset.
pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let e = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(e)
        }
    }
}

/// Iterator over all submasks of a mask, ascending.
pub struct Submasks {
    of: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        // Next submask in ascending order: propagate a carry through the
        // zero bits that are outside `of`.
        self.next = if cur == self.of {
            None
        } else {
            Some(cur.wrapping_sub(self.of) & self.of)
        };
        Some(Subset(cur))
    }
}

impl fmt::Display for Subset {
    /// Elements are printed 1-based: `{1,3}` has bits 0 and 2 set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset({:#b} = {})", self.0, self)
    }
}
