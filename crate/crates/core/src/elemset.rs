//! Subsets of a poset's ground set, as bitmasks over internal indices.

use core::fmt;

use alloc::vec::Vec;

/// Maximum number of elements a [`crate::Poset`] may have.
pub const MAX_ELEMENTS: usize = 64;

/// A set of internal element indices (`0..64`).
///
/// Ordering is the canonical tube order: by cardinality, then
/// lexicographically on the ascending member list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn singleton(i: usize) -> Self {
        ElemSet(1 << i)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(ElemSet(0), |s, i| s.with(i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        ElemSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        ElemSet(self.0 & !(1 << i))
    }

    pub fn union(self, o: Self) -> Self {
        ElemSet(self.0 | o.0)
    }

    pub fn inter(self, o: Self) -> Self {
        ElemSet(self.0 & o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        ElemSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Position of `i` among the members (its rank), if present.
    pub fn rank_of(self, i: usize) -> Option<usize> {
        if self.contains(i) {
            Some((self.0 & ((1u64 << i) - 1)).count_ones() as usize)
        } else {
            None
        }
    }

    pub fn iter(self) -> ElemIter {
        ElemIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct ElemIter(u64);

impl Iterator for ElemIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let a = ElemSet::from_indices([0, 1]);
        let b = ElemSet::from_indices([0, 2]);
        let c = ElemSet::from_indices([0, 1, 2]);
        let d = ElemSet::from_indices([1]);
        let mut v = alloc::vec![c, b, d, a];
        v.sort();
        assert_eq!(v, alloc::vec![d, a, b, c]);
    }

    #[test]
    fn rank() {
        let s = ElemSet::from_indices([1, 4, 6]);
        assert_eq!(s.rank_of(4), Some(1));
        assert_eq!(s.rank_of(5), None);
        assert_eq!(s.to_vec(), alloc::vec![1, 4, 6]);
    }
}
