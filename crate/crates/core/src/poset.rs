//! Finite connected posets and the order-polytope functionals.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::elemset::{ElemSet, MAX_ELEMENTS};
use crate::rational::{q, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error("relation contains a cycle through {0} and {1}")]
    Cycle(i64, i64),
    #[error("Hasse diagram is disconnected")]
    Disconnected,
    #[error("poset needs at least 2 elements, got {0}")]
    TooSmall(usize),
    #[error("poset has {0} elements; at most 64 are supported")]
    TooLarge(usize),
    #[error("unknown element {0}")]
    UnknownElement(i64),
    #[error("subset is empty")]
    EmptySubset,
    #[error("blocks do not partition the ground set")]
    NotAPartition,
    #[error("blocks do not form a tubing: {0}")]
    NotATubing(crate::tubing::TubingViolation),
    #[error("vector has no coordinate for element {0}")]
    MissingCoordinate(i64),
    #[error("alpha vanishes on the subset")]
    Degenerate,
}

/// A finite connected poset stored by its Hasse diagram.
///
/// Elements carry arbitrary integer ids; internally they are indexed
/// `0..n` in ascending id order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poset {
    ids: Vec<i64>,
    covers: Vec<(usize, usize)>,
    below: Vec<ElemSet>,
    above: Vec<ElemSet>,
    hasse: Vec<ElemSet>,
}

/// A rational vector indexed by a subset of a poset's elements.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Coords {
    support: ElemSet,
    values: Vec<Q>,
}

impl Coords {
    /// `values` are listed in ascending index order of `support`.
    pub fn new(support: ElemSet, values: Vec<Q>) -> Self {
        assert_eq!(support.len(), values.len(), "coordinate count mismatch");
        Coords { support, values }
    }

    pub fn from_fn<F: FnMut(usize) -> Q>(support: ElemSet, mut f: F) -> Self {
        Coords {
            support,
            values: support.iter().map(&mut f).collect(),
        }
    }

    pub fn support(&self) -> ElemSet {
        self.support
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<&Q> {
        self.support.rank_of(i).map(|r| &self.values[r])
    }

    pub fn at(&self, i: usize) -> &Q {
        self.get(i).expect("index outside support")
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.support.iter().zip(self.values.iter())
    }

    pub fn restrict(&self, s: ElemSet) -> Option<Coords> {
        if !s.is_subset(self.support) {
            return None;
        }
        Some(Coords::from_fn(s, |i| self.at(i).clone()))
    }
}

impl Poset {
    /// Builds a poset from cover pairs `(i, j)` meaning `i < j`; redundant pairs are reduced.
    pub fn from_covers(pairs: &[(i64, i64)]) -> Result<Poset, PosetError> {
        let ids: Vec<i64> = pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Self::build(ids, pairs)
    }

    /// Like [`Poset::from_covers`] but with an explicit element list (allowing isolated ids to be rejected as disconnected).
    pub fn build(mut ids: Vec<i64>, pairs: &[(i64, i64)]) -> Result<Poset, PosetError> {
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooLarge(n));
        }
        let idx = |id: i64| ids.binary_search(&id).map_err(|_| PosetError::UnknownElement(id));
        let mut up = alloc::vec![ElemSet::EMPTY; n];
        for &(a, b) in pairs {
            let (i, j) = (idx(a)?, idx(b)?);
            if i == j {
                return Err(PosetError::Cycle(a, b));
            }
            up[i] = up[i].with(j);
        }
        let mut above = up.clone();
        loop {
            let mut changed = false;
            for i in 0..n {
                let mut acc = above[i];
                for j in above[i].iter() {
                    acc = acc.union(above[j]);
                }
                if acc != above[i] {
                    above[i] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in 0..n {
            if above[i].contains(i) {
                let j = above[i]
                    .iter()
                    .find(|&j| j != i && above[j].contains(i))
                    .unwrap_or(i);
                return Err(PosetError::Cycle(ids[i], ids[j]));
            }
        }
        if n < 2 {
            return Err(PosetError::TooSmall(n));
        }
        let mut below = alloc::vec![ElemSet::EMPTY; n];
        for i in 0..n {
            for j in above[i].iter() {
                below[j] = below[j].with(i);
            }
        }
        let mut covers = Vec::new();
        let mut hasse = alloc::vec![ElemSet::EMPTY; n];
        for i in 0..n {
            for j in above[i].iter() {
                if above[i].inter(below[j]).is_empty() {
                    covers.push((i, j));
                    hasse[i] = hasse[i].with(j);
                    hasse[j] = hasse[j].with(i);
                }
            }
        }
        let p = Poset {
            ids,
            covers,
            below,
            above,
            hasse,
        };
        if !p.is_connected(p.all()) {
            return Err(PosetError::Disconnected);
        }
        Ok(p)
    }

    /// Chain `1 < 2 < ... < n`.
    pub fn chain(n: usize) -> Poset {
        let pairs: Vec<(i64, i64)> = (1..n as i64).map(|i| (i, i + 1)).collect();
        Poset::from_covers(&pairs).expect("chain")
    }

    /// Claw with minimum `0` below leaves `1..=n`.
    pub fn claw(n: usize) -> Poset {
        let pairs: Vec<(i64, i64)> = (1..=n as i64).map(|i| (0, i)).collect();
        Poset::from_covers(&pairs).expect("claw")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> i64 {
        self.ids[i]
    }

    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.len())
    }

    /// Cover pairs as internal indices.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_ids(&self) -> Vec<(i64, i64)> {
        self.covers.iter().map(|&(i, j)| (self.ids[i], self.ids[j])).collect()
    }

    /// Strict order `i < j`.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.above[i].contains(j)
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j)
    }

    pub fn below(&self, i: usize) -> ElemSet {
        self.below[i]
    }

    pub fn above(&self, i: usize) -> ElemSet {
        self.above[i]
    }

    pub fn hasse_neighbors(&self, i: usize) -> ElemSet {
        self.hasse[i]
    }

    pub fn subset(&self, members: &[i64]) -> Result<ElemSet, PosetError> {
        if members.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        members.iter().try_fold(ElemSet::EMPTY, |s, &id| {
            self.index_of(id).map(|i| s.with(i)).ok_or(PosetError::UnknownElement(id))
        })
    }

    pub fn ids_of(&self, s: ElemSet) -> Vec<i64> {
        s.iter().map(|i| self.ids[i]).collect()
    }

    /// No `i, k` in `s` and `j` outside with `i < j < k`.
    pub fn is_convex(&self, s: ElemSet) -> bool {
        self.all()
            .minus(s)
            .iter()
            .all(|j| self.below[j].is_disjoint(s) || self.above[j].is_disjoint(s))
    }

    /// The Hasse diagram induced on `s` is connected.
    pub fn is_connected(&self, s: ElemSet) -> bool {
        let Some(start) = s.first() else {
            return false;
        };
        let mut seen = ElemSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = ElemSet::EMPTY;
            for i in frontier.iter() {
                next = next.union(self.hasse[i]);
            }
            frontier = next.inter(s).minus(seen);
            seen = seen.union(frontier);
        }
        seen == s
    }

    pub fn is_tube(&self, s: ElemSet) -> bool {
        !s.is_empty() && s.is_subset(self.all()) && self.is_convex(s) && self.is_connected(s)
    }

    pub fn is_down_closed(&self, s: ElemSet) -> bool {
        s.iter().all(|i| self.below[i].is_subset(s))
    }

    /// All order ideals, by recursion over a linear extension.
    pub fn ideals(&self) -> Vec<ElemSet> {
        let order = self.linear_extension();
        let mut out = Vec::new();
        self.ideals_rec(&order, 0, ElemSet::EMPTY, &mut out);
        out.sort();
        out
    }

    fn ideals_rec(&self, order: &[usize], k: usize, cur: ElemSet, out: &mut Vec<ElemSet>) {
        if k == order.len() {
            out.push(cur);
            return;
        }
        let i = order[k];
        self.ideals_rec(order, k + 1, cur, out);
        if self.below[i].is_subset(cur) {
            self.ideals_rec(order, k + 1, cur.with(i), out);
        }
    }

    /// Splits `P = I ⊔ F` with `I` a connected nonempty ideal and `F` a connected nonempty filter.
    pub fn ideal_filter_splits(&self) -> Vec<(ElemSet, ElemSet)> {
        let all = self.all();
        self.ideals()
            .into_iter()
            .filter(|&i| !i.is_empty() && i != all)
            .filter(|&i| self.is_connected(i) && self.is_connected(all.minus(i)))
            .map(|i| (i, all.minus(i)))
            .collect()
    }

    /// Indices in a linear extension (ties broken by index).
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut done = ElemSet::EMPTY;
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let i = (0..n)
                .find(|&i| !done.contains(i) && self.below[i].is_subset(done))
                .expect("acyclic");
            done = done.with(i);
            out.push(i);
        }
        out
    }

    /// The induced subposet on a tube with at least two elements, keeping ids.
    pub fn subposet(&self, s: ElemSet) -> Result<Poset, PosetError> {
        let ids = self.ids_of(s);
        let pairs: Vec<(i64, i64)> = self
            .covers
            .iter()
            .filter(|&&(i, j)| s.contains(i) && s.contains(j))
            .map(|&(i, j)| (self.ids[i], self.ids[j]))
            .collect();
        Poset::build(ids, &pairs)
    }

    /// Quotient by a tubing partition; each block is named by its smallest id.
    pub fn quotient(&self, blocks: &[ElemSet]) -> Result<Poset, PosetError> {
        let mut seen = ElemSet::EMPTY;
        for &b in blocks {
            if b.is_empty() || !b.is_disjoint(seen) {
                return Err(PosetError::NotAPartition);
            }
            seen = seen.union(b);
        }
        if seen != self.all() {
            return Err(PosetError::NotAPartition);
        }
        crate::tubing::check_tubing(self, blocks).map_err(PosetError::NotATubing)?;
        let block_of = |i: usize| blocks.iter().position(|b| b.contains(i)).unwrap();
        let name = |b: usize| self.ids[blocks[b].first().unwrap()];
        let ids: Vec<i64> = (0..blocks.len()).map(name).collect();
        let pairs: Vec<(i64, i64)> = self
            .covers
            .iter()
            .map(|&(i, j)| (block_of(i), block_of(j)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (name(a), name(b)))
            .collect();
        Poset::build(ids, &pairs)
    }

    fn require(&self, s: ElemSet, x: &Coords) -> Result<(), PosetError> {
        match s.minus(x.support()).first() {
            Some(i) => Err(PosetError::MissingCoordinate(self.ids[i])),
            None => Ok(()),
        }
    }

    /// `alpha_tau(x)`: sum of `x_j - x_i` over covers `i < j` inside `s`.
    pub fn alpha(&self, s: ElemSet, x: &Coords) -> Result<Q, PosetError> {
        self.require(s, x)?;
        Ok(self
            .covers
            .iter()
            .filter(|&&(i, j)| s.contains(i) && s.contains(j))
            .fold(Q::zero(), |acc, &(i, j)| acc + x.at(j) - x.at(i)))
    }

    /// Average of `x` over `s`.
    pub fn avg(&self, s: ElemSet, x: &Coords) -> Result<Q, PosetError> {
        self.require(s, x)?;
        if s.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        let total = s.iter().fold(Q::zero(), |a, i| a + x.at(i));
        Ok(total / q(s.len() as i64))
    }

    /// Restriction to `s` minus the average over `s`.
    pub fn proj_sigma0(&self, s: ElemSet, x: &Coords) -> Result<Coords, PosetError> {
        let a = self.avg(s, x)?;
        Ok(Coords::from_fn(s, |i| x.at(i) - &a))
    }

    /// `proj_sigma0(s, x) / alpha_s(x)`.
    pub fn res(&self, s: ElemSet, x: &Coords) -> Result<Coords, PosetError> {
        let al = self.alpha(s, x)?;
        if al.is_zero() {
            return Err(PosetError::Degenerate);
        }
        let p = self.proj_sigma0(s, x)?;
        Ok(Coords::from_fn(s, |i| p.at(i) / &al))
    }

    /// Coefficients of `alpha_P` (in-degree minus out-degree in the Hasse diagram).
    pub fn alpha_coefficients(&self) -> Vec<i64> {
        let mut a = alloc::vec![0i64; self.len()];
        for &(i, j) in &self.covers {
            a[i] -= 1;
            a[j] += 1;
        }
        a
    }

    /// `x` lies in `Ord(s)`: order preserving on `s`, sums to zero, `alpha_s = 1`.
    pub fn in_order_polytope(&self, s: ElemSet, x: &Coords) -> bool {
        x.support() == s
            && self
                .covers
                .iter()
                .filter(|&&(i, j)| s.contains(i) && s.contains(j))
                .all(|&(i, j)| x.at(i) <= x.at(j))
            && x.values().iter().fold(Q::zero(), |a, b| a + b).is_zero()
            && self.alpha(s, x).map(|a| a == crate::rational::one()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;
    use alloc::vec;

    pub(crate) fn w5() -> Poset {
        Poset::from_covers(&[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap()
    }

    fn set(p: &Poset, ids: &[i64]) -> ElemSet {
        p.subset(ids).unwrap()
    }

    #[test]
    fn build_errors() {
        assert_eq!(Poset::from_covers(&[(1, 2), (2, 1)]), Err(PosetError::Cycle(1, 2)));
        assert_eq!(Poset::from_covers(&[(1, 2), (3, 4)]), Err(PosetError::Disconnected));
        assert_eq!(Poset::build(vec![1], &[]), Err(PosetError::TooSmall(1)));
        assert!(matches!(Poset::from_covers(&[(1, 1)]), Err(PosetError::Cycle(1, 1))));
    }

    #[test]
    fn reduction_drops_redundant_pairs() {
        let p = Poset::from_covers(&[(1, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(p.cover_ids(), vec![(1, 2), (2, 3)]);
        assert_eq!(w5().covers().len(), 5);
    }

    #[test]
    fn convex_connected_examples() {
        let p = w5();
        assert!(!p.is_convex(set(&p, &[1, 2, 4])));
        assert!(p.is_convex(set(&p, &[2, 4, 5])));
        assert!(p.is_convex(p.all()));
        assert!(!p.is_connected(set(&p, &[2, 3])));
        assert!(p.is_connected(set(&p, &[2, 3, 4])));
        assert!(p.is_connected(set(&p, &[5])));
    }

    #[test]
    fn splits() {
        let c3 = Poset::chain(3);
        let s = c3.ideal_filter_splits();
        assert_eq!(s, vec![(set(&c3, &[1]), set(&c3, &[2, 3])), (set(&c3, &[1, 2]), set(&c3, &[3]))]);
        let p = w5();
        let ideals: Vec<ElemSet> = p.ideal_filter_splits().into_iter().map(|(i, _)| i).collect();
        let expect: Vec<ElemSet> = [&[1][..], &[1, 2], &[1, 3], &[1, 2, 3], &[1, 2, 3, 4]]
            .iter()
            .map(|s| set(&p, s))
            .collect();
        assert_eq!(ideals.len(), 5);
        for e in expect {
            assert!(ideals.contains(&e));
        }
        let k3 = Poset::claw(3);
        let fs: Vec<Vec<i64>> = k3.ideal_filter_splits().iter().map(|&(_, f)| k3.ids_of(f)).collect();
        assert_eq!(fs, vec![vec![3], vec![2], vec![1]]);
    }

    #[test]
    fn quotients() {
        let c4 = Poset::chain(4);
        let q = c4.quotient(&[set(&c4, &[1, 2]), set(&c4, &[3]), set(&c4, &[4])]).unwrap();
        assert_eq!(q.cover_ids(), vec![(1, 3), (3, 4)]);
        let p = w5();
        let q = p
            .quotient(&[set(&p, &[1]), set(&p, &[2]), set(&p, &[3]), set(&p, &[4, 5])])
            .unwrap();
        assert_eq!(q.cover_ids(), vec![(1, 2), (1, 3), (2, 4), (3, 4)]);
        let bad = p.quotient(&[set(&p, &[1, 4]), set(&p, &[2]), set(&p, &[3]), set(&p, &[5])]);
        assert!(matches!(bad, Err(PosetError::NotATubing(_))));
        let overlap = p.quotient(&[set(&p, &[1, 2]), set(&p, &[2, 3, 4, 5])]);
        assert_eq!(overlap, Err(PosetError::NotAPartition));
    }

    #[test]
    fn functionals() {
        let c3 = Poset::chain(3);
        let x = Coords::new(c3.all(), vec![qf(-1, 2), q(0), qf(1, 2)]);
        assert_eq!(c3.alpha(c3.all(), &x).unwrap(), q(1));
        let t = set(&c3, &[1, 2]);
        assert_eq!(c3.alpha(t, &x).unwrap(), qf(1, 2));
        assert_eq!(c3.proj_sigma0(t, &x).unwrap().values(), &[qf(-1, 4), qf(1, 4)]);
        assert_eq!(c3.res(t, &x).unwrap().values(), &[qf(-1, 2), qf(1, 2)]);
        assert_eq!(c3.res(c3.all(), &x).unwrap(), x);
        let c = Coords::new(c3.all(), vec![q(2), q(2), q(2)]);
        assert_eq!(c3.alpha(c3.all(), &c).unwrap(), q(0));
        assert_eq!(c3.res(c3.all(), &c), Err(PosetError::Degenerate));
        let short = Coords::new(t, vec![q(0), q(1)]);
        assert_eq!(c3.alpha(c3.all(), &short), Err(PosetError::MissingCoordinate(3)));
    }
}
