//! Tubes, tubings and their enumeration.

use core::fmt;

use alloc::vec::Vec;

use crate::elemset::ElemSet;
use crate::poset::Poset;

/// Why a family of subsets is not a tubing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TubingViolation {
    NotATube(ElemSet),
    Crossing(ElemSet, ElemSet),
    /// A directed cycle of `D_T`, starting at its least tube.
    Cycle(Vec<ElemSet>),
}

impl fmt::Display for TubingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TubingViolation::NotATube(s) => write!(f, "{:?} is not a tube", s),
            TubingViolation::Crossing(a, b) => write!(f, "{:?} and {:?} cross", a, b),
            TubingViolation::Cycle(c) => write!(f, "cycle {:?}", c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TubingError {
    #[error("malformed plane tree: {0}")]
    MalformedTree(&'static str),
    #[error("blocks do not partition 1..={0}")]
    NotAPartition(usize),
}

/// Union of the strict up-sets of the members of `s`.
fn up_of(p: &Poset, s: ElemSet) -> ElemSet {
    s.iter().fold(ElemSet::EMPTY, |acc, i| acc.union(p.above(i)))
}

fn edge(p: &Poset, a: ElemSet, b: ElemSet) -> bool {
    a.is_disjoint(b) && !up_of(p, a).is_disjoint(b)
}

fn nested_or_disjoint(a: ElemSet, b: ElemSet) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

/// All tubes in canonical order; proper ones satisfy `1 < |tau| < |P|`.
pub fn enumerate_tubes(p: &Poset, proper_only: bool) -> Vec<ElemSet> {
    let mut out = Vec::new();
    for v in 0..p.len() {
        let higher = p.all().minus(ElemSet::full(v + 1));
        let cand = p.hasse_neighbors(v).inter(higher);
        grow(p, ElemSet::singleton(v), cand, ElemSet::EMPTY, higher, &mut out);
    }
    let n = p.len();
    out.retain(|&s| p.is_convex(s) && (!proper_only || (s.len() > 1 && s.len() < n)));
    out.sort();
    out
}

/// Each connected set containing the seed, with members drawn from `allowed`, is emitted once.
fn grow(p: &Poset, s: ElemSet, cand: ElemSet, forb: ElemSet, allowed: ElemSet, out: &mut Vec<ElemSet>) {
    out.push(s);
    let mut forb = forb;
    let mut rest = cand;
    while let Some(w) = rest.first() {
        rest = rest.without(w);
        let ns = s.with(w);
        let next = rest
            .union(p.hasse_neighbors(w))
            .inter(allowed)
            .minus(ns)
            .minus(forb);
        grow(p, ns, next, forb, allowed, out);
        forb = forb.with(w);
    }
}

/// Edges of the digraph `D_T`, as index pairs into `tubes`.
pub fn d_graph(p: &Poset, tubes: &[ElemSet]) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for (a, &ta) in tubes.iter().enumerate() {
        for (b, &tb) in tubes.iter().enumerate() {
            if a != b && edge(p, ta, tb) {
                e.push((a, b));
            }
        }
    }
    e
}

/// Checks the tubing conditions, returning a certificate on failure.
pub fn check_tubing(p: &Poset, tubes: &[ElemSet]) -> Result<(), TubingViolation> {
    let mut ts: Vec<ElemSet> = tubes.to_vec();
    ts.sort();
    ts.dedup();
    for &t in &ts {
        if !p.is_tube(t) {
            return Err(TubingViolation::NotATube(t));
        }
    }
    for (k, &a) in ts.iter().enumerate() {
        for &b in &ts[k + 1..] {
            if !nested_or_disjoint(a, b) {
                return Err(TubingViolation::Crossing(a, b));
            }
        }
    }
    let adj: Vec<Vec<usize>> = (0..ts.len())
        .map(|a| (0..ts.len()).filter(|&b| a != b && edge(p, ts[a], ts[b])).collect())
        .collect();
    match find_cycle(&adj) {
        Some(c) => Err(TubingViolation::Cycle(c.into_iter().map(|i| ts[i]).collect())),
        None => Ok(()),
    }
}

pub fn is_tubing(p: &Poset, tubes: &[ElemSet]) -> bool {
    check_tubing(p, tubes).is_ok()
}

/// A directed cycle, rotated to start at its least vertex.
pub(crate) fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut color = alloc::vec![0u8; n];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(v: usize, adj: &[Vec<usize>], color: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        color[v] = 1;
        stack.push(v);
        for &w in &adj[v] {
            if color[w] == 1 {
                let pos = stack.iter().position(|&x| x == w).unwrap();
                return Some(stack[pos..].to_vec());
            }
            if color[w] == 0 {
                if let Some(c) = dfs(w, adj, color, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        color[v] = 2;
        None
    }
    for v in 0..n {
        if color[v] == 0 {
            if let Some(mut c) = dfs(v, adj, &mut color, &mut stack) {
                let m = (0..c.len()).min_by_key(|&k| c[k]).unwrap();
                c.rotate_left(m);
                return Some(c);
            }
        }
    }
    None
}

/// Proper tubings (faces of `K_ass(P)`), sorted by size then lexicographically.
///
/// Backtracks over proper tubes in canonical order; acyclicity is maintained
/// incrementally by a reachability test from the new tube's out-neighbours.
pub fn enumerate_proper_tubings(p: &Poset, max_only: bool) -> Vec<Vec<ElemSet>> {
    let tubes = enumerate_tubes(p, true);
    let ups: Vec<ElemSet> = tubes.iter().map(|&t| up_of(p, t)).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    let target = p.len().saturating_sub(2);
    backtrack(&tubes, &ups, 0, &mut chosen, &mut out, max_only, target);
    out.sort_by(|a: &Vec<ElemSet>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn backtrack(
    tubes: &[ElemSet],
    ups: &[ElemSet],
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<ElemSet>>,
    max_only: bool,
    target: usize,
) {
    if !max_only || chosen.len() == target {
        out.push(chosen.iter().map(|&k| tubes[k]).collect());
    }
    if chosen.len() >= target {
        return;
    }
    for k in from..tubes.len() {
        let t = tubes[k];
        if !chosen.iter().all(|&c| nested_or_disjoint(tubes[c], t)) {
            continue;
        }
        if closes_cycle(tubes, ups, chosen, k) {
            continue;
        }
        chosen.push(k);
        backtrack(tubes, ups, k + 1, chosen, out, max_only, target);
        chosen.pop();
    }
}

fn closes_cycle(tubes: &[ElemSet], ups: &[ElemSet], chosen: &[usize], k: usize) -> bool {
    let e = |a: usize, b: usize| tubes[a].is_disjoint(tubes[b]) && !ups[a].is_disjoint(tubes[b]);
    let sources: Vec<usize> = chosen.iter().copied().filter(|&u| e(u, k)).collect();
    if sources.is_empty() {
        return false;
    }
    let mut seen: Vec<usize> = Vec::new();
    let mut stack: Vec<usize> = chosen.iter().copied().filter(|&w| e(k, w)).collect();
    while let Some(w) = stack.pop() {
        if sources.contains(&w) {
            return true;
        }
        if seen.contains(&w) {
            continue;
        }
        seen.push(w);
        stack.extend(chosen.iter().copied().filter(|&x| e(w, x)));
    }
    false
}

/// The rooted tree `T ∪ {P} ∪ singletons` ordered by inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubingTree {
    /// Nodes in canonical order; the root `P` is last.
    pub nodes: Vec<ElemSet>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl TubingTree {
    /// Builds the tree of a tubing (proper tubes; `P` and singletons are added).
    pub fn new(p: &Poset, tubes: &[ElemSet]) -> TubingTree {
        let mut nodes: Vec<ElemSet> = tubes.to_vec();
        nodes.extend((0..p.len()).map(ElemSet::singleton));
        nodes.push(p.all());
        nodes.sort();
        nodes.dedup();
        let parent: Vec<Option<usize>> = nodes
            .iter()
            .map(|&s| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(_, &t)| t != s && s.is_subset(t))
                    .min_by_key(|&(_, &t)| t.len())
                    .map(|(k, _)| k)
            })
            .collect();
        let mut children = alloc::vec![Vec::new(); nodes.len()];
        for (k, par) in parent.iter().enumerate() {
            if let Some(q) = par {
                children[*q].push(k);
            }
        }
        TubingTree {
            nodes,
            parent,
            children,
        }
    }

    pub fn index(&self, s: ElemSet) -> Option<usize> {
        self.nodes.iter().position(|&t| t == s)
    }

    pub fn root(&self) -> ElemSet {
        *self.nodes.last().unwrap()
    }

    pub fn children_of(&self, s: ElemSet) -> Vec<ElemSet> {
        self.index(s)
            .map(|k| self.children[k].iter().map(|&c| self.nodes[c]).collect())
            .unwrap_or_default()
    }

    pub fn parent_of(&self, s: ElemSet) -> Option<ElemSet> {
        self.index(s).and_then(|k| self.parent[k]).map(|k| self.nodes[k])
    }

    /// The minimal node containing `s`.
    pub fn par(&self, s: ElemSet) -> ElemSet {
        *self
            .nodes
            .iter()
            .filter(|&&t| s.is_subset(t))
            .min_by_key(|t| t.len())
            .expect("root contains everything")
    }

    /// Non-singleton nodes (the tubing plus the root).
    pub fn inner_nodes(&self) -> Vec<ElemSet> {
        self.nodes.iter().copied().filter(|t| t.len() > 1).collect()
    }
}

/// Plane rooted tree whose leaves are read left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlaneTree {
    Leaf,
    Node(Vec<PlaneTree>),
}

impl PlaneTree {
    pub fn leaves(&self) -> usize {
        match self {
            PlaneTree::Leaf => 1,
            PlaneTree::Node(c) => c.iter().map(PlaneTree::leaves).sum(),
        }
    }

    /// Internal nodes other than the root.
    pub fn inner_count(&self) -> usize {
        fn rec(t: &PlaneTree) -> usize {
            match t {
                PlaneTree::Leaf => 0,
                PlaneTree::Node(c) => 1 + c.iter().map(rec).sum::<usize>(),
            }
        }
        rec(self).saturating_sub(1)
    }
}

/// Plane trees with `n` leaves whose internal nodes all have at least two children.
pub fn enumerate_plane_trees(n: usize) -> Vec<PlaneTree> {
    fn trees(n: usize) -> Vec<PlaneTree> {
        if n == 1 {
            return alloc::vec![PlaneTree::Leaf];
        }
        let mut out = Vec::new();
        for comp in compositions(n) {
            if comp.len() < 2 {
                continue;
            }
            let mut acc: Vec<Vec<PlaneTree>> = alloc::vec![Vec::new()];
            for &part in &comp {
                let sub = trees(part);
                acc = acc
                    .into_iter()
                    .flat_map(|pre| {
                        sub.iter().map(move |t| {
                            let mut v = pre.clone();
                            v.push(t.clone());
                            v
                        })
                    })
                    .collect();
            }
            out.extend(acc.into_iter().map(PlaneTree::Node));
        }
        out
    }
    if n == 0 {
        return Vec::new();
    }
    trees(n)
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Tubing of the chain `1 < ... < n` read off a plane tree: each non-root
/// internal node gives the tube of its descendant leaves.
pub fn tubing_from_plane_tree(tree: &PlaneTree) -> Result<Vec<ElemSet>, TubingError> {
    fn rec(t: &PlaneTree, start: usize, root: bool, out: &mut Vec<ElemSet>) -> Result<usize, TubingError> {
        match t {
            PlaneTree::Leaf => Ok(1),
            PlaneTree::Node(c) => {
                if c.len() < 2 {
                    return Err(TubingError::MalformedTree("internal node with fewer than two children"));
                }
                let mut k = 0;
                for ch in c {
                    k += rec(ch, start + k, false, out)?;
                }
                if !root {
                    out.push(ElemSet::from_indices(start..start + k));
                }
                Ok(k)
            }
        }
    }
    if matches!(tree, PlaneTree::Leaf) {
        return Err(TubingError::MalformedTree("root is a leaf"));
    }
    let mut out = Vec::new();
    rec(tree, 0, true, &mut out)?;
    out.sort();
    Ok(out)
}

/// Tubing of [`Poset::claw`]`(n)` from an ordered set partition of `1..=n`:
/// `tau_i = {0} ∪ B_1 ∪ ... ∪ B_i` for `i < k`.
pub fn tubing_from_ordered_set_partition(n: usize, blocks: &[Vec<i64>]) -> Result<Vec<ElemSet>, TubingError> {
    let mut seen = ElemSet::EMPTY;
    for b in blocks {
        if b.is_empty() {
            return Err(TubingError::NotAPartition(n));
        }
        for &x in b {
            if x < 1 || x as usize > n || seen.contains(x as usize) {
                return Err(TubingError::NotAPartition(n));
            }
            seen = seen.with(x as usize);
        }
    }
    if seen.len() != n {
        return Err(TubingError::NotAPartition(n));
    }
    let mut out = Vec::new();
    let mut cur = ElemSet::singleton(0);
    for b in &blocks[..blocks.len().saturating_sub(1)] {
        for &x in b {
            cur = cur.with(x as usize);
        }
        out.push(cur);
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sets(p: &Poset, xs: &[&[i64]]) -> Vec<ElemSet> {
        xs.iter().map(|s| p.subset(s).unwrap()).collect()
    }

    pub(crate) fn h6() -> Poset {
        Poset::from_covers(&[(1, 2), (3, 4), (5, 6), (1, 4), (3, 6), (5, 2)]).unwrap()
    }

    #[test]
    fn tubes_of_small_posets() {
        let w5 = Poset::from_covers(&[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap();
        let t = enumerate_tubes(&w5, true);
        let expect = sets(
            &w5,
            &[&[1, 2], &[1, 3], &[2, 4], &[3, 4], &[4, 5], &[1, 2, 3], &[2, 3, 4], &[2, 4, 5], &[3, 4, 5], &[1, 2, 3, 4], &[2, 3, 4, 5]],
        );
        assert_eq!(t, expect);
        let c4 = Poset::chain(4);
        assert_eq!(enumerate_tubes(&c4, true), sets(&c4, &[&[1, 2], &[2, 3], &[3, 4], &[1, 2, 3], &[2, 3, 4]]));
        assert!(enumerate_tubes(&Poset::chain(2), true).is_empty());
        assert_eq!(enumerate_tubes(&c4, false).len(), 10);
    }

    #[test]
    fn d_graph_examples() {
        let c4 = Poset::chain(4);
        let t = sets(&c4, &[&[1, 2], &[3, 4]]);
        assert_eq!(d_graph(&c4, &t), vec![(0, 1)]);
        let nested = sets(&c4, &[&[1, 2], &[1, 2, 3]]);
        assert!(d_graph(&c4, &nested).is_empty());
    }

    #[test]
    fn h6_witness() {
        let p = h6();
        let t = sets(&p, &[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(check_tubing(&p, &t), Err(TubingViolation::Cycle(t.clone())));
        assert!(is_tubing(&p, &t[..2]));
        assert!(is_tubing(&p, &[]));
        let c4 = Poset::chain(4);
        let cross = sets(&c4, &[&[1, 2], &[2, 3]]);
        assert!(matches!(check_tubing(&c4, &cross), Err(TubingViolation::Crossing(..))));
    }

    #[test]
    fn maximal_tubing_counts() {
        assert_eq!(enumerate_proper_tubings(&Poset::chain(4), true).len(), 5);
        assert_eq!(enumerate_proper_tubings(&Poset::claw(3), true).len(), 6);
        let n4 = Poset::from_covers(&[(1, 3), (2, 3), (2, 4)]).unwrap();
        assert_eq!(enumerate_proper_tubings(&n4, true).len(), 5);
        assert_eq!(enumerate_proper_tubings(&Poset::chain(2), false), vec![Vec::<ElemSet>::new()]);
    }

    #[test]
    fn trees() {
        let c4 = Poset::chain(4);
        let t = sets(&c4, &[&[1, 2], &[1, 2, 3]]);
        let tree = TubingTree::new(&c4, &t);
        assert_eq!(tree.children_of(c4.all()), sets(&c4, &[&[4], &[1, 2, 3]]));
        assert_eq!(tree.children_of(t[1]), sets(&c4, &[&[3], &[1, 2]]));
        assert_eq!(tree.children_of(t[0]), sets(&c4, &[&[1], &[2]]));
        let star = TubingTree::new(&c4, &[]);
        assert_eq!(star.children_of(c4.all()).len(), 4);
        let w5 = Poset::from_covers(&[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap();
        let t = sets(&w5, &[&[4, 5], &[1, 2, 3]]);
        assert_eq!(TubingTree::new(&w5, &t).children_of(w5.all()), t);
    }

    #[test]
    fn plane_tree_examples() {
        use PlaneTree::{Leaf, Node};
        let c3 = Poset::chain(3);
        let t = Node(vec![Node(vec![Leaf, Leaf]), Leaf]);
        assert_eq!(tubing_from_plane_tree(&t).unwrap(), sets(&c3, &[&[1, 2]]));
        assert!(tubing_from_plane_tree(&Node(vec![Leaf, Leaf, Leaf])).unwrap().is_empty());
        let c4 = Poset::chain(4);
        let b = Node(vec![Node(vec![Node(vec![Leaf, Leaf]), Leaf]), Leaf]);
        assert_eq!(tubing_from_plane_tree(&b).unwrap(), sets(&c4, &[&[1, 2], &[1, 2, 3]]));
        assert!(tubing_from_plane_tree(&Node(vec![Node(vec![Leaf]), Leaf])).is_err());
        assert!(tubing_from_plane_tree(&Leaf).is_err());
        assert_eq!(enumerate_plane_trees(4).len(), 11);
    }

    #[test]
    fn ordered_partition_examples() {
        let k3 = Poset::claw(3);
        assert_eq!(
            tubing_from_ordered_set_partition(3, &[vec![1], vec![2], vec![3]]).unwrap(),
            sets(&k3, &[&[0, 1], &[0, 1, 2]])
        );
        assert!(tubing_from_ordered_set_partition(3, &[vec![1, 2, 3]]).unwrap().is_empty());
        assert_eq!(
            tubing_from_ordered_set_partition(3, &[vec![2], vec![1, 3]]).unwrap(),
            sets(&k3, &[&[0, 2]])
        );
        assert!(tubing_from_ordered_set_partition(3, &[vec![1], vec![1, 2, 3]]).is_err());
        assert!(tubing_from_ordered_set_partition(3, &[vec![1], vec![]]).is_err());
    }
}
