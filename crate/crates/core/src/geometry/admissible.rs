use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt::Debug;

use super::{GeometryError, RationalPolytope};

/// The combinatorial data the realization pipeline needs from a family of tubes.
///
/// Implemented for finite posets (tubes are element sets) and for affine
/// posets (tubes are shift classes).
pub trait TubeSystem {
    type Tube: Clone + Ord + Debug;

    /// `|P|` for a finite poset, the period `n` for an affine one.
    fn rank(&self) -> usize;
    /// Dimension of the polytope being realized.
    fn dim(&self) -> usize;
    fn whole(&self) -> Self::Tube;
    fn singletons(&self) -> Vec<Self::Tube>;
    /// Proper tubes in canonical order.
    fn proper_tubes(&self) -> Vec<Self::Tube>;
    fn size(&self, t: &Self::Tube) -> usize;
    fn is_subtube(&self, inner: &Self::Tube, outer: &Self::Tube) -> bool;
    /// Tubing partitions of `t` into strict subtubes.
    fn strict_partitions(&self, t: &Self::Tube) -> Vec<Vec<Self::Tube>>;
    fn is_tubing(&self, tubes: &[Self::Tube]) -> bool;
    fn tag(&self, t: &Self::Tube) -> Vec<i64>;
    /// The order polytope together with the admissible tubings its vertices and facets correspond to.
    fn base_polytope(&self) -> Result<BasePolytope<Self::Tube>, GeometryError>;
}

/// An order polytope whose vertex `k` dualizes to the facet `vertex_tubings[k]`
/// and whose facet `k` dualizes to the vertex `facet_tubings[k]` of `Adm(P;{P})`.
#[derive(Debug, Clone)]
pub struct BasePolytope<T> {
    pub polytope: RationalPolytope,
    pub vertex_tubings: Vec<Vec<T>>,
    pub facet_tubings: Vec<Vec<T>>,
}

/// The poset `Adm(P;M)` of `M`-admissible tubings (each containing the whole poset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePoset<T> {
    /// Melted tubes, sorted.
    pub melted: Vec<T>,
    /// Sorted tubings.
    pub elements: Vec<Vec<T>>,
    pub dims: Vec<isize>,
}

impl<T: Clone + Ord + Debug> AdmissiblePoset<T> {
    pub fn is_melted(&self, t: &T) -> bool {
        self.melted.binary_search(t).is_ok()
    }

    /// The order `<=_M`.
    pub fn leq<S: TubeSystem<Tube = T>>(&self, sys: &S, a: &[T], b: &[T]) -> bool {
        a.iter().all(|t| {
            if self.is_melted(t) {
                b.binary_search(t).is_ok()
            } else {
                b.iter().any(|u| !self.is_melted(u) && sys.is_subtube(t, u))
            }
        })
    }

    pub fn with_dim(&self, d: isize) -> Vec<&Vec<T>> {
        self.elements
            .iter()
            .zip(&self.dims)
            .filter(|&(_, &k)| k == d)
            .map(|(e, _)| e)
            .collect()
    }
}

/// Dimension `rank + |T ∩ M| − |T \ M| − 2`.
pub fn admissible_dim<T: Ord>(rank: usize, melted: &[T], tubing: &[T]) -> isize {
    let m = tubing.iter().filter(|t| melted.binary_search(t).is_ok()).count() as isize;
    rank as isize + m - (tubing.len() as isize - m) - 2
}

/// Enumerates `Adm(P;M)`: trees whose inner nodes are melted and whose leaves are frozen.
pub fn admissible_tubings<S: TubeSystem>(sys: &S, melted: &[S::Tube]) -> AdmissiblePoset<S::Tube> {
    let mut melted: Vec<S::Tube> = melted.to_vec();
    let w = sys.whole();
    if !melted.contains(&w) {
        melted.push(w.clone());
    }
    melted.sort();
    melted.dedup();
    let mut memo: BTreeMap<S::Tube, Vec<Vec<S::Tube>>> = BTreeMap::new();
    let mut elements: Vec<Vec<S::Tube>> = expansions(sys, &melted, &w, &mut memo)
        .into_iter()
        .map(|mut e| {
            e.push(w.clone());
            e.sort();
            e
        })
        .filter(|e| sys.is_tubing(e))
        .collect();
    elements.sort();
    elements.dedup();
    let dims = elements.iter().map(|e| admissible_dim(sys.rank(), &melted, e)).collect();
    AdmissiblePoset { melted, elements, dims }
}

fn expansions<S: TubeSystem>(
    sys: &S,
    melted: &[S::Tube],
    t: &S::Tube,
    memo: &mut BTreeMap<S::Tube, Vec<Vec<S::Tube>>>,
) -> Vec<Vec<S::Tube>> {
    if let Some(r) = memo.get(t) {
        return r.clone();
    }
    let mut out = Vec::new();
    for part in sys.strict_partitions(t) {
        let mut acc: Vec<Vec<S::Tube>> = alloc::vec![Vec::new()];
        for b in &part {
            let opts: Vec<Vec<S::Tube>> = if melted.binary_search(b).is_ok() {
                expansions(sys, melted, b, memo)
                    .into_iter()
                    .map(|mut e| {
                        e.push(b.clone());
                        e
                    })
                    .collect()
            } else {
                alloc::vec![alloc::vec![b.clone()]]
            };
            acc = acc
                .iter()
                .flat_map(|pre| {
                    opts.iter().map(move |o| {
                        let mut v = pre.clone();
                        v.extend(o.iter().cloned());
                        v
                    })
                })
                .collect();
        }
        out.extend(acc);
    }
    memo.insert(t.clone(), out.clone());
    out
}
