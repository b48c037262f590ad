//! Face lattices of poset associahedra and order polytopes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::elemset::ElemSet;
use crate::poset::{Poset, PosetError};
use crate::tubing::{enumerate_proper_tubings, enumerate_tubes, is_tubing, TubingTree};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("face lattice is not graded at faces {0} and {1}")]
    NotGraded(usize, usize),
}

/// A graded face poset with explicit empty face.
///
/// `labels[k]` is `None` exactly for the empty face; `covers` holds pairs
/// `(lower, upper)` of faces with `lower ⊂ upper` and dimensions differing by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice<L> {
    pub dim: isize,
    pub labels: Vec<Option<L>>,
    pub dims: Vec<isize>,
    pub covers: Vec<(usize, usize)>,
}

impl<L: Ord + Clone> FaceLattice<L> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &L) -> Option<usize> {
        self.labels.iter().position(|l| l.as_ref() == Some(label))
    }

    /// Every cover raises dimension by one and every face except the top
    /// (resp. bottom) has an upper (resp. lower) cover.
    pub fn check_graded(&self) -> Result<(), LatticeError> {
        for &(a, b) in &self.covers {
            if self.dims[b] != self.dims[a] + 1 {
                return Err(LatticeError::NotGraded(a, b));
            }
        }
        let mut has_up = alloc::vec![false; self.len()];
        let mut has_down = alloc::vec![false; self.len()];
        for &(a, b) in &self.covers {
            has_up[a] = true;
            has_down[b] = true;
        }
        for k in 0..self.len() {
            if (self.dims[k] < self.dim && !has_up[k]) || (self.dims[k] > -1 && !has_down[k]) {
                return Err(LatticeError::NotGraded(k, k));
            }
        }
        Ok(())
    }

    /// Face counts `f_0, ..., f_dim`.
    pub fn f_vector(&self) -> Result<Vec<u64>, LatticeError> {
        self.check_graded()?;
        let mut f = alloc::vec![0u64; (self.dim + 1).max(0) as usize];
        for &d in &self.dims {
            if d >= 0 {
                f[d as usize] += 1;
            }
        }
        Ok(f)
    }

    /// h-vector of the dual simplicial complex.
    pub fn h_vector(&self) -> Result<Vec<i64>, LatticeError> {
        let f = self.f_vector()?;
        let d = self.dim.max(0) as usize;
        // simplicial face numbers: fs[i] = number of (i-1)-simplices
        let fs: Vec<i64> = (0..=d).map(|i| if i == 0 { 1 } else { f[d - i] as i64 }).collect();
        Ok((0..=d)
            .map(|k| {
                (0..=k)
                    .map(|i| {
                        let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
                        sign * binom((d - i) as u64, (k - i) as u64) as i64 * fs[i]
                    })
                    .sum()
            })
            .collect())
    }

    /// Alternating sum of face counts including the empty face is zero.
    pub fn euler_ok(&self) -> bool {
        let s: i64 = self
            .dims
            .iter()
            .map(|&d| if d.rem_euclid(2) == 0 { 1 } else { -1 })
            .sum();
        s == 0
    }

    /// Every vertex lies in exactly `dim` edges.
    pub fn is_simple(&self) -> bool {
        let mut deg = alloc::vec![0isize; self.len()];
        for &(a, b) in &self.covers {
            if self.dims[a] == 0 && self.dims[b] == 1 {
                deg[a] += 1;
            }
        }
        (0..self.len()).all(|k| self.dims[k] != 0 || deg[k] == self.dim)
    }
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Lattice keyed by sets of tubes where removing one tube moves up one dimension.
pub(crate) fn removal_lattice<T: Ord + Clone>(dim: isize, faces: Vec<Vec<T>>, dim_of: impl Fn(&[T]) -> isize) -> FaceLattice<Vec<T>> {
    let mut labels: Vec<Option<Vec<T>>> = alloc::vec![None];
    let mut dims = alloc::vec![-1];
    let index: BTreeMap<Vec<T>, usize> = faces.iter().cloned().enumerate().map(|(k, f)| (f, k + 1)).collect();
    for f in &faces {
        dims.push(dim_of(f));
        labels.push(Some(f.clone()));
    }
    let mut covers = Vec::new();
    for (k, f) in faces.iter().enumerate() {
        let k = k + 1;
        if dims[k] == 0 {
            covers.push((0, k));
        }
        for r in 0..f.len() {
            let mut g = f.clone();
            g.remove(r);
            if let Some(&j) = index.get(&g) {
                covers.push((k, j));
            }
        }
    }
    covers.sort();
    FaceLattice {
        dim,
        labels,
        dims,
        covers,
    }
}

/// Faces of `A(P)`: proper tubings under reverse inclusion, plus the empty face.
pub fn associahedron_face_lattice(p: &Poset) -> FaceLattice<Vec<ElemSet>> {
    let n = p.len() as isize;
    let faces = enumerate_proper_tubings(p, false);
    removal_lattice(n - 2, faces, |t| n - t.len() as isize - 2)
}

/// All tubing partitions of `s` (a tube) into tubes of `p`, canonical blocks.
pub fn tubing_partitions(p: &Poset, s: ElemSet) -> Vec<Vec<ElemSet>> {
    let tubes: Vec<ElemSet> = enumerate_tubes(p, false).into_iter().filter(|t| t.is_subset(s)).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    partitions_rec(p, &tubes, s, &mut cur, &mut out);
    for b in out.iter_mut() {
        b.sort();
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn partitions_rec(p: &Poset, tubes: &[ElemSet], rest: ElemSet, cur: &mut Vec<ElemSet>, out: &mut Vec<Vec<ElemSet>>) {
    let Some(first) = rest.first() else {
        if is_tubing(p, cur) {
            out.push(cur.clone());
        }
        return;
    };
    for &t in tubes {
        if t.contains(first) && t.is_subset(rest) {
            cur.push(t);
            partitions_rec(p, tubes, rest.minus(t), cur, out);
            cur.pop();
        }
    }
}

/// Faces of `Ord(P)`: tubing partitions under refinement; `{P}` is the empty face.
pub fn order_polytope_face_lattice(p: &Poset) -> FaceLattice<Vec<ElemSet>> {
    let parts = tubing_partitions(p, p.all());
    let n = p.len() as isize;
    let dims: Vec<isize> = parts.iter().map(|b| b.len() as isize - 2).collect();
    let refines = |fine: &[ElemSet], coarse: &[ElemSet]| fine.iter().all(|f| coarse.iter().any(|c| f.is_subset(*c)));
    let mut covers = Vec::new();
    for (a, pa) in parts.iter().enumerate() {
        for (b, pb) in parts.iter().enumerate() {
            if pb.len() == pa.len() + 1 && refines(pb, pa) {
                covers.push((a, b));
            }
        }
    }
    covers.sort();
    let labels: Vec<Option<Vec<ElemSet>>> = parts
        .into_iter()
        .map(|b| if b.len() == 1 { None } else { Some(b) })
        .collect();
    FaceLattice {
        dim: n - 2,
        labels,
        dims,
        covers,
    }
}

/// A minimal non-face of `K_ass(P)` whose tubes are pairwise compatible, if any.
///
/// Among all such sets the smallest, lexicographically least is returned.
pub fn flag_witness(p: &Poset) -> Option<Vec<ElemSet>> {
    let tubes = enumerate_tubes(p, true);
    let m = tubes.len();
    let compat: Vec<Vec<bool>> = (0..m)
        .map(|a| (0..m).map(|b| a != b && is_tubing(p, &[tubes[a], tubes[b]])).collect())
        .collect();
    for k in 3..p.len().max(3) {
        let mut cur = Vec::new();
        if let Some(w) = clique_search(p, &tubes, &compat, k, 0, &mut cur) {
            return Some(w);
        }
    }
    None
}

fn clique_search(
    p: &Poset,
    tubes: &[ElemSet],
    compat: &[Vec<bool>],
    k: usize,
    from: usize,
    cur: &mut Vec<usize>,
) -> Option<Vec<ElemSet>> {
    if cur.len() == k {
        let ts: Vec<ElemSet> = cur.iter().map(|&i| tubes[i]).collect();
        return if is_tubing(p, &ts) { None } else { Some(ts) };
    }
    for c in from..tubes.len() {
        if cur.iter().all(|&x| compat[x][c]) {
            cur.push(c);
            let r = clique_search(p, tubes, compat, k, c + 1, cur);
            cur.pop();
            if r.is_some() {
                return r;
            }
        }
    }
    None
}

pub fn is_flag_dual(p: &Poset) -> bool {
    flag_witness(p).is_none()
}

/// Quotients `tau / T[tau]` for `tau` in `{P} ∪ T` (root first).
pub fn face_product_decomposition(p: &Poset, tubing: &[ElemSet]) -> Result<Vec<Poset>, PosetError> {
    let tree = TubingTree::new(p, tubing);
    let mut nodes = alloc::vec![p.all()];
    let mut rest = tubing.to_vec();
    rest.sort();
    nodes.extend(rest);
    nodes
        .into_iter()
        .map(|t| {
            let sub = p.subposet(t)?;
            let blocks: Vec<ElemSet> = tree
                .children_of(t)
                .into_iter()
                .map(|c| sub.subset(&p.ids_of(c)))
                .collect::<Result<_, _>>()?;
            sub.quotient(&blocks)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn w5() -> Poset {
        Poset::from_covers(&[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap()
    }

    #[test]
    fn small_f_and_h_vectors() {
        let l = associahedron_face_lattice(&Poset::chain(4));
        assert_eq!(l.f_vector().unwrap(), vec![5, 5, 1]);
        assert_eq!(l.h_vector().unwrap(), vec![1, 3, 1]);
        let l = associahedron_face_lattice(&Poset::claw(3));
        assert_eq!(l.f_vector().unwrap(), vec![6, 6, 1]);
        assert_eq!(l.h_vector().unwrap(), vec![1, 4, 1]);
        let l = associahedron_face_lattice(&Poset::chain(5));
        assert_eq!(l.f_vector().unwrap(), vec![14, 21, 9, 1]);
        let l = associahedron_face_lattice(&Poset::chain(2));
        assert_eq!(l.f_vector().unwrap(), vec![1]);
        assert_eq!(l.h_vector().unwrap(), vec![1]);
    }

    #[test]
    fn order_polytope_lattices() {
        let l = order_polytope_face_lattice(&Poset::chain(3));
        assert_eq!(l.f_vector().unwrap(), vec![2, 1]);
        let l = order_polytope_face_lattice(&w5());
        assert_eq!(l.f_vector().unwrap(), vec![5, 8, 5, 1]);
        assert!(l.euler_ok());
        let l = order_polytope_face_lattice(&Poset::chain(4));
        assert_eq!(l.f_vector().unwrap(), vec![3, 3, 1]);
    }

    #[test]
    fn flagness() {
        let h6 = Poset::from_covers(&[(1, 2), (3, 4), (5, 6), (1, 4), (3, 6), (5, 2)]).unwrap();
        let w = flag_witness(&h6).unwrap();
        let expect: Vec<ElemSet> = [&[1, 2][..], &[3, 4], &[5, 6]].iter().map(|s| h6.subset(s).unwrap()).collect();
        assert_eq!(w, expect);
        assert!(is_flag_dual(&Poset::chain(4)));
        assert!(is_flag_dual(&Poset::chain(5)));
    }

    #[test]
    fn products() {
        let p = w5();
        let t = vec![p.subset(&[1, 2, 3]).unwrap()];
        let f = face_product_decomposition(&p, &t).unwrap();
        assert_eq!(f[0].cover_ids(), vec![(1, 4), (4, 5)]);
        assert_eq!(f[1].cover_ids(), vec![(1, 2), (1, 3)]);
        assert_eq!(face_product_decomposition(&p, &[]).unwrap(), vec![p.clone()]);
        let c4 = Poset::chain(4);
        let t = vec![c4.subset(&[1, 2]).unwrap(), c4.subset(&[3, 4]).unwrap()];
        let f = face_product_decomposition(&c4, &t).unwrap();
        assert!(f.iter().all(|q| q.len() == 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(2, 3), 0);
        assert_eq!(binom(0, 0), 1);
    }
}
