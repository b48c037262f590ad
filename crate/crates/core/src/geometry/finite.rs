use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_traits::Zero;

use super::admissible::{BasePolytope, TubeSystem};
use super::pipeline::{face_cut, realize, RealizeOptions, Realization};
use super::polytope::{Chart, FaceTag, Facet, RationalPolytope};
use super::GeometryError;
use crate::elemset::ElemSet;
use crate::lattice::{associahedron_face_lattice, tubing_partitions, FaceLattice};
use crate::linalg::affine_dim;
use crate::poset::Poset;
use crate::rational::{centroid, one, q, qf, Q};
use crate::tubing::{enumerate_tubes, is_tubing};

/// A finite poset viewed as a [`TubeSystem`].
pub struct FiniteSystem<'a> {
    p: &'a Poset,
    proper: Vec<ElemSet>,
    parts: RefCell<BTreeMap<ElemSet, Vec<Vec<ElemSet>>>>,
}

impl<'a> FiniteSystem<'a> {
    pub fn new(p: &'a Poset) -> Self {
        FiniteSystem {
            p,
            proper: enumerate_tubes(p, true),
            parts: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn poset(&self) -> &Poset {
        self.p
    }
}

impl TubeSystem for FiniteSystem<'_> {
    type Tube = ElemSet;

    fn rank(&self) -> usize {
        self.p.len()
    }

    fn dim(&self) -> usize {
        self.p.len() - 2
    }

    fn whole(&self) -> ElemSet {
        self.p.all()
    }

    fn singletons(&self) -> Vec<ElemSet> {
        (0..self.p.len()).map(ElemSet::singleton).collect()
    }

    fn proper_tubes(&self) -> Vec<ElemSet> {
        self.proper.clone()
    }

    fn size(&self, t: &ElemSet) -> usize {
        t.len()
    }

    fn is_subtube(&self, inner: &ElemSet, outer: &ElemSet) -> bool {
        inner.is_subset(*outer)
    }

    fn strict_partitions(&self, t: &ElemSet) -> Vec<Vec<ElemSet>> {
        if let Some(r) = self.parts.borrow().get(t) {
            return r.clone();
        }
        let r: Vec<Vec<ElemSet>> = tubing_partitions(self.p, *t).into_iter().filter(|b| b.len() >= 2).collect();
        self.parts.borrow_mut().insert(*t, r.clone());
        r
    }

    fn is_tubing(&self, tubes: &[ElemSet]) -> bool {
        is_tubing(self.p, tubes)
    }

    fn tag(&self, t: &ElemSet) -> Vec<i64> {
        self.p.ids_of(*t)
    }

    fn base_polytope(&self) -> Result<BasePolytope<ElemSet>, GeometryError> {
        let polytope = order_polytope(self.p)?;
        let all = self.p.all();
        let vertex_tubings = self
            .p
            .ideal_filter_splits()
            .into_iter()
            .map(|(i, f)| {
                let mut v = alloc::vec![i, f, all];
                v.sort();
                v
            })
            .collect();
        let facet_tubings = self
            .p
            .covers()
            .iter()
            .map(|&(i, j)| {
                let pair = ElemSet::from_indices([i, j]);
                let mut v: Vec<ElemSet> = alloc::vec![all, pair];
                v.extend(all.minus(pair).iter().map(ElemSet::singleton));
                v.sort();
                v
            })
            .collect();
        Ok(BasePolytope {
            polytope,
            vertex_tubings,
            facet_tubings,
        })
    }
}

/// `Ord(P)` in a chart of `{Σ = 0, α_P = 1}` centred at its vertex centroid.
///
/// Vertices come from ideal/filter splits (tagged `[I, F]`), facets from
/// covers `i < j` (tagged `[[i, j]]`).
pub fn order_polytope(p: &Poset) -> Result<RationalPolytope, GeometryError> {
    let n = p.len();
    let nq = q(n as i64);
    let splits = p.ideal_filter_splits();
    let ambient: Vec<Vec<Q>> = splits
        .iter()
        .map(|&(i, f)| {
            let e = p.covers().iter().filter(|&&(a, b)| i.contains(a) && f.contains(b)).count() as i64;
            let en = q(e) * &nq;
            let a = -q(f.len() as i64) / &en;
            let b = q(i.len() as i64) / &en;
            (0..n).map(|k| if i.contains(k) { a.clone() } else { b.clone() }).collect()
        })
        .collect();
    let vtags: Vec<FaceTag> = splits.iter().map(|&(i, f)| alloc::vec![p.ids_of(i), p.ids_of(f)]).collect();
    let refs: Vec<&[Q]> = ambient.iter().map(|v| v.as_slice()).collect();
    let origin = centroid(&refs);
    if n == 2 {
        let chart = Chart { origin, basis: Vec::new() };
        return Ok(RationalPolytope::new(chart, alloc::vec![Vec::new()], Vec::new(), vtags, Vec::new()));
    }
    let a = p.alpha_coefficients();
    let (pp, pq) = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .find(|&(x, y)| a[x] != a[y])
        .ok_or(GeometryError::Degenerate)?;
    let free: Vec<usize> = (0..n).filter(|&k| k != pp && k != pq).collect();
    let basis: Vec<Vec<Q>> = free
        .iter()
        .map(|&k| {
            let xq = qf(a[pp] - a[k], a[pq] - a[pp]);
            let xp = -one() - &xq;
            (0..n)
                .map(|j| {
                    if j == k {
                        one()
                    } else if j == pp {
                        xp.clone()
                    } else if j == pq {
                        xq.clone()
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    let vertices: Vec<Vec<Q>> = ambient
        .iter()
        .map(|x| free.iter().map(|&k| &x[k] - &origin[k]).collect())
        .collect();
    let facets: Vec<Facet> = p
        .covers()
        .iter()
        .map(|&(i, j)| Facet {
            normal: basis.iter().map(|b| &b[i] - &b[j]).collect(),
            offset: &origin[j] - &origin[i],
        })
        .collect();
    let ftags: Vec<FaceTag> = p.covers().iter().map(|&(i, j)| alloc::vec![alloc::vec![p.id(i), p.id(j)]]).collect();
    let poly = RationalPolytope::new(Chart { origin, basis }, vertices, facets, vtags, ftags);
    let pts: Vec<&[Q]> = poly.vertices.iter().map(|v| v.as_slice()).collect();
    if affine_dim(&pts) != n as isize - 2 {
        return Err(GeometryError::Degenerate);
    }
    poly.certify()?;
    Ok(poly)
}

/// A realized poset associahedron with its certified combinatorics.
#[derive(Debug, Clone)]
pub struct AssociahedronRealization {
    pub realization: Realization<ElemSet>,
    pub lattice: FaceLattice<Vec<ElemSet>>,
}

impl AssociahedronRealization {
    pub fn dual(&self) -> &RationalPolytope {
        &self.realization.dual
    }

    pub fn primal(&self) -> &RationalPolytope {
        &self.realization.primal
    }
}

/// Realizes `A(P)` and cross-checks it face by face against the lattice of proper tubings.
pub fn realize_poset_associahedron(p: &Poset, opts: &RealizeOptions) -> Result<AssociahedronRealization, GeometryError> {
    let sys = FiniteSystem::new(p);
    let r = realize(&sys, opts)?;
    let lattice = associahedron_face_lattice(p);
    let mm = |m: String| Err(GeometryError::Mismatch(m));
    let mut lv: Vec<Vec<ElemSet>> = lattice
        .labels
        .iter()
        .zip(&lattice.dims)
        .filter(|&(_, &d)| d == 0)
        .map(|(l, _)| l.clone().unwrap())
        .collect();
    lv.sort();
    let mut rv = r.vertex_tubings.clone();
    rv.sort();
    if lv != rv {
        return mm(String::from("realized vertices differ from maximal proper tubings"));
    }
    let mut rf = r.facet_tubes.clone();
    rf.sort();
    if rf != sys.proper_tubes() {
        return mm(String::from("realized facets differ from proper tubes"));
    }
    let primal = &r.primal;
    for (v, t) in r.vertex_tubings.iter().enumerate() {
        for (f, tube) in r.facet_tubes.iter().enumerate() {
            if primal.incidence[v][f] != t.contains(tube) {
                return mm(format!("incidence of vertex {:?} and facet {:?}", t, tube));
            }
        }
    }
    for (label, &d) in lattice.labels.iter().zip(&lattice.dims) {
        let Some(t) = label else { continue };
        if t.is_empty() {
            continue;
        }
        let fs: Vec<usize> = t.iter().map(|x| r.facet_tubes.iter().position(|y| y == x).unwrap()).collect();
        let expect: Vec<usize> = (0..r.vertex_tubings.len())
            .filter(|&v| t.iter().all(|x| r.vertex_tubings[v].contains(x)))
            .collect();
        if face_cut(primal, &fs)? != expect {
            return mm(format!("face {:?} is not cut out by its facets", t));
        }
        let pts: Vec<&[Q]> = expect.iter().map(|&v| primal.vertices[v].as_slice()).collect();
        if affine_dim(&pts) != d {
            return mm(format!("face {:?} has the wrong dimension", t));
        }
    }
    Ok(AssociahedronRealization { realization: r, lattice })
}
