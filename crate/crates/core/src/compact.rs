//! The compactification `Comp(P)` of the configuration space of a poset.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::elemset::ElemSet;
use crate::poset::{Coords, Poset, PosetError};
use crate::rational::{one, pow10_neg, q, Q};
use crate::tubing::{enumerate_tubes, is_tubing, TubingTree};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompactError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("point is not strictly order preserving along a cover")]
    NotStrict,
    #[error("component for {0:?} is missing or not in its order polytope")]
    InvalidComponent(ElemSet),
    #[error("components for {inner:?} and {outer:?} are not coherent")]
    Incoherent { inner: ElemSet, outer: ElemSet },
    #[error("interior point for {0:?} lies on the wrong face")]
    WrongFace(ElemSet),
    #[error("tubes do not form a proper tubing")]
    NotATubing,
    #[error("{inner:?} is not a child of {outer:?} in the stratum tree")]
    NotAdjacent { inner: ElemSet, outer: ElemSet },
    #[error("t must satisfy 0 <= t < t_max")]
    Range,
    #[error("point is outside the collapse domain: {0}")]
    NotInColl(&'static str),
    #[error("parameters violate the sampling regime: {0}")]
    Regime(&'static str),
    #[error("steps are not ordered by inclusion")]
    OrderViolation,
    #[error("step {0} is not expandable")]
    NotExpandable(usize),
    #[error("step {0} is not collapsible")]
    NotCollapsible(usize),
}

type Result<T> = core::result::Result<T, CompactError>;

/// One point of `Ord(tau)` for every non-singleton tube `tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigPoint {
    comps: BTreeMap<ElemSet, Coords>,
}

impl ConfigPoint {
    /// Validates that exactly the non-singleton tubes are present and each component lies in its order polytope.
    pub fn new(p: &Poset, comps: BTreeMap<ElemSet, Coords>) -> Result<ConfigPoint> {
        let tubes: Vec<ElemSet> = enumerate_tubes(p, false).into_iter().filter(|t| t.len() > 1).collect();
        for &t in &tubes {
            match comps.get(&t) {
                Some(x) if p.in_order_polytope(t, x) => {}
                _ => return Err(CompactError::InvalidComponent(t)),
            }
        }
        if let Some(&extra) = comps.keys().find(|k| !tubes.contains(k)) {
            return Err(CompactError::InvalidComponent(extra));
        }
        Ok(ConfigPoint { comps })
    }

    pub fn get(&self, t: ElemSet) -> Option<&Coords> {
        self.comps.get(&t)
    }

    pub fn components(&self) -> &BTreeMap<ElemSet, Coords> {
        &self.comps
    }

    /// Largest coordinate difference between two points on the same tubes.
    pub fn distance(&self, other: &ConfigPoint) -> Q {
        let mut m = Q::zero();
        for (t, x) in &self.comps {
            if let Some(y) = other.comps.get(t) {
                for (a, b) in x.values().iter().zip(y.values()) {
                    let d = (a - b).abs();
                    if d > m {
                        m = d;
                    }
                }
            }
        }
        m
    }
}

/// The supremum of admissible expansion parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TMax {
    Finite(Q),
    Infinite,
}

impl TMax {
    pub fn admits(&self, t: &Q) -> bool {
        !t.is_negative()
            && match self {
                TMax::Finite(m) => t < m,
                TMax::Infinite => true,
            }
    }
}

fn strict(p: &Poset, x: &Coords) -> bool {
    p.covers().iter().all(|&(i, j)| x.at(i) < x.at(j))
}

/// `x ↦ (res_tau(x))_tau` on the open order cone.
pub fn embed(p: &Poset, x: &Coords) -> Result<ConfigPoint> {
    if x.support() != p.all() {
        return Err(PosetError::MissingCoordinate(p.id(p.all().minus(x.support()).first().unwrap())).into());
    }
    if !strict(p, x) {
        return Err(CompactError::NotStrict);
    }
    let mut comps = BTreeMap::new();
    for t in enumerate_tubes(p, false).into_iter().filter(|t| t.len() > 1) {
        comps.insert(t, p.res(t, x)?);
    }
    Ok(ConfigPoint { comps })
}

/// Each nested pair `tau ⊊ tau+` has `proj(x[tau+]) = λ x[tau]` with `λ >= 0`.
pub fn check_coherent(p: &Poset, c: &ConfigPoint) -> Result<()> {
    for (&inner, z) in &c.comps {
        for (&outer, x) in &c.comps {
            if inner == outer || !inner.is_subset(outer) {
                continue;
            }
            let y = p.proj_sigma0(inner, x)?;
            let (ys, zs) = (y.values(), z.values());
            let incoherent = CompactError::Incoherent { inner, outer };
            for a in 0..ys.len() {
                for b in a + 1..ys.len() {
                    if &ys[a] * &zs[b] != &ys[b] * &zs[a] {
                        return Err(incoherent);
                    }
                }
            }
            if crate::rational::dot(ys, zs).is_negative() {
                return Err(incoherent);
            }
        }
    }
    Ok(())
}

pub fn is_coherent(p: &Poset, c: &ConfigPoint) -> bool {
    check_coherent(p, c).is_ok()
}

/// Connected components of the level sets of `x` inside `tau`.
pub fn b_partition(p: &Poset, tau: ElemSet, x: &Coords) -> Vec<ElemSet> {
    let mut left = tau;
    let mut out = Vec::new();
    while let Some(s) = left.first() {
        let mut comp = ElemSet::singleton(s);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut next = ElemSet::EMPTY;
            for i in frontier.iter() {
                for j in p.hasse_neighbors(i).inter(tau).minus(comp).iter() {
                    if x.at(j) == x.at(i) {
                        next = next.with(j);
                    }
                }
            }
            comp = comp.union(next);
            frontier = next;
        }
        debug_assert!(p.is_convex(comp));
        out.push(comp);
        left = left.minus(comp);
    }
    out.sort();
    out
}

/// Stratum of a point assumed coherent.
fn stratum(p: &Poset, c: &ConfigPoint) -> Vec<ElemSet> {
    let mut out = Vec::new();
    let mut todo = alloc::vec![p.all()];
    while let Some(t) = todo.pop() {
        for b in b_partition(p, t, &c.comps[&t]) {
            if b.len() > 1 {
                out.push(b);
                todo.push(b);
            }
        }
    }
    out.sort();
    out
}

/// The proper tubing `T(x)` indexing the stratum of a coherent point.
pub fn tubing_of(p: &Poset, c: &ConfigPoint) -> Result<Vec<ElemSet>> {
    check_coherent(p, c)?;
    Ok(stratum(p, c))
}

/// A point of the open face of `Ord(tau)` where exactly the `blocks` are constant.
///
/// Blocks are placed at increasing heights along a linear extension of the
/// quotient; `gaps` (positive, one per block after the first) sets the height
/// differences, defaulting to 1.
pub fn face_interior_point(p: &Poset, tau: ElemSet, blocks: &[ElemSet], gaps: Option<&[Q]>) -> Result<Coords> {
    let mut order: Vec<usize> = Vec::new();
    while order.len() < blocks.len() {
        let next = (0..blocks.len())
            .find(|&b| {
                !order.contains(&b)
                    && (0..blocks.len()).all(|a| {
                        a == b || order.contains(&a) || !blocks[a].iter().any(|i| !p.above(i).is_disjoint(blocks[b]))
                    })
            })
            .ok_or(CompactError::NotATubing)?;
        order.push(next);
    }
    let mut height = alloc::vec![Q::zero(); blocks.len()];
    let mut h = Q::zero();
    for (k, &b) in order.iter().enumerate() {
        if k > 0 {
            h += gaps.and_then(|g| g.get(k - 1)).cloned().unwrap_or_else(one);
        }
        height[b] = h.clone();
    }
    let raw = Coords::from_fn(tau, |i| height[blocks.iter().position(|b| b.contains(i)).unwrap()].clone());
    Ok(p.res(tau, &raw)?)
}

fn check_proper_tubing(p: &Poset, t: &[ElemSet]) -> Result<()> {
    let n = p.len();
    if t.iter().any(|s| s.len() < 2 || s.len() >= n) || !is_tubing(p, t) {
        return Err(CompactError::NotATubing);
    }
    Ok(())
}

/// Fills a full point from interior points on `T ∪ {P}`, each other tube
/// taking `res` of its minimal containing tree tube.
pub fn synthesize(p: &Poset, tubing: &[ElemSet], interior: &BTreeMap<ElemSet, Coords>) -> Result<ConfigPoint> {
    check_proper_tubing(p, tubing)?;
    let tree = TubingTree::new(p, tubing);
    for t in tree.inner_nodes() {
        let x = interior.get(&t).ok_or(CompactError::InvalidComponent(t))?;
        if !p.in_order_polytope(t, x) {
            return Err(CompactError::InvalidComponent(t));
        }
        let mut kids = tree.children_of(t);
        kids.sort();
        if b_partition(p, t, x) != kids {
            return Err(CompactError::WrongFace(t));
        }
    }
    let mut comps = BTreeMap::new();
    for s in enumerate_tubes(p, false).into_iter().filter(|s| s.len() > 1) {
        let par = tree.par(s);
        comps.insert(s, p.res(s, &interior[&par])?);
    }
    Ok(ConfigPoint { comps })
}

/// The canonical point of the stratum of `tubing` (all gaps equal to 1).
pub fn canonical_stratum_point(p: &Poset, tubing: &[ElemSet]) -> Result<ConfigPoint> {
    check_proper_tubing(p, tubing)?;
    let tree = TubingTree::new(p, tubing);
    let mut interior = BTreeMap::new();
    for t in tree.inner_nodes() {
        interior.insert(t, face_interior_point(p, t, &tree.children_of(t), None)?);
    }
    synthesize(p, tubing, &interior)
}

/// `y_i = x_i[P] + Σ_{tau ∋ i} t_tau x_i[tau]` near a stratum point.
///
/// Requires `t_tau > 0`, `t_child <= guard · t_parent` for nested tubes, and
/// a strictly order-preserving result.
pub fn limit_sample(p: &Poset, c: &ConfigPoint, t: &BTreeMap<ElemSet, Q>, guard: &Q) -> Result<Coords> {
    let tubing = stratum(p, c);
    let mut keys: Vec<ElemSet> = t.keys().copied().collect();
    keys.sort();
    if keys != tubing {
        return Err(CompactError::Regime("parameters must be indexed by the stratum tubing"));
    }
    if t.values().any(|v| !v.is_positive()) {
        return Err(CompactError::Regime("parameters must be positive"));
    }
    for (&a, ta) in t {
        for (&b, tb) in t {
            if a != b && a.is_subset(b) && *ta > tb * guard {
                return Err(CompactError::Regime("nested parameters must shrink by the guard factor"));
            }
        }
    }
    let xp = &c.comps[&p.all()];
    let y = Coords::from_fn(p.all(), |i| {
        t.iter()
            .filter(|(s, _)| s.contains(i))
            .fold(xp.at(i).clone(), |acc, (s, ts)| acc + ts * c.comps[s].at(i))
    });
    if !strict(p, &y) {
        return Err(CompactError::Regime("sample is not strictly order preserving"));
    }
    Ok(y)
}

fn require_adjacent(p: &Poset, tubing: &[ElemSet], inner: ElemSet, outer: ElemSet) -> Result<TubingTree> {
    let tree = TubingTree::new(p, tubing);
    if !tubing.contains(&inner) || tree.parent_of(inner) != Some(outer) {
        return Err(CompactError::NotAdjacent { inner, outer });
    }
    Ok(tree)
}

fn t_max_raw(p: &Poset, c: &ConfigPoint, inner: ElemSet, outer: ElemSet) -> TMax {
    let xo = &c.comps[&outer];
    let xi = &c.comps[&inner];
    let mut worst = Q::zero();
    for i in inner.iter() {
        for j in outer.minus(inner).iter() {
            let r = if p.lt(i, j) {
                xi.at(i) / (xo.at(j) - xo.at(i))
            } else if p.lt(j, i) {
                -xi.at(i) / (xo.at(i) - xo.at(j))
            } else {
                continue;
            };
            if r > worst {
                worst = r;
            }
        }
    }
    if worst.is_zero() {
        TMax::Infinite
    } else {
        TMax::Finite(worst.recip())
    }
}

/// Supremum of `t` for which expanding `inner` inside its parent `outer` stays in the open stratum.
pub fn t_max(p: &Poset, c: &ConfigPoint, inner: ElemSet, outer: ElemSet) -> Result<TMax> {
    require_adjacent(p, &stratum(p, c), inner, outer)?;
    Ok(t_max_raw(p, c, inner, outer))
}

fn rebuild(p: &Poset, tubing: &[ElemSet], source: impl Fn(ElemSet) -> Coords) -> Result<ConfigPoint> {
    let tree = TubingTree::new(p, tubing);
    let interior: BTreeMap<ElemSet, Coords> = tree.inner_nodes().into_iter().map(|t| (t, source(t))).collect();
    synthesize(p, tubing, &interior)
}

/// Moves a point off the stratum of `T` into that of `T \ {inner}`.
pub fn expand(p: &Poset, c: &ConfigPoint, inner: ElemSet, outer: ElemSet, t: &Q) -> Result<ConfigPoint> {
    let tubing = stratum(p, c);
    require_adjacent(p, &tubing, inner, outer)?;
    if !t_max_raw(p, c, inner, outer).admits(t) {
        return Err(CompactError::Range);
    }
    if t.is_zero() {
        return Ok(c.clone());
    }
    let xo = &c.comps[&outer];
    let xi = &c.comps[&inner];
    let z = Coords::from_fn(outer, |i| if inner.contains(i) { xo.at(i) + t * xi.at(i) } else { xo.at(i).clone() });
    let al = p.alpha(outer, &z)?;
    let y = Coords::from_fn(outer, |i| z.at(i) / &al);
    let rest: Vec<ElemSet> = tubing.iter().copied().filter(|&s| s != inner).collect();
    rebuild(p, &rest, |s| if s == outer { y.clone() } else { c.comps[&s].clone() })
}

/// Inverse of [`expand`]: returns the point on the stratum containing `inner` and the parameter.
pub fn collapse(p: &Poset, c: &ConfigPoint, inner: ElemSet, outer: ElemSet) -> Result<(ConfigPoint, Q)> {
    let current = stratum(p, c);
    if current.contains(&inner) {
        require_adjacent(p, &current, inner, outer)?;
        return Ok((c.clone(), Q::zero()));
    }
    let mut target = current.clone();
    target.push(inner);
    target.sort();
    if check_proper_tubing(p, &target).is_err() {
        return Err(CompactError::NotInColl("tube is not compatible with the stratum"));
    }
    if outer != p.all() && !current.contains(&outer) {
        return Err(CompactError::NotInColl("parent is not a stratum tube"));
    }
    require_adjacent(p, &target, inner, outer)?;
    let yo = &c.comps[&outer];
    let a = p.avg(inner, yo)?;
    for i in inner.iter() {
        for j in outer.minus(inner).iter() {
            if p.lt(i, j) && a >= *yo.at(j) {
                return Err(CompactError::NotInColl("average not below an upper neighbour"));
            }
            if p.lt(j, i) && *yo.at(j) >= a {
                return Err(CompactError::NotInColl("average not above a lower neighbour"));
            }
        }
    }
    let z = Coords::from_fn(outer, |i| if inner.contains(i) { a.clone() } else { yo.at(i).clone() });
    let az = p.alpha(outer, &z)?;
    if !az.is_positive() {
        return Err(CompactError::NotInColl("collapsed point is degenerate"));
    }
    let xo = Coords::from_fn(outer, |i| z.at(i) / &az);
    let xi = c.comps[&inner].clone();
    let t = p.alpha(inner, yo)? / &az;
    for i in inner.iter() {
        debug_assert_eq!(yo.at(i) / &az, xo.at(i) + &t * xi.at(i));
    }
    let x = rebuild(p, &target, |s| if s == outer { xo.clone() } else { c.comps[&s].clone() })
        .map_err(|_| CompactError::NotInColl("collapsed point leaves the stratum"))?;
    Ok((x, t))
}

fn check_inclusion_order(steps: &[ElemSet]) -> Result<()> {
    for (i, a) in steps.iter().enumerate() {
        for b in &steps[i + 1..] {
            if b.is_subset(*a) {
                return Err(CompactError::OrderViolation);
            }
        }
    }
    Ok(())
}

/// Expands the tubes of `T(c) \ T'` one after another, in the given inclusion order.
pub fn composite_expand(p: &Poset, c: &ConfigPoint, steps: &[(ElemSet, Q)]) -> Result<ConfigPoint> {
    let tubing = stratum(p, c);
    let tubes: Vec<ElemSet> = steps.iter().map(|s| s.0).collect();
    check_inclusion_order(&tubes)?;
    if tubes.iter().any(|t| !tubing.contains(t)) {
        return Err(CompactError::NotATubing);
    }
    let tree = TubingTree::new(p, &tubing);
    let mut cur = c.clone();
    for (k, (tau, t)) in steps.iter().enumerate() {
        let parent = tree.parent_of(*tau).unwrap();
        cur = expand(p, &cur, *tau, parent, t).map_err(|_| CompactError::NotExpandable(k))?;
    }
    Ok(cur)
}

/// Collapses `steps` (tubes of the target tubing, in inclusion order) from last to first.
pub fn composite_collapse(p: &Poset, y: &ConfigPoint, target: &[ElemSet], steps: &[ElemSet]) -> Result<(ConfigPoint, Vec<Q>)> {
    check_inclusion_order(steps)?;
    check_proper_tubing(p, target)?;
    if steps.iter().any(|t| !target.contains(t)) {
        return Err(CompactError::NotATubing);
    }
    let tree = TubingTree::new(p, target);
    let mut cur = y.clone();
    let mut ts = alloc::vec![Q::zero(); steps.len()];
    for k in (0..steps.len()).rev() {
        let parent = tree.parent_of(steps[k]).unwrap();
        let (x, t) = collapse(p, &cur, steps[k], parent).map_err(|_| CompactError::NotCollapsible(k))?;
        cur = x;
        ts[k] = t;
    }
    Ok((cur, ts))
}

/// Prescribed limit of the ratio `|x1 − x2| / |x1 − x4|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioTarget {
    Finite(Q),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioSample {
    pub k: u32,
    pub t: Q,
    /// Coordinates of elements 1, 2, 3, 4.
    pub x: Vec<Q>,
    pub ratio: Q,
    /// Distance of the embedded point from the common limit.
    pub distance: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioCurve {
    pub target: RatioTarget,
    pub samples: Vec<RatioSample>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioDemo {
    pub poset: Poset,
    pub limit: ConfigPoint,
    pub curves: Vec<RatioCurve>,
}

/// The poset `1 < 3 > 2 < 4`.
pub fn n4() -> Poset {
    Poset::from_covers(&[(1, 3), (2, 3), (2, 4)]).expect("N poset")
}

fn ratio_curve_point(target: &RatioTarget, t: &Q) -> Vec<Q> {
    let s = t * t;
    let raw = match target {
        RatioTarget::Finite(r) => {
            let lambda = one() + q(2) * r;
            alloc::vec![-s.clone(), -(lambda * &s), one(), s]
        }
        RatioTarget::Infinite => alloc::vec![-(&s * &s), -s.clone(), one(), &s * &s],
    };
    let mean = raw.iter().fold(Q::zero(), |a, b| a + b) / q(4);
    raw.into_iter().map(|v| v - &mean).collect()
}

/// Curves in the configuration space of `N4` with one common limit in
/// `Comp(N4)` along which `|x1 − x2| / |x1 − x4|` tends to different values.
///
/// Both curves collapse elements 1, 2, 4 onto one level at rate `t²`; the
/// limit is the stratum of the tubing `{24}`.
pub fn ratio_counterexample_demo(targets: &[RatioTarget]) -> Result<RatioDemo> {
    let p = n4();
    let all = p.all();
    let base = Coords::new(all, alloc::vec![Q::zero(), Q::zero(), one(), Q::zero()]);
    let t24 = p.subset(&[2, 4])?;
    let mut interior = BTreeMap::new();
    interior.insert(all, p.res(all, &base)?);
    interior.insert(t24, Coords::new(t24, alloc::vec![crate::rational::qf(-1, 2), crate::rational::qf(1, 2)]));
    let limit = synthesize(&p, &[t24], &interior)?;
    let mut curves = Vec::new();
    for target in targets {
        if let RatioTarget::Finite(r) = target {
            if r.is_negative() {
                return Err(CompactError::Regime("ratio targets must be nonnegative"));
            }
        }
        let mut samples = Vec::new();
        for k in 2..=6u32 {
            let t = pow10_neg(k);
            let x = ratio_curve_point(target, &t);
            let c = embed(&p, &Coords::new(all, x.clone()))?;
            let ratio = (&x[0] - &x[1]).abs() / (&x[0] - &x[3]).abs();
            samples.push(RatioSample {
                k,
                t,
                ratio,
                distance: c.distance(&limit),
                x,
            });
        }
        curves.push(RatioCurve {
            target: target.clone(),
            samples,
        });
    }
    Ok(RatioDemo { poset: p, limit, curves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;
    use alloc::vec;

    fn set(p: &Poset, ids: &[i64]) -> ElemSet {
        p.subset(ids).unwrap()
    }

    fn c4_point() -> (Poset, ConfigPoint) {
        let p = Poset::chain(4);
        let t12 = set(&p, &[1, 2]);
        let mut m = BTreeMap::new();
        m.insert(p.all(), Coords::new(p.all(), vec![qf(-2, 5), qf(-2, 5), qf(1, 5), qf(3, 5)]));
        m.insert(t12, Coords::new(t12, vec![qf(-1, 2), qf(1, 2)]));
        let c = synthesize(&p, &[t12], &m).unwrap();
        (p, c)
    }

    fn c3_point() -> (Poset, ConfigPoint) {
        let p = Poset::chain(3);
        let t12 = set(&p, &[1, 2]);
        let mut m = BTreeMap::new();
        m.insert(p.all(), Coords::new(p.all(), vec![qf(-1, 3), qf(-1, 3), qf(2, 3)]));
        m.insert(t12, Coords::new(t12, vec![qf(-1, 2), qf(1, 2)]));
        (p.clone(), synthesize(&p, &[t12], &m).unwrap())
    }

    #[test]
    fn embed_chain() {
        let p = Poset::chain(3);
        let x = Coords::new(p.all(), vec![qf(-1, 2), q(0), qf(1, 2)]);
        let c = embed(&p, &x).unwrap();
        assert_eq!(c.get(p.all()).unwrap(), &x);
        assert_eq!(c.get(set(&p, &[1, 2])).unwrap().values(), &[qf(-1, 2), qf(1, 2)]);
        assert_eq!(c.get(set(&p, &[2, 3])).unwrap().values(), &[qf(-1, 2), qf(1, 2)]);
        assert!(is_coherent(&p, &c));
        assert!(tubing_of(&p, &c).unwrap().is_empty());
        let weak = Coords::new(p.all(), vec![q(0), q(0), q(1)]);
        assert_eq!(embed(&p, &weak), Err(CompactError::NotStrict));
    }

    #[test]
    fn w5_embedding_has_twelve_components() {
        let p = Poset::from_covers(&[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap();
        let x = Coords::new(p.all(), vec![q(-3), q(-1), q(0), q(1), q(3)]);
        let c = embed(&p, &x).unwrap();
        assert_eq!(c.components().len(), 12);
        assert!(ConfigPoint::new(&p, c.components().clone()).is_ok());
    }

    #[test]
    fn flipped_component_is_incoherent() {
        let p = Poset::chain(3);
        let x = Coords::new(p.all(), vec![qf(-1, 2), q(0), qf(1, 2)]);
        let mut comps = embed(&p, &x).unwrap().components().clone();
        let t12 = set(&p, &[1, 2]);
        comps.insert(t12, Coords::new(t12, vec![qf(1, 2), qf(-1, 2)]));
        let c = ConfigPoint { comps };
        assert_eq!(
            check_coherent(&p, &c),
            Err(CompactError::Incoherent { inner: t12, outer: p.all() })
        );
    }

    #[test]
    fn b_partitions() {
        let p = Poset::chain(3);
        let x = Coords::new(p.all(), vec![qf(-1, 3), qf(-1, 3), qf(2, 3)]);
        assert_eq!(b_partition(&p, p.all(), &x), vec![set(&p, &[3]), set(&p, &[1, 2])]);
        let s = Coords::new(p.all(), vec![qf(-1, 2), q(0), qf(1, 2)]);
        assert_eq!(b_partition(&p, p.all(), &s).len(), 3);
    }

    #[test]
    fn synthesize_example() {
        let (p, c) = c4_point();
        assert_eq!(c.get(set(&p, &[1, 2, 3])).unwrap().values(), &[qf(-1, 3), qf(-1, 3), qf(2, 3)]);
        assert!(is_coherent(&p, &c));
        assert_eq!(tubing_of(&p, &c).unwrap(), vec![set(&p, &[1, 2])]);
        let mut m = BTreeMap::new();
        m.insert(p.all(), Coords::new(p.all(), vec![qf(-3, 6), qf(-1, 6), qf(1, 6), qf(3, 6)]));
        m.insert(set(&p, &[1, 2]), Coords::new(set(&p, &[1, 2]), vec![qf(-1, 2), qf(1, 2)]));
        assert_eq!(synthesize(&p, &[set(&p, &[1, 2])], &m), Err(CompactError::WrongFace(p.all())));
        let t = vec![set(&p, &[1, 2]), set(&p, &[1, 2, 3])];
        let c = canonical_stratum_point(&p, &t).unwrap();
        assert_eq!(tubing_of(&p, &c).unwrap(), t);
    }

    #[test]
    fn limit_sample_example() {
        let (p, c) = c4_point();
        let t12 = set(&p, &[1, 2]);
        let mut t = BTreeMap::new();
        t.insert(t12, qf(1, 100));
        let y = limit_sample(&p, &c, &t, &qf(1, 10)).unwrap();
        assert_eq!(y.values(), &[qf(-2, 5) - qf(1, 200), qf(-2, 5) + qf(1, 200), qf(1, 5), qf(3, 5)]);
        t.insert(t12, q(0));
        assert!(limit_sample(&p, &c, &t, &qf(1, 10)).is_err());
        let mut dist = Vec::new();
        for k in 2..=6 {
            t.insert(t12, pow10_neg(k));
            let y = limit_sample(&p, &c, &t, &qf(1, 10)).unwrap();
            dist.push(embed(&p, &y).unwrap().distance(&c) / pow10_neg(k));
        }
        assert!(dist.iter().all(|d| *d < q(10)));
    }

    #[test]
    fn t_max_examples() {
        let (p, c) = c3_point();
        assert_eq!(t_max(&p, &c, set(&p, &[1, 2]), p.all()).unwrap(), TMax::Finite(q(2)));
        let (p, c) = c4_point();
        assert_eq!(t_max(&p, &c, set(&p, &[1, 2]), p.all()).unwrap(), TMax::Finite(qf(6, 5)));
        assert!(matches!(
            t_max(&p, &c, set(&p, &[2, 3]), p.all()),
            Err(CompactError::NotAdjacent { .. })
        ));
        let k = Poset::claw(3);
        let c = canonical_stratum_point(&k, &[set(&k, &[0, 1])]).unwrap();
        assert_eq!(t_max(&k, &c, set(&k, &[0, 1]), k.all()).unwrap(), TMax::Infinite);
    }

    #[test]
    fn expand_and_collapse() {
        let (p, c) = c3_point();
        let t12 = set(&p, &[1, 2]);
        assert_eq!(expand(&p, &c, t12, p.all(), &q(0)).unwrap(), c);
        let e = expand(&p, &c, t12, p.all(), &q(1)).unwrap();
        assert_eq!(e.get(p.all()).unwrap().values(), &[qf(-5, 9), qf(1, 9), qf(4, 9)]);
        assert!(tubing_of(&p, &e).unwrap().is_empty());
        assert_eq!(collapse(&p, &e, t12, p.all()).unwrap(), (c.clone(), q(1)));
        assert_eq!(collapse(&p, &c, t12, p.all()).unwrap(), (c.clone(), q(0)));
        assert_eq!(expand(&p, &c, t12, p.all(), &q(2)), Err(CompactError::Range));
    }

    #[test]
    fn collapse_rejects_points_outside_domain() {
        let p = Poset::claw(3);
        let x = Coords::new(p.all(), vec![q(0), q(10), q(1), q(1)]);
        let c = embed(&p, &x).unwrap();
        assert!(matches!(
            collapse(&p, &c, set(&p, &[0, 1]), p.all()),
            Err(CompactError::NotInColl(_))
        ));
        let ok = Coords::new(p.all(), vec![q(0), q(1), q(2), q(2)]);
        let c = embed(&p, &ok).unwrap();
        let (x, t) = collapse(&p, &c, set(&p, &[0, 1]), p.all()).unwrap();
        assert!(t.is_positive());
        assert_eq!(expand(&p, &x, set(&p, &[0, 1]), p.all(), &t).unwrap(), c);
    }

    #[test]
    fn composite_round_trip() {
        let p = Poset::chain(4);
        let t = vec![set(&p, &[1, 2]), set(&p, &[1, 2, 3])];
        let c = canonical_stratum_point(&p, &t).unwrap();
        let steps = vec![(t[0], qf(1, 10)), (t[1], qf(1, 5))];
        let y = composite_expand(&p, &c, &steps).unwrap();
        assert!(tubing_of(&p, &y).unwrap().is_empty());
        let (x, ts) = composite_collapse(&p, &y, &t, &[t[0], t[1]]).unwrap();
        assert_eq!(x, c);
        assert_eq!(ts, vec![qf(1, 10), qf(1, 5)]);
        assert_eq!(composite_expand(&p, &c, &[]).unwrap(), c);
        let bad = vec![(t[1], qf(1, 5)), (t[0], qf(1, 10))];
        assert_eq!(composite_expand(&p, &c, &bad), Err(CompactError::OrderViolation));
    }

    #[test]
    fn ratio_demo() {
        let d = ratio_counterexample_demo(&[RatioTarget::Finite(q(0)), RatioTarget::Finite(q(1))]).unwrap();
        let (a, b) = (&d.curves[0].samples[4], &d.curves[1].samples[4]);
        assert_eq!(a.ratio, q(0));
        assert_eq!(b.ratio, q(1));
        assert!(a.distance <= pow10_neg(9) && b.distance <= pow10_neg(9));
        assert_eq!(tubing_of(&d.poset, &d.limit).unwrap(), vec![set(&d.poset, &[2, 4])]);
        let d = ratio_counterexample_demo(&[RatioTarget::Finite(q(1)), RatioTarget::Infinite]).unwrap();
        let inf = &d.curves[1].samples;
        assert!(inf.windows(2).all(|w| w[1].ratio > &w[0].ratio * q(9)));
        let same = ratio_counterexample_demo(&[RatioTarget::Infinite, RatioTarget::Infinite]).unwrap();
        assert_eq!(same.curves[0], same.curves[1]);
    }
}
