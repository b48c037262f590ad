//! Affine posets, periodic tubings and the affine poset cyclohedron.
//!
//! Elements are integers; element `e` has residue `(e - 1) mod n` and level
//! `(e - 1) div n`, so the window `1..=n` is level 0. The order is stored as
//! the least strict shift `S[r][s]`: `a < b` iff `a != b` and
//! `level(b) - level(a) >= S[res(a)][res(b)]`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::elemset::ElemSet;
use crate::geometry::{BasePolytope, Chart, FaceTag, Facet, GeometryError, RationalPolytope, TubeSystem};
use crate::lattice::{removal_lattice, tubing_partitions, FaceLattice};
use crate::linalg::affine_dim;
use crate::poset::{Poset, PosetError};
use crate::rational::{centroid, one, q, Q};

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AffineError {
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("generator ({0}, {1}) must start in 1..=n")]
    BadGenerator(i64, i64),
    #[error("relations contain a cycle through {0}")]
    Cycle(i64),
    #[error("not strongly connected: {0} lies below no shift of {1}")]
    NotStronglyConnected(i64, i64),
    #[error("K+ and K- overlap")]
    Overlap,
    #[error("signed pair is empty")]
    EmptyPair,
    #[error("element {0} is outside 1..n-1")]
    OutOfRange(i64),
    #[error("not a tube")]
    NotATube,
    #[error("not a tubing")]
    NotATubing,
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// An `n`-periodic, strongly connected poset on the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePoset {
    n: usize,
    gens: Vec<(i64, i64)>,
    shift: Vec<Vec<i64>>,
    upper: Vec<Vec<i64>>,
    lower: Vec<Vec<i64>>,
}

impl AffinePoset {
    /// Builds the periodic closure of `gens` (pairs `(i, j)`, `i` in `1..=n`) together with `i < i + n`.
    pub fn build(n: usize, gens: &[(i64, i64)]) -> Result<AffinePoset, AffineError> {
        if n == 0 {
            return Err(AffineError::ZeroOrder);
        }
        let ni = n as i64;
        let mut s = alloc::vec![alloc::vec![INF; n]; n];
        for (r, row) in s.iter_mut().enumerate() {
            row[r] = 1;
        }
        for &(i, j) in gens {
            if !(1..=ni).contains(&i) {
                return Err(AffineError::BadGenerator(i, j));
            }
            if i == j {
                return Err(AffineError::Cycle(i));
            }
            let (r, c) = (res(n, i), res(n, j));
            s[r][c] = s[r][c].min(lev(n, j));
        }
        for k in 0..n {
            for a in 0..n {
                if s[a][k] >= INF {
                    continue;
                }
                for b in 0..n {
                    if s[k][b] < INF && s[a][k] + s[k][b] < s[a][b] {
                        s[a][b] = s[a][k] + s[k][b];
                    }
                }
            }
        }
        if let Some(r) = (0..n).find(|&r| s[r][r] <= 0) {
            return Err(AffineError::Cycle(r as i64 + 1));
        }
        for a in 0..n {
            if let Some(b) = (0..n).find(|&b| s[a][b] >= INF) {
                return Err(AffineError::NotStronglyConnected(a as i64 + 1, b as i64 + 1));
            }
        }
        let mut gens = gens.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let mut p = AffinePoset {
            n,
            gens,
            shift: s,
            upper: alloc::vec![Vec::new(); n],
            lower: alloc::vec![Vec::new(); n],
        };
        for r in 0..n {
            for c in 0..n {
                let k = p.shift[r][c];
                let covered = (0..n).any(|t| p.shift[r][t] <= k - p.shift[t][c]);
                if !covered {
                    let b = elem(n, c, k);
                    p.upper[r].push(b);
                    p.lower[c].push(elem(n, r, -k));
                }
            }
        }
        for v in p.upper.iter_mut().chain(p.lower.iter_mut()) {
            v.sort_unstable();
        }
        Ok(p)
    }

    /// `i < i + 1` for all `i`.
    pub fn circular_chain(n: usize) -> AffinePoset {
        let gens: Vec<(i64, i64)> = (1..=n as i64).map(|i| (i, i + 1)).collect();
        Self::build(n, &gens).expect("circular chain")
    }

    /// Periodic closure of `0 < 1, 2, ..., n - 1 < n`.
    pub fn circular_claw(n: usize) -> AffinePoset {
        let ni = n as i64;
        let gens: Vec<(i64, i64)> = (1..ni).flat_map(|k| [(ni, ni + k), (k, ni)]).collect();
        Self::build(n, &gens).expect("circular claw")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(i64, i64)] {
        &self.gens
    }

    pub fn residue(&self, e: i64) -> usize {
        res(self.n, e)
    }

    pub fn level(&self, e: i64) -> i64 {
        lev(self.n, e)
    }

    /// Least `k` with `r + 1 < s + 1 + k n`.
    pub fn min_shift(&self, r: usize, s: usize) -> i64 {
        self.shift[r][s]
    }

    pub fn lt(&self, a: i64, b: i64) -> bool {
        a != b && lev(self.n, b) - lev(self.n, a) >= self.shift[res(self.n, a)][res(self.n, b)]
    }

    pub fn le(&self, a: i64, b: i64) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn upper_covers(&self, a: i64) -> Vec<i64> {
        let d = lev(self.n, a) * self.n as i64;
        self.upper[res(self.n, a)].iter().map(|b| b + d).collect()
    }

    pub fn lower_covers(&self, a: i64) -> Vec<i64> {
        let d = lev(self.n, a) * self.n as i64;
        self.lower[res(self.n, a)].iter().map(|b| b + d).collect()
    }

    /// Covers `i < j` with `i` in the window `1..=n`.
    pub fn window_covers(&self) -> Vec<(i64, i64)> {
        (1..=self.n as i64).flat_map(|i| self.upper_covers(i).into_iter().map(move |j| (i, j))).collect()
    }

    pub fn is_connected(&self, members: &[i64]) -> bool {
        let Some(&start) = members.first() else { return false };
        let mut seen = alloc::vec![start];
        let mut stack = alloc::vec![start];
        while let Some(a) = stack.pop() {
            for b in self.upper_covers(a).into_iter().chain(self.lower_covers(a)) {
                if members.contains(&b) && !seen.contains(&b) {
                    seen.push(b);
                    stack.push(b);
                }
            }
        }
        seen.len() == members.len()
    }

    pub fn is_convex(&self, members: &[i64]) -> bool {
        let n = self.n;
        for &a in members {
            for &b in members {
                if !self.lt(a, b) {
                    continue;
                }
                for t in 0..n {
                    let lo = lev(n, a) + self.shift[res(n, a)][t];
                    let hi = lev(n, b) - self.shift[t][res(n, b)];
                    if (lo..=hi).any(|m| !members.contains(&elem(n, t, m))) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Convex, connected and meeting each residue class at most once.
    pub fn is_tube(&self, members: &[i64]) -> bool {
        let mut rs: Vec<usize> = members.iter().map(|&e| res(self.n, e)).collect();
        rs.sort_unstable();
        rs.dedup();
        rs.len() == members.len() && self.is_connected(members) && self.is_convex(members)
    }

    /// The finite subposet on the members of a tube.
    pub fn tube_poset(&self, members: &[i64]) -> Result<Poset, AffineError> {
        let pairs: Vec<(i64, i64)> = members
            .iter()
            .flat_map(|&a| members.iter().filter(move |&&b| self.lt(a, b)).map(move |&b| (a, b)))
            .collect();
        Ok(Poset::build(members.to_vec(), &pairs)?)
    }

    /// A period-equivariant linear extension, returned on the window `1..=n`.
    ///
    /// Sorts the set `S = {i : i - n < 0, i not< 0}` (one element per residue)
    /// topologically, extends periodically, and shifts so that the window
    /// values sum to `1 + ... + n`.
    pub fn linear_extension(&self) -> Vec<i64> {
        let n = self.n;
        let ni = n as i64;
        let z = res(n, 0);
        let s: Vec<i64> = (0..n).map(|r| elem(n, r, lev(n, 0) + 1 - if r == z { 1 } else { self.shift[r][z] })).collect();
        let mut order: Vec<usize> = Vec::new();
        while order.len() < n {
            let k = (0..n)
                .filter(|k| !order.contains(k))
                .find(|&k| (0..n).all(|j| j == k || order.contains(&j) || !self.lt(s[j], s[k])))
                .expect("S is acyclic");
            order.push(k);
        }
        let mut phi_s = alloc::vec![0i64; n];
        for (pos, &k) in order.iter().enumerate() {
            phi_s[k] = pos as i64 + 1;
        }
        let mut phi: Vec<i64> = (1..=ni)
            .map(|i| {
                let r = res(n, i);
                phi_s[r] + (i - s[r]) / ni * ni
            })
            .collect();
        let total: i64 = phi.iter().sum();
        let shift = (total - ni * (ni + 1) / 2) / ni;
        for v in phi.iter_mut() {
            *v -= shift;
        }
        phi
    }
}

fn res(n: usize, e: i64) -> usize {
    (e - 1).rem_euclid(n as i64) as usize
}

fn lev(n: usize, e: i64) -> i64 {
    (e - 1).div_euclid(n as i64)
}

fn elem(n: usize, r: usize, l: i64) -> i64 {
    r as i64 + 1 + l * n as i64
}

/// A tube up to shifts by `n`: the representative whose minimum lies in `1..=n`, or the whole poset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AffineTube {
    Part(Vec<i64>),
    Whole,
}

impl AffineTube {
    pub fn class_of(n: usize, members: &[i64]) -> AffineTube {
        let mut m = members.to_vec();
        m.sort_unstable();
        let d = lev(n, m[0]) * n as i64;
        AffineTube::Part(m.into_iter().map(|e| e - d).collect())
    }

    pub fn members(&self) -> Option<&[i64]> {
        match self {
            AffineTube::Part(m) => Some(m),
            AffineTube::Whole => None,
        }
    }

    fn len_or(&self, whole: usize) -> usize {
        self.members().map_or(whole, |m| m.len())
    }

    fn residues(&self, n: usize) -> u64 {
        self.members().map_or(u64::MAX, |m| m.iter().fold(0, |acc, &e| acc | 1 << res(n, e)))
    }
}

impl Ord for AffineTube {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AffineTube::Whole, AffineTube::Whole) => Ordering::Equal,
            (AffineTube::Whole, _) => Ordering::Greater,
            (_, AffineTube::Whole) => Ordering::Less,
            (AffineTube::Part(a), AffineTube::Part(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
        }
    }
}

impl PartialOrd for AffineTube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One representative per class of tubes other than the whole poset, in canonical order.
///
/// A tube containing `m` as its minimum is grown from `m` along Hasse edges
/// using elements above `m` with unused residues; at most `n` elements and
/// cover spans bounded by `s` keep every tube within value span `(n - 1) s`.
pub fn enumerate_affine_tubes(a: &AffinePoset, proper_only: bool) -> Vec<AffineTube> {
    let n = a.n;
    let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
    for m in 1..=n as i64 {
        let mut stack = alloc::vec![alloc::vec![m]];
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        seen.insert(alloc::vec![m]);
        while let Some(t) = stack.pop() {
            if t.len() == n {
                continue;
            }
            let used: u64 = t.iter().fold(0, |acc, &e| acc | 1 << res(n, e));
            for &e in &t {
                for b in a.upper_covers(e).into_iter().chain(a.lower_covers(e)) {
                    if b <= m || t.contains(&b) || used & (1 << res(n, b)) != 0 {
                        continue;
                    }
                    let mut u = t.clone();
                    u.push(b);
                    u.sort_unstable();
                    if seen.insert(u.clone()) {
                        stack.push(u);
                    }
                }
            }
        }
        found.extend(seen);
    }
    let mut out: Vec<AffineTube> = found
        .into_iter()
        .filter(|t| a.is_convex(t))
        .filter(|t| !proper_only || t.len() > 1)
        .map(AffineTube::Part)
        .collect();
    out.sort();
    out
}

fn intersecting_shifts(n: usize, x: &[i64], y: &[i64]) -> Vec<i64> {
    let ni = n as i64;
    let mut ds: Vec<i64> = x
        .iter()
        .flat_map(|&p| y.iter().filter(move |&&b| (p - b).rem_euclid(ni) == 0).map(move |&b| (p - b) / ni))
        .collect();
    ds.sort_unstable();
    ds.dedup();
    ds
}

fn shifted(y: &[i64], d: i64, n: usize) -> Vec<i64> {
    y.iter().map(|b| b + d * n as i64).collect()
}

fn subset(x: &[i64], y: &[i64]) -> bool {
    x.iter().all(|e| y.contains(e))
}

/// Every translate of `y` is nested with or disjoint from `x`.
fn classes_compatible(n: usize, x: &[i64], y: &[i64]) -> bool {
    intersecting_shifts(n, x, y).into_iter().all(|d| {
        let ys = shifted(y, d, n);
        subset(x, &ys) || subset(&ys, x)
    })
}

/// Least `d` such that `x -> y + dn` is an edge of `D_T`.
fn min_edge_shift(a: &AffinePoset, x: &[i64], y: &[i64]) -> i64 {
    let n = a.n;
    let bad = intersecting_shifts(n, x, y);
    let mut d = x
        .iter()
        .flat_map(|&p| y.iter().map(move |&b| a.shift[res(n, p)][res(n, b)] + lev(n, p) - lev(n, b)))
        .min()
        .expect("nonempty tubes");
    loop {
        if !bad.contains(&d) && x.iter().any(|&p| y.iter().any(|&b| a.lt(p, b + d * n as i64))) {
            return d;
        }
        d += 1;
    }
}

/// Why a family of classes fails to be a periodic tubing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineTubingViolation {
    NotATube(AffineTube),
    Crossing(AffineTube, AffineTube),
    /// Classes met by a closed walk of total shift `<= 0` in the quotient of `D_T`.
    Cycle(Vec<AffineTube>),
}

/// Checks the periodic tubing conditions; the whole poset may be included.
///
/// A cycle of `D_T` exists iff the quotient graph on classes, weighted by the
/// least shift realizing each edge, has a closed walk of total weight `<= 0`:
/// such a walk returns to `tau - kn` with `k >= 0`, and `tau - kn -> tau` is an
/// edge, while edge sets are closed under increasing the shift.
pub fn check_affine_tubing(a: &AffinePoset, tubes: &[AffineTube]) -> Result<(), AffineTubingViolation> {
    let mut parts: Vec<&AffineTube> = tubes.iter().filter(|t| **t != AffineTube::Whole).collect();
    parts.sort();
    parts.dedup();
    for t in &parts {
        let m = t.members().unwrap();
        if m.is_empty() || !a.is_tube(m) {
            return Err(AffineTubingViolation::NotATube((*t).clone()));
        }
    }
    let k = parts.len();
    for x in 0..k {
        for y in x + 1..k {
            if !classes_compatible(a.n, parts[x].members().unwrap(), parts[y].members().unwrap()) {
                return Err(AffineTubingViolation::Crossing(parts[x].clone(), parts[y].clone()));
            }
        }
    }
    let mut w: Vec<Vec<i64>> = (0..k)
        .map(|x| (0..k).map(|y| min_edge_shift(a, parts[x].members().unwrap(), parts[y].members().unwrap())).collect())
        .collect();
    for m in 0..k {
        for x in 0..k {
            for y in 0..k {
                let via = w[x][m] + w[m][y];
                if via < w[x][y] {
                    w[x][y] = via;
                }
            }
        }
    }
    let on_cycle: Vec<AffineTube> = (0..k).filter(|&x| w[x][x] <= 0).map(|x| parts[x].clone()).collect();
    if !on_cycle.is_empty() {
        return Err(AffineTubingViolation::Cycle(on_cycle));
    }
    Ok(())
}

pub fn is_affine_tubing(a: &AffinePoset, tubes: &[AffineTube]) -> bool {
    check_affine_tubing(a, tubes).is_ok()
}

/// Proper periodic tubings (sets of classes), sorted by size then lexicographically.
pub fn enumerate_affine_tubings(a: &AffinePoset, max_only: bool) -> Vec<Vec<AffineTube>> {
    let tubes = enumerate_affine_tubes(a, true);
    let k = tubes.len();
    let compat: Vec<Vec<bool>> = (0..k)
        .map(|x| (0..k).map(|y| classes_compatible(a.n, tubes[x].members().unwrap(), tubes[y].members().unwrap())).collect())
        .collect();
    let target = a.n - 1;
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        a: &AffinePoset,
        tubes: &[AffineTube],
        compat: &[Vec<bool>],
        from: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<AffineTube>>,
        max_only: bool,
        target: usize,
    ) {
        if !max_only || chosen.len() == target {
            out.push(chosen.iter().map(|&c| tubes[c].clone()).collect());
        }
        if chosen.len() >= target {
            return;
        }
        for k in from..tubes.len() {
            if !chosen.iter().all(|&c| compat[c][k]) {
                continue;
            }
            chosen.push(k);
            let set: Vec<AffineTube> = chosen.iter().map(|&c| tubes[c].clone()).collect();
            if is_affine_tubing(a, &set) {
                rec(a, tubes, compat, k + 1, chosen, out, max_only, target);
            }
            chosen.pop();
        }
    }
    rec(a, &tubes, &compat, 0, &mut chosen, &mut out, max_only, target);
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// Faces of `C(P~)`: proper tubings under reverse inclusion, a face with `k` classes having dimension `n - k - 1`.
pub fn cyclohedron_face_lattice(a: &AffinePoset) -> FaceLattice<Vec<AffineTube>> {
    let n = a.n as isize;
    removal_lattice(n - 1, enumerate_affine_tubings(a, false), |t| n - t.len() as isize - 1)
}

/// The class of `(K- - n) ∪ {0} ∪ K+` in the circular claw of order `n`.
pub fn tube_from_signed_pair(n: usize, plus: &[i64], minus: &[i64]) -> Result<AffineTube, AffineError> {
    let ni = n as i64;
    if let Some(&bad) = plus.iter().chain(minus).find(|&&k| !(1..ni).contains(&k)) {
        return Err(AffineError::OutOfRange(bad));
    }
    if plus.iter().any(|k| minus.contains(k)) {
        return Err(AffineError::Overlap);
    }
    if plus.is_empty() && minus.is_empty() {
        return Err(AffineError::EmptyPair);
    }
    let mut m: Vec<i64> = minus.iter().map(|k| k - ni).collect();
    m.push(0);
    m.extend_from_slice(plus);
    Ok(AffineTube::class_of(n, &m))
}

/// A factor of a face of `C(P~)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceFactor {
    Associahedron(Poset),
    Cyclohedron(AffinePoset),
}

impl FaceFactor {
    pub fn dim(&self) -> usize {
        match self {
            FaceFactor::Associahedron(p) => p.len() - 2,
            FaceFactor::Cyclohedron(a) => a.order() - 1,
        }
    }
}

/// Translate of `inner` contained in `outer`, if any.
fn embed_in(n: usize, inner: &[i64], outer: &[i64]) -> Option<Vec<i64>> {
    intersecting_shifts(n, outer, inner)
        .into_iter()
        .map(|d| shifted(inner, d, n))
        .find(|s| subset(s, outer))
}

/// Children of `outer` (`None` for the whole poset) as representative member lists.
fn children(a: &AffinePoset, tubing: &[AffineTube], outer: Option<&[i64]>) -> Vec<Vec<i64>> {
    let n = a.n;
    let inside: Vec<Vec<i64>> = tubing
        .iter()
        .filter_map(|t| t.members())
        .filter_map(|m| match outer {
            Some(o) if m.len() < o.len() => embed_in(n, m, o),
            Some(_) => None,
            None => Some(m.to_vec()),
        })
        .collect();
    let maximal: Vec<Vec<i64>> = inside
        .iter()
        .filter(|m| !inside.iter().any(|o| o.len() > m.len() && embed_in(n, m, o).is_some()))
        .cloned()
        .collect();
    let covered: u64 = maximal.iter().flatten().fold(0, |acc, &e| acc | 1 << res(n, e));
    let mut out = maximal;
    match outer {
        Some(o) => out.extend(o.iter().filter(|&&e| covered & (1 << res(n, e)) == 0).map(|&e| alloc::vec![e])),
        None => out.extend((0..n).filter(|&r| covered & (1 << r) == 0).map(|r| alloc::vec![r as i64 + 1])),
    }
    out.sort();
    out
}

/// Quotient `P~ / T` obtained by collapsing the root children of a tubing.
pub fn affine_quotient(a: &AffinePoset, tubing: &[AffineTube]) -> Result<AffinePoset, AffineError> {
    if !is_affine_tubing(a, tubing) {
        return Err(AffineError::NotATubing);
    }
    let blocks = children(a, tubing, None);
    let m = blocks.len();
    let mut gens = Vec::new();
    for (k, x) in blocks.iter().enumerate() {
        for (l, y) in blocks.iter().enumerate() {
            if k != l {
                gens.push((k as i64 + 1, l as i64 + 1 + min_edge_shift(a, x, y) * m as i64));
            }
        }
    }
    AffinePoset::build(m, &gens)
}

/// Factors of the face of `C(P~)` labelled by a proper tubing: one associahedron
/// per tube (its quotient by its children) and one cyclohedron for the root.
pub fn affine_face_factors(a: &AffinePoset, tubing: &[AffineTube]) -> Result<Vec<FaceFactor>, AffineError> {
    let mut out = alloc::vec![FaceFactor::Cyclohedron(affine_quotient(a, tubing)?)];
    let mut ts: Vec<&AffineTube> = tubing.iter().collect();
    ts.sort();
    for t in ts {
        let m = t.members().ok_or(AffineError::NotATubing)?;
        let sub = a.tube_poset(m)?;
        let blocks: Vec<ElemSet> = children(a, tubing, Some(m))
            .iter()
            .map(|b| sub.subset(b))
            .collect::<Result<_, _>>()?;
        out.push(FaceFactor::Associahedron(sub.quotient(&blocks)?));
    }
    Ok(out)
}

/// The affine order polytope in the chart of `{Σ = 0}` that drops the last coordinate, centred at the vertex centroid.
///
/// Vertex `k` is the class of the `k`-th maximal proper tube (tag `[[τ]]`),
/// facet `k` the `k`-th window cover between different residues (tag `[[i, j]]`).
pub fn affine_order_polytope(a: &AffinePoset, c: &Q) -> Result<RationalPolytope, GeometryError> {
    let n = a.n;
    let nq = q(n as i64);
    let maximal: Vec<Vec<i64>> = enumerate_affine_tubes(a, false)
        .into_iter()
        .filter_map(|t| t.members().filter(|m| m.len() == n).map(|m| m.to_vec()))
        .collect();
    let ambient: Vec<Vec<Q>> = maximal
        .iter()
        .map(|m| {
            let mut lv = alloc::vec![0i64; n];
            for &e in m {
                lv[res(n, e)] = lev(n, e);
            }
            let mean = q(lv.iter().sum::<i64>()) / &nq;
            lv.iter().map(|&l| (&mean - q(l)) * c).collect()
        })
        .collect();
    let vtags: Vec<FaceTag> = maximal.iter().map(|m| alloc::vec![m.clone()]).collect();
    let refs: Vec<&[Q]> = ambient.iter().map(|v| v.as_slice()).collect();
    let origin = centroid(&refs);
    let d = n - 1;
    let basis: Vec<Vec<Q>> = (0..d)
        .map(|k| (0..n).map(|j| if j == k { one() } else if j == d { -one() } else { Q::zero() }).collect())
        .collect();
    let vertices: Vec<Vec<Q>> = ambient.iter().map(|x| (0..d).map(|k| &x[k] - &origin[k]).collect()).collect();
    let covers: Vec<(i64, i64)> = a.window_covers().into_iter().filter(|&(i, j)| res(n, i) != res(n, j)).collect();
    let facets: Vec<Facet> = covers
        .iter()
        .map(|&(i, j)| {
            let (r, s) = (res(n, i), res(n, j));
            Facet {
                normal: basis.iter().map(|b| &b[r] - &b[s]).collect(),
                offset: q(lev(n, j)) * c - (&origin[r] - &origin[s]),
            }
        })
        .collect();
    let ftags: Vec<FaceTag> = covers.iter().map(|&(i, j)| alloc::vec![alloc::vec![i, j]]).collect();
    let poly = RationalPolytope::new(Chart { origin, basis }, vertices, facets, vtags, ftags);
    let pts: Vec<&[Q]> = poly.vertices.iter().map(|v| v.as_slice()).collect();
    if affine_dim(&pts) != d as isize {
        return Err(GeometryError::Degenerate);
    }
    poly.certify()?;
    Ok(poly)
}

/// An affine poset viewed as a [`TubeSystem`] over tube classes.
pub struct AffineSystem<'a> {
    a: &'a AffinePoset,
    all: Vec<AffineTube>,
    parts: RefCell<BTreeMap<AffineTube, Vec<Vec<AffineTube>>>>,
}

impl<'a> AffineSystem<'a> {
    pub fn new(a: &'a AffinePoset) -> Self {
        AffineSystem {
            a,
            all: enumerate_affine_tubes(a, false),
            parts: RefCell::new(BTreeMap::new()),
        }
    }

    fn whole_partitions(&self) -> Vec<Vec<AffineTube>> {
        let n = self.a.n;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let masks: Vec<u64> = self.all.iter().map(|t| t.residues(n)).collect();
        let mut out = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        fn rec(all: &[AffineTube], masks: &[u64], full: u64, used: u64, cur: &mut Vec<usize>, out: &mut Vec<Vec<AffineTube>>) {
            if used == full {
                out.push(cur.iter().map(|&k| all[k].clone()).collect());
                return;
            }
            let r = (!used).trailing_zeros();
            for k in 0..all.len() {
                if masks[k] & (1 << r) != 0 && masks[k] & used == 0 {
                    cur.push(k);
                    rec(all, masks, full, used | masks[k], cur, out);
                    cur.pop();
                }
            }
        }
        rec(&self.all, &masks, full, 0, &mut cur, &mut out);
        out.into_iter()
            .filter(|p| is_affine_tubing(self.a, p))
            .map(|mut p| {
                p.sort();
                p
            })
            .collect()
    }
}

impl TubeSystem for AffineSystem<'_> {
    type Tube = AffineTube;

    fn rank(&self) -> usize {
        self.a.n
    }

    fn dim(&self) -> usize {
        self.a.n - 1
    }

    fn whole(&self) -> AffineTube {
        AffineTube::Whole
    }

    fn singletons(&self) -> Vec<AffineTube> {
        (1..=self.a.n as i64).map(|i| AffineTube::Part(alloc::vec![i])).collect()
    }

    fn proper_tubes(&self) -> Vec<AffineTube> {
        self.all.iter().filter(|t| t.len_or(0) > 1).cloned().collect()
    }

    fn size(&self, t: &AffineTube) -> usize {
        t.len_or(self.a.n)
    }

    fn is_subtube(&self, inner: &AffineTube, outer: &AffineTube) -> bool {
        match (inner.members(), outer.members()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => embed_in(self.a.n, x, y).is_some(),
        }
    }

    fn strict_partitions(&self, t: &AffineTube) -> Vec<Vec<AffineTube>> {
        if let Some(r) = self.parts.borrow().get(t) {
            return r.clone();
        }
        let n = self.a.n;
        let r: Vec<Vec<AffineTube>> = match t.members() {
            None => self.whole_partitions(),
            Some(m) if m.len() < 2 => Vec::new(),
            Some(m) => {
                let sub = self.a.tube_poset(m).expect("tube subposet");
                tubing_partitions(&sub, sub.all())
                    .into_iter()
                    .filter(|b| b.len() >= 2)
                    .map(|b| {
                        let mut v: Vec<AffineTube> = b.iter().map(|&s| AffineTube::class_of(n, &sub.ids_of(s))).collect();
                        v.sort();
                        v
                    })
                    .collect()
            }
        };
        self.parts.borrow_mut().insert(t.clone(), r.clone());
        r
    }

    fn is_tubing(&self, tubes: &[AffineTube]) -> bool {
        is_affine_tubing(self.a, tubes)
    }

    fn tag(&self, t: &AffineTube) -> Vec<i64> {
        t.members().map_or_else(Vec::new, |m| m.to_vec())
    }

    fn base_polytope(&self) -> Result<BasePolytope<AffineTube>, GeometryError> {
        let n = self.a.n;
        let polytope = affine_order_polytope(self.a, &one())?;
        let vertex_tubings = polytope
            .vertex_tags
            .iter()
            .map(|t| alloc::vec![AffineTube::Part(t[0].clone()), AffineTube::Whole])
            .collect();
        let facet_tubings = polytope
            .facet_tags
            .iter()
            .map(|t| {
                let pair = &t[0];
                let mut v = alloc::vec![AffineTube::class_of(n, pair), AffineTube::Whole];
                let used: Vec<usize> = pair.iter().map(|&e| res(n, e)).collect();
                v.extend((0..n).filter(|r| !used.contains(r)).map(|r| AffineTube::Part(alloc::vec![r as i64 + 1])));
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
