//! Reproducibility harness: the acceptance suite over the desk corpus.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use posetahedra_core::affine::{cyclohedron_face_lattice, enumerate_affine_tubes, AffinePoset, AffineSystem};
use posetahedra_core::compact::{
    canonical_stratum_point, collapse, expand, is_coherent, ratio_counterexample_demo, t_max, tubing_of, RatioTarget,
    TMax,
};
use posetahedra_core::geometry::{realize, realize_poset_associahedron, AssociahedronRealization, RealizeOptions};
use posetahedra_core::lattice::{associahedron_face_lattice, face_product_decomposition, order_polytope_face_lattice};
use posetahedra_core::linalg::affine_dim;
use posetahedra_core::rational::{pow10_neg, q, qf, to_pq};
use posetahedra_core::tubing::{
    check_tubing, enumerate_plane_trees, enumerate_proper_tubings, enumerate_tubes, is_tubing,
    tubing_from_ordered_set_partition, tubing_from_plane_tree, TubingTree, TubingViolation,
};
use posetahedra_core::{ElemSet, FaceLattice, Poset, Q};

use crate::corpus;
use crate::formats::tube_ids;

type Check = Result<String, String>;

#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Duration,
    pub run: fn(&RealizeOptions) -> Check,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.3}s, budget {}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { id: 1, name: "pentagon oracle", budget: s(1), run: pentagon },
        Criterion { id: 2, name: "hexagon oracle", budget: s(1), run: hexagon },
        Criterion { id: 3, name: "N4 pentagon", budget: s(1), run: n4_pentagon },
        Criterion { id: 4, name: "W5 melting", budget: s(10), run: w5_melting },
        Criterion { id: 5, name: "associahedron ladder", budget: s(60), run: chain_ladder },
        Criterion { id: 6, name: "permutohedron ladder", budget: s(60), run: claw_ladder },
        Criterion { id: 7, name: "flagness counterexample", budget: s(1), run: flagness },
        Criterion { id: 8, name: "affine oracles", budget: s(60), run: affine_oracles },
        Criterion { id: 9, name: "compactification suite", budget: s(300), run: compactification },
        Criterion { id: 10, name: "ratio demo", budget: s(1), run: ratio_demo },
        Criterion { id: 11, name: "Euler and simplicity", budget: s(300), run: euler_and_simplicity },
    ]
}

/// Runs one criterion; exceeding the time budget counts as a failure.
pub fn run_criterion(c: &Criterion, opts: &RealizeOptions) -> Outcome {
    let start = Instant::now();
    let result = (c.run)(opts);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > c.budget {
        passed = false;
        detail = format!("over time budget; {}", detail);
    }
    Outcome {
        id: c.id,
        name: c.name,
        passed,
        detail,
        elapsed,
        budget: c.budget,
    }
}

pub fn run_all(opts: &RealizeOptions) -> Vec<Outcome> {
    criteria().iter().map(|c| run_criterion(c, opts)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn f_vector<L: Ord + Clone>(l: &FaceLattice<L>) -> Result<Vec<u64>, String> {
    l.f_vector().map_err(|e| e.to_string())
}

fn realize_assoc(p: &Poset, opts: &RealizeOptions) -> Result<AssociahedronRealization, String> {
    realize_poset_associahedron(p, opts).map_err(|e| e.to_string())
}

/// Every vertex sits on exactly the facets of its tubing's tubes.
fn incidence_matches(p: &Poset, r: &AssociahedronRealization) -> Result<(), String> {
    let re = &r.realization;
    let primal = &re.primal;
    let mut maximal = enumerate_proper_tubings(p, true);
    maximal.sort();
    let mut got = re.vertex_tubings.clone();
    got.sort();
    ensure(got == maximal, || "vertices are not the maximal proper tubings".into())?;
    for (v, t) in re.vertex_tubings.iter().enumerate() {
        for (f, tube) in re.facet_tubes.iter().enumerate() {
            ensure(primal.incidence[v][f] == t.contains(tube), || {
                format!("vertex {:?} and facet {:?}", t, tube_ids(p, *tube))
            })?;
        }
    }
    Ok(())
}

fn pentagon(opts: &RealizeOptions) -> Check {
    let p = corpus::poset("chain4").ok_or("missing chain4")?;
    let f = f_vector(&associahedron_face_lattice(&p))?;
    ensure(f == [5, 5, 1], || format!("f-vector {}", fmt_vec(&f)))?;
    let r = realize_assoc(&p, opts)?;
    incidence_matches(&p, &r)?;
    Ok(format!("f-vector {}; 5x5 incidence matches", fmt_vec(&f)))
}

fn hexagon(opts: &RealizeOptions) -> Check {
    let p = corpus::poset("claw3").ok_or("missing claw3")?;
    let f = f_vector(&associahedron_face_lattice(&p))?;
    ensure(f == [6, 6, 1], || format!("f-vector {}", fmt_vec(&f)))?;
    let r = realize_assoc(&p, opts)?;
    incidence_matches(&p, &r)?;
    Ok(format!("f-vector {}; 6 = 3! realized vertices", fmt_vec(&f)))
}

fn n4_pentagon(opts: &RealizeOptions) -> Check {
    let p = corpus::poset("n4").ok_or("missing n4")?;
    let maximal = enumerate_proper_tubings(&p, true).len();
    let tubes = enumerate_tubes(&p, true).len();
    ensure(maximal == 5 && tubes == 5, || format!("{} maximal tubings, {} proper tubes", maximal, tubes))?;
    let f = f_vector(&associahedron_face_lattice(&p))?;
    ensure(f == [5, 5, 1], || format!("f-vector {}", fmt_vec(&f)))?;
    let r = realize_assoc(&p, opts)?;
    incidence_matches(&p, &r)?;
    Ok("5 maximal proper tubings, 5 proper tubes, realized pentagon".into())
}

fn w5_melting(opts: &RealizeOptions) -> Check {
    let p = corpus::poset("w5").ok_or("missing w5")?;
    let r = realize_assoc(&p, opts)?;
    let primal = r.primal();
    ensure(primal.dim() == 3 && primal.facets.len() == 11, || {
        format!("dimension {}, {} facets", primal.dim(), primal.facets.len())
    })?;
    let melted: BTreeSet<Vec<i64>> = r
        .realization
        .melt_log
        .iter()
        .filter(|m| m.size >= 3)
        .map(|m| m.tube.clone())
        .collect();
    let expected: BTreeSet<Vec<i64>> =
        [vec![1, 2, 3, 4], vec![2, 3, 4, 5], vec![1, 2, 3], vec![2, 3, 4], vec![2, 4, 5], vec![3, 4, 5]]
            .into_iter()
            .collect();
    ensure(melted == expected, || format!("melted sets {:?}", melted))?;
    incidence_matches(&p, &r)?;
    // Every face: its tight vertices are the vertices whose tubing contains
    // the face's tubing, and they span the predicted dimension.
    let re = &r.realization;
    let mut exceptions = 0usize;
    let mut faces = 0usize;
    for (label, &d) in r.lattice.labels.iter().zip(&r.lattice.dims) {
        let Some(t) = label else { continue };
        faces += 1;
        let facets: Vec<usize> = t
            .iter()
            .map(|tube| re.facet_tubes.iter().position(|x| x == tube).unwrap_or(usize::MAX))
            .collect();
        if facets.contains(&usize::MAX) {
            exceptions += 1;
            continue;
        }
        let tight: Vec<usize> = (0..primal.vertices.len())
            .filter(|&v| facets.iter().all(|&f| primal.incidence[v][f]))
            .collect();
        let combinatorial: Vec<usize> = (0..primal.vertices.len())
            .filter(|&v| t.iter().all(|tube| re.vertex_tubings[v].contains(tube)))
            .collect();
        let pts: Vec<&[Q]> = tight.iter().map(|&v| primal.vertices[v].as_slice()).collect();
        if tight != combinatorial || affine_dim(&pts) != d {
            exceptions += 1;
        }
    }
    ensure(exceptions == 0, || format!("{} face exceptions", exceptions))?;
    Ok(format!("3-dimensional, 11 facets, melted {{1234,2345,123,234,245,345}}, {} faces certified", faces))
}

/// f-vector of a complex whose faces have the given dimensions.
fn f_from_dims(dims: impl Iterator<Item = usize>, top: usize) -> Vec<u64> {
    let mut f = vec![0u64; top + 1];
    for d in dims {
        f[d] += 1;
    }
    f
}

fn chain_ladder(_: &RealizeOptions) -> Check {
    let mut out = Vec::new();
    for (n, catalan) in [(4usize, 5u64), (5, 14), (6, 42)] {
        let p = corpus::poset(&format!("chain{}", n)).ok_or("missing chain")?;
        let trees = enumerate_plane_trees(n);
        let mut images = Vec::new();
        for t in &trees {
            images.push(tubing_from_plane_tree(t).map_err(|e| e.to_string())?);
        }
        images.sort();
        let mut all = enumerate_proper_tubings(&p, false);
        all.sort();
        ensure(images == all, || format!("plane trees do not biject onto tubings of C{}", n))?;
        let top = n - 2;
        let expected = f_from_dims(trees.iter().map(|t| top - t.inner_count()), top);
        let f = f_vector(&associahedron_face_lattice(&p))?;
        ensure(f == expected && f[0] == catalan, || {
            format!("C{}: f-vector {} vs plane trees {}", n, fmt_vec(&f), fmt_vec(&expected))
        })?;
        out.push(format!("C{}: {}", n, fmt_vec(&f)));
    }
    Ok(out.join("; "))
}

/// Ordered set partitions of `1..=n`.
fn ordered_set_partitions(n: usize) -> Vec<Vec<Vec<i64>>> {
    fn rec(rest: &[i64], cur: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let k = rest.len();
        for mask in 1u32..(1 << k) {
            let block: Vec<i64> = (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| rest[i]).collect();
            let left: Vec<i64> = (0..k).filter(|&i| mask & (1 << i) == 0).map(|i| rest[i]).collect();
            cur.push(block);
            rec(&left, cur, out);
            cur.pop();
        }
    }
    let items: Vec<i64> = (1..=n as i64).collect();
    let mut out = Vec::new();
    rec(&items, &mut Vec::new(), &mut out);
    out
}

fn claw_ladder(_: &RealizeOptions) -> Check {
    let mut out = Vec::new();
    for n in 3..=5usize {
        let p = corpus::poset(&format!("claw{}", n)).ok_or("missing claw")?;
        let parts = ordered_set_partitions(n);
        let mut images = Vec::new();
        let mut maximal = 0u64;
        for b in &parts {
            images.push(tubing_from_ordered_set_partition(n, b).map_err(|e| e.to_string())?);
            if b.len() == n {
                maximal += 1;
            }
        }
        images.sort();
        let mut all = enumerate_proper_tubings(&p, false);
        all.sort();
        ensure(images == all, || format!("ordered partitions do not biject onto tubings of claw{}", n))?;
        let factorial: u64 = (1..=n as u64).product();
        let f = f_vector(&associahedron_face_lattice(&p))?;
        ensure(f[0] == factorial && maximal == factorial, || format!("claw{}: {} vertices", n, f[0]))?;
        out.push(format!("claw{}: {} = {}!", n, f[0], n));
    }
    Ok(out.join("; "))
}

fn flagness(_: &RealizeOptions) -> Check {
    let p = corpus::poset("h6").ok_or("missing h6")?;
    let tubes: Vec<ElemSet> = [[1, 2], [3, 4], [5, 6]]
        .iter()
        .map(|t| p.subset(t).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    for a in 0..3 {
        for b in a + 1..3 {
            ensure(is_tubing(&p, &[tubes[a], tubes[b]]), || format!("pair {} {} incompatible", a, b))?;
        }
    }
    let Err(TubingViolation::Cycle(cycle)) = check_tubing(&p, &tubes) else {
        return Err("triple is not rejected with a cycle".into());
    };
    ensure(cycle.len() == 3, || format!("cycle of length {}", cycle.len()))?;
    // Certify each edge straight from the order relation.
    for k in 0..3 {
        let (a, b) = (cycle[k], cycle[(k + 1) % 3]);
        let edge = a.is_disjoint(b) && a.iter().any(|i| b.iter().any(|j| p.lt(i, j)));
        ensure(edge, || format!("{:?} -> {:?} is not an edge", tube_ids(&p, a), tube_ids(&p, b)))?;
    }
    let shown: Vec<String> = cycle.iter().map(|&t| format!("{:?}", tube_ids(&p, t))).collect();
    Ok(format!("pairwise compatible; 3-cycle {}", shown.join(" -> ")))
}

fn affine_oracles(opts: &RealizeOptions) -> Check {
    let f = |name: &str| -> Result<(AffinePoset, Vec<u64>), String> {
        let a = corpus::affine_poset(name).ok_or(format!("missing {}", name))?;
        let f = f_vector(&cyclohedron_face_lattice(&a))?;
        Ok((a, f))
    };
    let (_, cc3) = f("cchain3")?;
    ensure(cc3 == [6, 6, 1], || format!("CC3 f-vector {}", fmt_vec(&cc3)))?;
    let (_, ck3) = f("cclaw3")?;
    ensure(ck3 == [8, 8, 1], || format!("CK3 f-vector {}", fmt_vec(&ck3)))?;
    let mut counts = Vec::new();
    for n in 2..=4usize {
        let (a, fv) = f(&format!("cclaw{}", n))?;
        let expected = (1u64 << (n - 1)) * (1..n as u64).product::<u64>();
        let r = realize(&AffineSystem::new(&a), opts).map_err(|e| e.to_string())?;
        ensure(fv[0] == expected && r.primal.vertices.len() as u64 == expected, || {
            format!("CK{}: {} lattice and {} realized vertices", n, fv[0], r.primal.vertices.len())
        })?;
        counts.push(expected);
    }
    Ok(format!("CC3 6 6 1; CK3 8 8 1; CK2..CK4 vertices {}", fmt_vec(&counts)))
}

/// Smallest member of `T ∪ {P}` containing `s`.
fn tree_parent(p: &Poset, tubing: &[ElemSet], s: ElemSet) -> ElemSet {
    tubing
        .iter()
        .copied()
        .filter(|t| s.is_subset(*t))
        .min_by_key(|t| t.len())
        .unwrap_or(p.all())
}

fn compactification_on(p: &Poset) -> Result<usize, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let tubes: Vec<ElemSet> = enumerate_tubes(p, false).into_iter().filter(|t| t.len() > 1).collect();
    let mut checks = 0usize;
    for tubing in enumerate_proper_tubings(p, false) {
        let c = canonical_stratum_point(p, &tubing).map_err(|e| err(&e))?;
        ensure(tubing_of(p, &c).map_err(|e| err(&e))? == tubing, || format!("stratum of {:?}", tubing))?;
        ensure(is_coherent(p, &c), || format!("incoherent point for {:?}", tubing))?;
        for &s in &tubes {
            if s == p.all() || tubing.contains(&s) {
                continue;
            }
            let par = tree_parent(p, &tubing, s);
            let xp = c.get(par).ok_or("missing component")?;
            let al = p.alpha(s, xp).map_err(|e| err(&e))?;
            ensure(al > q(0), || format!("alpha of {:?} not positive", s))?;
            ensure(Some(&p.res(s, xp).map_err(|e| err(&e))?) == c.get(s), || {
                format!("reconstruction of {:?}", tube_ids(p, s))
            })?;
        }
        let dims: usize = face_product_decomposition(p, &tubing)
            .map_err(|e| err(&e))?
            .iter()
            .map(|f| f.len() - 2)
            .sum();
        ensure(dims + tubing.len() + 2 == p.len(), || format!("dimension identity for {:?}", tubing))?;
        let tree = TubingTree::new(p, &tubing);
        for &tau in &tubing {
            let parent = tree.parent_of(tau).ok_or("tube without parent")?;
            let ts: Vec<Q> = match t_max(p, &c, tau, parent).map_err(|e| err(&e))? {
                TMax::Finite(m) => {
                    ensure(m > q(0), || "t_max is not positive".into())?;
                    vec![&m / q(4), &m / q(2), &m * qf(3, 4)]
                }
                TMax::Infinite => vec![qf(1, 2), q(1), q(7)],
            };
            let mut rest = tubing.clone();
            rest.retain(|&u| u != tau);
            for t in ts {
                let y = expand(p, &c, tau, parent, &t).map_err(|e| err(&e))?;
                ensure(tubing_of(p, &y).map_err(|e| err(&e))? == rest, || "expanded stratum".into())?;
                let back = collapse(p, &y, tau, parent).map_err(|e| err(&e))?;
                ensure(back == (c.clone(), t), || format!("round trip at {:?}", tube_ids(p, tau)))?;
                checks += 1;
            }
        }
    }
    Ok(checks)
}

fn compactification(_: &RealizeOptions) -> Check {
    let mut out = Vec::new();
    let mut total = 0usize;
    for (name, p) in corpus::posets().into_iter().filter(|(_, p)| p.len() <= 6) {
        let n = compactification_on(&p).map_err(|e| format!("{}: {}", name, e))?;
        total += n;
        out.push(name);
    }
    Ok(format!("{} round trips over {}", total, out.join(",")))
}

fn abs_diff(a: &Q, b: &Q) -> Q {
    if a > b {
        a - b
    } else {
        b - a
    }
}

fn ratio_demo(_: &RealizeOptions) -> Check {
    let targets = [RatioTarget::Finite(q(0)), RatioTarget::Finite(q(1))];
    let demo = ratio_counterexample_demo(&targets).map_err(|e| e.to_string())?;
    let p = &demo.poset;
    let t24 = p.subset(&[2, 4]).map_err(|e| e.to_string())?;
    ensure(tubing_of(p, &demo.limit).map_err(|e| e.to_string())? == vec![t24], || "limit stratum".into())?;
    let bound = pow10_neg(9);
    let mut last = Vec::new();
    for (curve, target) in demo.curves.iter().zip(&targets) {
        let ks: Vec<u32> = curve.samples.iter().map(|s| s.k).collect();
        ensure(ks == [2, 3, 4, 5, 6], || format!("sampled at k = {:?}", ks))?;
        let end = curve.samples.last().ok_or("no samples")?;
        ensure(end.t == pow10_neg(6), || "last sample is not t = 10^-6".into())?;
        ensure(end.distance <= bound, || format!("distance {} at t = 10^-6", to_pq(&end.distance)))?;
        ensure(curve.samples.windows(2).all(|w| w[1].distance <= w[0].distance), || "distance grows".into())?;
        let RatioTarget::Finite(r) = target else { unreachable!() };
        let gap = abs_diff(&end.ratio, r);
        ensure(gap < qf(1, 100), || format!("ratio {} far from {}", to_pq(&end.ratio), to_pq(r)))?;
        last.push(end.ratio.clone());
    }
    let spread = abs_diff(&last[0], &last[1]);
    ensure(spread >= qf(1, 2), || format!("ratio limits differ by {}", to_pq(&spread)))?;
    Ok(format!("common limit in stratum {{24}}; ratios at t = 10^-6: {} and {}", to_pq(&last[0]), to_pq(&last[1])))
}

fn euler_and_simplicity(_: &RealizeOptions) -> Check {
    let mut count = 0usize;
    for (name, p) in corpus::posets() {
        let l = associahedron_face_lattice(&p);
        l.check_graded().map_err(|e| format!("{}: {}", name, e))?;
        ensure(l.euler_ok() && l.is_simple() && l.dim == p.len() as isize - 2, || {
            format!("A({}) fails Euler or simplicity", name)
        })?;
        let o = order_polytope_face_lattice(&p);
        ensure(o.check_graded().is_ok() && o.euler_ok(), || format!("Ord({}) fails Euler", name))?;
        count += 2;
    }
    for (name, a) in corpus::affine_posets() {
        let l = cyclohedron_face_lattice(&a);
        l.check_graded().map_err(|e| format!("{}: {}", name, e))?;
        ensure(l.euler_ok() && l.is_simple(), || format!("C({}) fails Euler or simplicity", name))?;
        let facets = l.dims.iter().filter(|&&d| d == l.dim - 1).count();
        ensure(enumerate_affine_tubes(&a, true).len() == facets, || {
            format!("C({}) facets differ from proper tube classes", name)
        })?;
        count += 1;
    }
    Ok(format!("{} lattices", count))
}
