use num_traits::{Signed, Zero};
use posetahedra_core::affine::{
    cyclohedron_face_lattice, enumerate_affine_tubes, enumerate_affine_tubings, is_affine_tubing, AffinePoset,
    AffineSystem,
};
use posetahedra_core::compact::{
    canonical_stratum_point, collapse, embed, expand, is_coherent, t_max, tubing_of, TMax,
};
use posetahedra_core::geometry::{realize, realize_poset_associahedron, RealizeOptions};
use posetahedra_core::lattice::associahedron_face_lattice;
use posetahedra_core::rational::{q, qf};
use posetahedra_core::tubing::{enumerate_proper_tubings, enumerate_tubes, is_tubing, TubingTree};
use posetahedra_core::{Coords, ElemSet, Poset, Q};
use proptest::prelude::*;

/// Random connected poset: a spanning tree plus extra edges, oriented by a random height order.
fn poset_strategy(max: usize) -> impl Strategy<Value = (usize, Vec<(i64, i64)>)> {
    (2..=max)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<u32>(), n),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
                proptest::collection::vec((0..n, 0..n), 0..n),
            )
        })
        .prop_map(|(n, parents, height, extra)| {
            let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (parents[k] as usize % k, k)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            let pairs = edges
                .into_iter()
                .map(|(a, b)| if height[a] < height[b] { (a, b) } else { (b, a) })
                .map(|(a, b)| (a as i64 + 1, b as i64 + 1))
                .collect();
            (n, pairs)
        })
}

fn closure(n: usize, pairs: &[(i64, i64)]) -> Vec<Vec<bool>> {
    let mut lt = vec![vec![false; n]; n];
    for &(a, b) in pairs {
        lt[a as usize - 1][b as usize - 1] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if lt[i][k] && lt[k][j] {
                    lt[i][j] = true;
                }
            }
        }
    }
    lt
}

fn brute_tube(n: usize, lt: &[Vec<bool>], s: u64) -> bool {
    let inside = |i: usize| s & (1 << i) != 0;
    let convex = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(inside(a) && inside(c) && lt[a][b] && lt[b][c]) || inside(b))));
    let cover = |a: usize, b: usize| lt[a][b] && !(0..n).any(|c| lt[a][c] && lt[c][b]);
    let Some(start) = (0..n).find(|&i| inside(i)) else { return false };
    let mut seen = 1u64 << start;
    loop {
        let grown = (0..n).fold(seen, |acc, i| {
            if seen & (1 << i) == 0 {
                return acc;
            }
            (0..n).filter(|&j| inside(j) && (cover(i, j) || cover(j, i))).fold(acc, |a, j| a | 1 << j)
        });
        if grown == seen {
            break;
        }
        seen = grown;
    }
    convex && seen == s
}

fn strict_point(p: &Poset, gaps: &[u8]) -> Coords {
    let order = p.linear_extension();
    let mut vals = vec![Q::zero(); p.len()];
    let mut h = Q::zero();
    for (k, &i) in order.iter().enumerate() {
        h += q(1 + gaps[k % gaps.len()] as i64 % 5);
        vals[i] = h.clone();
    }
    Coords::new(p.all(), vals)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn order_and_tubes_match_brute_force((n, pairs) in poset_strategy(7)) {
        let p = Poset::from_covers(&pairs);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        prop_assert_eq!(p.len(), n);
        let lt = closure(n, &pairs);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(p.lt(i, j), lt[i][j]);
            }
        }
        let brute: Vec<ElemSet> = (1u64..1 << n).filter(|&s| brute_tube(n, &lt, s)).map(ElemSet).collect();
        let mut ours = enumerate_tubes(&p, false);
        ours.sort_by_key(|s| s.0);
        prop_assert_eq!(ours, brute);
        for s in 1u64..1 << n {
            prop_assert_eq!(p.is_tube(ElemSet(s)), brute_tube(n, &lt, s));
        }
    }

    #[test]
    fn restriction_normalizes((n, pairs) in poset_strategy(6), xs in proptest::collection::vec(-6i64..6, 6)) {
        let p = Poset::from_covers(&pairs).unwrap();
        let x = Coords::new(p.all(), (0..n).map(|i| q(xs[i])).collect());
        for t in enumerate_tubes(&p, false).into_iter().filter(|t| t.len() > 1) {
            let y = p.proj_sigma0(t, &x).unwrap();
            prop_assert_eq!(p.proj_sigma0(t, &y).unwrap(), y.clone());
            prop_assert!(y.values().iter().fold(Q::zero(), |a, b| a + b).is_zero());
            if let Ok(r) = p.res(t, &x) {
                prop_assert_eq!(p.alpha(t, &r).unwrap(), q(1));
            }
        }
    }

    #[test]
    fn tubing_complex_is_closed_under_subsets((_n, pairs) in poset_strategy(6)) {
        let p = Poset::from_covers(&pairs).unwrap();
        let all = enumerate_proper_tubings(&p, false);
        for t in &all {
            prop_assert!(is_tubing(&p, t));
            for k in 0..t.len() {
                let mut s = t.clone();
                s.remove(k);
                prop_assert!(all.contains(&s));
            }
        }
    }

    #[test]
    fn associahedron_lattices_are_simple_and_eulerian((n, pairs) in poset_strategy(6)) {
        let p = Poset::from_covers(&pairs).unwrap();
        let l = associahedron_face_lattice(&p);
        prop_assert!(l.check_graded().is_ok());
        prop_assert!(l.euler_ok());
        prop_assert!(l.is_simple());
        for (label, &d) in l.labels.iter().zip(&l.dims) {
            if let Some(t) = label {
                prop_assert_eq!(d, n as isize - t.len() as isize - 2);
            }
        }
    }

    #[test]
    fn embedded_points_are_coherent((_n, pairs) in poset_strategy(6), gaps in proptest::collection::vec(any::<u8>(), 1..6)) {
        let p = Poset::from_covers(&pairs).unwrap();
        let c = embed(&p, &strict_point(&p, &gaps)).unwrap();
        prop_assert!(is_coherent(&p, &c));
        prop_assert!(tubing_of(&p, &c).unwrap().is_empty());
    }

    #[test]
    fn strata_round_trip((_n, pairs) in poset_strategy(5), pick in any::<prop::sample::Index>()) {
        let p = Poset::from_covers(&pairs).unwrap();
        let tubings = enumerate_proper_tubings(&p, false);
        let t = pick.get(&tubings).clone();
        let c = canonical_stratum_point(&p, &t).unwrap();
        prop_assert_eq!(tubing_of(&p, &c).unwrap(), t.clone());
        let tree = TubingTree::new(&p, &t);
        for &tau in &t {
            let parent = tree.parent_of(tau).unwrap();
            let tm = t_max(&p, &c, tau, parent).unwrap();
            let s = match &tm {
                TMax::Finite(m) => {
                    prop_assert!(m.is_positive());
                    m / q(2)
                }
                TMax::Infinite => qf(3, 2),
            };
            let y = expand(&p, &c, tau, parent, &s).unwrap();
            let mut rest = t.clone();
            rest.retain(|&u| u != tau);
            prop_assert_eq!(tubing_of(&p, &y).unwrap(), rest);
            prop_assert_eq!(collapse(&p, &y, tau, parent).unwrap(), (c.clone(), s));
        }
    }
}

fn corpus() -> Vec<Poset> {
    let h6 = Poset::from_covers(&[(1, 2), (3, 4), (5, 6), (1, 4), (3, 6), (5, 2)]).unwrap();
    let w5 = Poset::from_covers(&[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap();
    let n4 = Poset::from_covers(&[(1, 3), (2, 3), (2, 4)]).unwrap();
    vec![Poset::chain(4), Poset::claw(3), n4, w5, h6]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_strict_points_embed_coherently(gaps in proptest::collection::vec((1i64..60, 1i64..25), 6)) {
        for p in corpus() {
            let order = p.linear_extension();
            let mut vals = vec![Q::zero(); p.len()];
            let mut h = qf(-7, 3);
            for (k, &i) in order.iter().enumerate() {
                h += qf(gaps[k].0, gaps[k].1);
                vals[i] = h.clone();
            }
            let c = embed(&p, &Coords::new(p.all(), vals)).unwrap();
            prop_assert!(is_coherent(&p, &c));
            prop_assert!(tubing_of(&p, &c).unwrap().is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn realizations_certify((_n, pairs) in poset_strategy(5)) {
        let p = Poset::from_covers(&pairs).unwrap();
        let r = realize_poset_associahedron(&p, &RealizeOptions::default());
        prop_assert!(r.is_ok(), "{:?}", r.err());
    }
}

fn affine_strategy() -> impl Strategy<Value = AffinePoset> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec((1..=n as i64, 1..=n as i64 + 1), 1..2 * n + 1)))
        .prop_filter_map("not strongly connected", |(n, gens)| {
            let gens: Vec<(i64, i64)> = gens.into_iter().map(|(i, d)| (i, i + d)).collect();
            AffinePoset::build(n, &gens).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn affine_posets_are_periodic(a in affine_strategy()) {
        let n = a.order() as i64;
        for i in -3 * n..3 * n {
            prop_assert!(a.lt(i, i + n));
            for j in -3 * n..3 * n {
                prop_assert_eq!(a.lt(i, j), a.lt(i + n, j + n));
                if a.lt(i, j) {
                    prop_assert!(!a.lt(j, i));
                    for k in -3 * n..3 * n {
                        if a.lt(j, k) {
                            prop_assert!(a.lt(i, k));
                        }
                    }
                }
            }
        }
        let phi = a.linear_extension();
        let at = |e: i64| phi[a.residue(e)] + a.level(e) * n;
        for i in -2 * n..2 * n {
            for j in -2 * n..2 * n {
                if a.lt(i, j) {
                    prop_assert!(at(i) < at(j));
                }
            }
        }
        let mut window: Vec<i64> = phi.iter().map(|v| v.rem_euclid(n)).collect();
        window.sort_unstable();
        prop_assert_eq!(window, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn affine_lattices_are_simple_and_eulerian(a in affine_strategy()) {
        let l = cyclohedron_face_lattice(&a);
        prop_assert!(l.check_graded().is_ok());
        prop_assert!(l.euler_ok());
        prop_assert!(l.is_simple());
        let tubes = enumerate_affine_tubes(&a, true);
        prop_assert_eq!(l.f_vector().unwrap().get(a.order().saturating_sub(2)).copied().unwrap_or(1) as usize, if a.order() >= 2 { tubes.len() } else { 1 });
        for t in enumerate_affine_tubings(&a, false) {
            prop_assert!(is_affine_tubing(&a, &t));
        }
    }

    #[test]
    fn affine_realizations_certify(a in affine_strategy()) {
        prop_assume!(a.order() >= 2 && a.order() <= 3);
        let r = realize(&AffineSystem::new(&a), &RealizeOptions::default());
        prop_assert!(r.is_ok(), "{:?}", r.err());
        let r = r.unwrap();
        prop_assert_eq!(r.primal.vertices.len(), enumerate_affine_tubings(&a, true).len());
    }
}
