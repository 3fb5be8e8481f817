use std::collections::{BTreeMap, BTreeSet};

use asmsym_core::acg::{
    acg_isomorphic, acg_stabilizer, active_constraint_graph, canonical_form, enumerate_acg_orbits, independent_edge_count,
    AcgFilter, ActiveConstraintGraph,
};
use asmsym_core::assembly::{strict_congruence_group, waut, AssemblyConfiguration, Bunch, SystemShape, Waut};
use asmsym_core::atlas::{
    assembly_forest, assembly_paths, build_atlas, coarse_assembly_paths, fundamental_domain, unreduced_layer, AtlasOptions,
    MAX_CHAIN_LENGTH,
};
use asmsym_core::cayley::{convex_cayley_check, two_sum_components, two_tree_polytope, EdgeKind, Interval};
use asmsym_core::egf::{fixed_counts_on_orbits, solve_base_egf, RationalSeries};
use asmsym_core::graph::Graph;
use asmsym_core::permgroup::{subgroups, PermGroup, Permutation};
use asmsym_core::real::Real;
use asmsym_core::treecount::{enumerate_trees, pathway_census, t_bar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn perm(d: usize) -> impl Strategy<Value = Permutation> {
    Just((0..d).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|p| Permutation::from_images(p).unwrap())
}

fn group() -> impl Strategy<Value = PermGroup> {
    (2usize..=6).prop_flat_map(|d| prop::collection::vec(perm(d), 1..=2).prop_map(move |g| PermGroup::closure(&g, d).unwrap()))
}

fn series() -> impl Strategy<Value = RationalSeries> {
    prop::collection::vec((-5i64..=5, 1i64..=4), 1..6).prop_map(|cs| {
        let mut coeffs: Vec<BigRational> = cs.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect();
        coeffs[0] = BigRational::from_integer(0.into());
        RationalSeries::from_coeffs(8, coeffs)
    })
}

/// Four to six unit spheres on a grid of spacing 2.1, so every pair is
/// either in contact or well apart.
fn grid_configuration() -> impl Strategy<Value = AssemblyConfiguration> {
    let cells: Vec<(i64, i64, i64)> = (0..3).flat_map(|x| (0..3).flat_map(move |y| (0..2).map(move |z| (x, y, z)))).collect();
    (Just(cells).prop_shuffle(), 4usize..=6, prop::collection::vec(prop::bool::ANY, 6)).prop_map(|(cells, k, colors)| {
        let step = Real::ratio(21, 10);
        let bunches = cells[..k]
            .iter()
            .zip(&colors)
            .map(|(&(x, y, z), &b)| {
                let at = [Real::int(x) * step.clone(), Real::int(y) * step.clone(), Real::int(z) * step.clone()];
                Bunch::sphere(at, if b { "a" } else { "b" }, Real::one(), Real::ratio(1, 10))
            })
            .collect();
        AssemblyConfiguration::validated(bunches).unwrap()
    })
}

fn acg_on(n: usize) -> impl Strategy<Value = ActiveConstraintGraph> {
    let pairs = n * (n - 1) / 2;
    prop::collection::vec(prop::bool::ANY, pairs).prop_map(move |bits| {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).zip(bits).filter(|(_, b)| *b).map(|(e, _)| e);
        ActiveConstraintGraph::new(SystemShape::singletons(n), edges.collect::<Vec<_>>()).unwrap()
    })
}

fn graph_on(max_n: usize) -> impl Strategy<Value = Graph> {
    (3usize..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::ANY, n * (n - 1) / 2).prop_map(move |bits| {
            let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).zip(bits).filter(|(_, b)| *b).map(|(e, _)| e);
            Graph::from_edges(n, edges.collect::<Vec<_>>()).unwrap()
        })
    })
}

/// A 2-tree grown from a triangle by stacking each new vertex on an
/// existing edge.
fn two_tree() -> impl Strategy<Value = Graph> {
    prop::collection::vec(any::<prop::sample::Index>(), 0..5).prop_map(|picks| {
        let mut g = Graph::complete(3);
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        let mut all = vec![(0, 1), (0, 2), (1, 2)];
        for (i, pick) in picks.into_iter().enumerate() {
            let v = 3 + i;
            let (a, b) = *pick.get(&edges);
            let mut next = Graph::new(v + 1);
            for &(x, y) in &all {
                next.add_edge(x, y).unwrap();
            }
            next.add_edge(a, v).unwrap();
            next.add_edge(b, v).unwrap();
            all.push((a, v));
            all.push((b, v));
            edges.extend([(a, v), (b, v)]);
            g = next;
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn orbit_stabilizer_and_burnside(g in group()) {
        let d = g.degree();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|u| (u + 1..d).map(move |v| (u, v))).collect();
        let act = |p: &Permutation, &(a, b): &(usize, usize)| {
            let (x, y) = (p.apply(a), p.apply(b));
            (x.min(y), x.max(y))
        };
        let mut orbits = BTreeSet::new();
        for e in &pairs {
            let orbit = g.orbit(e, act);
            prop_assert_eq!(orbit.len() * g.stabilizer(e, act).order(), g.order());
            orbits.insert(orbit);
        }
        let burnside = g.count_orbits_burnside(|p| pairs.iter().filter(|e| act(p, e) == **e).count() as u64).unwrap();
        prop_assert_eq!(burnside, orbits.len().into());
    }

    #[test]
    fn mobius_rows_vanish_and_conjugates_share_classes(g in group()) {
        prop_assume!(g.order() <= 120);
        let lattice = subgroups(&g).unwrap();
        for h in 0..lattice.len() {
            for j in 0..lattice.len() {
                if h == j || !lattice.is_contained(h, j) {
                    continue;
                }
                let sum: i64 = (0..lattice.len())
                    .filter(|&k| lattice.is_contained(h, k) && lattice.is_contained(k, j))
                    .map(|k| lattice.mobius_value(h, k).unwrap())
                    .sum();
                prop_assert_eq!(sum, 0);
            }
        }
        for h in 0..lattice.len() {
            let sub = lattice.subgroup(h);
            for x in g.elements() {
                let conj: Vec<Permutation> = sub.elements().iter().map(|s| x.compose(s).compose(&x.inverse())).collect();
                let conj = PermGroup::from_elements(g.degree(), conj).unwrap();
                let k = lattice.find(&conj).unwrap();
                prop_assert_eq!(lattice.class_of(k), lattice.class_of(h));
                let above = |s: usize| (0..lattice.len()).filter(|&t| lattice.is_contained(s, t)).count();
                prop_assert_eq!(above(k), above(h));
            }
        }
    }

    #[test]
    fn exp_inverts_and_scalings_compose(s in series(), a in 1i64..4, b in 1i64..4) {
        let e = s.exp().unwrap();
        let minus = s.scale(&BigRational::from_integer((-1).into())).exp().unwrap();
        let product = &e * &minus;
        prop_assert_eq!(product.coeffs().to_vec(), RationalSeries::one(8).coeffs().to_vec());
        let (a, b) = (BigRational::from_integer(a.into()), BigRational::from_integer(b.into()));
        prop_assert_eq!(s.scale_arg(&a).scale_arg(&b).coeffs().to_vec(), s.scale_arg(&(&a * &b)).coeffs().to_vec());
    }

    #[test]
    fn tree_action_is_canonical(leaves in 1usize..=5, g in perm(5), pick in any::<prop::sample::Index>()) {
        let trees = enumerate_trees(leaves).unwrap();
        let t = pick.get(&trees);
        let g = Permutation::from_images(g.images().filter(|&x| x < leaves).collect()).unwrap_or_else(|_| Permutation::identity(leaves));
        prop_assert_eq!(&t.act(&Permutation::identity(leaves)), t);
        prop_assert_eq!(&t.act(&g).act(&g.inverse()), t);
        prop_assert!(trees.binary_search(&t.act(&g)).is_ok() || trees.contains(&t.act(&g)));
    }

    #[test]
    fn exact_stabilizers_partition_the_trees(g in group()) {
        let g = g.regular_action(1);
        prop_assume!(g.degree() <= 8);
        let lattice = subgroups(&g).unwrap();
        let t = fixed_counts_on_orbits(&lattice, 1).unwrap();
        let bars: Vec<BigInt> = (0..lattice.len()).map(|h| t_bar(&lattice, h, &t).unwrap()).collect();
        let total = BigInt::from(t[lattice.trivial()].clone());
        prop_assert!(bars.iter().all(|b| *b >= BigInt::from(0)));
        prop_assert_eq!(bars.iter().sum::<BigInt>(), total);
        let census = pathway_census(&g, 1).unwrap();
        for &m in census.counts.keys() {
            prop_assert_eq!(g.order() % m, 0);
        }
        prop_assert_eq!(census.weighted_total(), solve_base_egf(g.degree()).unwrap()[g.degree() - 1].clone());
    }

    #[test]
    fn configuration_symmetry_sits_inside_graph_symmetry(c in grid_configuration()) {
        let w = waut(&c).unwrap();
        let g = active_constraint_graph(&c).unwrap();
        let strict = strict_congruence_group(&c, &w);
        prop_assert!(strict.group().is_subgroup_of(acg_stabilizer(&g, &w).unwrap().group()));
        for p in w.elements() {
            let moved = w.act(p, &c);
            prop_assert!(moved.validate().is_ok());
            prop_assert_eq!(active_constraint_graph(&moved).unwrap(), g.act(p));
        }
        prop_assert_eq!(w.order() % strict.order(), 0);
    }

    #[test]
    fn canonical_form_is_a_class_function(g in acg_on(5), p in perm(5)) {
        let w = Waut::symmetric(5);
        let moved = g.act(&p);
        prop_assert_eq!(canonical_form(&moved, &w).unwrap(), canonical_form(&g, &w).unwrap());
        prop_assert!(acg_isomorphic(&g, &moved, &w).is_some());
        prop_assert!(acg_isomorphic(&moved, &g, &w).is_some());
    }

    #[test]
    fn rank_grows_with_edges(g in acg_on(6), drop in any::<prop::sample::Index>()) {
        let edges = g.edges();
        prop_assume!(!edges.is_empty());
        let (u, v) = *drop.get(&edges);
        let smaller = ActiveConstraintGraph::new(g.shape().clone(), edges.into_iter().filter(|&e| e != (u, v)).collect::<Vec<_>>()).unwrap();
        let (a, b) = (independent_edge_count(&smaller), independent_edge_count(&g));
        prop_assert!(a <= b && b <= a + 1);
    }

    #[test]
    fn two_sums_glue_back(g in graph_on(8)) {
        let d = two_sum_components(&g);
        let mut real: Vec<(usize, usize)> = d.components.iter().flat_map(|c| c.real_edges()).collect();
        real.sort();
        prop_assert_eq!(real, g.edges().collect::<Vec<_>>());
        let mut uses: BTreeMap<usize, (usize, BTreeSet<(usize, usize)>)> = BTreeMap::new();
        for c in &d.components {
            for &(u, v, kind) in &c.edges {
                if let EdgeKind::Virtual(id) = kind {
                    let entry = uses.entry(id).or_default();
                    entry.0 += 1;
                    entry.1.insert((u, v));
                }
            }
        }
        for (count, ends) in uses.values() {
            prop_assert_eq!(*count, 2);
            prop_assert_eq!(ends.len(), 1);
        }
        prop_assert!(convex_cayley_check(&g, &[]).unwrap().is_convexifiable());
    }

    #[test]
    fn polytope_holds_realized_lengths(
        g in two_tree(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..3),
        coords in prop::collection::vec(-10.0f64..10.0, 24),
    ) {
        let all: Vec<(usize, usize)> = g.edges().collect();
        let f: BTreeSet<(usize, usize)> = picks.iter().map(|i| *i.get(&all)).collect();
        let f: Vec<(usize, usize)> = f.into_iter().collect();
        let mut h = g.clone();
        for &(u, v) in &f {
            h.remove_edge(u, v);
        }
        let pts: Vec<[f64; 3]> = (0..g.vertex_count()).map(|i| [coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]]).collect();
        let len = |(u, v): (usize, usize)| {
            let d: f64 = (0..3).map(|k| (pts[u][k] - pts[v][k]).powi(2)).sum();
            Real::from(d.sqrt())
        };
        let lengths: BTreeMap<(usize, usize), Interval> = h.edges().map(|e| (e, Interval::exact(len(e)))).collect();
        let poly = two_tree_polytope(&h, &f, &lengths).unwrap();
        let n = g.vertex_count();
        let mut triangles = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let tri = [(a, b), (a, c), (b, c)];
                    if tri.iter().all(|&(x, y)| g.has_edge(x, y)) && tri.iter().any(|e| f.contains(e)) {
                        triangles += 1;
                    }
                }
            }
        }
        prop_assert_eq!(poly.ineqs.len(), 3 * triangles);
        let x: Vec<Real> = poly.vars.iter().map(|&e| len(e)).collect();
        prop_assert!(poly.contains(&x));
    }
}

fn small_atlas(k: usize) -> asmsym_core::atlas::StratificationAtlas {
    build_atlas(&Waut::symmetric(k), &AtlasOptions::default()).unwrap()
}

#[test]
fn atlas_dimensions_and_reduction() {
    for k in 3..=5 {
        let atlas = small_atlas(k);
        assert!(atlas.is_transitively_reduced());
        for n in atlas.nodes() {
            assert_eq!(n.dimension + n.independent_edges, 6 * (k - 1));
        }
        for e in atlas.edges() {
            assert!(!atlas.is_below(e.child, e.parent));
            assert!(atlas.nodes()[e.child].dimension < atlas.nodes()[e.parent].dimension);
        }
    }
}

#[test]
fn fundamental_domain_rebuilds_every_layer() {
    let w = Waut::symmetric(5);
    for e in 0..=10 {
        let layer = unreduced_layer(&w, e, 1_000_000).unwrap();
        let d = fundamental_domain(&layer, &w).unwrap();
        assert_eq!(d.representatives.iter().map(|(_, s)| s).sum::<usize>(), layer.len());
        let orbits = enumerate_acg_orbits(&w, e, &AcgFilter::default()).unwrap();
        assert_eq!(d.representatives.len(), orbits.len());
    }
}

#[test]
fn coarse_paths_refine_and_grow_forests() {
    let atlas = small_atlas(4);
    let bottom = atlas.node("e0n1").unwrap();
    for top in 0..atlas.nodes().len() {
        if top == bottom {
            continue;
        }
        let coarse = coarse_assembly_paths(&atlas, bottom, top, MAX_CHAIN_LENGTH).unwrap();
        for path in &coarse.paths {
            for w in path.nodes.windows(2) {
                let fine = assembly_paths(&atlas, w[0], w[1], MAX_CHAIN_LENGTH).unwrap();
                assert!(fine.count >= 1);
            }
            let forest = assembly_forest(&path.chain).unwrap();
            assert!(forest.is_well_formed());
            assert!(forest.incomparable_disjoint());
            assert_eq!(forest.leaves.len(), 4);
        }
    }
}
