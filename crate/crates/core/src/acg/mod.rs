//! Active constraint graphs and their orbits under the weak automorphism
//! group.

mod realize;

pub use realize::{realize, RealizeParams, Realizability};

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::assembly::{AssemblyConfiguration, AssemblyError, SystemShape, Waut, WautElement};
use crate::graph::Graph;
use crate::permgroup::Permutation;
use crate::real::dist2;
use crate::rigidity::{self, RankOracle, RigidityError};

/// Edge sets are `u128` masks over vertex pairs.
pub const MAX_ACG_VERTICES: usize = 16;
/// Sphere-count limit for exhaustive orbit enumeration.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 9;
pub const DEFAULT_CANDIDATE_CAP: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcgError {
    #[error("{n} vertices exceeds the limit of {max}")]
    TooManyVertices { n: usize, max: usize },
    #[error("vertex {vertex} out of range")]
    VertexOutOfRange { vertex: usize },
    #[error("vertices {u} and {v} lie in the same bunch")]
    SameBunch { u: usize, v: usize },
    #[error("graphs or groups have different shapes")]
    ShapeMismatch,
    #[error("{count} candidate graphs exceeds the cap {cap}")]
    TooManyCandidates { count: u64, cap: u64 },
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

/// Index of the pair `u < v` among all pairs of `0..n`.
fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            out.push((u, v));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActiveConstraintGraph {
    shape: SystemShape,
    mask: u128,
}

impl ActiveConstraintGraph {
    pub fn empty(shape: SystemShape) -> Result<Self, AcgError> {
        let n = shape.vertex_count();
        if n > MAX_ACG_VERTICES {
            return Err(AcgError::TooManyVertices { n, max: MAX_ACG_VERTICES });
        }
        Ok(ActiveConstraintGraph { shape, mask: 0 })
    }

    /// Flat vertex pairs; every pair must join distinct bunches.
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(shape: SystemShape, edges: I) -> Result<Self, AcgError> {
        let mut g = Self::empty(shape)?;
        let n = g.shape.vertex_count();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(AcgError::VertexOutOfRange { vertex: x });
                }
            }
            if u == v || g.shape.same_bunch(u, v) {
                return Err(AcgError::SameBunch { u, v });
            }
            g.mask |= 1u128 << pair_index(n, u, v);
        }
        Ok(g)
    }

    pub fn from_mask(shape: SystemShape, mask: u128) -> Result<Self, AcgError> {
        let n = shape.vertex_count();
        let edges: Vec<_> = pairs(n).into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e).collect();
        if n * n.saturating_sub(1) / 2 < 128 && mask >> (n * n.saturating_sub(1) / 2) != 0 {
            return Err(AcgError::VertexOutOfRange { vertex: n });
        }
        Self::new(shape, edges)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn vertex_count(&self) -> usize {
        self.shape.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        pairs(self.vertex_count())
            .into_iter()
            .enumerate()
            .filter(|(k, _)| self.mask >> k & 1 == 1)
            .map(|(_, e)| e)
            .collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.mask >> pair_index(self.vertex_count(), u, v) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.vertex_count()).filter(|&u| self.has_edge(u, v)).count()
    }

    /// `(i, l)`: point `i` of bunch `l`.
    pub fn label(&self, v: usize) -> (usize, usize) {
        self.shape.locate(v)
    }

    pub fn is_subgraph_of(&self, other: &ActiveConstraintGraph) -> bool {
        self.shape == other.shape && self.mask & !other.mask == 0
    }

    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self, AcgError> {
        let mut edges = self.edges();
        edges.push((u, v));
        Self::new(self.shape.clone(), edges)
    }

    /// `ψ(G)`: edge `{x, y}` becomes `{ψ(x), ψ(y)}`.
    pub fn act(&self, g: &Permutation) -> Self {
        let n = self.vertex_count();
        let mut mask = 0u128;
        for (u, v) in self.edges() {
            mask |= 1u128 << pair_index(n, g.apply(u), g.apply(v));
        }
        ActiveConstraintGraph {
            shape: self.shape.clone(),
            mask,
        }
    }

    /// The graph itself, without bunch cliques.
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.vertex_count(), self.edges()).expect("valid edges")
    }

    /// `G*`: `G` with every bunch made a clique.
    pub fn full_graph(&self) -> Graph {
        let mut g = self.to_graph();
        for (u, v) in bunch_cliques(&self.shape) {
            g.add_edge(u, v).expect("in range");
        }
        g
    }
}

impl fmt::Display for ActiveConstraintGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (u, v)) in self.edges().into_iter().enumerate() {
            let ((i, l), (j, m)) = (self.label(u), self.label(v));
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({},{})-({},{})", i + 1, l + 1, j + 1, m + 1)?;
        }
        write!(f, "}}")
    }
}

fn bunch_cliques(shape: &SystemShape) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in 0..shape.bunch_count() {
        for i in 0..shape.sizes()[l] {
            for j in i + 1..shape.sizes()[l] {
                out.push((shape.vertex(i, l), shape.vertex(j, l)));
            }
        }
    }
    out
}

/// Edge for every cross-bunch pair with `r + r′ ≤ ‖x − y‖ ≤ r + δ + r′ + δ′`.
pub fn active_constraint_graph(config: &AssemblyConfiguration) -> Result<ActiveConstraintGraph, AcgError> {
    let shape = config.shape();
    let refs = config.flat_refs();
    let n = refs.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let ((l, i), (m, j)) = (refs[u], refs[v]);
            if l == m {
                continue;
            }
            let (a, b) = (&config.bunches[l], &config.bunches[m]);
            let lo = &a.radii[i] + &b.radii[j];
            let hi = &(&lo + &a.annuli[i]) + &b.annuli[j];
            let d2 = dist2(&a.points[i], &b.points[j]);
            let inside = d2.cmp_tol(&(&lo * &lo)).is_ge() && d2.cmp_tol(&(&hi * &hi)).is_le();
            if inside {
                edges.push((u, v));
            }
        }
    }
    ActiveConstraintGraph::new(shape, edges)
}

pub fn full_graph(g: &ActiveConstraintGraph) -> Graph {
    g.full_graph()
}

/// Per-element images of every vertex pair, for fast mask action.
#[derive(Clone, Debug)]
pub struct PairAction {
    n: usize,
    images: Vec<Vec<u8>>,
}

impl PairAction {
    pub fn new(waut: &Waut) -> Self {
        let n = waut.shape().vertex_count();
        let ps = pairs(n);
        let images = waut
            .elements()
            .iter()
            .map(|g| ps.iter().map(|&(u, v)| pair_index(n, g.apply(u), g.apply(v)) as u8).collect())
            .collect();
        PairAction { n, images }
    }

    pub fn act(&self, element: usize, mut mask: u128) -> u128 {
        let img = &self.images[element];
        let mut out = 0u128;
        while mask != 0 {
            let k = mask.trailing_zeros() as usize;
            out |= 1u128 << img[k];
            mask &= mask - 1;
        }
        out
    }

    pub fn group_order(&self) -> usize {
        self.images.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }
}

fn check_shape(g: &ActiveConstraintGraph, waut: &Waut) -> Result<(), AcgError> {
    if g.shape() != waut.shape() {
        return Err(AcgError::ShapeMismatch);
    }
    Ok(())
}

/// Orbit minimum of the edge mask.
pub fn canonical_form(g: &ActiveConstraintGraph, waut: &Waut) -> Result<ActiveConstraintGraph, AcgError> {
    check_shape(g, waut)?;
    let mask = waut.elements().iter().map(|p| g.act(p).mask).min().unwrap_or(g.mask);
    Ok(ActiveConstraintGraph {
        shape: g.shape.clone(),
        mask,
    })
}

fn degree_profile(g: &ActiveConstraintGraph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    d.sort_unstable();
    d
}

/// A `ψ ∈ Waut` with `ψ(G₁) = G₂`.
pub fn acg_isomorphic(g1: &ActiveConstraintGraph, g2: &ActiveConstraintGraph, waut: &Waut) -> Option<WautElement> {
    if g1.shape() != waut.shape() || g2.shape() != waut.shape() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    if degree_profile(g1) != degree_profile(g2) {
        return None;
    }
    waut.elements().iter().find(|p| g1.act(p).mask == g2.mask).map(|p| waut.element(p))
}

pub fn acg_stabilizer(g: &ActiveConstraintGraph, waut: &Waut) -> Result<Waut, AcgError> {
    check_shape(g, waut)?;
    Ok(waut.subgroup_where(|p| g.act(p).mask == g.mask))
}

/// Rank of `G*` minus the rank of the bunch cliques alone.
pub fn independent_edge_count(g: &ActiveConstraintGraph) -> usize {
    let n = g.vertex_count();
    let all: Vec<usize> = (0..n).collect();
    let oracle = RankOracle::new(n);
    let full: Vec<_> = g.full_graph().edges().collect();
    let cliques = bunch_cliques(g.shape());
    oracle.rank(&full, &all) - oracle.rank(&cliques, &all)
}

/// `6(k − 1)` minus the independent active edges.
pub fn dimension(g: &ActiveConstraintGraph) -> usize {
    let k = g.shape().bunch_count();
    (6 * k.saturating_sub(1)).saturating_sub(independent_edge_count(g))
}

pub fn is_rigid(g: &ActiveConstraintGraph) -> bool {
    rigidity::is_rigid(&g.full_graph())
}

/// Maximal rigid vertex sets of `G*`.
pub fn rigid_components(g: &ActiveConstraintGraph) -> Result<Vec<Vec<usize>>, AcgError> {
    Ok(rigidity::rigid_components(&g.full_graph())?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AcgFilter {
    pub min_degree: usize,
    pub rigid: bool,
    pub connected: bool,
}

impl AcgFilter {
    pub fn accepts(&self, g: &ActiveConstraintGraph) -> bool {
        (0..g.vertex_count()).all(|v| g.degree(v) >= self.min_degree)
            && (!self.connected || g.full_graph().is_connected())
            && (!self.rigid || is_rigid(g))
    }
}

#[derive(Clone, Debug)]
pub struct GraphOrbit {
    pub representative: ActiveConstraintGraph,
    pub orbit_size: usize,
    pub stabilizer: Waut,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Masks of every cross-bunch pair.
fn allowed_pairs(shape: &SystemShape) -> Vec<usize> {
    let n = shape.vertex_count();
    pairs(n)
        .into_iter()
        .enumerate()
        .filter(|&(_, (u, v))| !shape.same_bunch(u, v))
        .map(|(k, _)| k)
        .collect()
}

/// Calls `visit` on every mask with `e` of the `allowed` pair bits.
fn for_each_combination<F: FnMut(u128)>(allowed: &[usize], e: usize, mut visit: F) {
    let m = allowed.len();
    if e > m {
        return;
    }
    let mut idx: Vec<usize> = (0..e).collect();
    loop {
        visit(idx.iter().fold(0u128, |acc, &i| acc | 1u128 << allowed[i]));
        let Some(k) = (0..e).rev().find(|&k| idx[k] < m - e + k) else {
            return;
        };
        idx[k] += 1;
        for j in k + 1..e {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn enumerate_acg_orbits(waut: &Waut, edge_count: usize, filter: &AcgFilter) -> Result<Vec<GraphOrbit>, AcgError> {
    enumerate_acg_orbits_with_cap(waut, edge_count, filter, DEFAULT_CANDIDATE_CAP)
}

/// Orbit representatives (orbit-minimal masks, ascending) of all graphs with
/// `edge_count` cross-bunch edges that pass `filter`.
pub fn enumerate_acg_orbits_with_cap(
    waut: &Waut,
    edge_count: usize,
    filter: &AcgFilter,
    cap: u64,
) -> Result<Vec<GraphOrbit>, AcgError> {
    let shape = waut.shape().clone();
    let n = shape.vertex_count();
    if n > MAX_EXHAUSTIVE_VERTICES {
        return Err(AcgError::TooManyVertices {
            n,
            max: MAX_EXHAUSTIVE_VERTICES,
        });
    }
    let allowed = allowed_pairs(&shape);
    let count = binomial(allowed.len() as u64, edge_count as u64);
    if count > cap {
        return Err(AcgError::TooManyCandidates { count, cap });
    }
    let action = PairAction::new(waut);
    let mut seen: BTreeSet<u128> = BTreeSet::new();
    let mut out = Vec::new();
    for_each_combination(&allowed, edge_count, |mask| {
        if seen.contains(&mask) {
            return;
        }
        let orbit: BTreeSet<u128> = (0..action.group_order()).map(|e| action.act(e, mask)).collect();
        let rep = *orbit.iter().next().expect("nonempty");
        let size = orbit.len();
        seen.extend(orbit);
        let g = ActiveConstraintGraph {
            shape: shape.clone(),
            mask: rep,
        };
        if filter.accepts(&g) {
            let stabilizer = waut.subgroup_where(|p| g.act(p).mask == rep);
            out.push(GraphOrbit {
                representative: g,
                orbit_size: size,
                stabilizer,
            });
        }
    });
    out.sort_by_key(|o| o.representative.mask);
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::assembly::{Bunch, SystemShape};
    use crate::real::{point, Real};
    use alloc::vec;
    use alloc::string::ToString;

    pub fn octahedron_config() -> AssemblyConfiguration {
        let pts = [point(1, 0, 0), point(-1, 0, 0), point(0, 1, 0), point(0, -1, 0), point(0, 0, 1), point(0, 0, -1)];
        let r = || "707/1000".parse::<Real>().unwrap();
        let bunches = pts
            .into_iter()
            .map(|p| Bunch::sphere(p, "a", r(), Real::ratio(1, 100)))
            .collect();
        AssemblyConfiguration::validated(bunches).unwrap()
    }

    #[test]
    fn well_test_is_closed() {
        let a = |x: &str| {
            AssemblyConfiguration::validated(vec![
                Bunch::sphere(point(0, 0, 0), "a", Real::one(), Real::ratio(1, 10)),
                Bunch::sphere([x.parse().unwrap(), Real::zero(), Real::zero()], "a", Real::one(), Real::ratio(1, 10)),
            ])
            .unwrap()
        };
        assert_eq!(active_constraint_graph(&a("2.05")).unwrap().edge_count(), 1);
        assert_eq!(active_constraint_graph(&a("2.2")).unwrap().edge_count(), 1);
        assert_eq!(active_constraint_graph(&a("2")).unwrap().edge_count(), 1);
        assert_eq!(active_constraint_graph(&a("5")).unwrap().edge_count(), 0);
    }

    #[test]
    fn octahedron_graph() {
        let g = active_constraint_graph(&octahedron_config()).unwrap();
        assert_eq!(g.edge_count(), 12);
        assert!((0..6).all(|v| g.degree(v) == 4));
        let w = Waut::symmetric(6);
        assert_eq!(acg_stabilizer(&g, &w).unwrap().order(), 48);
        assert!(is_rigid(&g));
        assert_eq!(rigid_components(&g).unwrap(), [vec![0, 1, 2, 3, 4, 5]]);
        assert_eq!(dimension(&g), 30 - 12);
    }

    #[test]
    fn full_graph_cliques() {
        let shape = SystemShape::new(vec![3, 3]);
        let g = ActiveConstraintGraph::new(shape.clone(), [(0, 3)]).unwrap();
        assert_eq!(g.full_graph().edge_count(), 7);
        let e = ActiveConstraintGraph::empty(SystemShape::new(vec![4])).unwrap();
        assert_eq!(e.full_graph(), Graph::complete(4));
        assert!(matches!(ActiveConstraintGraph::new(shape, [(0, 1)]), Err(AcgError::SameBunch { .. })));
        assert_eq!(g.to_string(), "{(1,1)-(1,2)}");
    }

    #[test]
    fn small_enumerations() {
        let w3 = Waut::symmetric(3);
        let tri = enumerate_acg_orbits(&w3, 3, &AcgFilter::default()).unwrap();
        assert_eq!(tri.len(), 1);
        let w6 = Waut::symmetric(6);
        let empty = enumerate_acg_orbits(&w6, 0, &AcgFilter::default()).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0].stabilizer.order(), 720);
        let singles = enumerate_acg_orbits(&w6, 1, &AcgFilter::default()).unwrap();
        assert_eq!((singles.len(), singles[0].orbit_size), (1, 15));
        // graphs on 6 unlabeled vertices, by edge count
        let counts: Vec<usize> = (0..=15)
            .map(|e| enumerate_acg_orbits(&w6, e, &AcgFilter::default()).unwrap().len())
            .collect();
        assert_eq!(counts, [1, 1, 2, 5, 9, 15, 21, 24, 24, 21, 15, 9, 5, 2, 1, 1]);
    }

    #[test]
    fn combinations_are_complete() {
        let allowed = [0, 2, 3, 5, 7];
        for e in 0..=6 {
            let mut n = 0;
            for_each_combination(&allowed, e, |m| {
                assert_eq!(m.count_ones() as usize, e);
                n += 1;
            });
            assert_eq!(n, binomial(5, e as u64));
        }
    }

    fn sphere(x: &str, y: &str, z: &str, color: &str) -> Bunch {
        let r = |t: &str| t.parse::<Real>().unwrap();
        Bunch::sphere([r(x), r(y), r(z)], color, Real::one(), Real::ratio(1, 10))
    }

    #[test]
    fn graph_symmetry_exceeds_configuration_symmetry() {
        let config = AssemblyConfiguration::validated(vec![
            sphere("2", "0", "0", "a"),
            sphere("0", "2", "0", "a"),
            sphere("-2", "0", "0", "a"),
            sphere("0", "0", "0", "b"),
        ])
        .unwrap();
        let w = crate::assembly::waut(&config).unwrap();
        let g = active_constraint_graph(&config).unwrap();
        assert_eq!(g.edges(), [(0, 3), (1, 3), (2, 3)]);
        let rot = Permutation::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        let graph_group = acg_stabilizer(&g, &w).unwrap();
        let config_group = crate::assembly::strict_congruence_group(&config, &w);
        assert!(graph_group.group().contains(&rot));
        assert!(!config_group.group().contains(&rot));
        assert!(config_group.group().is_subgroup_of(graph_group.group()));
        assert_eq!((config_group.order(), graph_group.order()), (2, 6));
    }

    /// Tetrahedron on 1, 2, 3, 4 with 5 and 6 forming a triangle with 4. A
    /// third turn can never fix both 5 and 6.
    #[test]
    fn no_realization_has_the_graph_symmetry() {
        let template = AssemblyConfiguration::validated(vec![
            sphere("0", "0", "0", "a"),
            sphere("2.1", "0", "0", "a"),
            sphere("1.05", "1.8187", "0", "a"),
            sphere("1.05", "0.6062", "1.7146", "b"),
            sphere("0", "0", "20", "c"),
            sphere("0", "0", "30", "c"),
        ])
        .unwrap();
        let shape = template.shape();
        let g = ActiveConstraintGraph::new(
            shape,
            [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap();
        let w = crate::assembly::waut(&template).unwrap();
        assert_eq!(w.order(), 12);
        let graph_group = acg_stabilizer(&g, &w).unwrap();
        assert_eq!(graph_group.order(), 12);
        let rot = Permutation::from_cycles(6, &[vec![0, 1, 2]]).unwrap();
        let mut found = 0;
        for seed in 1..=6 {
            let params = RealizeParams { seed, ..RealizeParams::default() };
            let Realizability::Realizable(b) = realize(&g, &template, &params) else { continue };
            found += 1;
            assert_eq!(active_constraint_graph(&b).unwrap(), g);
            let config_group = crate::assembly::strict_congruence_group(&b, &w);
            assert!(config_group.group().is_subgroup_of(graph_group.group()));
            assert!(config_group.order() < graph_group.order());
            assert!(!config_group.group().contains(&rot));
        }
        assert!(found >= 3, "only {found} realizations");
    }
}
