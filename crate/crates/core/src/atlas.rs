//! Stratification atlas over orbit representatives of active constraint
//! graphs, with assembly paths, coarse paths and assembly forests.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::acg::{
    enumerate_acg_orbits_with_cap, independent_edge_count, realize, AcgError, AcgFilter, ActiveConstraintGraph,
    PairAction, RealizeParams, DEFAULT_CANDIDATE_CAP,
};
use crate::assembly::{AssemblyConfiguration, Waut};
use crate::permgroup::Permutation;
use crate::rigidity::{self, RankOracle};

pub const MAX_CHAIN_LENGTH: usize = 14;
pub const MAX_ZIGZAG_LENGTH: usize = 6;
pub const DEFAULT_PATH_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Acg(#[from] AcgError),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("{from} is not below {to}")]
    Incomparable { from: String, to: String },
    #[error("{from} and {to} are comparable")]
    Comparable { from: String, to: String },
    #[error("step {step} of the chain is not a strict containment")]
    NotAChain { step: usize },
    #[error("step {step} is not a coarse step")]
    NotCoarse { step: usize },
    #[error("node set is not a union of orbits")]
    NotOrbitClosed,
    #[error("length bound {requested} exceeds the maximum {max}")]
    LengthBound { requested: usize, max: usize },
}

#[derive(Clone, Debug)]
pub struct AtlasOptions {
    pub min_edges: usize,
    pub max_edges: usize,
    pub filter: AcgFilter,
    /// Keep only graphs whose edges are independent in the rigidity matroid.
    pub independent_only: bool,
    /// Hasse covers over every node instead of the realized ones.
    pub abstract_lattice: bool,
    pub realize: Option<(AssemblyConfiguration, RealizeParams)>,
    pub candidate_cap: u64,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        AtlasOptions {
            min_edges: 0,
            max_edges: usize::MAX,
            filter: AcgFilter::default(),
            independent_only: true,
            abstract_lattice: false,
            realize: None,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Unchecked,
    Realizable,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct AtlasNode {
    pub name: String,
    pub graph: ActiveConstraintGraph,
    pub orbit_size: usize,
    pub stabilizer_order: usize,
    pub independent_edges: usize,
    pub dimension: usize,
    pub status: NodeStatus,
}

/// `embedding(parent) ⊊ child`.
#[derive(Clone, Debug)]
pub struct HasseEdge {
    pub parent: usize,
    pub child: usize,
    pub embedding: Permutation,
}

#[derive(Clone, Debug)]
pub struct StratificationAtlas {
    waut: Waut,
    action: PairAction,
    nodes: Vec<AtlasNode>,
    edges: Vec<HasseEdge>,
    /// `below[a][b]`: some element of the group carries node `a` strictly
    /// inside node `b`.
    below: Vec<Vec<Option<usize>>>,
    by_mask: BTreeMap<u128, usize>,
}

fn allowed_pair_count(waut: &Waut) -> usize {
    let s = waut.shape();
    let n = s.vertex_count();
    (0..n).map(|u| (u + 1..n).filter(|&v| !s.same_bunch(u, v)).count()).sum()
}

/// Edge counts the atlas covers under `options`.
pub fn atlas_edge_range(waut: &Waut, options: &AtlasOptions) -> core::ops::RangeInclusive<usize> {
    options.min_edges..=options.max_edges.min(allowed_pair_count(waut))
}

/// Nodes with `edges` edges, named and checked for realizability.
pub fn atlas_layer(waut: &Waut, edges: usize, options: &AtlasOptions) -> Result<Vec<AtlasNode>, AtlasError> {
    let orbits = enumerate_acg_orbits_with_cap(waut, edges, &options.filter, options.candidate_cap)?;
    let kk = waut.shape().bunch_count();
    let mut nodes = Vec::new();
    for o in orbits {
        let independent = independent_edge_count(&o.representative);
        if options.independent_only && independent != edges {
            continue;
        }
        let status = match &options.realize {
            None => NodeStatus::Unchecked,
            Some((template, params)) => {
                if realize(&o.representative, template, params).is_realizable() {
                    NodeStatus::Realizable
                } else {
                    NodeStatus::Undetermined
                }
            }
        };
        nodes.push(AtlasNode {
            name: format!("e{edges}n{}", nodes.len() + 1),
            orbit_size: o.orbit_size,
            stabilizer_order: o.stabilizer.order(),
            independent_edges: independent,
            dimension: (6 * kk.saturating_sub(1)).saturating_sub(independent),
            status,
            graph: o.representative,
        });
    }
    Ok(nodes)
}

pub fn build_atlas(waut: &Waut, options: &AtlasOptions) -> Result<StratificationAtlas, AtlasError> {
    let mut layers = Vec::new();
    for e in atlas_edge_range(waut, options) {
        layers.push(atlas_layer(waut, e, options)?);
    }
    Ok(assemble_atlas(waut, layers, options))
}

/// Links layers from [`atlas_layer`], given in increasing edge count.
pub fn assemble_atlas(waut: &Waut, layers: Vec<Vec<AtlasNode>>, options: &AtlasOptions) -> StratificationAtlas {
    let nodes: Vec<AtlasNode> = layers.into_iter().flatten().collect();
    let action = PairAction::new(waut);
    let count = nodes.len();
    let mut below = vec![vec![None; count]; count];
    for a in 0..count {
        for b in 0..count {
            let (ga, gb) = (&nodes[a].graph, &nodes[b].graph);
            if ga.edge_count() >= gb.edge_count() {
                continue;
            }
            below[a][b] = (0..action.group_order()).find(|&e| action.act(e, ga.mask()) & !gb.mask() == 0);
        }
    }
    let basis: Vec<bool> = nodes
        .iter()
        .map(|n| options.abstract_lattice || n.status != NodeStatus::Undetermined)
        .collect();
    let mut edges = Vec::new();
    for a in 0..count {
        for b in 0..count {
            let Some(e) = below[a][b] else { continue };
            let intermediate = (0..count).any(|c| basis[c] && below[a][c].is_some() && below[c][b].is_some());
            if !intermediate {
                edges.push(HasseEdge {
                    parent: a,
                    child: b,
                    embedding: waut.elements()[e].clone(),
                });
            }
        }
    }
    let by_mask = nodes.iter().enumerate().map(|(i, n)| (n.graph.mask(), i)).collect();
    StratificationAtlas {
        waut: waut.clone(),
        action,
        nodes,
        edges,
        below,
        by_mask,
    }
}

impl StratificationAtlas {
    pub fn waut(&self) -> &Waut {
        &self.waut
    }

    pub fn nodes(&self) -> &[AtlasNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[HasseEdge] {
        &self.edges
    }

    pub fn node(&self, name: &str) -> Result<usize, AtlasError> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| AtlasError::UnknownNode(String::from(name)))
    }

    /// Node whose orbit contains `g`.
    pub fn locate(&self, g: &ActiveConstraintGraph) -> Option<usize> {
        let min = (0..self.action.group_order()).map(|e| self.action.act(e, g.mask())).min()?;
        self.by_mask.get(&min).copied()
    }

    /// Strictly below, up to the group.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        self.below[a][b].is_some()
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        a == b || self.is_below(a, b) || self.is_below(b, a)
    }

    pub fn parents(&self, node: usize) -> Vec<&HasseEdge> {
        self.edges.iter().filter(|e| e.child == node).collect()
    }

    pub fn children(&self, node: usize) -> Vec<&HasseEdge> {
        self.edges.iter().filter(|e| e.parent == node).collect()
    }

    /// `(parents, children)` of a node.
    pub fn neighbors(&self, node: usize) -> (Vec<&HasseEdge>, Vec<&HasseEdge>) {
        (self.parents(node), self.children(node))
    }

    fn is_edge(&self, parent: usize, child: usize) -> bool {
        self.edges.iter().any(|e| e.parent == parent && e.child == child)
    }

    /// Every Hasse edge points to more edges, so the diagram is acyclic; this
    /// also checks that no edge is implied by two others.
    pub fn is_transitively_reduced(&self) -> bool {
        self.edges.iter().all(|e| {
            !self.edges.iter().any(|f| {
                f.parent == e.parent && f.child != e.child && self.is_below(f.child, e.child)
            })
        })
    }

    /// All images of node `a` strictly inside the concrete graph `mask`.
    fn embeddings_into(&self, a: usize, mask: u128) -> BTreeSet<u128> {
        let ga = self.nodes[a].graph.mask();
        (0..self.action.group_order())
            .map(|e| self.action.act(e, ga))
            .filter(|&m| m & !mask == 0 && m != mask)
            .collect()
    }

    fn graph(&self, mask: u128) -> ActiveConstraintGraph {
        ActiveConstraintGraph::from_mask(self.waut.shape().clone(), mask).expect("atlas mask")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathSet {
    pub paths: Vec<Vec<usize>>,
    /// Paths found within the length bound, including any not stored.
    pub count: u64,
    pub truncated: bool,
}

impl PathSet {
    fn push(&mut self, path: Vec<usize>, cap: usize) {
        self.count += 1;
        if self.paths.len() < cap {
            self.paths.push(path);
        } else {
            self.truncated = true;
        }
    }
}

fn check_len(requested: usize, max: usize) -> Result<(), AtlasError> {
    if requested > max {
        return Err(AtlasError::LengthBound { requested, max });
    }
    Ok(())
}

/// Chains of Hasse edges from `from` down to `to`, at most `max_nodes` long.
pub fn assembly_paths(atlas: &StratificationAtlas, from: usize, to: usize, max_nodes: usize) -> Result<PathSet, AtlasError> {
    check_len(max_nodes, MAX_CHAIN_LENGTH)?;
    let mut out = PathSet::default();
    if from == to {
        out.push(vec![from], DEFAULT_PATH_CAP);
        return Ok(out);
    }
    if !atlas.is_below(from, to) {
        return Err(AtlasError::Incomparable {
            from: atlas.nodes[from].name.clone(),
            to: atlas.nodes[to].name.clone(),
        });
    }
    fn dfs(atlas: &StratificationAtlas, path: &mut Vec<usize>, to: usize, max: usize, out: &mut PathSet) {
        let cur = *path.last().expect("nonempty");
        if cur == to {
            out.push(path.clone(), DEFAULT_PATH_CAP);
            return;
        }
        if path.len() >= max {
            out.truncated = true;
            return;
        }
        for e in atlas.children(cur) {
            if e.child == to || atlas.is_below(e.child, to) {
                path.push(e.child);
                dfs(atlas, path, to, max, out);
                path.pop();
            }
        }
    }
    dfs(atlas, &mut vec![from], to, max_nodes, &mut out);
    Ok(out)
}

/// A coarse step `G ⊊ G′`: the one new rigid component and the components
/// of `G*` it absorbs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseStep {
    pub new_component: Vec<usize>,
    pub absorbed: Vec<Vec<usize>>,
}

fn set_mask(vs: &[usize]) -> u32 {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

/// Whether `prev ⊊ next` is a coarse step, on concrete labelled graphs.
pub fn coarse_step(prev: &ActiveConstraintGraph, next: &ActiveConstraintGraph) -> Result<Option<CoarseStep>, AtlasError> {
    if !prev.is_subgraph_of(next) || prev == next {
        return Err(AtlasError::NotAChain { step: 0 });
    }
    let before = crate::acg::rigid_components(prev)?;
    let after = crate::acg::rigid_components(next)?;
    let new: Vec<&Vec<usize>> = after.iter().filter(|c| !before.contains(c)).collect();
    if new.len() != 1 {
        return Ok(None);
    }
    let s = new[0].clone();
    let sm = set_mask(&s);
    let absorbed: Vec<Vec<usize>> = before.iter().filter(|c| set_mask(c) & !sm == 0).cloned().collect();
    if absorbed.len() < 2 {
        return Ok(None);
    }
    let full = next.full_graph();
    let oracle = RankOracle::new(full.vertex_count());
    let mut memo: BTreeMap<u32, bool> = BTreeMap::new();
    let masks: Vec<u32> = absorbed.iter().map(|c| set_mask(c)).collect();
    let m = absorbed.len();
    if m >= 32 {
        return Ok(None);
    }
    for q in 1u32..(1u32 << m) - 1 {
        if q.count_ones() < 2 {
            continue;
        }
        let union = (0..m).filter(|&i| q >> i & 1 == 1).fold(0u32, |u, i| u | masks[i]);
        let rigid = *memo.entry(union).or_insert_with(|| {
            let vs: Vec<usize> = (0..32).filter(|&v| union >> v & 1 == 1).collect();
            vs.len() <= 1 || oracle.is_rigid(&full, &vs)
        });
        if rigid {
            return Ok(None);
        }
    }
    Ok(Some(CoarseStep {
        new_component: s,
        absorbed,
    }))
}

fn check_chain(chain: &[ActiveConstraintGraph]) -> Result<(), AtlasError> {
    for (i, w) in chain.windows(2).enumerate() {
        if !w[0].is_subgraph_of(&w[1]) || w[0] == w[1] {
            return Err(AtlasError::NotAChain { step: i });
        }
    }
    Ok(())
}

/// A concrete chain is an assembly path when consecutive orbits are Hasse
/// neighbours in the atlas.
pub fn is_assembly_path(atlas: &StratificationAtlas, chain: &[ActiveConstraintGraph]) -> Result<bool, AtlasError> {
    check_chain(chain)?;
    let ids: Option<Vec<usize>> = chain.iter().map(|g| atlas.locate(g)).collect();
    let Some(ids) = ids else { return Ok(false) };
    Ok(ids.windows(2).all(|w| atlas.is_edge(w[0], w[1])))
}

pub fn is_coarse_path(chain: &[ActiveConstraintGraph]) -> Result<bool, AtlasError> {
    check_chain(chain)?;
    for w in chain.windows(2) {
        if coarse_step(&w[0], &w[1])?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct CoarsePath {
    pub nodes: Vec<usize>,
    /// One concrete chain ending at the representative of the last node.
    pub chain: Vec<ActiveConstraintGraph>,
}

#[derive(Clone, Debug, Default)]
pub struct CoarsePathSet {
    pub paths: Vec<CoarsePath>,
    pub truncated: bool,
}

/// Node sequences from `from` to `to` that admit a concrete chain of coarse
/// steps, found backwards from the representative of `to`.
pub fn coarse_assembly_paths(
    atlas: &StratificationAtlas,
    from: usize,
    to: usize,
    max_nodes: usize,
) -> Result<CoarsePathSet, AtlasError> {
    check_len(max_nodes, MAX_CHAIN_LENGTH)?;
    let mut out = CoarsePathSet::default();
    if from == to {
        out.paths.push(CoarsePath {
            nodes: vec![from],
            chain: vec![atlas.nodes[from].graph.clone()],
        });
        return Ok(out);
    }
    if !atlas.is_below(from, to) {
        return Err(AtlasError::Incomparable {
            from: atlas.nodes[from].name.clone(),
            to: atlas.nodes[to].name.clone(),
        });
    }
    struct Walk<'a> {
        atlas: &'a StratificationAtlas,
        from: usize,
        max: usize,
        steps: BTreeMap<(u128, u128), bool>,
        seen: BTreeSet<Vec<usize>>,
        out: CoarsePathSet,
    }
    impl Walk<'_> {
        fn step_ok(&mut self, prev: u128, next: u128) -> Result<bool, AtlasError> {
            if let Some(&ok) = self.steps.get(&(prev, next)) {
                return Ok(ok);
            }
            let ok = coarse_step(&self.atlas.graph(prev), &self.atlas.graph(next))?.is_some();
            self.steps.insert((prev, next), ok);
            Ok(ok)
        }

        fn go(&mut self, nodes: &mut Vec<usize>, masks: &mut Vec<u128>) -> Result<(), AtlasError> {
            let (cur, mask) = (*nodes.last().expect("nonempty"), *masks.last().expect("nonempty"));
            if cur == self.from {
                let seq: Vec<usize> = nodes.iter().rev().copied().collect();
                if self.seen.insert(seq.clone()) {
                    if self.out.paths.len() >= DEFAULT_PATH_CAP {
                        self.out.truncated = true;
                    } else {
                        let chain = masks.iter().rev().map(|&m| self.atlas.graph(m)).collect();
                        self.out.paths.push(CoarsePath { nodes: seq, chain });
                    }
                }
                return Ok(());
            }
            if nodes.len() >= self.max {
                self.out.truncated = true;
                return Ok(());
            }
            for x in 0..self.atlas.nodes.len() {
                if !(x == self.from || self.atlas.is_below(self.from, x)) || !self.atlas.is_below(x, cur) {
                    continue;
                }
                for sub in self.atlas.embeddings_into(x, mask) {
                    if self.step_ok(sub, mask)? {
                        nodes.push(x);
                        masks.push(sub);
                        self.go(nodes, masks)?;
                        nodes.pop();
                        masks.pop();
                    }
                }
            }
            Ok(())
        }
    }
    let mut walk = Walk {
        atlas,
        from,
        max: max_nodes,
        steps: BTreeMap::new(),
        seen: BTreeSet::new(),
        out: CoarsePathSet::default(),
    };
    walk.go(&mut vec![to], &mut vec![atlas.nodes[to].graph.mask()])?;
    walk.out.paths.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    Ok(walk.out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestNode {
    pub vertices: Vec<usize>,
    pub children: Vec<usize>,
}

/// Merge forest of rigid components along a coarse path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyForest {
    pub nodes: Vec<ForestNode>,
    pub leaves: Vec<usize>,
    pub roots: Vec<usize>,
}

impl AssemblyForest {
    pub fn is_tree(&self) -> bool {
        self.roots.len() == 1
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.children.contains(&node))
    }

    /// Leaf indices below `node`.
    pub fn leaves_under(&self, node: usize) -> BTreeSet<usize> {
        if self.nodes[node].children.is_empty() {
            return BTreeSet::from([node]);
        }
        self.nodes[node].children.iter().flat_map(|&c| self.leaves_under(c)).collect()
    }

    fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.parent(b);
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent(p);
        }
        false
    }

    /// Incomparable nodes share no rigid component of the first graph.
    pub fn incomparable_disjoint(&self) -> bool {
        let n = self.nodes.len();
        (0..n).all(|a| {
            (a + 1..n).all(|b| {
                self.is_ancestor(a, b)
                    || self.is_ancestor(b, a)
                    || self.leaves_under(a).is_disjoint(&self.leaves_under(b))
            })
        })
    }

    /// Children of every node lie inside it and each node has one parent.
    pub fn is_well_formed(&self) -> bool {
        let mut parents = vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            for &c in &node.children {
                parents[c] += 1;
                if !self.nodes[c].vertices.iter().all(|v| node.vertices.contains(v)) {
                    return false;
                }
            }
        }
        parents.iter().all(|&p| p <= 1) && self.roots.iter().all(|&r| parents[r] == 0)
    }

    /// Order-free description: each node's vertex set with its children's.
    pub fn key(&self) -> BTreeSet<(Vec<usize>, BTreeSet<Vec<usize>>)> {
        self.nodes
            .iter()
            .map(|n| {
                let kids = n.children.iter().map(|&c| self.nodes[c].vertices.clone()).collect();
                (n.vertices.clone(), kids)
            })
            .collect()
    }

    /// Relabels every vertex set by `g`.
    pub fn act(&self, g: &Permutation) -> AssemblyForest {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let mut vertices: Vec<usize> = n.vertices.iter().map(|&v| g.apply(v)).collect();
                vertices.sort_unstable();
                ForestNode {
                    vertices,
                    children: n.children.clone(),
                }
            })
            .collect();
        AssemblyForest {
            nodes,
            leaves: self.leaves.clone(),
            roots: self.roots.clone(),
        }
    }
}

pub fn assembly_forest(chain: &[ActiveConstraintGraph]) -> Result<AssemblyForest, AtlasError> {
    check_chain(chain)?;
    let first = chain.first().ok_or(AtlasError::NotAChain { step: 0 })?;
    let mut nodes: Vec<ForestNode> = Vec::new();
    let mut current: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in crate::acg::rigid_components(first)? {
        current.insert(c.clone(), nodes.len());
        nodes.push(ForestNode {
            vertices: c,
            children: Vec::new(),
        });
    }
    let leaves: Vec<usize> = (0..nodes.len()).collect();
    for (i, w) in chain.windows(2).enumerate() {
        let step = coarse_step(&w[0], &w[1])?.ok_or(AtlasError::NotCoarse { step: i })?;
        let children: Vec<usize> = step.absorbed.iter().map(|c| current[c]).collect();
        for c in &step.absorbed {
            current.remove(c);
        }
        current.insert(step.new_component.clone(), nodes.len());
        nodes.push(ForestNode {
            vertices: step.new_component,
            children,
        });
    }
    let last = chain.last().expect("nonempty");
    let roots = rigidity::rigid_components(&last.full_graph())
        .map_err(AcgError::from)?
        .iter()
        .map(|c| current[c])
        .collect();
    Ok(AssemblyForest { nodes, leaves, roots })
}

/// Alternating chains `g = X₀, X₁, …, X_t = h` of distinct nodes where each
/// step goes strictly up or strictly down, directions alternating; either
/// starting direction is allowed.
pub fn zigzag_paths(atlas: &StratificationAtlas, g: usize, h: usize, max_steps: usize) -> Result<PathSet, AtlasError> {
    check_len(max_steps, MAX_ZIGZAG_LENGTH)?;
    if atlas.comparable(g, h) {
        return Err(AtlasError::Comparable {
            from: atlas.nodes[g].name.clone(),
            to: atlas.nodes[h].name.clone(),
        });
    }
    let mut out = PathSet::default();
    fn dfs(atlas: &StratificationAtlas, path: &mut Vec<usize>, up: bool, h: usize, max: usize, out: &mut PathSet) {
        let cur = *path.last().expect("nonempty");
        if cur == h {
            out.push(path.clone(), DEFAULT_PATH_CAP);
            return;
        }
        if path.len() > max {
            return;
        }
        for x in 0..atlas.nodes.len() {
            let step = if up { atlas.is_below(cur, x) } else { atlas.is_below(x, cur) };
            if step && !path.contains(&x) {
                path.push(x);
                dfs(atlas, path, !up, h, max, out);
                path.pop();
            }
        }
    }
    for up in [true, false] {
        dfs(atlas, &mut vec![g], up, h, max_steps, &mut out);
    }
    out.paths.sort_by_key(|p| (p.len(), p.clone()));
    Ok(out)
}

/// Every labelled graph with an edge count in range, without orbit collapse.
pub fn unreduced_layer(waut: &Waut, edges: usize, cap: u64) -> Result<Vec<ActiveConstraintGraph>, AtlasError> {
    let mut out = Vec::new();
    for o in enumerate_acg_orbits_with_cap(waut, edges, &AcgFilter::default(), cap)? {
        let mut orbit: BTreeSet<ActiveConstraintGraph> = BTreeSet::new();
        for p in waut.elements() {
            orbit.insert(o.representative.act(p));
        }
        out.extend(orbit);
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FundamentalDomain {
    /// Orbit-minimal representatives with their orbit sizes.
    pub representatives: Vec<(ActiveConstraintGraph, usize)>,
}

/// Orbit representatives of a labelled node set. The set must be a union of
/// orbits; the reconstruction is checked.
pub fn fundamental_domain(graphs: &[ActiveConstraintGraph], waut: &Waut) -> Result<FundamentalDomain, AtlasError> {
    let all: BTreeSet<&ActiveConstraintGraph> = graphs.iter().collect();
    let mut covered: BTreeSet<ActiveConstraintGraph> = BTreeSet::new();
    let mut reps = Vec::new();
    for g in graphs {
        if covered.contains(g) {
            continue;
        }
        let orbit: BTreeSet<ActiveConstraintGraph> = waut.elements().iter().map(|p| g.act(p)).collect();
        if !orbit.iter().all(|x| all.contains(x)) {
            return Err(AtlasError::NotOrbitClosed);
        }
        let rep = orbit.iter().min_by_key(|x| x.mask()).expect("nonempty").clone();
        reps.push((rep, orbit.len()));
        covered.extend(orbit);
    }
    let total: usize = reps.iter().map(|(_, s)| s).sum();
    if total != all.len() || covered.len() != all.len() {
        return Err(AtlasError::NotOrbitClosed);
    }
    reps.sort_by_key(|(g, _)| (g.edge_count(), g.mask()));
    Ok(FundamentalDomain { representatives: reps })
}

/// Labelled chains through every intermediate graph of the unreduced
/// lattice, one added edge per step, from `from` to `to`.
pub fn labelled_paths(from: &ActiveConstraintGraph, to: &ActiveConstraintGraph) -> Result<Vec<Vec<ActiveConstraintGraph>>, AtlasError> {
    if !from.is_subgraph_of(to) {
        return Err(AtlasError::NotAChain { step: 0 });
    }
    let missing: Vec<(usize, usize)> = to.edges().into_iter().filter(|&(u, v)| !from.has_edge(u, v)).collect();
    check_len(missing.len() + 1, MAX_CHAIN_LENGTH)?;
    let mut out = Vec::new();
    fn go(
        chain: &mut Vec<ActiveConstraintGraph>,
        left: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<ActiveConstraintGraph>>,
    ) {
        if left.is_empty() {
            out.push(chain.clone());
            return;
        }
        for k in 0..left.len() {
            let (u, v) = left.remove(k);
            let next = chain.last().expect("nonempty").with_edge(u, v).expect("cross-bunch edge");
            chain.push(next);
            go(chain, left, out);
            chain.pop();
            left.insert(k, (u, v));
        }
    }
    let mut left = missing;
    go(&mut vec![from.clone()], &mut left, &mut out);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCensus {
    /// Indices into the input, one list per orbit.
    pub orbits: Vec<Vec<usize>>,
    /// Full orbit size under the group for each orbit.
    pub orbit_sizes: Vec<usize>,
    /// Whether every image of an input item is itself in the input.
    pub closed: bool,
}

/// Orbits of `items` under `group` acting by `act`.
pub fn orbit_census<T, K, A>(items: &[T], group: &[Permutation], mut act: A, key: impl Fn(&T) -> K) -> OrbitCensus
where
    K: Ord + Clone,
    A: FnMut(&Permutation, &T) -> T,
{
    let index: BTreeMap<K, usize> = items.iter().enumerate().map(|(i, x)| (key(x), i)).collect();
    let mut assigned = vec![false; items.len()];
    let mut out = OrbitCensus {
        orbits: Vec::new(),
        orbit_sizes: Vec::new(),
        closed: true,
    };
    for i in 0..items.len() {
        if assigned[i] {
            continue;
        }
        let images: BTreeSet<K> = group.iter().map(|g| key(&act(g, &items[i]))).collect();
        let mut members = Vec::new();
        for k in &images {
            match index.get(k) {
                Some(&j) => {
                    if !assigned[j] {
                        assigned[j] = true;
                        members.push(j);
                    }
                }
                None => out.closed = false,
            }
        }
        members.sort_unstable();
        out.orbit_sizes.push(images.len());
        out.orbits.push(members);
    }
    out
}

/// Orbits of labelled chains of graphs.
pub fn path_orbit_census(paths: &[Vec<ActiveConstraintGraph>], group: &Waut) -> OrbitCensus {
    orbit_census(
        paths,
        group.elements(),
        |g, p| p.iter().map(|x| x.act(g)).collect(),
        |p| p.iter().map(|x| x.mask()).collect::<Vec<u128>>(),
    )
}

/// Orbits of assembly forests.
pub fn forest_orbit_census(forests: &[AssemblyForest], group: &Waut) -> OrbitCensus {
    orbit_census(forests, group.elements(), |g, f| f.act(g), AssemblyForest::key)
}
