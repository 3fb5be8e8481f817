//! Convex Cayley parameters: 2-sum decomposition, partial 2-trees, the
//! convexifiability test and triangle-inequality polytopes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::Graph;
use crate::real::Real;

pub const MAX_FLATTEN_EDGES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error("non-edge {0}-{1} is an edge of the graph")]
    ParameterIsEdge(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is not a 2-tree")]
    NotTwoTree,
    #[error("no length for edge {0}-{1}")]
    MissingLength(usize, usize),
    #[error("{edges} edges exceeds the limit of {max}")]
    TooManyEdges { edges: usize, max: usize },
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Real,
    /// Marker edge shared with the matching piece of a split; the id pairs
    /// the copies.
    Virtual(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SumComponent {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize, EdgeKind)>,
}

impl SumComponent {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Two vertices joined by parallel edges only.
    pub fn is_bond(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Underlying simple graph, relabelled by position in `vertices`.
    pub fn simple_graph(&self) -> Graph {
        let at = |v: usize| self.vertices.binary_search(&v).expect("component vertex");
        Graph::from_edges(self.vertices.len(), self.edges.iter().map(|&(u, v, _)| (at(u), at(v)))).expect("in range")
    }

    pub fn real_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().filter(|e| e.2 == EdgeKind::Real).map(|&(u, v, _)| (u, v))
    }
}

impl fmt::Display for SumComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, &(u, v, kind)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
            if kind != EdgeKind::Real {
                write!(f, "*")?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSumDecomposition {
    pub components: Vec<SumComponent>,
    /// The input had more than one connected component with edges.
    pub disconnected: bool,
}

struct Splitter {
    next_id: usize,
    out: Vec<SumComponent>,
}

fn pieces(vertices: &BTreeSet<usize>, edges: &[(usize, usize, EdgeKind)], removed: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut left: BTreeSet<usize> = vertices.iter().copied().filter(|v| !removed.contains(v)).collect();
    let mut out = Vec::new();
    while let Some(&start) = left.iter().next() {
        let mut piece = BTreeSet::from([start]);
        let mut stack = alloc::vec![start];
        left.remove(&start);
        while let Some(x) = stack.pop() {
            for &(u, v, _) in edges {
                let y = if u == x {
                    v
                } else if v == x {
                    u
                } else {
                    continue;
                };
                if left.remove(&y) {
                    piece.insert(y);
                    stack.push(y);
                }
            }
        }
        out.push(piece);
    }
    out
}

fn within(edges: &[(usize, usize, EdgeKind)], set: &BTreeSet<usize>) -> Vec<(usize, usize, EdgeKind)> {
    edges.iter().copied().filter(|(u, v, _)| set.contains(u) && set.contains(v)).collect()
}

impl Splitter {
    fn split(&mut self, vertices: BTreeSet<usize>, edges: Vec<(usize, usize, EdgeKind)>) {
        let vs: Vec<usize> = vertices.iter().copied().collect();
        if vs.len() >= 3 {
            for &c in &vs {
                let parts = pieces(&vertices, &edges, &[c]);
                if parts.len() >= 2 {
                    for mut p in parts {
                        p.insert(c);
                        let e = within(&edges, &p);
                        self.split(p, e);
                    }
                    return;
                }
            }
        }
        if vs.len() >= 4 {
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    let parts = pieces(&vertices, &edges, &[a, b]);
                    if parts.len() < 2 {
                        continue;
                    }
                    let direct: Vec<(usize, usize, EdgeKind)> =
                        edges.iter().copied().filter(|&(u, v, _)| key(u, v) == (a, b)).collect();
                    let ids: Vec<usize> = (0..parts.len()).map(|k| self.next_id + k).collect();
                    let bond = parts.len() >= 3;
                    if bond {
                        self.next_id += parts.len();
                    } else {
                        self.next_id += 1;
                    }
                    for (k, mut p) in parts.into_iter().enumerate() {
                        p.insert(a);
                        p.insert(b);
                        let mut e: Vec<_> = within(&edges, &p).into_iter().filter(|&(u, v, _)| key(u, v) != (a, b)).collect();
                        let id = if bond { ids[k] } else { ids[0] };
                        if !bond && k == 0 && !direct.is_empty() {
                            e.extend(direct.iter().copied());
                        }
                        e.push((a, b, EdgeKind::Virtual(id)));
                        self.split(p, e);
                    }
                    if bond {
                        let mut e = direct.clone();
                        e.extend(ids.iter().map(|&id| (a, b, EdgeKind::Virtual(id))));
                        self.emit(BTreeSet::from([a, b]), e);
                    }
                    return;
                }
            }
        }
        self.emit(vertices, edges);
    }

    fn emit(&mut self, vertices: BTreeSet<usize>, mut edges: Vec<(usize, usize, EdgeKind)>) {
        edges.sort();
        self.out.push(SumComponent {
            vertices: vertices.into_iter().collect(),
            edges,
        });
    }
}

/// Splits at cut vertices and then at separating vertex pairs until no
/// separation is left. A pair splitting off three or more pieces leaves a
/// bond between them; a pair splitting off two joins them by a shared
/// virtual edge, and a real edge on the pair stays with the first piece.
pub fn two_sum_components(g: &Graph) -> TwoSumDecomposition {
    let edges: Vec<(usize, usize, EdgeKind)> = g.edges().map(|(u, v)| (u, v, EdgeKind::Real)).collect();
    let touched: BTreeSet<usize> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    let blocks = pieces(&touched, &edges, &[]);
    let mut s = Splitter {
        next_id: 0,
        out: Vec::new(),
    };
    let disconnected = blocks.len() > 1;
    for b in blocks {
        let e = within(&edges, &b);
        s.split(b, e);
    }
    s.out.sort();
    TwoSumDecomposition {
        components: s.out,
        disconnected,
    }
}

/// Treewidth at most 2, by deleting vertices of degree ≤ 1 and bypassing
/// vertices of degree 2.
pub fn is_partial_two_tree(g: &Graph) -> bool {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = (0..g.vertex_count()).map(|v| (v, BTreeSet::new())).collect();
    for (u, v) in g.edges() {
        adj.get_mut(&u).expect("vertex").insert(v);
        adj.get_mut(&v).expect("vertex").insert(u);
    }
    loop {
        let Some(v) = adj.iter().find(|(_, n)| n.len() <= 2).map(|(&v, _)| v) else {
            return adj.is_empty();
        };
        let nbrs: Vec<usize> = adj.remove(&v).expect("vertex").into_iter().collect();
        for &x in &nbrs {
            adj.get_mut(&x).expect("vertex").remove(&v);
        }
        if let [x, y] = nbrs[..] {
            adj.get_mut(&x).expect("vertex").insert(y);
            adj.get_mut(&y).expect("vertex").insert(x);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CayleyVerdict {
    Convexifiable,
    NotConvexifiable {
        parameter: (usize, usize),
        component: SumComponent,
    },
}

impl CayleyVerdict {
    pub fn is_convexifiable(&self) -> bool {
        *self == CayleyVerdict::Convexifiable
    }
}

fn check_parameters(h: &Graph, f: &[(usize, usize)]) -> Result<Graph, CayleyError> {
    let mut union = h.clone();
    for &(u, v) in f {
        if h.has_edge(u, v) {
            return Err(CayleyError::ParameterIsEdge(u, v));
        }
        union.add_edge(u, v).map_err(|_| CayleyError::VertexOutOfRange {
            vertex: u.max(v),
            n: h.vertex_count(),
        })?;
    }
    Ok(union)
}

/// Every minimal 2-sum component of `H ∪ F` holding both ends of some
/// parameter must be a partial 2-tree.
pub fn convex_cayley_check(h: &Graph, f: &[(usize, usize)]) -> Result<CayleyVerdict, CayleyError> {
    let union = check_parameters(h, f)?;
    let parts = two_sum_components(&union);
    for &(u, v) in f {
        for c in &parts.components {
            if c.contains(u) && c.contains(v) && !is_partial_two_tree(&c.simple_graph()) {
                return Ok(CayleyVerdict::NotConvexifiable {
                    parameter: key(u, v),
                    component: c.clone(),
                });
            }
        }
    }
    Ok(CayleyVerdict::Convexifiable)
}

/// Built from one edge by attaching vertices onto existing edges.
pub fn is_two_tree(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n < 2 || g.edge_count() != 2 * n - 3 {
        return false;
    }
    let mut g = g.clone();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    while alive.len() > 2 {
        let pick = alive.iter().copied().find(|&v| {
            let nb: Vec<usize> = g.neighbors(v);
            nb.len() == 2 && g.has_edge(nb[0], nb[1])
        });
        let Some(v) = pick else { return false };
        for x in g.neighbors(v) {
            g.remove_edge(v, x);
        }
        alive.remove(&v);
    }
    g.edge_count() == 1
}

#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: Real,
    pub hi: Real,
}

impl Interval {
    pub fn exact(x: Real) -> Self {
        Interval { lo: x.clone(), hi: x }
    }
}

/// `coeffs · x ≤ rhs` over the parameter lengths.
#[derive(Clone, Debug)]
pub struct Inequality {
    pub coeffs: Vec<i32>,
    pub rhs: Real,
}

#[derive(Clone, Debug)]
pub struct CayleyPolytope {
    pub vars: Vec<(usize, usize)>,
    pub ineqs: Vec<Inequality>,
}

impl CayleyPolytope {
    pub fn contains(&self, x: &[Real]) -> bool {
        self.ineqs.iter().all(|q| {
            let lhs = q.coeffs.iter().zip(x).fold(Real::zero(), |s, (&c, v)| s + Real::int(c as i64) * v.clone());
            lhs.cmp_tol(&q.rhs) != core::cmp::Ordering::Greater
        })
    }
}

impl fmt::Display for CayleyPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.ineqs {
            let mut first = true;
            for (&c, &(u, v)) in q.coeffs.iter().zip(&self.vars) {
                if c == 0 {
                    continue;
                }
                match (first, c < 0) {
                    (true, true) => write!(f, "-")?,
                    (true, false) => {}
                    (false, true) => write!(f, " - ")?,
                    (false, false) => write!(f, " + ")?,
                }
                if c.abs() != 1 {
                    write!(f, "{}", c.abs())?;
                }
                write!(f, "d{u}_{v}")?;
                first = false;
            }
            if first {
                write!(f, "0")?;
            }
            writeln!(f, " <= {}", q.rhs)?;
        }
        Ok(())
    }
}

/// Triangle inequalities of every triangle of `H ∪ F` that holds a
/// parameter, with known lengths substituted. For an interval length the
/// endpoint that loosens the inequality is used.
pub fn two_tree_polytope(
    h: &Graph,
    f: &[(usize, usize)],
    lengths: &BTreeMap<(usize, usize), Interval>,
) -> Result<CayleyPolytope, CayleyError> {
    let union = check_parameters(h, f)?;
    if !is_two_tree(&union) {
        return Err(CayleyError::NotTwoTree);
    }
    let vars: Vec<(usize, usize)> = f.iter().map(|&(u, v)| key(u, v)).collect();
    let var = |e: (usize, usize)| vars.iter().position(|&x| x == e);
    let n = union.vertex_count();
    let mut ineqs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let tri = [(a, b), (a, c), (b, c)];
                if !tri.iter().all(|&(u, v)| union.has_edge(u, v)) || !tri.iter().any(|&e| var(e).is_some()) {
                    continue;
                }
                for big in 0..3 {
                    // tri[big] - others <= 0
                    let mut coeffs = alloc::vec![0i32; vars.len()];
                    let mut rhs = Real::zero();
                    for (k, &e) in tri.iter().enumerate() {
                        let sign = if k == big { 1 } else { -1 };
                        match var(e) {
                            Some(i) => coeffs[i] += sign,
                            None => {
                                let len = lengths.get(&e).ok_or(CayleyError::MissingLength(e.0, e.1))?;
                                rhs = if sign > 0 { rhs - len.lo.clone() } else { rhs + len.hi.clone() };
                            }
                        }
                    }
                    ineqs.push(Inequality { coeffs, rhs });
                }
            }
        }
    }
    Ok(CayleyPolytope { vars, ineqs })
}

/// Every split of the edge set into kept edges and parameters passes the
/// convexifiability test.
pub fn flattenable_3d_bruteforce(h: &Graph) -> Result<bool, CayleyError> {
    let edges: Vec<(usize, usize)> = h.edges().collect();
    if edges.len() > MAX_FLATTEN_EDGES {
        return Err(CayleyError::TooManyEdges {
            edges: edges.len(),
            max: MAX_FLATTEN_EDGES,
        });
    }
    for mask in 0u32..(1u32 << edges.len()) {
        let mut g = h.clone();
        let mut f = Vec::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.remove_edge(u, v);
                f.push((u, v));
            }
        }
        if !convex_cayley_check(&g, &f)?.is_convexifiable() {
            return Ok(false);
        }
    }
    Ok(true)
}
