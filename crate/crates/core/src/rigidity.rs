//! Generic 3D rigidity by exact rank of the rigidity matrix at random
//! integer embeddings.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

/// Largest vertex count for the exhaustive component search.
pub const MAX_COMPONENT_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("{n} vertices exceeds the exhaustive limit of {max}")]
    TooManyVertices { n: usize, max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rigidity {
    Flexible,
    /// Rigid with independent edges.
    Rigid,
    /// Rigid with more edges than the rank.
    Overbraced,
}

impl Rigidity {
    pub fn is_rigid(self) -> bool {
        self != Rigidity::Flexible
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub rank: usize,
    pub full_rank: usize,
    pub edges: usize,
    pub verdict: Rigidity,
}

/// Rank of a rigid framework on `n` generic points in 3-space.
pub fn full_rank(n: usize) -> usize {
    if n <= 3 {
        n * n.saturating_sub(1) / 2
    } else {
        3 * n - 6
    }
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            for j in col + 1..cols {
                let v = &row[j] * &pivot_row[col] - &row[col] * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Random integer embeddings shared across rank queries on one graph.
#[derive(Clone, Debug)]
pub struct RankOracle {
    embeddings: Vec<Vec<[i64; 3]>>,
    wide: Vec<Vec<[i64; 3]>>,
}

fn embeddings(n: usize, count: usize, range: i64, seed: u64) -> Vec<Vec<[i64; 3]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| core::array::from_fn(|_| rng.random_range(-range..=range)))
                .collect()
        })
        .collect()
}

impl RankOracle {
    pub fn new(n: usize) -> Self {
        Self::with_seed(n, 0x5eed)
    }

    pub fn with_seed(n: usize, seed: u64) -> Self {
        RankOracle {
            embeddings: embeddings(n, 3, 1_000_000, seed),
            wide: embeddings(n, 3, 1_000_000_000_000, seed ^ 0xa5a5),
        }
    }

    fn rank_at(points: &[[i64; 3]], edges: &[(usize, usize)], vertices: &[usize]) -> usize {
        let col = |v: usize| vertices.iter().position(|&x| x == v).expect("edge inside vertex set");
        let rows = edges
            .iter()
            .map(|&(u, v)| {
                let mut row = vec![BigInt::zero(); 3 * vertices.len()];
                let (cu, cv) = (col(u), col(v));
                for k in 0..3 {
                    let d = points[u][k] - points[v][k];
                    row[3 * cu + k] = BigInt::from(d);
                    row[3 * cv + k] = BigInt::from(-d);
                }
                row
            })
            .collect();
        bareiss_rank(rows)
    }

    /// Rank of the rigidity matrix of `edges` over the columns of `vertices`.
    /// Any embedding gives a lower bound on the generic rank, so the maximum
    /// is taken; a wider coordinate range is tried when the three samples
    /// disagree.
    pub fn rank(&self, edges: &[(usize, usize)], vertices: &[usize]) -> usize {
        let bound = edges.len().min(full_rank(vertices.len()));
        let mut ranks = Vec::with_capacity(3);
        for e in &self.embeddings {
            let r = Self::rank_at(e, edges, vertices);
            if r == bound {
                return r;
            }
            ranks.push(r);
        }
        let mut best = ranks.iter().copied().max().unwrap_or(0);
        if ranks.iter().any(|&r| r != best) {
            for e in &self.wide {
                best = best.max(Self::rank_at(e, edges, vertices));
            }
        }
        best
    }

    pub fn is_rigid(&self, g: &Graph, vertices: &[usize]) -> bool {
        let edges = g.edges_within(vertices);
        let k = vertices.len();
        if edges.len() < full_rank(k) {
            return false;
        }
        self.rank(&edges, vertices) == full_rank(k)
    }
}

pub fn rigidity_rank(g: &Graph) -> usize {
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let edges: Vec<_> = g.edges().collect();
    RankOracle::new(g.vertex_count()).rank(&edges, &all)
}

pub fn generic_rigidity(g: &Graph) -> RigidityReport {
    let rank = rigidity_rank(g);
    let full = full_rank(g.vertex_count());
    let verdict = if rank < full {
        Rigidity::Flexible
    } else if g.edge_count() > rank {
        Rigidity::Overbraced
    } else {
        Rigidity::Rigid
    };
    RigidityReport {
        rank,
        full_rank: full,
        edges: g.edge_count(),
        verdict,
    }
}

pub fn is_rigid(g: &Graph) -> bool {
    generic_rigidity(g).verdict.is_rigid()
}

/// Quick necessary conditions before a rank computation.
fn may_be_rigid(g: &Graph, set: &[usize]) -> bool {
    let k = set.len();
    if k <= 1 {
        return true;
    }
    let edges = g.edges_within(set);
    if edges.len() < full_rank(k) {
        return false;
    }
    if k >= 4 {
        let low = set
            .iter()
            .any(|&v| edges.iter().filter(|&&(a, b)| a == v || b == v).count() < 3);
        if low {
            return false;
        }
    }
    true
}

/// Maximal vertex sets inducing a rigid subgraph, each sorted, listed by
/// decreasing size then lexicographically. Isolated vertices appear as
/// singletons.
pub fn rigid_components(g: &Graph) -> Result<Vec<Vec<usize>>, RigidityError> {
    let n = g.vertex_count();
    if n > MAX_COMPONENT_VERTICES {
        return Err(RigidityError::TooManyVertices {
            n,
            max: MAX_COMPONENT_VERTICES,
        });
    }
    let oracle = RankOracle::new(n);
    let mut masks: Vec<u32> = (1u32..(1u32 << n)).collect();
    masks.sort_by_key(|m| (core::cmp::Reverse(m.count_ones()), *m));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|&f| f & m == m) {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
        if may_be_rigid(g, &set) && (set.len() <= 1 || oracle.is_rigid(g, &set)) {
            found.push(m);
        }
    }
    let mut out: Vec<Vec<usize>> = found
        .iter()
        .map(|&m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    for (i, a) in out.iter().enumerate() {
        for b in &out[i + 1..] {
            debug_assert!(a.iter().filter(|v| b.contains(v)).count() <= 2, "components {a:?} and {b:?}");
        }
    }
    Ok(out)
}
