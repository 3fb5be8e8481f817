//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use asmsym_core::graph::Graph;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};

/// `t₁ … t_n` by splitting off the block holding the first leaf:
/// `t(n) = Σ_k C(n−1, k−1) t(k) P(n−k)`, where `P(m)` counts set partitions
/// weighted by trees on each block, so `P(m) = 2t(m)` for `m ≥ 2`.
pub fn tree_counts(n: usize) -> Vec<BigUint> {
    let mut t = vec![BigUint::from(0u32); n + 1];
    if n >= 1 {
        t[1] = BigUint::from(1u32);
    }
    let p = |t: &[BigUint], m: usize| -> BigUint {
        if m <= 1 {
            BigUint::from(1u32)
        } else {
            &t[m] * 2u32
        }
    };
    for m in 2..=n {
        let mut s = BigUint::from(0u32);
        for k in 1..m {
            s += binomial(m - 1, k - 1) * &t[k] * p(&t, m - k);
        }
        t[m] = s;
    }
    t.remove(0);
    t
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn pair_bit(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = (u.min(v), u.max(v));
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

pub fn mask_of(g: &Graph) -> u64 {
    let n = g.vertex_count();
    g.edges().fold(0, |m, (u, v)| m | 1 << pair_bit(n, u, v))
}

fn contract(n: usize, mask: u64, u: usize, v: usize) -> u64 {
    let pairs = pair_list(n);
    let relabel = |x: usize| {
        let x = if x == v { u } else { x };
        if x > v {
            x - 1
        } else {
            x
        }
    };
    let mut out = 0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 0 || (a, b) == (u, v) {
            continue;
        }
        let (a, b) = (relabel(a), relabel(b));
        if a != b {
            out |= 1 << pair_bit(n - 1, a, b);
        }
    }
    out
}

fn k4_masks(n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let q = [a, b, c, d];
                    let mut m = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            m |= 1 << pair_bit(n, q[i], q[j]);
                        }
                    }
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Tables `tables[n][mask]`: whether the graph on `n` vertices has a `K₄`
/// minor, by deletion and contraction down to a `K₄` subgraph.
pub struct MinorOracle {
    tables: Vec<Vec<bool>>,
    memo: HashMap<(usize, u64), bool>,
}

impl MinorOracle {
    pub fn new(max_table: usize) -> Self {
        let mut tables: Vec<Vec<bool>> = Vec::new();
        for n in 0..=max_table {
            let m = n * n.saturating_sub(1) / 2;
            let quads = k4_masks(n);
            let pairs = pair_list(n);
            let mut t = vec![false; 1 << m];
            for mask in 0u64..(1 << m) {
                let mut yes = quads.iter().any(|&q| mask & q == q);
                if !yes {
                    yes = (0..m).any(|i| mask >> i & 1 == 1 && t[(mask & !(1 << i)) as usize]);
                }
                if !yes && n > 4 {
                    yes = pairs
                        .iter()
                        .enumerate()
                        .any(|(i, &(u, v))| mask >> i & 1 == 1 && tables[n - 1][contract(n, mask, u, v) as usize]);
                }
                t[mask as usize] = yes;
            }
            tables.push(t);
        }
        MinorOracle {
            tables,
            memo: HashMap::new(),
        }
    }

    pub fn has_k4_minor(&mut self, g: &Graph) -> bool {
        self.query(g.vertex_count(), mask_of(g))
    }

    fn query(&mut self, n: usize, mask: u64) -> bool {
        if n < self.tables.len() {
            return self.tables[n][mask as usize];
        }
        if let Some(&v) = self.memo.get(&(n, mask)) {
            return v;
        }
        let m = n * (n - 1) / 2;
        let mut yes = k4_masks(n).iter().any(|&q| mask & q == q);
        if !yes {
            yes = (0..m).any(|i| mask >> i & 1 == 1 && self.query(n, mask & !(1 << i)));
        }
        if !yes {
            let pairs = pair_list(n);
            yes = pairs
                .iter()
                .enumerate()
                .any(|(i, &(u, v))| mask >> i & 1 == 1 && self.query(n - 1, contract(n, mask, u, v)));
        }
        self.memo.insert((n, mask), yes);
        yes
    }
}

/// Every permutation of `0..n`, by Heap's algorithm.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Smallest relabelled mask over all vertex permutations.
pub fn canonical_mask(n: usize, mask: u64, perms: &[Vec<usize>]) -> u64 {
    let pairs = pair_list(n);
    perms
        .iter()
        .map(|p| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u64, |m, (_, &(u, v))| m | 1 << pair_bit(n, p[u], p[v]))
        })
        .min()
        .unwrap_or(0)
}

/// Rank of the 3D rigidity matrix at a random real embedding, by Gaussian
/// elimination with partial pivoting.
pub fn float_rigidity_rank(n: usize, edges: &[(usize, usize)], seed: u64) -> usize {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let pts: Vec<[f64; 3]> = (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    let mut m: Vec<Vec<f64>> = edges
        .iter()
        .map(|&(u, v)| {
            let mut row = vec![0.0; 3 * n];
            for k in 0..3 {
                let d = pts[u][k] - pts[v][k];
                row[3 * u + k] = d;
                row[3 * v + k] = -d;
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..3 * n {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())) else {
            break;
        };
        if m[p][col].abs() < 1e-9 {
            continue;
        }
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let f = m[r][col] / m[rank][col];
            for c in col..3 * n {
                m[r][c] -= f * m[rank][c];
            }
        }
        rank += 1;
    }
    rank
}

pub fn float_full_rank(n: usize) -> usize {
    if n <= 3 {
        n * n.saturating_sub(1) / 2
    } else {
        3 * n - 6
    }
}

/// Canonical masks of every 12-edge graph on six vertices with minimum
/// degree 3 that is generically rigid.
pub fn rigid_twelve_edge_orbits() -> BTreeSet<u64> {
    let n = 6;
    let pairs = pair_list(n);
    let perms = all_permutations(n);
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << pairs.len()) {
        if mask.count_ones() != 12 {
            continue;
        }
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let min_degree = (0..n).map(|v| edges.iter().filter(|&&(a, b)| a == v || b == v).count()).min().unwrap();
        if min_degree < 3 || float_rigidity_rank(n, &edges, 11) != float_full_rank(n) {
            continue;
        }
        out.insert(canonical_mask(n, mask, &perms));
    }
    out
}
