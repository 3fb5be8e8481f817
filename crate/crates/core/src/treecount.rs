//! Simplified assembly trees, exhaustive enumeration, group actions on trees,
//! and pathway censuses by Möbius inversion.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::egf::{self, EgfError};
use crate::permgroup::{self, GroupError, PermGroup, Permutation, SubgroupLattice};

/// Largest leaf set accepted by the exhaustive enumerators.
pub const MAX_ENUMERATION_LEAVES: usize = 9;
/// Largest leaf set accepted by [`pathways_bruteforce`].
pub const MAX_ORBIT_LEAVES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("{leaves} leaves exceeds the exhaustive limit of {limit}")]
    TooManyLeaves { leaves: usize, limit: usize },
    #[error("permutation degree {degree} does not match {leaves} leaves")]
    DegreeMismatch { degree: usize, leaves: usize },
    #[error("t̄ of subgroup {subgroup} is negative")]
    NegativeTBar { subgroup: usize },
    #[error("missing fixed count for subgroup {0}")]
    MissingCount(usize),
    #[error("pathway count for orbit size {m} is not an integer")]
    NonIntegralCensus { m: usize },
    #[error("group of degree {degree} cannot act freely with {orbits} orbits of size {order}")]
    OrbitCountMismatch {
        degree: usize,
        orbits: usize,
        order: usize,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Egf(#[from] EgfError),
}

/// A leaf-labelled rooted tree whose internal vertices have at least two
/// children, identified with its set of internal-vertex leaf sets.
///
/// Clusters are bitmasks over `0..leaves`, kept sorted; this sorted list is
/// the canonical form. The single-leaf tree has no clusters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplifiedAssemblyTree {
    leaves: usize,
    clusters: Vec<u64>,
}

impl SimplifiedAssemblyTree {
    /// Builds a tree from its internal clusters, validating the hierarchy.
    pub fn from_clusters(leaves: usize, mut clusters: Vec<u64>) -> Option<Self> {
        if leaves == 0 || leaves > 64 {
            return None;
        }
        clusters.sort_unstable();
        clusters.dedup();
        let full = full_mask(leaves);
        if leaves == 1 {
            return clusters.is_empty().then_some(SimplifiedAssemblyTree { leaves, clusters });
        }
        if !clusters.contains(&full) {
            return None;
        }
        for &c in &clusters {
            if c & !full != 0 || c.count_ones() < 2 {
                return None;
            }
        }
        for (i, &a) in clusters.iter().enumerate() {
            for &b in &clusters[i + 1..] {
                if a & b != 0 && a & b != a && a & b != b {
                    return None;
                }
            }
            // At least two children: the maximal proper sub-clusters and
            // uncovered leaves must number ≥ 2.
            if children_of(a, &clusters).len() < 2 {
                return None;
            }
        }
        Some(SimplifiedAssemblyTree { leaves, clusters })
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn clusters(&self) -> &[u64] {
        &self.clusters
    }

    pub fn internal_vertices(&self) -> usize {
        self.clusters.len()
    }

    /// Relabels every leaf by `g` and re-canonicalizes.
    pub fn act(&self, g: &Permutation) -> SimplifiedAssemblyTree {
        let mut clusters: Vec<u64> = self.clusters.iter().map(|&c| map_mask(g, c)).collect();
        clusters.sort_unstable();
        SimplifiedAssemblyTree {
            leaves: self.leaves,
            clusters,
        }
    }

    pub fn is_fixed_by(&self, g: &Permutation) -> bool {
        self.clusters
            .iter()
            .all(|&c| self.clusters.binary_search(&map_mask(g, c)).is_ok())
    }

    fn render(&self, mask: u64, out: &mut String) {
        use core::fmt::Write;
        if mask.count_ones() == 1 {
            let _ = write!(out, "{}", mask.trailing_zeros() + 1);
            return;
        }
        out.push('[');
        let children = children_of(mask, &self.clusters);
        for (k, c) in children.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            self.render(*c, out);
        }
        out.push(']');
    }
}

impl fmt::Display for SimplifiedAssemblyTree {
    /// Nested arrays of 1-based leaf labels, children ordered by smallest leaf.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(full_mask(self.leaves), &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for SimplifiedAssemblyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn map_mask(g: &Permutation, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << g.apply(i);
        m &= m - 1;
    }
    out
}

/// Children of `mask`: maximal clusters strictly inside it plus singleton
/// leaves not covered by them, ordered by smallest leaf.
fn children_of(mask: u64, clusters: &[u64]) -> Vec<u64> {
    let inner: Vec<u64> = clusters
        .iter()
        .copied()
        .filter(|&c| c != mask && c & mask == c)
        .collect();
    let mut kids: Vec<u64> = inner
        .iter()
        .copied()
        .filter(|&c| !inner.iter().any(|&d| d != c && d & c == c))
        .collect();
    let covered = kids.iter().fold(0, |a, &c| a | c);
    let mut rest = mask & !covered;
    while rest != 0 {
        kids.push(rest & rest.wrapping_neg());
        rest &= rest - 1;
    }
    kids.sort_by_key(|c| c.trailing_zeros());
    kids
}

fn guard(leaves: usize, limit: usize) -> Result<(), TreeError> {
    if leaves > limit {
        return Err(TreeError::TooManyLeaves { leaves, limit });
    }
    Ok(())
}

/// Calls `visit` with the (unsorted) cluster list of every tree on
/// `leaves` labels. Each tree is produced once: the root's children are a
/// set partition into ≥ 2 blocks, chosen recursively per block.
pub fn for_each_tree<F: FnMut(&[u64])>(leaves: usize, mut visit: F) -> Result<(), TreeError> {
    guard(leaves, MAX_ENUMERATION_LEAVES)?;
    if leaves == 0 {
        return Ok(());
    }
    if leaves == 1 {
        visit(&[]);
        return Ok(());
    }
    let full = full_mask(leaves);
    let mut clusters = alloc::vec![full];
    let mut pending = alloc::vec![full];
    expand(&mut clusters, &mut pending, &mut visit);
    Ok(())
}

fn expand<F: FnMut(&[u64])>(clusters: &mut Vec<u64>, pending: &mut Vec<u64>, visit: &mut F) {
    let Some(set) = pending.pop() else {
        visit(clusters);
        return;
    };
    let elems: Vec<usize> = (0..64).filter(|i| set >> i & 1 == 1).collect();
    let mut blocks: Vec<u64> = Vec::new();
    partitions(&elems, 0, &mut blocks, &mut |blocks| {
        if blocks.len() < 2 {
            return;
        }
        let c0 = clusters.len();
        let p0 = pending.len();
        for &b in blocks {
            if b.count_ones() >= 2 {
                clusters.push(b);
                pending.push(b);
            }
        }
        expand(clusters, pending, visit);
        clusters.truncate(c0);
        pending.truncate(p0);
    });
    pending.push(set);
}

/// Restricted-growth enumeration of set partitions of `elems[i..]` on top of
/// the partial `blocks`.
fn partitions<F: FnMut(&[u64])>(elems: &[usize], i: usize, blocks: &mut Vec<u64>, f: &mut F) {
    if i == elems.len() {
        f(blocks);
        return;
    }
    let bit = 1u64 << elems[i];
    for b in 0..blocks.len() {
        blocks[b] |= bit;
        partitions(elems, i + 1, blocks, f);
        blocks[b] &= !bit;
    }
    blocks.push(bit);
    partitions(elems, i + 1, blocks, f);
    blocks.pop();
}

/// All trees on `leaves` labels in canonical form, sorted.
pub fn enumerate_trees(leaves: usize) -> Result<Vec<SimplifiedAssemblyTree>, TreeError> {
    let mut out = Vec::new();
    for_each_tree(leaves, |c| {
        let mut clusters = c.to_vec();
        clusters.sort_unstable();
        out.push(SimplifiedAssemblyTree { leaves, clusters });
    })?;
    out.sort();
    Ok(out)
}

pub fn act_on_tree(g: &Permutation, tree: &SimplifiedAssemblyTree) -> Result<SimplifiedAssemblyTree, TreeError> {
    if g.degree() != tree.leaves {
        return Err(TreeError::DegreeMismatch {
            degree: g.degree(),
            leaves: tree.leaves,
        });
    }
    Ok(tree.act(g))
}

/// Number of trees on the group's domain fixed by every element of `h`.
pub fn fixed_tree_count_bruteforce(h: &PermGroup) -> Result<u64, TreeError> {
    let leaves = h.degree();
    let gens = h.generators();
    let mut count = 0u64;
    let mut scratch = Vec::new();
    for_each_tree(leaves, |c| {
        scratch.clear();
        scratch.extend_from_slice(c);
        scratch.sort_unstable();
        let fixed = gens.iter().all(|g| {
            scratch
                .iter()
                .all(|&m| scratch.binary_search(&map_mask(g, m)).is_ok())
        });
        if fixed {
            count += 1;
        }
    })?;
    Ok(count)
}

/// Explicit orbits of trees on the group's domain, each sorted, listed by
/// smallest member.
pub fn pathways_bruteforce(g: &PermGroup) -> Result<Vec<Vec<SimplifiedAssemblyTree>>, TreeError> {
    guard(g.degree(), MAX_ORBIT_LEAVES)?;
    let trees = enumerate_trees(g.degree())?;
    let mut seen = alloc::vec![false; trees.len()];
    let mut orbits = Vec::new();
    for i in 0..trees.len() {
        if seen[i] {
            continue;
        }
        let orbit = g.orbit(&trees[i], |p, t| t.act(p));
        for t in &orbit {
            let j = trees.binary_search(t).expect("orbit stays in the tree set");
            seen[j] = true;
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Orbit-size histogram of explicit orbits.
pub fn orbit_size_histogram(orbits: &[Vec<SimplifiedAssemblyTree>]) -> BTreeMap<usize, BigUint> {
    let mut hist: BTreeMap<usize, BigUint> = BTreeMap::new();
    for o in orbits {
        *hist.entry(o.len()).or_default() += 1u32;
    }
    hist
}

/// `t̄(H) = Σ_{H ≤ K} μ(H,K)·t(K)`, with `t_values[k]` the fixed count of
/// subgroup `k`.
pub fn t_bar(lattice: &SubgroupLattice, h: usize, t_values: &[BigUint]) -> Result<BigInt, TreeError> {
    let mut sum = BigInt::zero();
    for k in h..lattice.len() {
        if !lattice.is_contained(h, k) {
            continue;
        }
        let mu = lattice.mobius_value(h, k)?;
        if mu == 0 {
            continue;
        }
        let t = t_values.get(k).ok_or(TreeError::MissingCount(k))?;
        sum += BigInt::from(mu) * BigInt::from(t.clone());
    }
    if sum.is_negative() {
        return Err(TreeError::NegativeTBar { subgroup: h });
    }
    Ok(sum)
}

/// Per-conjugacy-class figures behind a census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassStat {
    pub class: usize,
    pub representative: usize,
    pub order: usize,
    pub index: usize,
    pub size: usize,
    pub t: BigUint,
    pub t_bar: BigUint,
}

/// Number of pathways `N(m)` of each size `m` for a free action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathwayCensus {
    pub group_order: usize,
    pub leaf_count: usize,
    /// `m → N(m)` for every index `m` of some subgroup.
    pub counts: BTreeMap<usize, BigUint>,
    pub classes: Vec<ClassStat>,
}

impl PathwayCensus {
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// `Σ m·N(m)`, the total number of trees.
    pub fn weighted_total(&self) -> BigUint {
        self.counts.iter().map(|(&m, n)| n * BigUint::from(m)).sum()
    }

    pub fn get(&self, m: usize) -> BigUint {
        self.counts.get(&m).cloned().unwrap_or_default()
    }
}

/// Census over `n_orbits` free orbits of `g`; `g` itself must act freely with
/// exactly that many orbits.
pub fn pathway_census(g: &PermGroup, n_orbits: usize) -> Result<PathwayCensus, TreeError> {
    let lattice = permgroup::subgroups(g)?;
    pathway_census_with_lattice(&lattice, n_orbits)
}

pub fn pathway_census_with_lattice(lattice: &SubgroupLattice, n_orbits: usize) -> Result<PathwayCensus, TreeError> {
    let g = lattice.parent();
    if g.degree() != n_orbits * g.order() {
        return Err(TreeError::OrbitCountMismatch {
            degree: g.degree(),
            orbits: n_orbits,
            order: g.order(),
        });
    }
    let t = egf::fixed_counts_on_orbits(lattice, n_orbits)?;
    let mut tbar = Vec::with_capacity(lattice.len());
    for h in 0..lattice.len() {
        let v = t_bar(lattice, h, &t)?;
        tbar.push(v.to_biguint().expect("checked nonnegative"));
    }
    let mut sums: BTreeMap<usize, BigUint> = BTreeMap::new();
    for h in 0..lattice.len() {
        *sums.entry(lattice.index(h)).or_default() += &tbar[h];
    }
    let mut counts = BTreeMap::new();
    for (m, s) in sums {
        let (q, r) = s.div_rem(&BigUint::from(m));
        if !r.is_zero() {
            return Err(TreeError::NonIntegralCensus { m });
        }
        counts.insert(m, q);
    }
    let classes = lattice
        .classes()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let rep = members[0];
            ClassStat {
                class: c,
                representative: rep,
                order: lattice.order(rep),
                index: lattice.index(rep),
                size: members.len(),
                t: t[rep].clone(),
                t_bar: tbar[rep].clone(),
            }
        })
        .collect();
    Ok(PathwayCensus {
        group_order: g.order(),
        leaf_count: g.degree(),
        counts,
        classes,
    })
}

/// Three-significant-digit scientific rendering, e.g. `1.68e10`, truncating
/// the remaining digits; values below 1000 are printed exactly.
pub fn sci3(n: &BigUint) -> String {
    let digits = n.to_str_radix(10);
    if digits.len() <= 3 {
        return digits;
    }
    alloc::format!("{}.{}e{}", &digits[..1], &digits[1..3], digits.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named_group;
    use alloc::string::ToString;

    #[test]
    fn tree_counts_match_sequence() {
        let expected = [1usize, 1, 4, 26, 236, 2752];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(enumerate_trees(n + 1).unwrap().len(), e, "n = {}", n + 1);
        }
        assert!(matches!(
            enumerate_trees(10),
            Err(TreeError::TooManyLeaves { .. })
        ));
    }

    #[test]
    fn rendering_and_validation() {
        let t = SimplifiedAssemblyTree::from_clusters(4, alloc::vec![0b1111, 0b0011, 0b1100]).unwrap();
        assert_eq!(t.to_string(), "[[1,2],[3,4]]");
        let star = SimplifiedAssemblyTree::from_clusters(3, alloc::vec![0b111]).unwrap();
        assert_eq!(star.to_string(), "[1,2,3]");
        assert_eq!(SimplifiedAssemblyTree::from_clusters(1, alloc::vec![]).unwrap().to_string(), "1");
        // overlapping clusters
        assert!(SimplifiedAssemblyTree::from_clusters(3, alloc::vec![0b111, 0b011, 0b110]).is_none());
        assert!(SimplifiedAssemblyTree::from_clusters(2, alloc::vec![0b11, 0b01]).is_none());
    }

    #[test]
    fn klein_action_on_balanced_tree() {
        let g = named_group("klein4").unwrap();
        let t = SimplifiedAssemblyTree::from_clusters(4, alloc::vec![0b1111, 0b0011, 0b1100]).unwrap();
        let a = Permutation::parse_cycles("(1 2)(3 4)", Some(4)).unwrap();
        assert_eq!(act_on_tree(&a, &t).unwrap(), t);
        assert_eq!(g.orbit(&t, |p, x| x.act(p)).len(), 1);
        let cat = SimplifiedAssemblyTree::from_clusters(4, alloc::vec![0b1111, 0b0111, 0b0011]).unwrap();
        assert_eq!(g.orbit(&cat, |p, x| x.act(p)).len(), 4);
    }

    #[test]
    fn klein_census_and_t_bar() {
        let g = named_group("klein4").unwrap();
        let c = pathway_census(&g, 1).unwrap();
        assert_eq!(c.get(1), BigUint::from(4u32));
        assert_eq!(c.get(2), BigUint::from(3u32));
        assert_eq!(c.get(4), BigUint::from(4u32));
        assert_eq!(c.total(), BigUint::from(11u32));
        let tb: Vec<u32> = c
            .classes
            .iter()
            .map(|s| s.t_bar.to_string().parse().unwrap())
            .collect();
        assert_eq!(tb, [16, 2, 2, 2, 4]);
        let orbits = pathways_bruteforce(&g).unwrap();
        assert_eq!(orbit_size_histogram(&orbits), c.counts);
    }

    #[test]
    fn sci3_truncates() {
        assert_eq!(sci3(&BigUint::from(204u32)), "204");
        assert_eq!(sci3(&BigUint::from(16_865_654_580u64)), "1.68e10");
        assert_eq!(sci3(&BigUint::from(9_996u32)), "9.99e3");
        assert_eq!(sci3(&BigUint::from(1000u32)), "1.00e3");
    }
}
