use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{GroupError, PermGroup, Permutation};

/// Default order cap for [`subgroups`].
pub const DEFAULT_LATTICE_CAP: usize = 360;

/// The full lattice of subgroups of a finite group, with containment,
/// conjugacy classes and the Möbius function.
///
/// Subgroup `i` is stored as sorted indices into the parent's element list;
/// subgroups are ordered by `(order, element list)`, so index 0 is the trivial
/// subgroup and the last index is the parent itself.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    parent: PermGroup,
    members: Vec<Vec<usize>>,
    generators: Vec<Vec<usize>>,
    contained: Vec<Vec<bool>>,
    mobius: Vec<Vec<i64>>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

type Bits = Vec<u64>;

struct Table {
    n: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
}

impl Table {
    fn new(g: &PermGroup) -> Self {
        let n = g.order();
        let elems = g.elements();
        let mut mul = alloc::vec![0u32; n * n];
        for (a, x) in elems.iter().enumerate() {
            for (b, y) in elems.iter().enumerate() {
                mul[a * n + b] = g.index_of(&x.compose(y)).expect("closed") as u32;
            }
        }
        let inv = elems
            .iter()
            .map(|x| g.index_of(&x.inverse()).expect("closed") as u32)
            .collect();
        let identity = g.index_of(&g.identity()).expect("identity");
        Table {
            n,
            mul,
            inv,
            identity,
        }
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    fn close(&self, gens: &[usize]) -> Bits {
        let mut bits = alloc::vec![0u64; self.n.div_ceil(64)];
        let mut stack = alloc::vec![self.identity];
        set(&mut bits, self.identity);
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !get(&bits, y) {
                    set(&mut bits, y);
                    stack.push(y);
                }
            }
        }
        bits
    }
}

#[inline]
fn set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[inline]
fn get(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn ones(bits: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let t = word.trailing_zeros() as usize;
            out.push(w * 64 + t);
            word &= word - 1;
        }
    }
    out
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Enumerates every subgroup of `group` (default cap 360 on `|group|`).
pub fn subgroups(group: &PermGroup) -> Result<SubgroupLattice, GroupError> {
    subgroups_with_cap(group, DEFAULT_LATTICE_CAP)
}

/// Cyclic subgroups first, then closure of the set under joins with cyclic
/// subgroups until nothing new appears. Every subgroup is a join of cyclic
/// subgroups, so the fixed point is the whole lattice.
pub fn subgroups_with_cap(group: &PermGroup, cap: usize) -> Result<SubgroupLattice, GroupError> {
    if group.order() > cap {
        return Err(GroupError::TooLarge { cap });
    }
    let table = Table::new(group);
    let n = table.n;

    let mut found: BTreeMap<Bits, Vec<usize>> = BTreeMap::new();
    let mut cyclic: Vec<(Bits, usize)> = Vec::new();
    for x in 0..n {
        let bits = table.close(&[x]);
        if !found.contains_key(&bits) {
            found.insert(bits.clone(), if x == table.identity { Vec::new() } else { alloc::vec![x] });
            if x != table.identity {
                cyclic.push((bits, x));
            }
        }
    }

    let mut frontier: Vec<Bits> = found.keys().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            let h_gens = found[h].clone();
            for (c_bits, c_gen) in &cyclic {
                if subset(c_bits, h) {
                    continue;
                }
                let mut gens = h_gens.clone();
                gens.push(*c_gen);
                let joined = table.close(&gens);
                if !found.contains_key(&joined) {
                    found.insert(joined.clone(), gens);
                    next.push(joined);
                }
            }
        }
        frontier = next;
    }

    let mut entries: Vec<(Vec<usize>, Bits, Vec<usize>)> = found
        .into_iter()
        .map(|(bits, gens)| (ones(&bits), bits, gens))
        .collect();
    entries.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));

    let count = entries.len();
    let index: BTreeMap<Bits, usize> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.1.clone(), i))
        .collect();

    let mut contained = alloc::vec![alloc::vec![false; count]; count];
    for i in 0..count {
        for j in 0..count {
            contained[i][j] = entries[i].0.len() <= entries[j].0.len()
                && entries[j].0.len() % entries[i].0.len() == 0
                && subset(&entries[i].1, &entries[j].1);
        }
    }

    // μ(H,H) = 1, μ(H,J) = -Σ_{H ≤ K < J} μ(H,K); indices are a linear
    // extension of containment, so a forward sweep suffices.
    let mut mobius = alloc::vec![alloc::vec![0i64; count]; count];
    for h in 0..count {
        mobius[h][h] = 1;
        for j in h + 1..count {
            if !contained[h][j] {
                continue;
            }
            let mut s = 0i64;
            for k in h..j {
                if contained[h][k] && contained[k][j] {
                    s += mobius[h][k];
                }
            }
            mobius[h][j] = -s;
        }
    }

    let mut class_of = alloc::vec![usize::MAX; count];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        for g in 0..n {
            let gi = table.inv[g] as usize;
            let mut bits = alloc::vec![0u64; n.div_ceil(64)];
            for &h in &entries[i].0 {
                set(&mut bits, table.mul(table.mul(g, h), gi));
            }
            let j = index[&bits];
            if class_of[j] == usize::MAX {
                class_of[j] = id;
                members.push(j);
            }
        }
        members.sort_unstable();
        classes.push(members);
    }

    let members = entries.iter().map(|e| e.0.clone()).collect();
    let generators = entries.into_iter().map(|e| e.2).collect();
    Ok(SubgroupLattice {
        parent: group.clone(),
        members,
        generators,
        contained,
        mobius,
        classes,
        class_of,
    })
}

impl SubgroupLattice {
    pub fn parent(&self) -> &PermGroup {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn trivial(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.members.len() - 1
    }

    pub fn order(&self, h: usize) -> usize {
        self.members[h].len()
    }

    /// Index `(G:H)`.
    pub fn index(&self, h: usize) -> usize {
        self.parent.order() / self.order(h)
    }

    /// Element indices (into the parent's sorted element list) of subgroup `h`.
    pub fn member_indices(&self, h: usize) -> &[usize] {
        &self.members[h]
    }

    pub fn subgroup(&self, h: usize) -> PermGroup {
        let elems: Vec<Permutation> = self.members[h]
            .iter()
            .map(|&i| self.parent.elements()[i].clone())
            .collect();
        let gens: Vec<Permutation> = self.generators[h]
            .iter()
            .map(|&i| self.parent.elements()[i].clone())
            .collect();
        PermGroup::closure(&gens, self.parent.degree())
            .ok()
            .filter(|g| g.elements() == elems.as_slice())
            .expect("stored generators span the subgroup")
    }

    pub fn find(&self, group: &PermGroup) -> Option<usize> {
        let mut idx: Vec<usize> = group
            .elements()
            .iter()
            .map(|g| self.parent.index_of(g))
            .collect::<Option<Vec<_>>>()?;
        idx.sort_unstable();
        self.members.iter().position(|m| *m == idx)
    }

    /// `H ≤ K`.
    pub fn is_contained(&self, h: usize, k: usize) -> bool {
        self.contained[h][k]
    }

    pub fn mobius_value(&self, h: usize, k: usize) -> Result<i64, GroupError> {
        if !self.contained[h][k] {
            return Err(GroupError::NotContained { sub: h, sup: k });
        }
        Ok(self.mobius[h][k])
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, h: usize) -> usize {
        self.class_of[h]
    }

    /// The first (smallest-index) member of each class.
    pub fn class_representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    /// Cover relations `H ⋖ K` of the lattice (its Hasse diagram).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for h in 0..n {
            for k in h + 1..n {
                if !self.contained[h][k] {
                    continue;
                }
                let between = (h + 1..k).any(|m| self.contained[h][m] && self.contained[m][k]);
                if !between {
                    out.push((h, k));
                }
            }
        }
        out
    }

    /// Class-level edge annotation for a cover between classes `a ⊂ b`:
    /// `(number of class-a subgroups inside one class-b subgroup,
    ///   number of class-b subgroups containing one class-a subgroup)`.
    pub fn class_incidence(&self, a: usize, b: usize) -> (usize, usize) {
        let rep_b = self.class_representative(b);
        let rep_a = self.class_representative(a);
        let down = self.classes[a]
            .iter()
            .filter(|&&h| self.contained[h][rep_b])
            .count();
        let up = self.classes[b]
            .iter()
            .filter(|&&k| self.contained[rep_a][k])
            .count();
        (down, up)
    }

    /// Class pairs `(a, b)` such that some member of `a` is covered by some
    /// member of `b`.
    pub fn class_covers(&self) -> Vec<(usize, usize)> {
        let mut set: alloc::collections::BTreeSet<(usize, usize)> = Default::default();
        for (h, k) in self.covers() {
            set.insert((self.class_of[h], self.class_of[k]));
        }
        set.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named_group;

    #[test]
    fn klein_lattice_and_mobius() {
        let g = named_group("klein4").unwrap();
        let lat = subgroups(&g).unwrap();
        assert_eq!(lat.len(), 5);
        let orders: Vec<usize> = (0..5).map(|h| lat.order(h)).collect();
        assert_eq!(orders, [1, 2, 2, 2, 4]);
        for k in 1..4 {
            assert_eq!(lat.mobius_value(0, k).unwrap(), -1);
            assert_eq!(lat.mobius_value(k, 4).unwrap(), -1);
        }
        assert_eq!(lat.mobius_value(0, 4).unwrap(), 2);
        assert!(lat.mobius_value(1, 2).is_err());
        assert_eq!(lat.classes().len(), 5, "abelian: every subgroup is its own class");
    }

    #[test]
    fn prime_cyclic_has_two_subgroups() {
        for p in [2, 3, 5, 7] {
            let g = named_group(&alloc::format!("cyclic:{p}")).unwrap();
            assert_eq!(subgroups(&g).unwrap().len(), 2);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = named_group("symmetric:6").unwrap();
        assert!(matches!(subgroups(&g), Err(GroupError::TooLarge { cap: 360 })));
    }

    #[test]
    fn s3_classes() {
        let g = named_group("symmetric:3").unwrap();
        let lat = subgroups(&g).unwrap();
        assert_eq!(lat.len(), 6);
        let sizes: Vec<usize> = lat.classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, [1, 3, 1, 1]);
        let top = lat.top();
        assert_eq!(lat.mobius_value(0, top).unwrap(), 3);
    }
}
