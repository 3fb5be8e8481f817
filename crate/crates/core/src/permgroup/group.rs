use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use super::{GroupError, Permutation};

/// Default element cap for [`PermGroup::closure`].
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// A finite permutation group stored as its explicit, sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Permutation>,
    generators: Vec<Permutation>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            elements: alloc::vec![Permutation::identity(degree)],
            generators: Vec::new(),
        }
    }

    /// Smallest group containing `generators`, with the default element cap.
    pub fn closure(generators: &[Permutation], degree: usize) -> Result<Self, GroupError> {
        Self::closure_with_cap(generators, degree, DEFAULT_CLOSURE_CAP)
    }

    pub fn closure_with_cap(
        generators: &[Permutation],
        degree: usize,
        cap: usize,
    ) -> Result<Self, GroupError> {
        for g in generators {
            if g.degree() != degree {
                return Err(GroupError::DomainMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let mut gens: Vec<Permutation> = generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        gens.sort();
        gens.dedup();
        let elements = close_under(&gens, degree, cap)?;
        Ok(PermGroup {
            degree,
            elements,
            generators: gens,
        })
    }

    /// Wraps an element list that is already known to be a group.
    ///
    /// The list is sorted, a small generating set is extracted greedily and
    /// its closure is compared against the input, so a non-group is rejected.
    pub fn from_elements(degree: usize, mut elements: Vec<Permutation>) -> Result<Self, GroupError> {
        elements.sort();
        elements.dedup();
        if elements.iter().any(|g| g.degree() != degree) {
            return Err(GroupError::NotAGroup);
        }
        let generators = greedy_generators(&elements, degree);
        let closed = close_under(&generators, degree, elements.len().max(1))
            .map_err(|_| GroupError::NotAGroup)?;
        if closed != elements {
            return Err(GroupError::NotAGroup);
        }
        Ok(PermGroup {
            degree,
            elements,
            generators,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index_of(g).is_some()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    /// `Some((g, x))` for the first non-identity element fixing a point.
    pub fn free_action_violation(&self) -> Option<(Permutation, usize)> {
        self.elements
            .iter()
            .filter(|g| !g.is_identity())
            .find_map(|g| g.fixed_points().next().map(|x| (g.clone(), x)))
    }

    pub fn acts_freely(&self) -> bool {
        self.free_action_violation().is_none()
    }

    /// The orbit `{act(g, item) : g ∈ G}`, deduplicated and sorted.
    pub fn orbit<T, F>(&self, item: &T, mut act: F) -> Vec<T>
    where
        T: Ord + Clone,
        F: FnMut(&Permutation, &T) -> T,
    {
        let set: BTreeSet<T> = self.elements.iter().map(|g| act(g, item)).collect();
        set.into_iter().collect()
    }

    /// The subgroup of elements fixing `item`.
    pub fn stabilizer<T, F>(&self, item: &T, mut act: F) -> PermGroup
    where
        T: PartialEq,
        F: FnMut(&Permutation, &T) -> T,
    {
        self.subgroup_where(|g| act(g, item) == *item)
    }

    /// Elements satisfying `keep`; the caller guarantees they form a subgroup.
    pub fn subgroup_where<F>(&self, mut keep: F) -> PermGroup
    where
        F: FnMut(&Permutation) -> bool,
    {
        let elements: Vec<Permutation> =
            self.elements.iter().filter(|g| keep(g)).cloned().collect();
        let generators = greedy_generators(&elements, self.degree);
        PermGroup {
            degree: self.degree,
            elements,
            generators,
        }
    }

    /// Burnside count `(1/|G|) Σ_g |X^g|`, checking divisibility.
    pub fn count_orbits_burnside<N, F>(&self, mut fixed_count: F) -> Result<BigUint, GroupError>
    where
        N: Into<BigUint>,
        F: FnMut(&Permutation) -> N,
    {
        let mut total = BigUint::zero();
        for g in &self.elements {
            total += fixed_count(g).into();
        }
        let (q, r) = total.div_rem(&BigUint::from(self.order()));
        if !r.is_zero() {
            return Err(GroupError::NonIntegralOrbitCount);
        }
        Ok(q)
    }

    /// Left-multiplication action of the group on `copies` disjoint copies of
    /// itself. The result acts freely with `copies` orbits.
    pub fn regular_action(&self, copies: usize) -> PermGroup {
        let n = self.order();
        let degree = n * copies;
        let act = |g: &Permutation| {
            let mut images = Vec::with_capacity(degree);
            for c in 0..copies {
                for x in &self.elements {
                    let y = self.index_of(&g.compose(x)).expect("closed");
                    images.push(c * n + y);
                }
            }
            Permutation::from_images(images).expect("left multiplication is a bijection")
        };
        let elements: Vec<Permutation> = self.elements.iter().map(act).collect();
        let generators: Vec<Permutation> = self.generators.iter().map(act).collect();
        let mut group = PermGroup {
            degree,
            elements,
            generators,
        };
        group.elements.sort();
        group
    }
}

/// Breadth-first closure from the identity under right multiplication.
fn close_under(gens: &[Permutation], degree: usize, cap: usize) -> Result<Vec<Permutation>, GroupError> {
    let id = Permutation::identity(degree);
    let mut seen: BTreeSet<Permutation> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(GroupError::TooLarge { cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn greedy_generators(elements: &[Permutation], degree: usize) -> Vec<Permutation> {
    let mut gens: Vec<Permutation> = Vec::new();
    let mut span: BTreeSet<Permutation> = BTreeSet::new();
    span.insert(Permutation::identity(degree));
    for g in elements {
        if span.contains(g) {
            continue;
        }
        gens.push(g.clone());
        let closed = close_under(&gens, degree, usize::MAX).expect("uncapped");
        span = closed.into_iter().collect();
        if span.len() == elements.len() {
            break;
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, Some(n)).unwrap()
    }

    #[test]
    fn klein_closure_matches_listed_elements() {
        let g = PermGroup::closure(&[p("(1 2)(3 4)", 4), p("(1 3)(2 4)", 4)], 4).unwrap();
        assert_eq!(g.order(), 4);
        for s in ["()", "(1 2)(3 4)", "(1 3)(2 4)", "(1 4)(2 3)"] {
            assert!(g.contains(&p(s, 4)), "{s}");
        }
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = PermGroup::closure(&[], 5).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g, PermGroup::trivial(5));
    }

    #[test]
    fn five_cycle_and_three_cycle_generate_a5() {
        let g = PermGroup::closure(&[p("(1 2 3 4 5)", 5), p("(1 2 3)", 5)], 5).unwrap();
        assert_eq!(g.order(), 60);
    }

    #[test]
    fn closure_errors() {
        assert!(matches!(
            PermGroup::closure(&[p("(1 2)", 2)], 3),
            Err(GroupError::DomainMismatch { .. })
        ));
        assert!(matches!(
            PermGroup::closure_with_cap(&[p("(1 2 3 4 5 6)", 6), p("(1 2)", 6)], 6, 100),
            Err(GroupError::TooLarge { cap: 100 })
        ));
    }

    #[test]
    fn orbit_and_stabilizer_on_points() {
        let g = PermGroup::closure(&[p("(1 2)(3 4)", 4), p("(1 3)(2 4)", 4)], 4).unwrap();
        let orb = g.orbit(&0usize, |g, &x| g.apply(x));
        assert_eq!(orb, vec![0, 1, 2, 3]);
        let stab = g.stabilizer(&0usize, |g, &x| g.apply(x));
        assert_eq!(stab.order(), 1);
        let triv = PermGroup::trivial(4);
        assert_eq!(triv.orbit(&2usize, |g, &x| g.apply(x)), vec![2]);
    }

    #[test]
    fn burnside_rejects_inconsistent_counts() {
        let g = PermGroup::closure(&[p("(1 2)", 2)], 2).unwrap();
        assert!(g.count_orbits_burnside(|_| 1u32).is_ok());
        assert!(matches!(
            g.count_orbits_burnside(|h| if h.is_identity() { 2u32 } else { 1 }),
            Err(GroupError::NonIntegralOrbitCount)
        ));
    }

    #[test]
    fn regular_action_is_free() {
        let s3 = PermGroup::closure(&[p("(1 2 3)", 3), p("(1 2)", 3)], 3).unwrap();
        assert!(!s3.acts_freely());
        let reg = s3.regular_action(2);
        assert_eq!(reg.degree(), 12);
        assert_eq!(reg.order(), 6);
        assert!(reg.acts_freely());
    }

    #[test]
    fn from_elements_rejects_non_groups() {
        let elems = vec![Permutation::identity(3), p("(1 2)", 3), p("(2 3)", 3)];
        assert!(PermGroup::from_elements(3, elems).is_err());
    }
}
