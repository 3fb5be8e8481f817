use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::matcher::{bunches_isomorphic, configurations_congruent, order_preserving_isomorphic, permuted_congruent};
use super::{AssemblyConfiguration, AssemblyError, Bunch, SystemShape};
use crate::permgroup::{GroupError, PermGroup, Permutation};

pub const DEFAULT_WAUT_CAP: usize = 1_000_000;

/// The weak automorphism group as permutations of the flat vertex set.
#[derive(Clone, Debug)]
pub struct Waut {
    shape: SystemShape,
    group: PermGroup,
}

/// `(σ; π₁, …, π_k)`: bunch `l` goes to bunch `σ(l)`, and point `i` of
/// bunch `l` to point `πₗ(i)` of bunch `σ(l)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WautElement {
    pub sigma: Permutation,
    pub pis: Vec<Permutation>,
}

impl WautElement {
    pub fn from_flat(shape: &SystemShape, g: &Permutation) -> Self {
        let k = shape.bunch_count();
        let sigma: Vec<usize> = (0..k).map(|l| shape.bunch_of(g.apply(shape.offset(l)))).collect();
        let pis = (0..k)
            .map(|l| {
                let images = (0..shape.sizes()[l]).map(|i| shape.locate(g.apply(shape.vertex(i, l))).0).collect();
                Permutation::from_images(images).expect("block map")
            })
            .collect();
        WautElement {
            sigma: Permutation::from_images(sigma).expect("bunch map"),
            pis,
        }
    }

    pub fn to_flat(&self, shape: &SystemShape) -> Permutation {
        let mut images = vec![0; shape.vertex_count()];
        for (l, pi) in self.pis.iter().enumerate() {
            for i in 0..pi.degree() {
                images[shape.vertex(i, l)] = shape.vertex(pi.apply(i), self.sigma.apply(l));
            }
        }
        Permutation::from_images(images).expect("block map")
    }
}

impl fmt::Display for WautElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.sigma)?;
        for (l, pi) in self.pis.iter().enumerate() {
            write!(f, "{}{}", if l == 0 { " " } else { ", " }, pi)?;
        }
        write!(f, ")")
    }
}

impl Waut {
    /// Wraps a group acting on the flat vertices; it must map bunches onto
    /// bunches.
    pub fn new(shape: SystemShape, group: PermGroup) -> Result<Self, AssemblyError> {
        if group.degree() != shape.vertex_count() {
            return Err(AssemblyError::ShapeMismatch);
        }
        let blocks_ok = group.generators().iter().all(|g| {
            (0..shape.vertex_count()).all(|u| {
                (0..shape.vertex_count())
                    .all(|v| shape.same_bunch(u, v) == shape.same_bunch(g.apply(u), g.apply(v)))
            })
        });
        if !blocks_ok {
            return Err(AssemblyError::ShapeMismatch);
        }
        Ok(Waut { shape, group })
    }

    /// `S_k` on `k` identical single-sphere bunches.
    pub fn symmetric(k: usize) -> Self {
        let mut gens = Vec::new();
        for i in 0..k.saturating_sub(1) {
            gens.push(Permutation::from_cycles(k, &[vec![i, i + 1]]).expect("valid"));
        }
        let group = PermGroup::closure(&gens, k).expect("S_k within cap");
        Waut {
            shape: SystemShape::singletons(k),
            group,
        }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn elements(&self) -> &[Permutation] {
        self.group.elements()
    }

    pub fn element(&self, g: &Permutation) -> WautElement {
        WautElement::from_flat(&self.shape, g)
    }

    /// The subgroup of elements satisfying `keep`.
    pub fn subgroup_where<F: FnMut(&Permutation) -> bool>(&self, keep: F) -> Waut {
        Waut {
            shape: self.shape.clone(),
            group: self.group.subgroup_where(keep),
        }
    }

    /// `g·ℬ`: the point at vertex `v` moves to label `g(v)`.
    pub fn act(&self, g: &Permutation, config: &AssemblyConfiguration) -> AssemblyConfiguration {
        let flat = config.flat_points();
        let mut out = config.clone();
        for (v, p) in flat.into_iter().enumerate() {
            let (i, l) = self.shape.locate(g.apply(v));
            out.bunches[l].points[i] = p;
        }
        out
    }
}

/// Indices of `b` grouped by equal attributes.
fn attribute_classes(b: &Bunch) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..b.len() {
        match classes.iter_mut().find(|c| b.same_attributes(c[0], b, i)) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

pub fn waut(config: &AssemblyConfiguration) -> Result<Waut, AssemblyError> {
    waut_with_cap(config, DEFAULT_WAUT_CAP)
}

/// Generated by transpositions of equal-attribute points within a bunch and
/// by swaps of isomorphic bunches. The order is computed first and checked
/// against `cap`.
pub fn waut_with_cap(config: &AssemblyConfiguration, cap: usize) -> Result<Waut, AssemblyError> {
    config.validate()?;
    let shape = config.shape();
    let n = shape.vertex_count();
    let bunches = &config.bunches;

    let mut iso_classes: Vec<Vec<usize>> = Vec::new();
    for l in 0..bunches.len() {
        match iso_classes
            .iter_mut()
            .find(|c| bunches_isomorphic(&bunches[c[0]], &bunches[l]).is_some())
        {
            Some(c) => c.push(l),
            None => iso_classes.push(vec![l]),
        }
    }

    let mut order = 1u128;
    for c in &iso_classes {
        order = order.saturating_mul(factorial(c.len()));
        for &l in c {
            for a in attribute_classes(&bunches[l]) {
                order = order.saturating_mul(factorial(a.len()));
            }
        }
    }
    if order > cap as u128 {
        return Err(AssemblyError::WautTooLarge { order, cap });
    }

    let mut gens = Vec::new();
    for (l, b) in bunches.iter().enumerate() {
        for a in attribute_classes(b) {
            for w in a.windows(2) {
                let cyc = vec![shape.vertex(w[0], l), shape.vertex(w[1], l)];
                gens.push(Permutation::from_cycles(n, &[cyc])?);
            }
        }
    }
    for c in &iso_classes {
        for w in c.windows(2) {
            let (l, m) = (w[0], w[1]);
            let pi = bunches_isomorphic(&bunches[l], &bunches[m]).expect("same class");
            let mut images: Vec<usize> = (0..n).collect();
            for i in 0..pi.degree() {
                let j = pi.apply(i);
                images[shape.vertex(i, l)] = shape.vertex(j, m);
                images[shape.vertex(j, m)] = shape.vertex(i, l);
            }
            gens.push(Permutation::from_images(images)?);
        }
    }
    let group = PermGroup::closure_with_cap(&gens, n, cap).map_err(|e| match e {
        GroupError::TooLarge { cap } => AssemblyError::WautTooLarge { order, cap },
        e => e.into(),
    })?;
    debug_assert_eq!(group.order() as u128, order);
    Ok(Waut { shape, group })
}

/// `stab_Waut(ℬ)`: elements whose relabelling is congruent to `ℬ`.
pub fn strict_congruence_group(config: &AssemblyConfiguration, w: &Waut) -> Waut {
    w.subgroup_where(|g| configurations_congruent(config, &w.act(g, config)))
}

pub fn strict_order_preserving_group(config: &AssemblyConfiguration, w: &Waut) -> Waut {
    w.subgroup_where(|g| order_preserving_isomorphic(config, &w.act(g, config)).is_some())
}

pub fn strict_permuted_congruence_group(config: &AssemblyConfiguration, w: &Waut) -> Waut {
    w.subgroup_where(|g| permuted_congruent(config, &w.act(g, config)).is_some())
}

/// Representatives of `Waut·ℬ` up to strict congruence.
pub fn configuration_orbit(config: &AssemblyConfiguration, w: &Waut) -> Vec<AssemblyConfiguration> {
    let mut reps: Vec<AssemblyConfiguration> = Vec::new();
    for g in w.elements() {
        let img = w.act(g, config);
        if !reps.iter().any(|r| configurations_congruent(r, &img)) {
            reps.push(img);
        }
    }
    reps
}
