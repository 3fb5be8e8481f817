use alloc::vec;
use alloc::vec::Vec;

use super::{AssemblyConfiguration, Bunch, SystemShape};
use crate::permgroup::Permutation;
use crate::real::{dist2, points_eq_tol, Point3};

use super::motion::{congruence_witness, rigid_motion_witness};

#[derive(Clone, Copy, PartialEq, Eq)]
enum BunchMode {
    Fixed,
    Permuted,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IndexMode {
    Fixed,
    Free,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Geometry {
    Identity,
    ProperMotion,
}

struct Search<'a> {
    a: &'a AssemblyConfiguration,
    b: &'a AssemblyConfiguration,
    bshape: SystemShape,
    pa: Vec<Point3>,
    pb: Vec<Point3>,
    refs: Vec<(usize, usize)>,
    bunch_mode: BunchMode,
    index_mode: IndexMode,
    geometry: Geometry,
    image: Vec<usize>,
    used: Vec<bool>,
    sigma: Vec<Option<usize>>,
    sigma_used: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(
        a: &'a AssemblyConfiguration,
        b: &'a AssemblyConfiguration,
        bunch_mode: BunchMode,
        index_mode: IndexMode,
        geometry: Geometry,
    ) -> Option<Self> {
        let shape = a.shape();
        if bunch_mode == BunchMode::Fixed && shape != b.shape() {
            return None;
        }
        let mut sa = shape.sizes().to_vec();
        let mut sb = b.shape().sizes().to_vec();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
        let n = shape.vertex_count();
        let k = shape.bunch_count();
        Some(Search {
            a,
            b,
            pa: a.flat_points(),
            pb: b.flat_points(),
            refs: a.flat_refs(),
            bshape: b.shape(),
            bunch_mode,
            index_mode,
            geometry,
            image: Vec::with_capacity(n),
            used: vec![false; n],
            sigma: vec![None; k],
            sigma_used: vec![false; k],
        })
    }

    fn target_bunches(&self, l: usize) -> Vec<usize> {
        if let Some(m) = self.sigma[l] {
            return vec![m];
        }
        match self.bunch_mode {
            BunchMode::Fixed => vec![l],
            BunchMode::Permuted => (0..self.b.bunches.len())
                .filter(|&m| !self.sigma_used[m] && self.b.bunches[m].len() == self.a.bunches[l].len())
                .collect(),
        }
    }

    fn compatible(&self, v: usize, w: usize) -> bool {
        let (l, i) = self.refs[v];
        let (j, m) = self.bshape.locate(w);
        if !self.a.bunches[l].same_attributes(i, &self.b.bunches[m], j) {
            return false;
        }
        match self.geometry {
            Geometry::Identity => points_eq_tol(&self.pa[v], &self.pb[w]),
            Geometry::ProperMotion => self
                .image
                .iter()
                .enumerate()
                .all(|(u, &x)| dist2(&self.pa[u], &self.pa[v]).eq_tol(&dist2(&self.pb[x], &self.pb[w]))),
        }
    }

    fn run(&mut self) -> Option<Vec<usize>> {
        let v = self.image.len();
        if v == self.pa.len() {
            if self.geometry == Geometry::ProperMotion {
                let dst: Vec<Point3> = self.image.iter().map(|&w| self.pb[w].clone()).collect();
                rigid_motion_witness(&self.pa, &dst)?;
            }
            return Some(self.image.clone());
        }
        let (l, i) = self.refs[v];
        for m in self.target_bunches(l) {
            let fresh = self.sigma[l].is_none();
            if fresh {
                self.sigma[l] = Some(m);
                self.sigma_used[m] = true;
            }
            let idx: Vec<usize> = match self.index_mode {
                IndexMode::Fixed => vec![i],
                IndexMode::Free => (0..self.b.bunches[m].len()).collect(),
            };
            for j in idx {
                let w = self.bshape.vertex(j, m);
                if self.used[w] || !self.compatible(v, w) {
                    continue;
                }
                self.used[w] = true;
                self.image.push(w);
                if let Some(found) = self.run() {
                    return Some(found);
                }
                self.image.pop();
                self.used[w] = false;
            }
            if fresh {
                self.sigma[l] = None;
                self.sigma_used[m] = false;
            }
        }
        None
    }
}

fn search(
    a: &AssemblyConfiguration,
    b: &AssemblyConfiguration,
    bunch_mode: BunchMode,
    index_mode: IndexMode,
    geometry: Geometry,
) -> Option<Vec<usize>> {
    Search::new(a, b, bunch_mode, index_mode, geometry)?.run()
}

fn single(b: &Bunch) -> AssemblyConfiguration {
    AssemblyConfiguration::new(vec![b.clone()])
}

/// Some `φ ∈ SE(3)` with `φ(pᵢ) = p′ᵢ` and matching attributes.
pub fn bunches_congruent(b: &Bunch, b2: &Bunch) -> bool {
    congruence_witness(b, b2).is_some()
}

/// A permutation `π` with `φ(pᵢ) = p′_{π(i)}` for some proper motion `φ`.
pub fn bunches_isomorphic(b: &Bunch, b2: &Bunch) -> Option<Permutation> {
    if b.len() != b2.len() {
        return None;
    }
    let map = search(&single(b), &single(b2), BunchMode::Fixed, IndexMode::Free, Geometry::ProperMotion)?;
    Permutation::from_images(map).ok()
}

/// One motion carries every `p_{i,l}` to `p′_{i,l}`.
pub fn configurations_congruent(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let attrs = a
        .bunches
        .iter()
        .zip(&b.bunches)
        .all(|(x, y)| (0..x.len()).all(|i| x.same_attributes(i, y, i)));
    attrs && rigid_motion_witness(&a.flat_points(), &b.flat_points()).is_some()
}

/// Flat vertex map for `φ(p_{i,l}) = p′_{πₗ(i),l}`.
pub fn order_preserving_isomorphic(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> Option<Vec<usize>> {
    search(a, b, BunchMode::Fixed, IndexMode::Free, Geometry::ProperMotion)
}

/// Flat vertex map for `φ(p_{i,l}) = p′_{i,σ(l)}`.
pub fn permuted_congruent(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> Option<Vec<usize>> {
    search(a, b, BunchMode::Permuted, IndexMode::Fixed, Geometry::ProperMotion)
}

/// Flat vertex map for `φ(p_{i,l}) = p′_{πₗ(i),σ(l)}`.
pub fn configurations_isomorphic(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> Option<Vec<usize>> {
    search(a, b, BunchMode::Permuted, IndexMode::Free, Geometry::ProperMotion)
}

/// Same as [`configurations_isomorphic`] with `φ` the identity.
pub fn strictly_isomorphic(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> Option<Vec<usize>> {
    search(a, b, BunchMode::Permuted, IndexMode::Free, Geometry::Identity)
}

pub fn strictly_congruent(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> bool {
    configurations_congruent(a, b) && strictly_isomorphic(a, b).is_some()
}

pub fn strictly_order_preserving_isomorphic(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> bool {
    order_preserving_isomorphic(a, b).is_some() && strictly_isomorphic(a, b).is_some()
}

pub fn strictly_permuted_congruent(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> bool {
    permuted_congruent(a, b).is_some() && strictly_isomorphic(a, b).is_some()
}
