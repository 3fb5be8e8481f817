//! Bunches of coloured spheres, assembly configurations, and the relabelling
//! groups acting on them.

mod matcher;
mod motion;
mod waut;

pub use matcher::{
    bunches_congruent, bunches_isomorphic, configurations_congruent, configurations_isomorphic,
    order_preserving_isomorphic, permuted_congruent, strictly_isomorphic, strictly_congruent,
    strictly_order_preserving_isomorphic, strictly_permuted_congruent,
};
pub use motion::{congruence_witness, rigid_motion_witness, RigidMotion};
pub use waut::{
    configuration_orbit, strict_congruence_group, strict_order_preserving_group,
    strict_permuted_congruence_group, waut, waut_with_cap, Waut, WautElement, DEFAULT_WAUT_CAP,
};

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::permgroup::GroupError;
use crate::real::{dist2, Point3, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("bunch {bunch}: {field} has {found} entries, expected {expected}")]
    LengthMismatch {
        bunch: usize,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("bunch {bunch} is empty")]
    EmptyBunch { bunch: usize },
    #[error("bunch {bunch}, point {point}: radius must be positive")]
    NonPositiveRadius { bunch: usize, point: usize },
    #[error("bunch {bunch}, point {point}: annulus must be nonnegative")]
    NegativeAnnulus { bunch: usize, point: usize },
    #[error("spheres ({i},{l}) and ({j},{m}) interpenetrate")]
    Overlap { i: usize, l: usize, j: usize, m: usize },
    #[error("weak automorphism group has order {order}, above the cap {cap}")]
    WautTooLarge { order: u128, cap: usize },
    #[error("configurations have different shapes")]
    ShapeMismatch,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A rigid, ordered cluster of coloured spheres.
#[derive(Clone, Debug)]
pub struct Bunch {
    pub points: Vec<Point3>,
    pub colors: Vec<String>,
    pub radii: Vec<Real>,
    pub annuli: Vec<Real>,
}

impl Bunch {
    /// Unchecked constructor; see [`Bunch::validate`].
    pub fn new(points: Vec<Point3>, colors: Vec<String>, radii: Vec<Real>, annuli: Vec<Real>) -> Self {
        Bunch {
            points,
            colors,
            radii,
            annuli,
        }
    }

    /// One sphere of the given colour, radius and annulus.
    pub fn sphere(center: Point3, color: &str, radius: Real, annulus: Real) -> Self {
        Bunch::new(
            alloc::vec![center],
            alloc::vec![String::from(color)],
            alloc::vec![radius],
            alloc::vec![annulus],
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Comparable attribute tuple of point `i`. Exact and float values that
    /// agree within tolerance are not merged; attribute classes are meant to be
    /// written identically.
    pub fn kind(&self, i: usize) -> (String, &Real, &Real) {
        (self.colors[i].clone(), &self.radii[i], &self.annuli[i])
    }

    pub fn same_attributes(&self, i: usize, other: &Bunch, j: usize) -> bool {
        self.colors[i] == other.colors[j]
            && self.radii[i].eq_tol(&other.radii[j])
            && self.annuli[i].eq_tol(&other.annuli[j])
    }

    pub fn validate(&self, index: usize) -> Result<(), AssemblyError> {
        let n = self.points.len();
        if n == 0 {
            return Err(AssemblyError::EmptyBunch { bunch: index });
        }
        for (field, found) in [
            ("colors", self.colors.len()),
            ("radii", self.radii.len()),
            ("annuli", self.annuli.len()),
        ] {
            if found != n {
                return Err(AssemblyError::LengthMismatch {
                    bunch: index,
                    field,
                    expected: n,
                    found,
                });
            }
        }
        for i in 0..n {
            if self.radii[i].signum_tol() <= 0 {
                return Err(AssemblyError::NonPositiveRadius { bunch: index, point: i });
            }
            if self.annuli[i].signum_tol() < 0 {
                return Err(AssemblyError::NegativeAnnulus { bunch: index, point: i });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !clear_of(&self.points[i], &self.radii[i], &self.points[j], &self.radii[j]) {
                    return Err(AssemblyError::Overlap {
                        i,
                        l: index,
                        j,
                        m: index,
                    });
                }
            }
        }
        Ok(())
    }

    /// The same bunch moved by `f`.
    pub fn map_points<F: FnMut(&Point3) -> Point3>(&self, f: F) -> Bunch {
        Bunch {
            points: self.points.iter().map(f).collect(),
            ..self.clone()
        }
    }
}

/// `‖x − y‖ ≥ r + r'`, compared on squares.
fn clear_of(x: &Point3, rx: &Real, y: &Point3, ry: &Real) -> bool {
    let s = rx + ry;
    dist2(x, y).cmp_tol(&(&s * &s)) != core::cmp::Ordering::Less
}

/// Bunch sizes and the flat vertex numbering `(i, l) ↦ offset[l] + i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemShape {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl SystemShape {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        SystemShape { sizes, offsets }
    }

    pub fn singletons(k: usize) -> Self {
        Self::new(alloc::vec![1; k])
    }

    pub fn bunch_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn offset(&self, l: usize) -> usize {
        self.offsets[l]
    }

    /// Flat index of point `i` of bunch `l` (both 0-based).
    pub fn vertex(&self, i: usize, l: usize) -> usize {
        self.offsets[l] + i
    }

    /// `(i, l)` of a flat vertex.
    pub fn locate(&self, v: usize) -> (usize, usize) {
        let l = match self.offsets.binary_search(&v) {
            Ok(mut l) => {
                // skip empty bunches sharing the offset
                while self.sizes[l] == 0 {
                    l += 1;
                }
                l
            }
            Err(l) => l - 1,
        };
        (v - self.offsets[l], l)
    }

    pub fn bunch_of(&self, v: usize) -> usize {
        self.locate(v).1
    }

    pub fn same_bunch(&self, u: usize, v: usize) -> bool {
        self.bunch_of(u) == self.bunch_of(v)
    }
}

/// An ordered tuple of bunches.
#[derive(Clone, Debug)]
pub struct AssemblyConfiguration {
    pub bunches: Vec<Bunch>,
}

impl AssemblyConfiguration {
    pub fn new(bunches: Vec<Bunch>) -> Self {
        AssemblyConfiguration { bunches }
    }

    /// Validates every bunch and the cross-bunch non-interpenetration rule.
    pub fn validated(bunches: Vec<Bunch>) -> Result<Self, AssemblyError> {
        let c = AssemblyConfiguration { bunches };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        for (l, b) in self.bunches.iter().enumerate() {
            b.validate(l)?;
        }
        for l in 0..self.bunches.len() {
            for m in l + 1..self.bunches.len() {
                let (a, b) = (&self.bunches[l], &self.bunches[m]);
                for i in 0..a.len() {
                    for j in 0..b.len() {
                        if !clear_of(&a.points[i], &a.radii[i], &b.points[j], &b.radii[j]) {
                            return Err(AssemblyError::Overlap { i, l, j, m });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> SystemShape {
        SystemShape::new(self.bunches.iter().map(Bunch::len).collect())
    }

    pub fn point(&self, v: usize) -> &Point3 {
        let (i, l) = self.shape().locate(v);
        &self.bunches[l].points[i]
    }

    /// All points in flat vertex order.
    pub fn flat_points(&self) -> Vec<Point3> {
        self.bunches.iter().flat_map(|b| b.points.iter().cloned()).collect()
    }

    /// `(bunch, index)` pairs in flat vertex order.
    pub fn flat_refs(&self) -> Vec<(usize, usize)> {
        self.bunches
            .iter()
            .enumerate()
            .flat_map(|(l, b)| (0..b.len()).map(move |i| (l, i)))
            .collect()
    }
}

/// Whether two configurations belong to one assembly system: the bunches can
/// be paired so that paired bunches are isomorphic.
pub fn same_assembly_system(a: &AssemblyConfiguration, b: &AssemblyConfiguration) -> bool {
    let k = a.bunches.len();
    if k != b.bunches.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| bunches_isomorphic(&a.bunches[i], &b.bunches[j]).is_some())
                .collect()
        })
        .collect();
    let mut matched: Vec<Option<usize>> = alloc::vec![None; k];
    for i in 0..k {
        let mut seen = alloc::vec![false; k];
        if !augment(i, &adj, &mut matched, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, adj: &[Vec<usize>], matched: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if matched[j].is_none_or(|i2| augment(i2, adj, matched, seen)) {
            matched[j] = Some(i);
            return true;
        }
    }
    false
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::real::point;

    #[test]
    fn validation() {
        assert!(orbit_example().validate().is_ok());
        let overlap = AssemblyConfiguration::new(alloc::vec![
            unit(point(0, 0, 0), "a"),
            Bunch::sphere(point(0, 0, 0), "a", Real::ratio(1, 4), Real::zero()),
        ]);
        assert!(matches!(overlap.validate(), Err(AssemblyError::Overlap { .. })));
        let bad = Bunch::sphere(point(0, 0, 0), "a", Real::zero(), Real::zero());
        assert!(matches!(bad.validate(0), Err(AssemblyError::NonPositiveRadius { .. })));
        let mut short = chiral_bunch();
        short.radii.pop();
        assert!(matches!(short.validate(0), Err(AssemblyError::LengthMismatch { .. })));
    }

    #[test]
    fn shape_numbering() {
        let s = SystemShape::new(alloc::vec![4, 1, 3]);
        assert_eq!(s.vertex_count(), 8);
        assert_eq!(s.vertex(2, 2), 7);
        assert_eq!(s.locate(4), (0, 1));
        assert_eq!(s.locate(5), (0, 2));
        assert_eq!(s.locate(3), (3, 0));
    }

    #[test]
    fn assembly_system_membership() {
        let a = orbit_example();
        let mut moved = a.clone();
        moved.bunches.reverse();
        moved.bunches[0] = moved.bunches[0].map_points(|p| [&p[0] + &Real::int(7), p[1].clone(), p[2].clone()]);
        assert!(same_assembly_system(&a, &moved));
        let mut changed = a.clone();
        changed.bunches[1].radii[0] = Real::ratio(1, 3);
        assert!(!same_assembly_system(&a, &changed));
    }
}
