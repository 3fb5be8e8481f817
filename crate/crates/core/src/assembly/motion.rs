use alloc::vec::Vec;

use super::Bunch;
use crate::real::{add3, cross3, dot3, points_eq_tol, signed_volume, sub3, Point3, Real};

/// `x ↦ R·x + t` with `R` a proper rotation.
#[derive(Clone, Debug)]
pub struct RigidMotion {
    pub rotation: [[Real; 3]; 3],
    pub translation: Point3,
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion {
            rotation: identity3(),
            translation: [Real::zero(), Real::zero(), Real::zero()],
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        add3(&mat_vec(&self.rotation, p), &self.translation)
    }

    pub fn determinant(&self) -> Real {
        det3(&self.rotation)
    }
}

fn identity3() -> [[Real; 3]; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| if i == j { Real::one() } else { Real::zero() }))
}

fn mat_vec(m: &[[Real; 3]; 3], v: &Point3) -> Point3 {
    core::array::from_fn(|i| dot3(&m[i], v))
}

fn mat_mul(a: &[[Real; 3]; 3], b: &[[Real; 3]; 3]) -> [[Real; 3]; 3] {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            (0..3).fold(Real::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j]))
        })
    })
}

fn det3(m: &[[Real; 3]; 3]) -> Real {
    dot3(&m[0], &cross3(&m[1], &m[2]))
}

/// Columns `c0, c1, c2` as a matrix.
fn from_columns(c: [&Point3; 3]) -> [[Real; 3]; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| c[j][i].clone()))
}

/// Inverse via the adjugate; `None` when singular.
fn inverse3(m: &[[Real; 3]; 3]) -> Option<[[Real; 3]; 3]> {
    let det = det3(m);
    if det.is_zero_tol() {
        return None;
    }
    // Rows of the inverse are cross products of the columns.
    let col = |j: usize| -> Point3 { core::array::from_fn(|i| m[i][j].clone()) };
    let (c0, c1, c2) = (col(0), col(1), col(2));
    let rows = [cross3(&c1, &c2), cross3(&c2, &c0), cross3(&c0, &c1)];
    Some(core::array::from_fn(|i| core::array::from_fn(|j| &rows[i][j] / &det)))
}

/// Reflection across the plane through the origin with normal `w`.
fn householder(w: &Point3) -> [[Real; 3]; 3] {
    let ww = dot3(w, w);
    let two = Real::int(2);
    core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let id = if i == j { Real::one() } else { Real::zero() };
            &id - &(&(&two * &(&w[i] * &w[j])) / &ww)
        })
    })
}

/// A proper rigid motion sending `src[k]` to `dst[k]` for every `k`, or
/// `None` if there is none. Exact inputs give an exact witness; no square
/// roots are taken.
pub fn rigid_motion_witness(src: &[Point3], dst: &[Point3]) -> Option<RigidMotion> {
    if src.len() != dst.len() {
        return None;
    }
    if src.is_empty() {
        return Some(RigidMotion::identity());
    }
    let a = &src[0];
    let b = &dst[0];
    let diffs: Vec<Point3> = src.iter().map(|p| sub3(p, a)).collect();
    let images: Vec<Point3> = dst.iter().map(|p| sub3(p, b)).collect();
    let nonzero = |v: &Point3| v.iter().any(|x| !x.is_zero_tol());

    let rotation = match diffs.iter().position(nonzero) {
        None => identity3(),
        Some(i) => {
            let (u1, v1) = (&diffs[i], &images[i]);
            match diffs.iter().position(|u| nonzero(&cross3(u1, u))) {
                None => align_direction(u1, v1)?,
                Some(j) => {
                    let (u2, v2) = (&diffs[j], &images[j]);
                    let o = [Real::zero(), Real::zero(), Real::zero()];
                    let (u3, v3) = match (0..src.len())
                        .find(|&k| !signed_volume(&o, u1, u2, &diffs[k]).is_zero_tol())
                    {
                        Some(k) => (diffs[k].clone(), images[k].clone()),
                        None => (cross3(u1, u2), cross3(v1, v2)),
                    };
                    let u = from_columns([u1, u2, &u3]);
                    let v = from_columns([v1, v2, &v3]);
                    mat_mul(&v, &inverse3(&u)?)
                }
            }
        }
    };
    let translation = sub3(b, &mat_vec(&rotation, a));
    let m = RigidMotion {
        rotation,
        translation,
    };
    if m.determinant().signum_tol() <= 0 {
        return None;
    }
    // Orthogonality, then the point map itself.
    let prod = mat_mul(&transpose(&m.rotation), &m.rotation);
    let id = identity3();
    if !(0..3).all(|i| (0..3).all(|j| prod[i][j].eq_tol(&id[i][j]))) {
        return None;
    }
    src.iter()
        .zip(dst)
        .all(|(p, q)| points_eq_tol(&m.apply(p), q))
        .then_some(m)
}

fn transpose(m: &[[Real; 3]; 3]) -> [[Real; 3]; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| m[j][i].clone()))
}

/// A rotation taking `u` to `v` (equal lengths), as a product of two
/// reflections.
fn align_direction(u: &Point3, v: &Point3) -> Option<[[Real; 3]; 3]> {
    if !dot3(u, u).eq_tol(&dot3(v, v)) {
        return None;
    }
    let w = sub3(u, v);
    if w.iter().all(Real::is_zero_tol) {
        return Some(identity3());
    }
    // The second reflection fixes v, so the product is proper.
    let axes = [
        [Real::one(), Real::zero(), Real::zero()],
        [Real::zero(), Real::one(), Real::zero()],
        [Real::zero(), Real::zero(), Real::one()],
    ];
    let n = axes
        .iter()
        .map(|e| cross3(v, e))
        .find(|n| n.iter().any(|x| !x.is_zero_tol()))?;
    Some(mat_mul(&householder(&n), &householder(&w)))
}

/// Witness for `φ(pᵢ) = p′ᵢ` between two bunches with matching attributes.
pub fn congruence_witness(b: &Bunch, b2: &Bunch) -> Option<RigidMotion> {
    if b.len() != b2.len() || !(0..b.len()).all(|i| b.same_attributes(i, b2, i)) {
        return None;
    }
    rigid_motion_witness(&b.points, &b2.points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::point;

    fn rot_z90(p: &Point3) -> Point3 {
        [-p[1].clone(), p[0].clone(), p[2].clone()]
    }

    #[test]
    fn witness_for_rotated_sets() {
        let src = alloc::vec![point(0, 0, 0), point(3, 0, 0), point(0, 4, 0), point(0, 0, 5)];
        let dst: Vec<Point3> = src.iter().map(|p| add3(&rot_z90(p), &point(1, 2, 3))).collect();
        let m = rigid_motion_witness(&src, &dst).unwrap();
        assert!(m.determinant().eq_tol(&Real::one()));
        let mirror: Vec<Point3> = src.iter().map(|p| [-p[0].clone(), p[1].clone(), p[2].clone()]).collect();
        assert!(rigid_motion_witness(&src, &mirror).is_none());
    }

    #[test]
    fn planar_and_collinear_sets() {
        let planar = alloc::vec![point(0, 0, 0), point(2, 0, 0), point(0, 1, 0)];
        let img: Vec<Point3> = planar.iter().map(rot_z90).collect();
        assert!(rigid_motion_witness(&planar, &img).is_some());
        // A planar mirror image is reachable by a proper rotation out of plane.
        let mirror: Vec<Point3> = planar.iter().map(|p| [-p[0].clone(), p[1].clone(), p[2].clone()]).collect();
        assert!(rigid_motion_witness(&planar, &mirror).is_some());
        let line = alloc::vec![point(0, 0, 0), point(1, 2, 2), point(2, 4, 4)];
        let line_img = alloc::vec![point(5, 5, 5), point(8, 5, 5), point(11, 5, 5)];
        assert!(rigid_motion_witness(&line, &line_img).is_some());
        let stretched = alloc::vec![point(5, 5, 5), point(8, 5, 5), point(12, 5, 5)];
        assert!(rigid_motion_witness(&line, &stretched).is_none());
        assert!(rigid_motion_witness(&[point(1, 1, 1)], &[point(4, 0, 0)]).is_some());
    }
}
