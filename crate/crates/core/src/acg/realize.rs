use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{active_constraint_graph, ActiveConstraintGraph};
use crate::assembly::AssemblyConfiguration;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealizeParams {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for RealizeParams {
    fn default() -> Self {
        RealizeParams {
            starts: 50,
            iterations: 3000,
            seed: 7,
        }
    }
}

/// A found witness, or nothing known. Failure never proves emptiness.
#[derive(Clone, Debug)]
pub enum Realizability {
    Realizable(AssemblyConfiguration),
    Undetermined,
}

impl Realizability {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Realizability::Realizable(_))
    }
}

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: V3) -> f64 {
    libm::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
}

fn mat_vec(m: &[V3; 3], v: V3) -> V3 {
    core::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

fn mat_mul(a: &[V3; 3], b: &[V3; 3]) -> [V3; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Rotation by angle `|w|` about `w`.
fn rodrigues(w: V3) -> [V3; 3] {
    let t = norm(w);
    if t < 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let k = [w[0] / t, w[1] / t, w[2] / t];
    let (s, c) = (libm::sin(t), libm::cos(t));
    let v = 1.0 - c;
    [
        [c + k[0] * k[0] * v, k[0] * k[1] * v - k[2] * s, k[0] * k[2] * v + k[1] * s],
        [k[1] * k[0] * v + k[2] * s, c + k[1] * k[1] * v, k[1] * k[2] * v - k[0] * s],
        [k[2] * k[0] * v - k[1] * s, k[2] * k[1] * v + k[0] * s, c + k[2] * k[2] * v],
    ]
}

struct Body {
    local: Vec<V3>,
    center: V3,
    rot: [V3; 3],
}

impl Body {
    fn world(&self) -> Vec<V3> {
        self.local
            .iter()
            .map(|&b| {
                let r = mat_vec(&self.rot, b);
                [r[0] + self.center[0], r[1] + self.center[1], r[2] + self.center[2]]
            })
            .collect()
    }
}

struct Pair {
    u: (usize, usize),
    v: (usize, usize),
    lo: f64,
    hi: f64,
    edge: bool,
}

fn penalty(bodies: &[Body], pairs: &[Pair], grad: Option<&mut Vec<Vec<V3>>>) -> f64 {
    let world: Vec<Vec<V3>> = bodies.iter().map(Body::world).collect();
    let mut total = 0.0;
    let mut g = grad;
    if let Some(g) = g.as_deref_mut() {
        for (gb, b) in g.iter_mut().zip(bodies) {
            gb.clear();
            gb.resize(b.local.len(), [0.0; 3]);
        }
    }
    for p in pairs {
        let (x, y) = (world[p.u.0][p.u.1], world[p.v.0][p.v.1]);
        let d_vec = sub(x, y);
        let d = norm(d_vec).max(1e-12);
        let slack = (p.hi - p.lo).max(p.lo * 0.02);
        let margin = 0.05 * slack;
        // signed violation: positive pushes apart, negative pulls together
        let viol = if p.edge {
            if d < p.lo + margin {
                p.lo + margin - d
            } else if d > p.hi - margin {
                (p.hi - margin) - d
            } else {
                0.0
            }
        } else if d < p.hi + margin {
            p.hi + margin - d
        } else {
            0.0
        };
        total += viol * viol;
        if let Some(g) = g.as_deref_mut() {
            let c = -2.0 * viol / d;
            for k in 0..3 {
                g[p.u.0][p.u.1][k] += c * d_vec[k];
                g[p.v.0][p.v.1][k] -= c * d_vec[k];
            }
        }
    }
    total
}

/// Penalty descent on rigid bunch placements from random starts; the first
/// placement whose exact well test reproduces `g` is returned.
pub fn realize(g: &ActiveConstraintGraph, template: &AssemblyConfiguration, params: &RealizeParams) -> Realizability {
    if template.shape() != *g.shape() {
        return Realizability::Undetermined;
    }
    let f = |r: &Real| r.to_f64();
    let mut bodies: Vec<Body> = template
        .bunches
        .iter()
        .map(|b| {
            let pts: Vec<V3> = b.points.iter().map(|p| [f(&p[0]), f(&p[1]), f(&p[2])]).collect();
            let n = pts.len() as f64;
            let c: V3 = core::array::from_fn(|k| pts.iter().map(|p| p[k]).sum::<f64>() / n);
            Body {
                local: pts.iter().map(|&p| sub(p, c)).collect(),
                center: c,
                rot: rodrigues([0.0; 3]),
            }
        })
        .collect();
    let refs = template.flat_refs();
    let mut pairs = Vec::new();
    let mut reach = 0.0f64;
    for u in 0..refs.len() {
        for v in u + 1..refs.len() {
            let ((l, i), (m, j)) = (refs[u], refs[v]);
            if l == m {
                continue;
            }
            let (a, b) = (&template.bunches[l], &template.bunches[m]);
            let lo = f(&a.radii[i]) + f(&b.radii[j]);
            let hi = lo + f(&a.annuli[i]) + f(&b.annuli[j]);
            reach = reach.max(hi);
            pairs.push(Pair {
                u: (l, i),
                v: (m, j),
                lo,
                hi,
                edge: g.has_edge(u, v),
            });
        }
    }
    let extent = bodies
        .iter()
        .flat_map(|b| b.local.iter().map(|&p| norm(p)))
        .fold(0.0f64, f64::max);
    let box_side = (reach + 2.0 * extent) * libm::cbrt(bodies.len() as f64) * 1.5;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut grad: Vec<Vec<V3>> = bodies.iter().map(|b| alloc::vec![[0.0; 3]; b.local.len()]).collect();
    for _ in 0..params.starts {
        for b in bodies.iter_mut() {
            b.center = core::array::from_fn(|_| rng.random_range(0.0..box_side));
            let w: V3 = core::array::from_fn(|_| rng.random_range(-3.2..3.2));
            b.rot = rodrigues(w);
        }
        let mut step = 0.1 * reach.max(1e-6);
        let mut value = penalty(&bodies, &pairs, Some(&mut grad));
        for _ in 0..params.iterations {
            if value == 0.0 {
                break;
            }
            let saved: Vec<(V3, [V3; 3])> = bodies.iter().map(|b| (b.center, b.rot)).collect();
            for (b, gb) in bodies.iter_mut().zip(&grad) {
                let mut force = [0.0; 3];
                let mut torque = [0.0; 3];
                for (&loc, &gp) in b.local.iter().zip(gb) {
                    let r = mat_vec(&b.rot, loc);
                    let t = cross(r, gp);
                    for k in 0..3 {
                        force[k] += gp[k];
                        torque[k] += t[k];
                    }
                }
                for k in 0..3 {
                    b.center[k] -= step * force[k];
                }
                let scale = if extent > 0.0 { step / (extent * extent) } else { 0.0 };
                b.rot = mat_mul(&rodrigues([-scale * torque[0], -scale * torque[1], -scale * torque[2]]), &b.rot);
            }
            let next = penalty(&bodies, &pairs, None);
            if next < value {
                value = penalty(&bodies, &pairs, Some(&mut grad));
                step *= 1.2;
            } else {
                for (b, (c, r)) in bodies.iter_mut().zip(saved) {
                    b.center = c;
                    b.rot = r;
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
        }
        if value == 0.0 {
            let mut config = template.clone();
            for (bunch, body) in config.bunches.iter_mut().zip(&bodies) {
                bunch.points = body
                    .world()
                    .into_iter()
                    .map(|p| [Real::from(p[0]), Real::from(p[1]), Real::from(p[2])])
                    .collect();
            }
            let ok = config.validate().is_ok()
                && active_constraint_graph(&config).is_ok_and(|h| h.mask() == g.mask());
            if ok {
                return Realizability::Realizable(config);
            }
        }
    }
    Realizability::Undetermined
}

#[cfg(test)]
mod tests {
    use super::super::tests::octahedron_config;
    use super::*;
    use crate::acg::active_constraint_graph;
    use crate::assembly::{Bunch, SystemShape};
    use crate::real::point;

    #[test]
    fn realizes_small_graphs() {
        let template = octahedron_config();
        let oct = active_constraint_graph(&template).unwrap();
        let found = realize(&oct, &template, &RealizeParams::default());
        assert!(found.is_realizable());
        let empty = ActiveConstraintGraph::empty(template.shape()).unwrap();
        assert!(realize(&empty, &template, &RealizeParams::default()).is_realizable());
    }

    #[test]
    fn impossible_graph_is_undetermined() {
        // Five mutually touching equal spheres do not exist.
        let template = AssemblyConfiguration::validated(
            (0..5).map(|x| Bunch::sphere(point(3 * x, 0, 0), "a", Real::one(), Real::ratio(1, 100))).collect(),
        )
        .unwrap();
        let k5 = ActiveConstraintGraph::new(SystemShape::singletons(5), (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v)))).unwrap();
        let params = RealizeParams {
            starts: 5,
            iterations: 500,
            seed: 1,
        };
        assert!(!realize(&k5, &template, &params).is_realizable());
    }
}
