//! Truncated power series over exact rationals and the fixed-tree EGF solvers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::permgroup::SubgroupLattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EgfError {
    #[error("exp requires a zero constant term")]
    NonzeroConstantTerm,
    #[error("coefficient {n} times n! is not an integer")]
    NonIntegral { n: usize },
    #[error("coefficient {n} is negative")]
    Negative { n: usize },
    #[error("group does not act freely: {element} fixes point {point}")]
    NotFree { element: String, point: usize },
    #[error("series order must be at least 1")]
    ZeroOrder,
}

/// `Σ_{n ≤ N} aₙ xⁿ` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl RationalSeries {
    pub fn zero(order: usize) -> Self {
        RationalSeries {
            coeffs: alloc::vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// `c·xᵏ`, or zero if `k > order`.
    pub fn monomial(order: usize, k: usize, c: BigRational) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Pads or truncates `coeffs` to `order + 1` terms.
    pub fn from_coeffs(order: usize, mut coeffs: Vec<BigRational>) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        RationalSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(order, self.coeffs.clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `s(c·x)`: coefficient `n` becomes `cⁿ·aₙ`.
    pub fn scale_arg(&self, c: &BigRational) -> Self {
        let mut pow = BigRational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &pow);
            pow *= c;
        }
        RationalSeries { coeffs }
    }

    /// `exp(s)` via `b₀ = 1`, `n·bₙ = Σ_{k=1..n} k·aₖ·b_{n−k}`.
    pub fn exp(&self) -> Result<Self, EgfError> {
        if !self.coeffs[0].is_zero() {
            return Err(EgfError::NonzeroConstantTerm);
        }
        let order = self.order();
        let mut b: Vec<BigRational> = Vec::with_capacity(order + 1);
        b.push(BigRational::one());
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &b[n - k] * BigRational::from_integer(BigInt::from(k));
                }
            }
            b.push(acc / BigRational::from_integer(BigInt::from(n)));
        }
        Ok(RationalSeries { coeffs: b })
    }
}

impl Add for &RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] + &rhs.coeffs[n]).collect(),
        }
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] - &rhs.coeffs[n]).collect(),
        }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        let mut coeffs = alloc::vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        RationalSeries { coeffs }
    }
}

/// `tₙ = n!·aₙ` for `n = 1..=order`, requiring nonnegative integers.
pub fn egf_to_counts(s: &RationalSeries) -> Result<Vec<BigUint>, EgfError> {
    let mut fact = BigInt::one();
    let mut out = Vec::with_capacity(s.order());
    for n in 1..=s.order() {
        fact *= BigInt::from(n);
        let t = &s.coeffs[n] * BigRational::from_integer(fact.clone());
        if !t.is_integer() {
            return Err(EgfError::NonIntegral { n });
        }
        let t = t.to_integer();
        if t.is_negative() {
            return Err(EgfError::Negative { n });
        }
        out.push(t.to_biguint().expect("nonnegative"));
    }
    Ok(out)
}

/// Solves `aₙ = Pₙ + [xⁿ] exp(P + f_{<n})` for `n = 1..=order`, i.e.
/// `1 + 2f = exp(P + f)` when `P` has no constant term.
fn solve_implicit(p: &RationalSeries, order: usize) -> RationalSeries {
    let mut a = alloc::vec![BigRational::zero(); order + 1];
    // s = P + f, b = exp(s), both filled in lockstep.
    let mut s = alloc::vec![BigRational::zero(); order + 1];
    let mut b = alloc::vec![BigRational::zero(); order + 1];
    b[0] = BigRational::one();
    for n in 1..=order {
        let pn = p.coeff(n);
        let mut partial = BigRational::zero();
        for k in 1..n {
            if !s[k].is_zero() {
                partial += &s[k] * &b[n - k] * BigRational::from_integer(BigInt::from(k));
            }
        }
        let nn = BigRational::from_integer(BigInt::from(n));
        // The unknown aₙ enters bₙ once through n·sₙ·b₀/n.
        let head = partial.clone() / &nn;
        a[n] = &pn + &head;
        s[n] = &pn + &a[n];
        b[n] = (partial + &s[n] * &nn) / nn;
    }
    RationalSeries { coeffs: a }
}

/// EGF of all simplified assembly trees: `1 − x + 2f = exp(f)`.
pub fn base_series(order: usize) -> RationalSeries {
    let mut a = alloc::vec![BigRational::zero(); order + 1];
    let mut b = alloc::vec![BigRational::zero(); order + 1];
    b[0] = BigRational::one();
    for n in 1..=order {
        let nn = BigRational::from_integer(BigInt::from(n));
        let mut partial = BigRational::zero();
        for k in 1..n {
            partial += &a[k] * &b[n - k] * BigRational::from_integer(BigInt::from(k));
        }
        a[n] = if n == 1 {
            BigRational::one()
        } else {
            partial.clone() / &nn
        };
        b[n] = (partial + &a[n] * &nn) / nn;
    }
    RationalSeries { coeffs: a }
}

/// `t₁ … t_N` for the trivial group.
pub fn solve_base_egf(order: usize) -> Result<Vec<BigUint>, EgfError> {
    if order == 0 {
        return Err(EgfError::ZeroOrder);
    }
    egf_to_counts(&base_series(order))
}

/// Fixed-tree counts for one conjugacy class of subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCounts {
    pub class: usize,
    pub representative: usize,
    pub order: usize,
    pub size: usize,
    /// `t₁ … t_N` of the class representative.
    pub t: Vec<BigUint>,
}

fn check_free(lattice: &SubgroupLattice) -> Result<(), EgfError> {
    match lattice.parent().free_action_violation() {
        Some((g, x)) => Err(EgfError::NotFree {
            element: g.to_string(),
            point: x + 1,
        }),
        None => Ok(()),
    }
}

/// Propagates requested orders downward: computing `f_H` to order `N` needs
/// `f_K` to order `N·(H:K)` for every `K < H`.
fn propagate_orders(lattice: &SubgroupLattice, mut needed: Vec<usize>) -> Vec<usize> {
    for h in (0..lattice.len()).rev() {
        if needed[h] == 0 {
            continue;
        }
        for k in 0..h {
            if lattice.is_contained(k, h) {
                let m = lattice.order(h) / lattice.order(k);
                needed[k] = needed[k].max(needed[h] * m);
            }
        }
    }
    needed
}

/// Solves every subgroup with `needed[h] > 0`, bottom-up. With `share`, only
/// the first member of each conjugacy class is solved and the others reuse it.
fn solve_lattice(
    lattice: &SubgroupLattice,
    needed: &[usize],
    share: bool,
) -> Vec<Option<RationalSeries>> {
    let mut series: Vec<Option<RationalSeries>> = alloc::vec![None; lattice.len()];
    let lookup = |series: &Vec<Option<RationalSeries>>, k: usize| -> RationalSeries {
        let src = if share {
            lattice.class_representative(lattice.class_of(k))
        } else {
            k
        };
        series[src].clone().expect("subgroups are solved before their supergroups")
    };
    for h in 0..lattice.len() {
        if needed[h] == 0 {
            continue;
        }
        if share && lattice.class_representative(lattice.class_of(h)) != h {
            continue;
        }
        let order = if share {
            lattice.classes()[lattice.class_of(h)]
                .iter()
                .map(|&c| needed[c])
                .max()
                .unwrap_or(0)
        } else {
            needed[h]
        };
        if lattice.order(h) == 1 {
            series[h] = Some(base_series(order));
            continue;
        }
        // P = Σ_{K<H} (1/m)·f_K(m·x), m = (H:K); coefficient n is m^{n−1}·aₙ(K).
        let mut p = alloc::vec![BigRational::zero(); order + 1];
        for k in 0..h {
            if !lattice.is_contained(k, h) {
                continue;
            }
            let m = BigInt::from(lattice.order(h) / lattice.order(k));
            let fk = lookup(&series, k);
            let mut pow = BigInt::one();
            for (n, pn) in p.iter_mut().enumerate().skip(1) {
                let c = fk.coeff(n);
                if !c.is_zero() {
                    *pn += c * BigRational::from_integer(pow.clone());
                }
                pow *= &m;
            }
        }
        let p = RationalSeries { coeffs: p };
        series[h] = Some(solve_implicit(&p, order));
    }
    series
}

/// `t₁(H) … t_N(H)` for one representative per conjugacy class.
pub fn solve_group_egf(lattice: &SubgroupLattice, order: usize) -> Result<Vec<ClassCounts>, EgfError> {
    if order == 0 {
        return Err(EgfError::ZeroOrder);
    }
    check_free(lattice)?;
    let mut needed = alloc::vec![0; lattice.len()];
    for class in lattice.classes() {
        needed[class[0]] = order;
    }
    let needed = propagate_orders(lattice, needed);
    let series = solve_lattice(lattice, &needed, true);
    lattice
        .classes()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let rep = members[0];
            let s = series[rep].as_ref().expect("solved").truncate(order);
            Ok(ClassCounts {
                class: c,
                representative: rep,
                order: lattice.order(rep),
                size: members.len(),
                t: egf_to_counts(&s)?,
            })
        })
        .collect()
}

/// `t₁(H) … t_N(H)` for a single subgroup, solved without sharing results
/// between conjugates.
pub fn solve_for_subgroup(
    lattice: &SubgroupLattice,
    h: usize,
    order: usize,
) -> Result<Vec<BigUint>, EgfError> {
    if order == 0 {
        return Err(EgfError::ZeroOrder);
    }
    check_free(lattice)?;
    let mut needed = alloc::vec![0; lattice.len()];
    needed[h] = order;
    let needed = propagate_orders(lattice, needed);
    let series = solve_lattice(lattice, &needed, false);
    egf_to_counts(&series[h].as_ref().expect("solved").truncate(order))
}

/// `t_{n·(G:H)}(H)` for every subgroup `H`, the fixed-tree counts on a set
/// of `n` free orbits.
pub fn fixed_counts_on_orbits(lattice: &SubgroupLattice, n_orbits: usize) -> Result<Vec<BigUint>, EgfError> {
    if n_orbits == 0 {
        return Err(EgfError::ZeroOrder);
    }
    check_free(lattice)?;
    let needed: Vec<usize> = (0..lattice.len()).map(|h| n_orbits * lattice.index(h)).collect();
    let series = solve_lattice(lattice, &needed, true);
    (0..lattice.len())
        .map(|h| {
            let rep = lattice.class_representative(lattice.class_of(h));
            let n = needed[h];
            let counts = egf_to_counts(&series[rep].as_ref().expect("solved").truncate(n))?;
            Ok(counts[n - 1].clone())
        })
        .collect()
}
