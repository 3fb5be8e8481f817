//! Scalars that are exact rationals when the input was exact, floats otherwise.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Relative tolerance for comparisons that involve a float.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{0}` as a number")]
pub struct ParseRealError(pub String);

/// An exact rational or an `f64`. Arithmetic stays exact while both sides
/// are exact.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(BigRational),
    Approx(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Real::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Real::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Real::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Real::Approx(x) => *x,
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.abs()),
            Real::Approx(x) => Real::Approx(x.abs()),
        }
    }

    /// Three-way comparison; floats within the relative tolerance are equal.
    pub fn cmp_tol(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = 1f64.max(a.abs()).max(b.abs());
                if (a - b).abs() <= REL_TOL * scale {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn eq_tol(&self, other: &Real) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    /// Sign with the float tolerance applied around zero.
    pub fn signum_tol(&self) -> i8 {
        match self.cmp_tol(&Real::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn is_zero_tol(&self) -> bool {
        self.signum_tol() == 0
    }
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Approx(x)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n)
    }
}

impl From<BigRational> for Real {
    fn from(q: BigRational) -> Self {
        Real::Exact(q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                match (self, rhs) {
                    (Real::Exact(a), Real::Exact(b)) => Real::Exact(a $op b),
                    _ => Real::Approx(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Approx(x) => Real::Approx(-x),
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Real::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Real::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Exact parse of `-12`, `3/4`, `1.25`, `2.5e-3`.
impl FromStr for Real {
    type Err = ParseRealError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRealError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Real::Exact(BigRational::new(n, d)));
        }
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let mut digits = String::from(int_part);
        digits.push_str(frac_part);
        let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| err())?);
        let shift = exp - frac_part.len() as i32;
        let ten = BigRational::from_integer(BigInt::from(10));
        let pow = num_traits::pow(ten, shift.unsigned_abs() as usize);
        if shift >= 0 {
            value *= pow;
        } else {
            value /= pow;
        }
        Ok(Real::Exact(if neg { -value } else { value }))
    }
}

/// A point in 3-space.
pub type Point3 = [Real; 3];

pub fn point(x: i64, y: i64, z: i64) -> Point3 {
    [Real::int(x), Real::int(y), Real::int(z)]
}

pub fn sub3(a: &Point3, b: &Point3) -> Point3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn add3(a: &Point3, b: &Point3) -> Point3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn dot3(a: &Point3, b: &Point3) -> Real {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

pub fn cross3(a: &Point3, b: &Point3) -> Point3 {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

pub fn dist2(a: &Point3, b: &Point3) -> Real {
    let d = sub3(a, b);
    dot3(&d, &d)
}

/// `det[b−a, c−a, d−a]`, six times the signed tetrahedron volume.
pub fn signed_volume(a: &Point3, b: &Point3, c: &Point3, d: &Point3) -> Real {
    dot3(&sub3(b, a), &cross3(&sub3(c, a), &sub3(d, a)))
}

pub fn points_eq_tol(a: &Point3, b: &Point3) -> bool {
    (0..3).all(|k| a[k].eq_tol(&b[k]))
}
