//! Integer scalars used by the elimination kernels.
//!
//! Every routine is written once against [`Scalar`] and run first with
//! overflow-checked `i64` entries. On overflow the caller reruns the same
//! routine with `BigInt`, which never fails.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) trait Scalar: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Quotient rounded toward zero.
    fn div_trunc(&self, other: &Self) -> Option<Self>;
    /// Quotient rounded toward negative infinity.
    fn div_floor(&self, other: &Self) -> Option<Self>;
    fn divides(&self, other: &Self) -> bool;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_trunc(&self, other: &Self) -> Option<Self> {
        self.checked_div(*other)
    }
    fn div_floor(&self, other: &Self) -> Option<Self> {
        if *other == -1 {
            return self.checked_neg();
        }
        Some(Integer::div_floor(self, other))
    }
    fn divides(&self, other: &Self) -> bool {
        if *self == 0 {
            *other == 0
        } else {
            other.checked_rem(*self).is_none_or(|r| r == 0)
        }
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_trunc(&self, other: &Self) -> Option<Self> {
        Some(self / other)
    }
    fn div_floor(&self, other: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, other))
    }
    fn divides(&self, other: &Self) -> bool {
        if Zero::is_zero(self) {
            Zero::is_zero(other)
        } else {
            Zero::is_zero(&(other % self))
        }
    }
}

/// `row[from..] -= q * pivot[from..]`.
pub(crate) fn sub_multiple<T: Scalar>(
    row: &mut [T],
    pivot: &[T],
    q: &T,
    from: usize,
) -> Option<()> {
    for (a, b) in row[from..].iter_mut().zip(&pivot[from..]) {
        if b.is_zero() {
            continue;
        }
        *a = a.sub(&b.mul(q)?)?;
    }
    Some(())
}

pub(crate) fn negate_row<T: Scalar>(row: &mut [T]) -> Option<()> {
    for a in row.iter_mut() {
        if !a.is_zero() {
            *a = a.neg()?;
        }
    }
    Some(())
}

pub(crate) fn convert_rows<T: Scalar>(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<T>>> {
    rows.iter()
        .map(|r| r.iter().map(T::from_big).collect::<Option<Vec<T>>>())
        .collect()
}

pub(crate) fn to_big_rows<T: Scalar>(rows: &[Vec<T>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| r.iter().map(Scalar::to_big).collect())
        .collect()
}
