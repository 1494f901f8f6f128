//! Exact dyadic rationals `numerator / 2^exponent`.
//!
//! Every event over finitely many fair bits has a probability of this form,
//! so the exact engine never needs general rationals.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A non-negative dyadic rational in canonical form: the numerator is odd
/// unless the exponent is zero, and zero is stored as `0 / 2^0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicProb {
    numerator: BigUint,
    exponent: u64,
}

impl DyadicProb {
    pub fn new(numerator: BigUint, exponent: u64) -> Self {
        if numerator.is_zero() {
            return Self::zero();
        }
        let tz = numerator.trailing_zeros().unwrap_or(0).min(exponent);
        Self {
            numerator: numerator >> tz,
            exponent: exponent - tz,
        }
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            numerator: BigUint::one(),
            exponent: 0,
        }
    }

    /// `count / 2^exponent`.
    pub fn from_count(count: impl Into<BigUint>, exponent: u64) -> Self {
        Self::new(count.into(), exponent)
    }

    /// Reduces `numerator / denominator`, failing unless the reduced
    /// denominator is a power of two.
    pub fn from_ratio(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Internal("zero denominator".into()));
        }
        let g = numerator.gcd(&denominator);
        let den = &denominator / &g;
        let num = numerator / g;
        let tz = den.trailing_zeros().unwrap_or(0);
        if den >> tz != BigUint::one() {
            return Err(Error::Internal(format!(
                "{num}/{denominator} does not reduce to a dyadic rational"
            )));
        }
        Ok(Self::new(num, tz))
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Numerator over the fixed denominator `2^exponent` (`exponent` must be
    /// at least the canonical exponent).
    pub fn count_at(&self, exponent: u64) -> BigUint {
        assert!(exponent >= self.exponent, "exponent below canonical form");
        &self.numerator << (exponent - self.exponent)
    }

    /// `self - other`, or `None` if the result would be negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let e = self.exponent.max(other.exponent);
        let (a, b) = (self.count_at(e), other.count_at(e));
        (a >= b).then(|| Self::new(a - b, e))
    }

    /// `self * k / 2^shift`.
    pub fn scale(&self, k: u64, shift: u64) -> Self {
        Self::new(&self.numerator * k, self.exponent + shift)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.numerator.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.numerator >> shift)
            .to_u64()
            .expect("at most 64 bits");
        ldexp(top as f64, shift as i64 - self.exponent as i64)
    }

    /// Natural logarithm, accurate even when `to_f64` would underflow.
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.numerator.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.numerator >> shift)
            .to_u64()
            .expect("at most 64 bits");
        (top as f64).ln() + (shift as f64 - self.exponent as f64) * std::f64::consts::LN_2
    }
}

pub(crate) fn ldexp(mut x: f64, mut k: i64) -> f64 {
    let big = 2f64.powi(1000);
    let small = 2f64.powi(-1000);
    while k > 1000 {
        x *= big;
        k -= 1000;
    }
    while k < -1000 {
        x *= small;
        k += 1000;
    }
    x * 2f64.powi(k as i32)
}

impl Default for DyadicProb {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for DyadicProb {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.count_at(e).cmp(&other.count_at(e))
    }
}

impl PartialOrd for DyadicProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&DyadicProb> for &DyadicProb {
    type Output = DyadicProb;
    fn add(self, rhs: &DyadicProb) -> DyadicProb {
        let e = self.exponent.max(rhs.exponent);
        DyadicProb::new(self.count_at(e) + rhs.count_at(e), e)
    }
}

impl Add for DyadicProb {
    type Output = DyadicProb;
    fn add(self, rhs: DyadicProb) -> DyadicProb {
        &self + &rhs
    }
}

impl Mul<&DyadicProb> for &DyadicProb {
    type Output = DyadicProb;
    fn mul(self, rhs: &DyadicProb) -> DyadicProb {
        DyadicProb::new(
            &self.numerator * &rhs.numerator,
            self.exponent + rhs.exponent,
        )
    }
}

impl Mul for DyadicProb {
    type Output = DyadicProb;
    fn mul(self, rhs: DyadicProb) -> DyadicProb {
        &self * &rhs
    }
}

impl Sum for DyadicProb {
    fn sum<I: Iterator<Item = DyadicProb>>(iter: I) -> Self {
        iter.fold(DyadicProb::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a DyadicProb> for DyadicProb {
    fn sum<I: Iterator<Item = &'a DyadicProb>>(iter: I) -> Self {
        iter.fold(DyadicProb::zero(), |acc, x| &acc + x)
    }
}

/// `numerator/2^exponent`, the lossless text form used in reports.
impl fmt::Display for DyadicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for DyadicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicProb({self} ≈ {:e})", self.to_f64())
    }
}

impl std::str::FromStr for DyadicProb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a dyadic literal: {s:?}"));
        let (num, exp) = s.split_once("/2^").ok_or_else(bad)?;
        let num: BigUint = num.trim().parse().map_err(|_| bad())?;
        let exp: u64 = exp.trim().parse().map_err(|_| bad())?;
        Ok(Self::new(num, exp))
    }
}
