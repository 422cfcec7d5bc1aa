//! Floating-point values paired with rigorous error bounds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack charged for each series evaluation (exact coefficients,
/// Horner evaluation, at most a few hundred operations).
pub const ROUNDING_SLACK: f64 = 1e-12;

/// Relative slack charged for one elementary operation on certified values.
const OP_SLACK: f64 = 4.0 * f64::EPSILON;

/// A value `v` and a bound `e >= 0` with `|v - exact| <= e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub error: f64,
}

impl CertifiedValue {
    pub fn new(value: f64, error: f64) -> Self {
        debug_assert!(error >= 0.0 || error.is_nan(), "negative error bound {error}");
        Self { value, error: error.max(0.0) }
    }

    /// A value known exactly (up to the representation of `value`).
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.error
    }

    /// True when the two intervals overlap, i.e. they may describe the same number.
    pub fn agrees_with(&self, other: &CertifiedValue) -> bool {
        (self.value - other.value).abs() <= self.error + other.error
    }

    /// True when every point of `self` lies strictly below every point of `other`.
    pub fn strictly_below(&self, other: &CertifiedValue) -> bool {
        self.upper() < other.lower()
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &CertifiedValue) -> Result<CertifiedValue> {
        let lo = self.lower().max(other.lower());
        let hi = self.upper().min(other.upper());
        if lo > hi {
            return Err(Error::CrossRouteDisagreement {
                quantity: "interval intersection".into(),
                left: self.value,
                right: other.value,
                allowed: self.error + other.error,
            });
        }
        Ok(Self::from_bounds(lo, hi))
    }

    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let err = (hi - mid).max(mid - lo);
        Self::new(mid, err * (1.0 + OP_SLACK))
    }

    pub fn scale(self, c: f64) -> Self {
        let value = self.value * c;
        Self::new(value, self.error * c.abs() + OP_SLACK * value.abs())
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::exact(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    /// Quotient, failing when the divisor's interval touches zero.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        let denom_lo = rhs.value.abs() - rhs.error;
        if denom_lo <= 0.0 {
            return Err(Error::Uncertifiable(format!(
                "divisor {} ± {:e} is not bounded away from zero",
                rhs.value, rhs.error
            )));
        }
        let value = self.value / rhs.value;
        let err = (self.value.abs() * rhs.error + rhs.value.abs() * self.error) / (rhs.value.abs() * denom_lo);
        Ok(Self::new(value, err + OP_SLACK * value.abs()))
    }

    /// `1 / self`.
    pub fn recip(self) -> Result<Self> {
        Self::exact(1.0).checked_div(self)
    }

    /// Relative width of the interval.
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            self.error / self.value.abs()
        }
    }
}

impl fmt::Display for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.15e} ± {:.3e}", self.value, self.error)
    }
}

impl Add for CertifiedValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let value = self.value + rhs.value;
        Self::new(value, self.error + rhs.error + OP_SLACK * value.abs())
    }
}

impl Sub for CertifiedValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let value = self.value - rhs.value;
        Self::new(value, self.error + rhs.error + OP_SLACK * (self.value.abs() + rhs.value.abs()))
    }
}

impl Neg for CertifiedValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, error: self.error }
    }
}

impl Mul for CertifiedValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let value = self.value * rhs.value;
        let err = self.value.abs() * rhs.error + rhs.value.abs() * self.error + self.error * rhs.error;
        Self::new(value, err + OP_SLACK * value.abs())
    }
}

impl std::iter::Sum for CertifiedValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::exact(0.0), |a, b| a + b)
    }
}

/// Pairwise summation in index order. Result depends only on the slice, never
/// on how the slice was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated running sum; the error stays near one ulp of the
/// total regardless of the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Worst-case accumulated rounding of a pairwise sum of nonnegative-magnitude terms.
pub fn summation_slack(abs_sum: f64, terms: usize) -> f64 {
    let depth = (terms.max(2) as f64).log2().ceil() + 1.0;
    abs_sum * depth * f64::EPSILON + ROUNDING_SLACK * abs_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses() {
        let a = CertifiedValue::new(2.0, 0.1);
        let b = CertifiedValue::new(3.0, 0.2);
        assert!((a * b).contains(6.0 + 0.1 * 3.0 + 0.2 * 2.0 + 0.02 - 1e-12));
        assert!((a - b).contains(-1.3));
        let q = a.checked_div(b).unwrap();
        assert!(q.contains(2.1 / 2.8));
        assert!(q.contains(1.9 / 3.2));
    }

    #[test]
    fn division_by_interval_containing_zero_fails() {
        let a = CertifiedValue::exact(1.0);
        assert!(a.checked_div(CertifiedValue::new(0.1, 0.2)).is_err());
    }

    #[test]
    fn intersection() {
        let a = CertifiedValue::new(1.0, 0.5);
        let b = CertifiedValue::new(1.2, 0.1);
        let c = a.intersect(&b).unwrap();
        assert!(c.lower() >= 1.1 - 1e-12 && c.upper() <= 1.3 + 1e-12);
        assert!(a.intersect(&CertifiedValue::new(3.0, 0.1)).is_err());
    }

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        assert!((s.value() - (1.0 + 1e-14)).abs() < 1e-16);
    }

    #[test]
    fn pairwise_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        assert_eq!(pairwise_sum(&xs), pairwise_sum(&xs.clone()));
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
    }

    mod properties {
        use super::*;
        use num_bigint::BigInt;
        use num_rational::BigRational;
        use proptest::prelude::*;

        fn rational(num: i64, den: i64) -> (BigRational, CertifiedValue) {
            let exact = BigRational::new(BigInt::from(num), BigInt::from(den));
            let v = num as f64 / den as f64;
            (exact, CertifiedValue::new(v, v.abs() * f64::EPSILON))
        }

        fn encloses(c: CertifiedValue, exact: &BigRational) -> bool {
            let lo = BigRational::from_float(c.lower()).unwrap();
            let hi = BigRational::from_float(c.upper()).unwrap();
            lo <= *exact && *exact <= hi
        }

        proptest! {
            #[test]
            fn operations_enclose_exact_rationals(
                a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000,
            ) {
                let (x, cx) = rational(a, b);
                let (y, cy) = rational(c, d);
                prop_assert!(encloses(cx + cy, &(&x + &y)));
                prop_assert!(encloses(cx - cy, &(&x - &y)));
                prop_assert!(encloses(cx * cy, &(&x * &y)));
                if c != 0 {
                    prop_assert!(encloses(cx.checked_div(cy).unwrap(), &(&x / &y)));
                }
            }
        }
    }
}
