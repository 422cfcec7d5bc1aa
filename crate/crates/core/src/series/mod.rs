//! Truncated formal power series in `q` with exact rational coefficients.
//!
//! A [`TruncatedSeries`] knows the coefficients `c_0..=c_M` exactly and
//! nothing beyond degree `M`. Arithmetic never invents coefficients past the
//! smaller truncation degree. Numerical evaluation at a real `q` returns a
//! [`CertifiedValue`] whose error bound covers the unknown tail, under a
//! [`TailModel`] that the caller declares from the series' origin.

mod tail;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::{CertifiedValue, ROUNDING_SLACK};
use crate::error::{check_q, Result};
use crate::partition::partition_counts;

pub use tail::{
    length_tail_constant, paper_partition_tail_bound, paper_s_q, paper_t_q, partition_tail_constant, Envelope,
    TailModel, PARTITION_GROWTH,
};

/// `Σ_{d=0}^{M} c_d q^d + O(q^{M+1})` with exact rational `c_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// The series with the given coefficients; its truncation degree is `len - 1`.
    ///
    /// # Panics
    /// Panics on an empty coefficient vector.
    pub fn from_coefficients(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least the constant term");
        Self { coeffs }
    }

    pub fn from_integers<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        BigInt: From<T>,
    {
        Self::from_coefficients(coeffs.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self { coeffs: vec![BigRational::zero(); degree + 1] }
    }

    pub fn one(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// `q^k` known up to degree `degree` (zero if `k > degree`).
    pub fn monomial(k: usize, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if k <= degree {
            s.coeffs[k] = BigRational::one();
        }
        s
    }

    /// M, the last known degree.
    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// c_d, or `None` past the truncation degree (where it is unknown, not zero).
    pub fn coefficient(&self, d: usize) -> Option<&BigRational> {
        self.coeffs.get(d)
    }

    /// The same series known only up to degree `degree <= M`.
    pub fn truncate(&self, degree: usize) -> Self {
        assert!(degree <= self.truncation_degree(), "cannot extend a truncated series");
        Self { coeffs: self.coeffs[..=degree].to_vec() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// `D^k = (q d/dq)^k`: `c_d -> d^k c_d`.
    pub fn d_operator(&self, k: u32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| {
                let factor = num_traits::pow(BigInt::from(d), k as usize);
                c * BigRational::from_integer(factor)
            })
            .collect();
        Self { coeffs }
    }

    /// True when every known coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Coefficients as `f64`, rounded to nearest.
    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Certified numerical value at `q`.
    ///
    /// `value` is the Horner sum of the known coefficients. `error` is the tail
    /// bound of `tail` past degree `M`, plus a relative rounding slack of
    /// `1e-12 · Σ|c_d| q^d`.
    pub fn evaluate(&self, q: f64, tail: TailModel) -> Result<CertifiedValue> {
        check_q(q)?;
        let cs = self.coefficients_f64();
        let mut value = 0.0;
        let mut magnitude = 0.0;
        for c in cs.iter().rev() {
            value = value * q + c;
            magnitude = magnitude * q + c.abs();
        }
        let tail_bound = tail.bound(q, self.truncation_degree())?;
        let slack = ROUNDING_SLACK * magnitude + 4.0 * f64::EPSILON * (cs.len() as f64) * magnitude;
        Ok(CertifiedValue::new(value, tail_bound + slack))
    }

    /// Exact JSON dump: decimal strings (`"p/q"` for non-integers) plus the degree.
    pub fn to_json(&self) -> serde_json::Value {
        let dump = SeriesDump {
            truncation_degree: self.truncation_degree(),
            coefficients: self.coeffs.iter().map(|c| c.to_string()).collect(),
        };
        serde_json::to_value(dump).expect("series dump is plain data")
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesDump {
    truncation_degree: usize,
    coefficients: Vec<String>,
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match d {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "q^{d}")?,
                _ => write!(f, "{a}q^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.truncation_degree() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let m = self.truncation_degree().min(rhs.truncation_degree());
        TruncatedSeries { coeffs: (0..=m).map(|d| &self.coeffs[d] + &rhs.coeffs[d]).collect() }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let m = self.truncation_degree().min(rhs.truncation_degree());
        TruncatedSeries { coeffs: (0..=m).map(|d| &self.coeffs[d] - &rhs.coeffs[d]).collect() }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let m = self.truncation_degree().min(rhs.truncation_degree());
        let mut coeffs = vec![BigRational::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(m + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries { coeffs }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// φ(q) = ∏_{m>=1} (1 - q^m), expanded as a product up to degree `degree`.
pub fn euler_phi(degree: usize) -> TruncatedSeries {
    let mut c = vec![BigInt::zero(); degree + 1];
    c[0] = BigInt::one();
    for m in 1..=degree {
        for d in (m..=degree).rev() {
            let lower = c[d - m].clone();
            c[d] -= lower;
        }
    }
    TruncatedSeries::from_integers(c)
}

/// 1/φ(q) = Σ p(n) q^n up to degree `degree`.
pub fn inverse_phi(degree: usize) -> TruncatedSeries {
    TruncatedSeries::from_integers(partition_counts(degree).into_iter().map(BigInt::from))
}

/// θ(q) = Σ_{n ∈ ℤ} q^{n²} up to degree `degree`.
pub fn theta(degree: usize) -> TruncatedSeries {
    let mut c = vec![0i64; degree + 1];
    c[0] = 1;
    let mut n = 1usize;
    while n * n <= degree {
        c[n * n] = 2;
        n += 1;
    }
    TruncatedSeries::from_integers(c)
}

/// `D^k s` with `D = q d/dq`.
pub fn d_operator(s: &TruncatedSeries, k: u32) -> TruncatedSeries {
    s.d_operator(k)
}
