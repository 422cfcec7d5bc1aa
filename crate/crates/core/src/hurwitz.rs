//! Hurwitz numbers of the torus and the sphere, their generating functions,
//! and moments of the Frobenius measures they define.
//!
//! For a base of genus `g`, `H_g(n, k) = Σ_{α⊢n} (n!/f^α)^{2g-2} K(α)^k`.
//! On the torus the weight is one and `H_1(n, k)` is a power sum of contents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::error::{check_q, Error, Result};
use crate::partition::{for_each_partition, Partition, SizeContentTable};
use crate::series::{euler_phi, TailModel, TruncatedSeries};

/// Genus of the base and of the covering surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzSpec {
    pub base_genus: u32,
    pub cover_genus: u32,
}

impl HurwitzSpec {
    pub fn torus(cover_genus: u32) -> Result<Self> {
        if cover_genus == 0 {
            return Err(Error::InvalidParameter("cover genus must be positive over the torus".into()));
        }
        Ok(Self { base_genus: 1, cover_genus })
    }

    /// Number of simple branch points `2g' - 2` of a torus cover.
    pub fn branch_points(&self) -> u32 {
        2 * self.cover_genus - 2
    }
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, m| acc * BigInt::from(m))
}

/// `H_g(n, k)` by enumerating all partitions of `n`. Supports `g ∈ {0, 1}`.
pub fn hurwitz_number(g: u32, n: u32, k: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidParameter("Hurwitz numbers need n >= 1".into()));
    }
    match g {
        1 => {
            let mut total = BigInt::zero();
            for_each_partition(n, None, |parts| {
                let content = BigInt::from(crate::partition::total_content_of(parts));
                total += num_traits::pow(content, k as usize);
            });
            Ok(BigRational::from_integer(total))
        }
        0 => {
            let fact = factorial(u64::from(n));
            let mut total = BigRational::zero();
            for_each_partition(n, None, |parts| {
                let alpha = Partition::from_parts_unchecked(parts.to_vec());
                let dim = BigInt::from(alpha.hook_dimension().expect("n >= 1"));
                let ratio = BigRational::new(dim.clone() * dim, fact.clone() * fact.clone());
                total +=
                    ratio * BigRational::from_integer(num_traits::pow(BigInt::from(alpha.total_content()), k as usize));
            });
            Ok(total)
        }
        _ => Err(Error::InvalidParameter(format!("base genus {g} is not supported (only 0 and 1)"))),
    }
}

/// `g' = k/2 + 1 + n(g - 1)`.
pub fn riemann_hurwitz_genus(g: u32, n: u32, k: u32) -> BigRational {
    let base = BigRational::new(BigInt::from(k), BigInt::from(2));
    base + BigRational::from_integer(BigInt::from(1 + i64::from(n) * (i64::from(g) - 1)))
}

/// `𝓕_{1,g'}(q) = Σ_n H_1(n, 2g'-2) q^n` up to degree `degree`.
///
/// For `g' = 1` the constant term is 1, so the series is exactly `1/φ(q)`.
pub fn hurwitz_gf(cover_genus: u32, degree: usize) -> Result<TruncatedSeries> {
    let spec = HurwitzSpec::torus(cover_genus)?;
    let power = spec.branch_points();
    let table = SizeContentTable::shared(degree as u32, None);
    let mut coeffs: Vec<BigRational> =
        (0..=degree as u32).map(|n| BigRational::from_integer(table.content_power_sum(n, power))).collect();
    coeffs[0] = if cover_genus == 1 { BigRational::one() } else { BigRational::zero() };
    Ok(TruncatedSeries::from_coefficients(coeffs))
}

/// Tail model of `D^ℓ 𝓕_{1,g'}`.
pub fn hurwitz_tail(cover_genus: u32, ell: u32) -> TailModel {
    if cover_genus == 1 {
        TailModel::PARTITION.with_d(ell)
    } else {
        TailModel::hurwitz(2 * cover_genus - 2).with_d(ell)
    }
}

fn torus_only(g: u32) -> Result<()> {
    if g != 1 {
        return Err(Error::InvalidParameter(format!(
            "generating functions are implemented over the torus only (g = 1), got g = {g}"
        )));
    }
    Ok(())
}

/// `𝔼[|α|^ℓ] = D^ℓ 𝓕 / 𝓕` under the Frobenius measure `∝ H_1(|α|, 2g'-2)`-weighted.
///
/// Fails unless `𝓕(q)` is certified positive.
pub fn frobenius_moment(g: u32, cover_genus: u32, ell: u32, q: f64, degree: usize) -> Result<CertifiedValue> {
    torus_only(g)?;
    check_q(q)?;
    if ell == 0 {
        return Ok(CertifiedValue::exact(1.0));
    }
    let f = hurwitz_gf(cover_genus, degree)?;
    let z = f.evaluate(q, hurwitz_tail(cover_genus, 0))?;
    if z.lower() <= 0.0 {
        return Err(Error::Uncertifiable(format!(
            "Frobenius partition function {z} is not certified positive at q = {q}"
        )));
    }
    let top = f.d_operator(ell).evaluate(q, hurwitz_tail(cover_genus, ell))?;
    top.checked_div(z)
}

/// `A_{2g-2, ℓ} = φ(q) D^ℓ 𝓕_{1,g}(q) = 𝔼_{𝒰(q)}[K(α)^{2g-2} |α|^ℓ]`.
pub fn a_bracket(genus: u32, ell: u32, q: f64, degree: usize) -> Result<CertifiedValue> {
    check_q(q)?;
    let f = hurwitz_gf(genus, degree)?;
    let phi = euler_phi(degree).evaluate(q, TailModel::UNIT)?;
    let top = f.d_operator(ell).evaluate(q, hurwitz_tail(genus, ell))?;
    Ok(phi * top)
}

/// Rows `(n, k, H_1(n, k))` for `1 <= n <= max_n` and each `k` in `ks`.
pub fn hurwitz_table(max_n: u32, ks: &[u32]) -> Vec<(u32, u32, BigInt)> {
    let table = SizeContentTable::shared(max_n, None);
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for &k in ks {
            rows.push((n, k, table.content_power_sum(n, k)));
        }
    }
    rows
}
