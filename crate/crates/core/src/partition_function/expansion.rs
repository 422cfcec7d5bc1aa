//! Coefficients `a_{2k}(t)` of `Z_N(q_t) ~ Σ_k a_{2k}(t) N^{-2k}`, computed by
//! three separate routes, and the chiral coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::moments::{composition_weight, moment_f_assembled, moment_f_closed};
use super::{limit_value, q_from_t};
use crate::certified::{CertifiedValue, ROUNDING_SLACK};
use crate::error::{Error, Result};
use crate::hurwitz::{hurwitz_gf, hurwitz_tail};
use crate::series::{theta, TailModel, TruncatedSeries};

/// `a_{2k}(t)` as obtained by each route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRoutes {
    /// `t^{2k} θ / ((2k)! φ²) · 𝔼[F^{2k}]` with the moment assembled from brackets `A_{j,ℓ}`.
    pub lemma_assembly: CertifiedValue,
    /// The same prefactor times the moment in generating-function form.
    pub closed_form: CertifiedValue,
    /// The sum over genus splittings, multiplied out as exact series.
    pub topological: CertifiedValue,
}

/// One summand of the topological sum for `a_{2g-2}`:
/// `t^{2g-2} (-1)^{k_2} D^{k_1}𝓕_{1,g_1} D^{k_2}𝓕_{1,g_2} D^{(k_1+k_2)/2}θ / ((2g_1-2)!(2g_2-2)! k_1! k_2!)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologicalTerm {
    pub g1: u32,
    pub g2: u32,
    pub k1: u32,
    pub k2: u32,
    pub value: CertifiedValue,
}

/// The three groups in the explicit form
/// `a_2 = t²[𝓕_{1,2}𝓕_{1,1}θ + 𝓕_{1,1}D²𝓕_{1,1}Dθ - (D𝓕_{1,1})²Dθ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemarkTerms {
    pub genus_two_term: CertifiedValue,
    pub second_derivative_term: CertifiedValue,
    pub squared_derivative_term: CertifiedValue,
    pub total: CertifiedValue,
}

fn integer_coefficients(s: &TruncatedSeries) -> Vec<BigInt> {
    s.coefficients().iter().map(|c| c.to_integer()).collect()
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `Σ |c_d| q^d` rounded up.
fn magnitude(coeffs: &[BigInt], q: f64) -> f64 {
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * q + c.abs().to_f64().unwrap_or(f64::INFINITY);
    }
    acc * (1.0 + ROUNDING_SLACK)
}

/// The tuples `(g_1, g_2, k_1, k_2)` with `2g_1 - 2 + 2g_2 - 2 + k_1 + k_2 = 2k` and `k_1 + k_2` even.
fn genus_splittings(k: u32) -> Vec<(u32, u32, u32, u32)> {
    let mut out = Vec::new();
    for h1 in 0..=k {
        for h2 in 0..=k - h1 {
            let rest = 2 * (k - h1 - h2);
            for k1 in 0..=rest {
                out.push((h1 + 1, h2 + 1, k1, rest - k1));
            }
        }
    }
    out
}

struct Factor {
    coeffs: Vec<BigInt>,
    tail: f64,
}

impl Factor {
    fn gf(series: &TruncatedSeries, genus: u32, ell: u32, q: f64) -> Result<Self> {
        let coeffs = integer_coefficients(&series.d_operator(ell));
        let tail = hurwitz_tail(genus, ell).bound(q, series.truncation_degree())?;
        Ok(Self { coeffs, tail })
    }

    fn theta(series: &TruncatedSeries, m: u32, q: f64) -> Result<Self> {
        let coeffs = integer_coefficients(&series.d_operator(m));
        let tail = TailModel::THETA.with_d(m).bound(q, series.truncation_degree())?;
        Ok(Self { coeffs, tail })
    }
}

/// Exact product polynomials for every splitting, with the rigorous bound
/// `(|P_1|+e_1)(|P_2|+e_2)(|P_3|+e_3) - |P_1||P_2||P_3|` on each truncation error.
struct Splitting {
    tuple: (u32, u32, u32, u32),
    weight: BigRational,
    product: Vec<BigInt>,
    error: f64,
}

fn splittings(k: u32, q: f64, degree: usize) -> Result<Vec<Splitting>> {
    let gfs: Vec<TruncatedSeries> = (1..=k + 1).map(|g| hurwitz_gf(g, degree)).collect::<Result<_>>()?;
    let th = theta(degree);
    let mut out = Vec::new();
    for (g1, g2, k1, k2) in genus_splittings(k) {
        let f1 = Factor::gf(&gfs[g1 as usize - 1], g1, k1, q)?;
        let f2 = Factor::gf(&gfs[g2 as usize - 1], g2, k2, q)?;
        let f3 = Factor::theta(&th, (k1 + k2) / 2, q)?;
        let product = poly_mul(&poly_mul(&f1.coeffs, &f2.coeffs), &f3.coeffs);
        let (m1, m2, m3) = (magnitude(&f1.coeffs, q), magnitude(&f2.coeffs, q), magnitude(&f3.coeffs, q));
        let error = (m1 + f1.tail) * (m2 + f2.tail) * (m3 + f3.tail) - m1 * m2 * m3;
        let mut weight = composition_weight(0, [2 * g1 - 2, 2 * g2 - 2, k1, k2]);
        if k2 % 2 == 1 {
            weight = -weight;
        }
        out.push(Splitting { tuple: (g1, g2, k1, k2), weight, product, error: error.max(0.0) * (1.0 + 1e-12) });
    }
    Ok(out)
}

fn evaluate_rational(coeffs: &[BigRational], q: f64) -> CertifiedValue {
    let mut value = 0.0;
    let mut mag = 0.0;
    for c in coeffs.iter().rev() {
        let x = c.to_f64().unwrap_or(f64::NAN);
        value = value * q + x;
        mag = mag * q + x.abs();
    }
    CertifiedValue::new(value, (ROUNDING_SLACK + 4.0 * f64::EPSILON * coeffs.len() as f64) * mag)
}

/// Each summand of the topological sum for `a_{2k}(t)`, evaluated on its own.
pub fn topological_terms(k: u32, t: f64, degree: usize) -> Result<Vec<TopologicalTerm>> {
    let q = q_from_t(t)?;
    let t_power = t.powi(2 * k as i32);
    splittings(k, q, degree)?
        .into_iter()
        .map(|s| {
            let coeffs: Vec<BigRational> =
                s.product.iter().map(|c| BigRational::from_integer(c.clone()) * &s.weight).collect();
            let mut v = evaluate_rational(&coeffs, q);
            v.error += s.error * s.weight.abs().to_f64().unwrap_or(f64::INFINITY);
            let (g1, g2, k1, k2) = s.tuple;
            Ok(TopologicalTerm { g1, g2, k1, k2, value: v.scale(t_power) })
        })
        .collect()
}

/// The topological route: all splittings summed as one exact rational
/// polynomial and evaluated once.
fn topological_value(k: u32, t: f64, degree: usize) -> Result<CertifiedValue> {
    let q = q_from_t(t)?;
    let parts = splittings(k, q, degree)?;
    let len = parts.iter().map(|s| s.product.len()).max().unwrap_or(1);
    let mut total = vec![BigRational::zero(); len];
    let mut error = 0.0;
    for s in &parts {
        for (d, c) in s.product.iter().enumerate() {
            if !c.is_zero() {
                total[d] += BigRational::from_integer(c.clone()) * &s.weight;
            }
        }
        error += s.error * s.weight.abs().to_f64().unwrap_or(f64::INFINITY);
    }
    let mut v = evaluate_rational(&total, q);
    v.error += error;
    Ok(v.scale(t.powi(2 * k as i32)))
}

/// `t^{2k} θ(q_t) / ((2k)! φ(q_t)²)`.
fn moment_prefactor(k: u32, t: f64, degree: usize) -> Result<CertifiedValue> {
    let q = q_from_t(t)?;
    let fact: f64 = (1..=2 * k).map(f64::from).product();
    Ok(limit_value(q, degree)?.scale(t.powi(2 * k as i32) / fact))
}

/// `a_{2k}(t)` by all three routes, at series degree `degree`.
pub fn expansion_coeff_routes(k: u32, t: f64, degree: usize) -> Result<CoefficientRoutes> {
    let q = q_from_t(t)?;
    let prefactor = moment_prefactor(k, t, degree)?;
    Ok(CoefficientRoutes {
        lemma_assembly: prefactor * moment_f_assembled(2 * k, q, degree)?,
        closed_form: prefactor * moment_f_closed(2 * k, q, degree)?,
        topological: topological_value(k, t, degree)?,
    })
}

fn require_agreement(name: &str, a: &CertifiedValue, b: &CertifiedValue) -> Result<()> {
    if a.agrees_with(b) {
        Ok(())
    } else {
        Err(Error::CrossRouteDisagreement {
            quantity: name.to_string(),
            left: a.value,
            right: b.value,
            allowed: a.error + b.error,
        })
    }
}

/// Certified `a_{2k}(t)`: the intersection of the three routes, or a
/// disagreement error when any two of them fail to overlap.
pub fn expansion_coeff(k: u32, t: f64, degree: usize) -> Result<CertifiedValue> {
    let r = expansion_coeff_routes(k, t, degree)?;
    let label = |a: &str, b: &str| format!("a_{} {a} vs {b}", 2 * k);
    require_agreement(&label("closed form", "topological"), &r.closed_form, &r.topological)?;
    require_agreement(&label("lemma assembly", "closed form"), &r.lemma_assembly, &r.closed_form)?;
    require_agreement(&label("lemma assembly", "topological"), &r.lemma_assembly, &r.topological)?;
    r.closed_form.intersect(&r.topological)?.intersect(&r.lemma_assembly)
}

/// The three groups of `a_2(t)` from separately evaluated factors.
pub fn a2_remark_terms(t: f64, degree: usize) -> Result<RemarkTerms> {
    let q = q_from_t(t)?;
    let f11 = hurwitz_gf(1, degree)?;
    let f12 = hurwitz_gf(2, degree)?;
    let th = theta(degree);
    let f11_v = f11.evaluate(q, hurwitz_tail(1, 0))?;
    let df11 = f11.d_operator(1).evaluate(q, hurwitz_tail(1, 1))?;
    let d2f11 = f11.d_operator(2).evaluate(q, hurwitz_tail(1, 2))?;
    let f12_v = f12.evaluate(q, hurwitz_tail(2, 0))?;
    let th_v = th.evaluate(q, TailModel::THETA)?;
    let dth = th.d_operator(1).evaluate(q, TailModel::THETA.with_d(1))?;
    let t2 = t * t;
    let genus_two_term = (f12_v * f11_v * th_v).scale(t2);
    let second_derivative_term = (f11_v * d2f11 * dth).scale(t2);
    let squared_derivative_term = -(df11 * df11 * dth).scale(t2);
    Ok(RemarkTerms {
        genus_two_term,
        second_derivative_term,
        squared_derivative_term,
        total: genus_two_term + second_derivative_term + squared_derivative_term,
    })
}

/// `t^{2k} / (2k)! · 𝓕_{1,k+1}(q_t)`, the coefficient of `N^{-2k}` in the chiral sum.
pub fn chiral_coefficient(k: u32, t: f64, degree: usize) -> Result<CertifiedValue> {
    let q = q_from_t(t)?;
    let fact: f64 = (1..=2 * k).map(f64::from).product();
    let f = hurwitz_gf(k + 1, degree)?.evaluate(q, hurwitz_tail(k + 1, 0))?;
    Ok(f.scale(t.powi(2 * k as i32) / fact))
}
