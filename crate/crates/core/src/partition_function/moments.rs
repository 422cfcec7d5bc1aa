//! Moments of `F(α, β, n) = K(α) + K(β) + n(|α| - |β|)` under the product
//! measure `𝒰(q) ⊗ 𝒰(q) ⊗ 𝒢_1(q)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::certified::{summation_slack, CertifiedValue};
use crate::error::{check_q, Error, Result};
use crate::hurwitz::{a_bracket, hurwitz_gf, hurwitz_tail};
use crate::partition::{for_each_partition_up_to, SizeContentTable};
use crate::series::{euler_phi, theta, TailModel, TruncatedSeries};

/// Partitions up to this size enter the enumerated brackets.
pub const ENUMERATED_SIZE: u32 = 40;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial_weight(total: u32, parts: &[u32]) -> f64 {
    factorial(total) / parts.iter().map(|&p| factorial(p)).product::<f64>()
}

/// Rounding bound for a left-to-right sum of `terms` values with `Σ|x| = magnitude`.
fn sequential_slack(magnitude: f64, terms: usize) -> f64 {
    summation_slack(magnitude, terms) + magnitude * terms as f64 * f64::EPSILON
}

/// `𝔼[n^p]` under `𝒢_1(q)`: `D^{p/2}θ / θ` for even `p`, exactly 0 for odd `p`.
pub fn theta_moment(power: u32, q: f64, degree: usize) -> Result<CertifiedValue> {
    check_q(q)?;
    if power % 2 == 1 {
        return Ok(CertifiedValue::exact(0.0));
    }
    if power == 0 {
        return Ok(CertifiedValue::exact(1.0));
    }
    let th = theta(degree);
    let top = th.d_operator(power / 2).evaluate(q, TailModel::THETA.with_d(power / 2))?;
    top.checked_div(th.evaluate(q, TailModel::THETA)?)
}

/// The compositions `2k_1 + 2k_2 + k_3 + k_4 = power` with `k_3 + k_4` even.
fn even_compositions(power: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for k1 in 0..=power / 2 {
        for k2 in 0..=(power - 2 * k1) / 2 {
            let rest = power - 2 * k1 - 2 * k2;
            if rest % 2 == 1 {
                continue;
            }
            for k3 in 0..=rest {
                out.push([k1, k2, k3, rest - k3]);
            }
        }
    }
    out
}

/// Evaluated `D^ℓ 𝓕_{1,g}` for the genera and derivative orders a moment needs.
struct GfValues {
    q: f64,
    series: Vec<TruncatedSeries>,
}

impl GfValues {
    fn new(max_genus: u32, q: f64, degree: usize) -> Result<Self> {
        let series = (1..=max_genus).map(|g| hurwitz_gf(g, degree)).collect::<Result<_>>()?;
        Ok(Self { q, series })
    }

    fn value(&self, genus: u32, ell: u32) -> Result<CertifiedValue> {
        self.series[genus as usize - 1].d_operator(ell).evaluate(self.q, hurwitz_tail(genus, ell))
    }
}

/// `𝔼[F^p]` from the generating functions:
/// `Σ (-1)^{k_4} p! φ² / ((2k_1)!(2k_2)! k_3! k_4! θ) · D^{k_3}𝓕_{1,k_1+1} D^{k_4}𝓕_{1,k_2+1} D^{(k_3+k_4)/2}θ`.
/// Odd powers are exactly 0.
pub fn moment_f_closed(power: u32, q: f64, degree: usize) -> Result<CertifiedValue> {
    check_q(q)?;
    if power % 2 == 1 {
        return Ok(CertifiedValue::exact(0.0));
    }
    if power == 0 {
        return Ok(CertifiedValue::exact(1.0));
    }
    let gf = GfValues::new(power / 2 + 1, q, degree)?;
    let th = theta(degree);
    let mut sum = CertifiedValue::exact(0.0);
    for [k1, k2, k3, k4] in even_compositions(power) {
        let sign = if k4 % 2 == 1 { -1.0 } else { 1.0 };
        let weight = sign * binomial_weight(power, &[2 * k1, 2 * k2, k3, k4]);
        let m = (k3 + k4) / 2;
        let theta_part = th.d_operator(m).evaluate(q, TailModel::THETA.with_d(m))?;
        let term = gf.value(k1 + 1, k3)? * gf.value(k2 + 1, k4)? * theta_part;
        sum = sum + term.scale(weight);
    }
    let phi = euler_phi(degree).evaluate(q, TailModel::UNIT)?;
    let norm = (phi * phi).checked_div(th.evaluate(q, TailModel::THETA)?)?;
    Ok(sum * norm)
}

/// `𝔼[F^p] = Σ (-1)^{k_4} p!/((2k_1)!(2k_2)! k_3! k_4!) A_{2k_1,k_3} A_{2k_2,k_4} 𝔼[n^{k_3+k_4}]`
/// with `A_{2g-2,ℓ} = 𝔼[K(α)^{2g-2}|α|^ℓ]` from [`a_bracket`].
pub fn moment_f_assembled(power: u32, q: f64, degree: usize) -> Result<CertifiedValue> {
    check_q(q)?;
    if power % 2 == 1 {
        return Ok(CertifiedValue::exact(0.0));
    }
    let mut sum = CertifiedValue::exact(0.0);
    for [k1, k2, k3, k4] in even_compositions(power) {
        let sign = if k4 % 2 == 1 { -1.0 } else { 1.0 };
        let weight = sign * binomial_weight(power, &[2 * k1, 2 * k2, k3, k4]);
        let term =
            a_bracket(k1 + 1, k3, q, degree)? * a_bracket(k2 + 1, k4, q, degree)? * theta_moment(k3 + k4, q, degree)?;
        sum = sum + term.scale(weight);
    }
    Ok(sum)
}

/// Brackets `A_{j,ℓ} = 𝔼_{𝒰(q)}[K(α)^j |α|^ℓ]` summed partition by partition
/// over `|α| <= ENUMERATED_SIZE`.
struct EnumeratedBrackets {
    phi: CertifiedValue,
    /// `sums[j][ℓ] = Σ_{|α| <= M} K^j |α|^ℓ q^{|α|}` and the matching `Σ |·|`.
    sums: Vec<Vec<(f64, f64)>>,
    q: f64,
}

impl EnumeratedBrackets {
    fn new(max_power: u32, q: f64) -> Result<Self> {
        let phi = euler_phi(200).evaluate(q, TailModel::UNIT)?;
        let n = max_power as usize + 1;
        let mut sums = vec![vec![(0.0, 0.0); n]; n];
        let weights: Vec<f64> = (0..=ENUMERATED_SIZE).map(|s| q.powi(s as i32)).collect();
        for_each_partition_up_to(ENUMERATED_SIZE, None, |_, size, content| {
            let w = weights[size as usize];
            let mut kp = 1.0;
            for row in sums.iter_mut() {
                let mut sp = 1.0;
                for cell in row.iter_mut() {
                    let x = kp * sp * w;
                    cell.0 += x;
                    cell.1 += x.abs();
                    sp *= f64::from(size);
                }
                kp *= content as f64;
            }
        });
        Ok(Self { phi, sums, q })
    }

    fn get(&self, j: u32, ell: u32) -> Result<CertifiedValue> {
        let (value, magnitude) = self.sums[j as usize][ell as usize];
        let tail = TailModel::hurwitz(j).with_d(ell).bound(self.q, ENUMERATED_SIZE as usize)?;
        let partial = CertifiedValue::new(value, tail + sequential_slack(magnitude, 300_000));
        Ok(self.phi * partial)
    }
}

/// `𝔼[n^m]` summed directly over `|n| <= 20`.
fn theta_moment_direct(m: u32, q: f64) -> Result<CertifiedValue> {
    const RANGE: i64 = 20;
    let ln_q = q.ln();
    let (mut top, mut top_abs, mut bottom) = (0.0, 0.0, 0.0);
    for n in -RANGE..=RANGE {
        let w = (ln_q * (n * n) as f64).exp();
        let x = (n as f64).powi(m as i32) * w;
        top += x;
        top_abs += x.abs();
        bottom += w;
    }
    let cut = (RANGE * RANGE) as usize;
    let top =
        CertifiedValue::new(top, TailModel::THETA.with_d(m.div_ceil(2)).bound(q, cut)? + sequential_slack(top_abs, 41));
    let bottom = CertifiedValue::new(bottom, TailModel::THETA.bound(q, cut)? + sequential_slack(bottom, 41));
    top.checked_div(bottom)
}

/// `𝔼[F^p]` by the unrestricted multinomial expansion of
/// `(K(α) + K(β) + n|α| - n|β|)^p` over enumerated brackets.
pub fn moment_f_enumerated(power: u32, q: f64) -> Result<CertifiedValue> {
    check_q(q)?;
    let brackets = EnumeratedBrackets::new(power, q)?;
    let mut sum = CertifiedValue::exact(0.0);
    for k1 in 0..=power {
        for k2 in 0..=power - k1 {
            for k3 in 0..=power - k1 - k2 {
                let k4 = power - k1 - k2 - k3;
                let sign = if k4 % 2 == 1 { -1.0 } else { 1.0 };
                let weight = sign * binomial_weight(power, &[k1, k2, k3, k4]);
                let term = brackets.get(k1, k3)? * brackets.get(k2, k4)? * theta_moment_direct(k3 + k4, q)?;
                sum = sum + term.scale(weight);
            }
        }
    }
    Ok(sum)
}

/// Upper bound for `𝔼[|X|^p]` given the even moments of `X`.
fn absolute_moment(power: u32, even: impl Fn(u32) -> Result<CertifiedValue>) -> Result<f64> {
    if power % 2 == 0 {
        Ok(even(power)?.upper())
    } else {
        Ok(0.5 * (even(power - 1)?.upper() + even(power + 1)?.upper()))
    }
}

/// `𝔼[F^p]` as the raw sum over size and content classes of `(α, β, n)` with
/// `|α|, |β| <= max_size` and `|n| <= 2⌈√max_size⌉`, normalised by `φ²/θ`.
///
/// The discarded mass is bounded through
/// `|F|^p <= 3^{p-1}(|K(α)|^p + |K(β)|^p + 2^{p-1}|n|^p(|α|^p + |β|^p))`.
pub fn moment_f_raw(power: u32, q: f64, max_size: u32) -> Result<CertifiedValue> {
    check_q(q)?;
    if max_size == 0 {
        return Err(Error::InvalidParameter("raw moment needs max_size >= 1".into()));
    }
    let degree = 200;
    let range = 2 * i64::from(f64::from(max_size).sqrt().ceil() as u32);
    let table = SizeContentTable::shared(max_size, None);
    let ln_q = q.ln();
    let classes: Vec<(i64, i64, f64)> =
        table.iter().map(|(s, k, c)| (i64::from(s), k, c as f64 * (ln_q * f64::from(s)).exp())).collect();
    let n_weights: Vec<(i64, f64)> = (-range..=range).map(|n| (n, (ln_q * (n * n) as f64).exp())).collect();

    let mut total = 0.0;
    let mut magnitude = 0.0;
    let mut count = 0usize;
    for &(sa, ka, wa) in &classes {
        for &(sb, kb, wb) in &classes {
            let wab = wa * wb;
            let mut row = 0.0;
            let mut row_abs = 0.0;
            for &(n, wn) in &n_weights {
                let f = (ka + kb + n * (sa - sb)) as f64;
                let x = wab * wn * f.powi(power as i32);
                row += x;
                row_abs += x.abs();
            }
            total += row;
            magnitude += row_abs;
            count += n_weights.len();
        }
    }
    let raw = CertifiedValue::new(total, sequential_slack(magnitude, count));

    let phi = euler_phi(degree).evaluate(q, TailModel::UNIT)?;
    let th = theta(degree).evaluate(q, TailModel::THETA)?;
    let value = (raw * phi * phi).checked_div(th)?;

    let m = max_size as usize;
    let phi_hi = phi.upper();
    let th_lo = th.lower();
    let p_out = phi_hi * TailModel::PARTITION.bound(q, m)?;
    let cut = (range * range) as usize;
    let n_out = TailModel::THETA.bound(q, cut)? / th_lo;
    let tail = if power == 0 {
        2.0 * p_out + n_out
    } else {
        let t_k = phi_hi * TailModel::hurwitz(power).bound(q, m)?;
        let t_s = phi_hi * TailModel::PARTITION.with_d(power).bound(q, m)?;
        let t_n = TailModel::THETA.with_d(power.div_ceil(2)).bound(q, cut)? / th_lo;
        let m_k = absolute_moment(power, |j| a_bracket(j / 2 + 1, 0, q, degree))?;
        let m_s = a_bracket(1, power, q, degree)?.upper();
        let m_n = absolute_moment(power, |j| theta_moment(j, q, degree))?;
        let c3 = 3f64.powi(power as i32 - 1);
        let c2 = 2f64.powi(power as i32 - 1);
        let one_side = c3 * (t_k + p_out * m_k + c2 * m_n * (t_s + p_out * m_s));
        let n_side = c3 * (2.0 * m_k * n_out + c2 * t_n * 2.0 * m_s);
        2.0 * one_side + n_side
    };
    Ok(CertifiedValue::new(value.value, value.error + tail * (1.0 + 1e-12)))
}

/// The two brute-force routes for `𝔼[F^p]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceMoments {
    /// Multinomial assembly from enumerated brackets, `|α| <= 40`.
    pub enumerated: CertifiedValue,
    /// Raw class sum over `(α, β, n)`.
    pub raw: CertifiedValue,
}

/// Both brute-force routes; fails with a disagreement error if they do not overlap.
pub fn moment_f_bruteforce(power: u32, q: f64, raw_size: u32) -> Result<BruteForceMoments> {
    let enumerated = moment_f_enumerated(power, q)?;
    let raw = moment_f_raw(power, q, raw_size)?;
    if !enumerated.agrees_with(&raw) {
        return Err(Error::CrossRouteDisagreement {
            quantity: format!("E[F^{power}] enumerated vs raw"),
            left: enumerated.value,
            right: raw.value,
            allowed: enumerated.error + raw.error,
        });
    }
    Ok(BruteForceMoments { enumerated, raw })
}

/// `p! / (a! b! c! d!)` as an exact rational.
pub(crate) fn composition_weight(power: u32, parts: [u32; 4]) -> BigRational {
    let fact = |n: u32| (1..=n).fold(BigInt::from(1), |a, m| a * BigInt::from(m));
    let denom = parts.iter().fold(BigInt::from(1), |a, &p| a * fact(p));
    BigRational::new(fact(power), denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_moments() {
        assert_eq!(theta_moment(0, 0.3, 50).unwrap().value, 1.0);
        assert_eq!(theta_moment(3, 0.3, 50).unwrap(), CertifiedValue::exact(0.0));
        let q: f64 = 0.2;
        let (mut top, mut bottom) = (0.0, 0.0);
        for n in -20i32..=20 {
            let w = q.powi(n * n);
            top += f64::from(n * n) * w;
            bottom += w;
        }
        let m = theta_moment(2, q, 100).unwrap();
        assert!(m.contains(top / bottom), "{m} vs {}", top / bottom);
        assert!(m.agrees_with(&theta_moment_direct(2, q).unwrap()));
    }

    #[test]
    fn compositions_of_two() {
        let c = even_compositions(2);
        assert_eq!(c.len(), 5);
        for parts in &c {
            assert_eq!(2 * parts[0] + 2 * parts[1] + parts[2] + parts[3], 2);
        }
        assert_eq!(composition_weight(2, [0, 0, 1, 1]), BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn second_moment_reduces_to_brackets() {
        // E[F²] = 2A_{2,0} + 2A_{0,2}E[n²] - 2A_{0,1}²E[n²]
        let q = 0.3;
        let d = 120;
        let en2 = theta_moment(2, q, d).unwrap();
        let a20 = a_bracket(2, 0, q, d).unwrap();
        let a02 = a_bracket(1, 2, q, d).unwrap();
        let a01 = a_bracket(1, 1, q, d).unwrap();
        let expected = a20.scale(2.0) + (a02 * en2).scale(2.0) - (a01 * a01 * en2).scale(2.0);
        let closed = moment_f_closed(2, q, d).unwrap();
        assert!(closed.agrees_with(&expected), "{closed} vs {expected}");
        assert!(closed.relative_error() < 1e-9);
    }

    #[test]
    fn closed_form_matches_assembly() {
        for q in [0.2, 0.4] {
            for power in [2u32, 4] {
                let a = moment_f_closed(power, q, 150).unwrap();
                let b = moment_f_assembled(power, q, 150).unwrap();
                assert!(a.agrees_with(&b), "q={q} p={power}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn brute_force_routes_agree_with_closed_form() {
        for q in [0.2, 0.3] {
            let bf = moment_f_bruteforce(2, q, 25).unwrap();
            let closed = moment_f_closed(2, q, 150).unwrap();
            assert!(bf.enumerated.agrees_with(&closed), "q={q}");
            assert!(bf.raw.agrees_with(&closed), "q={q}");
            assert!(bf.raw.relative_error() < 1e-3);
        }
    }

    #[test]
    fn zeroth_and_odd_moments() {
        let bf = moment_f_bruteforce(0, 0.3, 20).unwrap();
        assert!(bf.enumerated.contains(1.0) && bf.raw.contains(1.0));
        for power in [1u32, 3] {
            let bf = moment_f_bruteforce(power, 0.2, 20).unwrap();
            assert!(bf.raw.contains(0.0), "p={power}: {}", bf.raw);
            assert!(bf.enumerated.contains(0.0), "p={power}: {}", bf.enumerated);
        }
    }
}
