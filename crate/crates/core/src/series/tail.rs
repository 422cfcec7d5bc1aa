//! Rigorous upper bounds for `Σ_{n>M} |c_n| q^n` under coefficient envelopes.
//!
//! Near the cut the exact partition numbers are summed; further out the
//! bound `p(n) < e^{c√n}` with `c = π√(2/3)` takes over, and the remainder is
//! closed by a geometric series once the term ratio, which decreases in `n`,
//! drops below one.

use crate::error::{check_q, Error, Result};
use crate::partition::partition_count_f64;

/// `c = π√(2/3)`, the growth constant in `p(n) < e^{c√n}`.
pub const PARTITION_GROWTH: f64 = 2.565_099_660_323_728;

/// Constant of the bound `p_k(n) <= 5.44/(n-k) · e^{π√(2(n-k)/3)}`.
const LENGTH_COUNT_CONSTANT: f64 = 5.44;

/// Exact partition numbers are used for at most this many degrees past the cut.
const EXACT_WINDOW: usize = 400;
const EXACT_LIMIT: usize = 3000;
const MAX_TERMS: usize = 2_000_000;

/// Bound for the coefficient magnitudes `|c_n|`, `n > M`, before `D` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    /// The series is exact; no tail.
    None,
    /// `|c_n| <= p(n)`.
    Partition,
    /// `c_n = 0` off squares, `|c_{m²}| <= 2`.
    Theta,
    /// `|c_n| <= p(n) · (n(n-1)/2)^k`, the bound for `Σ_{α⊢n} K(α)^k`.
    Hurwitz(u32),
    /// `|c_n| <= 1`.
    Unit,
}

/// A coefficient envelope together with the number of `D` applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailModel {
    pub envelope: Envelope,
    pub d_power: u32,
}

impl TailModel {
    pub const NONE: Self = Self { envelope: Envelope::None, d_power: 0 };
    pub const PARTITION: Self = Self { envelope: Envelope::Partition, d_power: 0 };
    pub const THETA: Self = Self { envelope: Envelope::Theta, d_power: 0 };
    pub const UNIT: Self = Self { envelope: Envelope::Unit, d_power: 0 };

    pub const fn hurwitz(content_power: u32) -> Self {
        Self { envelope: Envelope::Hurwitz(content_power), d_power: 0 }
    }

    /// The model of `D^k` applied to a series with this model.
    pub const fn with_d(self, k: u32) -> Self {
        Self { envelope: self.envelope, d_power: self.d_power + k }
    }

    /// Upper bound for `Σ_{n>degree} |c_n| q^n`.
    pub fn bound(&self, q: f64, degree: usize) -> Result<f64> {
        check_q(q)?;
        let j = f64::from(self.d_power);
        match self.envelope {
            Envelope::None => Ok(0.0),
            Envelope::Theta => theta_tail(q, degree, j),
            Envelope::Unit => counted_tail(q, degree, j, 0.0, Counting::One),
            Envelope::Partition => counted_tail(q, degree, j, 0.0, Counting::Partitions),
            Envelope::Hurwitz(k) => counted_tail(q, degree, j, f64::from(k), Counting::Partitions),
        }
    }
}

#[derive(Clone, Copy)]
enum Counting {
    One,
    Partitions,
}

/// Σ_{n>M} n^j (n(n-1)/2)^k w(n) q^n with w = 1 or w = p(n).
fn counted_tail(q: f64, degree: usize, j: f64, k: f64, counting: Counting) -> Result<f64> {
    let ln_q = q.ln();
    let growth = match counting {
        Counting::One => 0.0,
        Counting::Partitions => PARTITION_GROWTH,
    };
    let exact_end = match counting {
        Counting::One => degree,
        Counting::Partitions => (degree + EXACT_WINDOW).min(EXACT_LIMIT).max(degree),
    };
    let mut total = 0.0;
    for n in degree + 1..=exact_end {
        let nf = n as f64;
        let poly = j * nf.ln() + if k > 0.0 { k * (nf * (nf - 1.0) / 2.0).ln() } else { 0.0 };
        total += partition_count_f64(n) * (poly + nf * ln_q).exp();
    }
    total *= 1.0 + 1e-13;

    // Envelope region: t(n) = n^{j+2k} 2^{-k} e^{growth √n} q^n.
    let ln_term = |n: f64| (j + 2.0 * k) * n.ln() - k * std::f64::consts::LN_2 + growth * n.sqrt() + n * ln_q;
    let ratio = |n: f64| ((j + 2.0 * k) * (1.0 + 1.0 / n).ln() + growth * ((n + 1.0).sqrt() - n.sqrt()) + ln_q).exp();
    total += decreasing_ratio_sum(ln_term, ratio, (exact_end + 1) as f64)?;
    if !total.is_finite() {
        return Err(Error::Uncertifiable(format!("tail bound overflow at q = {q}, degree {degree}")));
    }
    Ok(total * (1.0 + 1e-12))
}

/// Σ_{m > ⌊√M⌋} 2 m^{2j} q^{m²}.
fn theta_tail(q: f64, degree: usize, j: f64) -> Result<f64> {
    let mut m = (degree as f64).sqrt().floor() as u64;
    while (m + 1) * (m + 1) <= degree as u64 {
        m += 1;
    }
    while m * m > degree as u64 {
        m -= 1;
    }
    let ln_q = q.ln();
    let ln_term = |m: f64| std::f64::consts::LN_2 + 2.0 * j * m.ln() + m * m * ln_q;
    let ratio = |m: f64| (2.0 * j * (1.0 + 1.0 / m).ln() + (2.0 * m + 1.0) * ln_q).exp();
    Ok(decreasing_ratio_sum(ln_term, ratio, (m + 1) as f64)? * (1.0 + 1e-12))
}

/// Upper bound for `S_q = Σ_{n>=1} e^{n log q + c√n}`.
pub fn paper_s_q(q: f64) -> Result<f64> {
    check_q(q)?;
    let ln_q = q.ln();
    let ln_term = |n: f64| n * ln_q + PARTITION_GROWTH * n.sqrt();
    let ratio = |n: f64| (PARTITION_GROWTH * ((n + 1.0).sqrt() - n.sqrt()) + ln_q).exp();
    Ok(decreasing_ratio_sum(ln_term, ratio, 1.0)? * (1.0 + 1e-12))
}

/// `T_q = sup_M e^{c√M + (M/2) log q} = e^{c²/(2|log q|)}`.
pub fn paper_t_q(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok((PARTITION_GROWTH * PARTITION_GROWTH / (2.0 * q.ln().abs())).exp() * (1.0 + 1e-12))
}

/// `C_q = S_q · T_q`, so that `Σ_{n>M} p(n) q^n <= C_q q^{M/2}` for `M >= 1`.
pub fn partition_tail_constant(q: f64) -> Result<f64> {
    Ok(paper_s_q(q)? * paper_t_q(q)?)
}

/// `C_q · q^{M/2}`.
pub fn paper_partition_tail_bound(q: f64, degree: usize) -> Result<f64> {
    Ok(partition_tail_constant(q)? * q.powf(degree as f64 / 2.0))
}

/// `5.44 Σ_{m>=0} (1 + e^{π√(2m/3)}) q^m`, so that
/// `Σ_n (p(n) - p_{<=L}(n)) q^n <= q^{L+1}` times this constant.
pub fn length_tail_constant(q: f64) -> Result<f64> {
    check_q(q)?;
    let ln_q = q.ln();
    let geometric = 1.0 / (1.0 - q);
    let ln_term = |m: f64| PARTITION_GROWTH * m.sqrt() + m * ln_q;
    let ratio = |m: f64| (PARTITION_GROWTH * ((m + 1.0).sqrt() - m.sqrt()) + ln_q).exp();
    let total = 1.0 + decreasing_ratio_sum(ln_term, ratio, 1.0)?;
    Ok(LENGTH_COUNT_CONSTANT * (geometric + total) * (1.0 + 1e-12))
}

/// Σ_{n>=start} e^{ln_term(n)} for terms whose ratio `t(n+1)/t(n) <= ratio(n)`
/// with `ratio` nonincreasing. Terms are added one by one until the ratio is
/// below one and the geometric remainder `t(n)/(1-ratio(n))` is negligible.
fn decreasing_ratio_sum(ln_term: impl Fn(f64) -> f64, ratio: impl Fn(f64) -> f64, start: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut n = start;
    for _ in 0..MAX_TERMS {
        let t = ln_term(n).exp();
        let r = ratio(n);
        if r < 1.0 {
            let rest = t / (1.0 - r);
            if rest <= 1e-16 * total || rest == 0.0 {
                return Ok(total + rest);
            }
        }
        total += t;
        n += 1.0;
    }
    Err(Error::Uncertifiable(format!("tail terms do not contract by n = {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::inverse_phi;
    use std::f64::consts::PI;

    #[test]
    fn growth_constant_value() {
        assert!((PI * (2.0f64 / 3.0).sqrt() - PARTITION_GROWTH).abs() < 1e-15);
    }

    #[test]
    fn hardy_ramanujan_bound_holds_on_the_exact_window() {
        for n in 1..=EXACT_LIMIT {
            assert!(partition_count_f64(n) < (PARTITION_GROWTH * (n as f64).sqrt()).exp(), "n = {n}");
        }
    }

    #[test]
    fn tail_is_below_paper_bound() {
        for q in [0.1, 0.2, 0.3, 0.5] {
            for m in [1, 10, 40, 100] {
                let ours = TailModel::PARTITION.bound(q, m).unwrap();
                let theirs = paper_partition_tail_bound(q, m).unwrap();
                assert!(ours <= theirs, "q={q} M={m}: {ours} > {theirs}");
            }
        }
    }

    #[test]
    fn partition_tail_dominates_long_sum() {
        for q in [0.2f64, 0.5, 0.7] {
            let m = 30;
            let long = inverse_phi(400).coefficients_f64();
            let tail: f64 = (m + 1..=400).map(|n| long[n] * q.powi(n as i32)).sum();
            let bound = TailModel::PARTITION.bound(q, m).unwrap();
            assert!(tail <= bound && bound <= 1.5 * tail + 1e-300, "q={q}: {tail} vs {bound}");
        }
    }

    #[test]
    fn theta_tail_below_geometric_form() {
        for q in [0.1f64, 0.3, 0.6] {
            for m in [0usize, 3, 9, 20, 50] {
                let k = (m as f64).sqrt().floor() as i32;
                let geometric = 2.0 * q.powi((k + 1) * (k + 1)) / (1.0 - q);
                let ours = TailModel::THETA.bound(q, m).unwrap();
                assert!(ours <= geometric * (1.0 + 1e-9), "q={q} M={m}");
            }
        }
    }

    #[test]
    fn paper_constant_at_point_three() {
        let c = partition_tail_constant(0.3).unwrap();
        assert!(c.is_finite() && c > 1.0);
        let s = paper_s_q(0.3).unwrap();
        let direct: f64 =
            (1..2000).map(|n| (n as f64 * 0.3f64.ln() + PARTITION_GROWTH * (n as f64).sqrt()).exp()).sum();
        assert!(s >= direct && s <= direct * (1.0 + 1e-9));
    }
}
