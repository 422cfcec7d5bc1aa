//! The torus partition function `Z_N(q) = Σ_λ q^{c_2(λ)}`, its chiral
//! sector, moments of the coupling functional and the `1/N²` expansion.
//!
//! Sums over highest weights run over triples `(α, β, n) ∈ Λ_N`. Since
//! `c_2 = |α| + |β| + n² + (2/N)(K(α) + K(β) + n(|α| - |β|))` is affine in the
//! contents and sizes at fixed `n`, the double sum over `(α, β)` factorises
//! into two single sums for every `n`.

mod expansion;
mod moments;
mod report;

use serde::{Deserialize, Serialize};

use crate::certified::{pairwise_sum, CertifiedValue, CompensatedSum, ROUNDING_SLACK};
use crate::error::{check_q, Error, Result};
use crate::partition::SizeContentTable;
use crate::series::{inverse_phi, theta, TailModel};
use crate::weight::{alpha_length_cap, beta_length_cap};

pub use expansion::{
    a2_remark_terms, chiral_coefficient, expansion_coeff, expansion_coeff_routes, topological_terms, CoefficientRoutes,
    RemarkTerms, TopologicalTerm,
};
pub use moments::{
    moment_f_assembled, moment_f_bruteforce, moment_f_closed, moment_f_enumerated, moment_f_raw, theta_moment,
    BruteForceMoments, ENUMERATED_SIZE,
};
pub use report::{
    least_squares_slope, verify_expansion, CoefficientEntry, ExpansionReport, ResidualPoint, SectorReport,
};

/// `q_t = e^{-t/2}`.
pub fn q_from_t(t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok((-t / 2.0).exp())
}

/// `t = -2 log q`.
pub fn t_from_q(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(-2.0 * q.ln())
}

/// Truncation of the sums over `(α, β, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Largest `|α|` and `|β|` summed exactly.
    pub m_part: u32,
    /// Largest `|n|` summed exactly.
    pub m_int: u32,
}

impl Truncation {
    pub fn new(m_part: u32, m_int: u32) -> Result<Self> {
        if m_part == 0 || m_int == 0 {
            return Err(Error::InvalidParameter("truncation parameters must be at least 1".into()));
        }
        Ok(Self { m_part, m_int })
    }

    /// `m_int = ⌈√m_part⌉ + 10`.
    pub fn with_part(m_part: u32) -> Self {
        Self { m_part, m_int: (f64::from(m_part).sqrt().ceil() as u32) + 10 }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::with_part(60)
    }
}

/// `Z_1(q) = θ(q)`.
pub fn z1(q: f64, degree: usize) -> Result<CertifiedValue> {
    theta(degree).evaluate(q, TailModel::THETA)
}

/// `θ(q)/φ(q)²`, the large-`N` limit of `Z_N(q)`.
pub fn limit_value(q: f64, degree: usize) -> Result<CertifiedValue> {
    let th = theta(degree).evaluate(q, TailModel::THETA)?;
    let inv = inverse_phi(degree).evaluate(q, TailModel::PARTITION)?;
    Ok(th * inv * inv)
}

/// `log Σ_{(α) in table} q^{|α|(1 + 2n/N) + 2K(α)/N}`, summed relative to
/// its largest term so that no intermediate over- or underflows.
fn sector_log_sum(table: &SizeContentTable, ln_q: f64, n: i64, rank: usize) -> f64 {
    let size_rate = 1.0 + 2.0 * n as f64 / rank as f64;
    let content_rate = 2.0 / rank as f64;
    let logs: Vec<(f64, f64)> =
        table.iter().map(|(s, k, c)| (ln_q * (f64::from(s) * size_rate + k as f64 * content_rate), c as f64)).collect();
    let top = logs.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
    let terms: Vec<f64> = logs.iter().map(|&(l, c)| c * (l - top).exp()).collect();
    top + pairwise_sum(&terms).ln()
}

fn sector_tables(rank: usize, m_part: u32) -> (std::sync::Arc<SizeContentTable>, std::sync::Arc<SizeContentTable>) {
    let a = SizeContentTable::shared(m_part, Some(alpha_length_cap(rank) as u32));
    let b = SizeContentTable::shared(m_part, Some(beta_length_cap(rank) as u32));
    (a, b)
}

/// The sum of `q^{c_2}` over the finite region `|α|, |β| <= m_part`, `|n| <= m_int`
/// of `Λ_N`, in factorised form, with its rounding slack.
pub fn zn_region(rank: usize, q: f64, trunc: Truncation) -> Result<CertifiedValue> {
    check_q(q)?;
    if rank == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let ln_q = q.ln();
    let (ta, tb) = sector_tables(rank, trunc.m_part);
    let m = i64::from(trunc.m_int);
    let terms: Vec<f64> = (-m..=m)
        .map(|n| {
            let log = ln_q * (n * n) as f64 + sector_log_sum(&ta, ln_q, n, rank) + sector_log_sum(&tb, ln_q, -n, rank);
            log.exp()
        })
        .collect();
    let value = pairwise_sum(&terms);
    Ok(CertifiedValue::new(value, ROUNDING_SLACK * value))
}

/// The same finite sum as [`zn_region`], term by term over
/// `(|α|, K(α)) × (|β|, K(β)) × n` with `c_2` formed for each triple.
pub fn zn_region_triple_loop(rank: usize, q: f64, trunc: Truncation) -> Result<CertifiedValue> {
    check_q(q)?;
    let ln_q = q.ln();
    let (ta, tb) = sector_tables(rank, trunc.m_part);
    let big_n = rank as i64;
    let m = i64::from(trunc.m_int);
    let mut acc = CompensatedSum::new();
    for (sa, ka, ca) in ta.iter() {
        for (sb, kb, cb) in tb.iter() {
            let weight = ca as f64 * cb as f64;
            let (sa, sb) = (i64::from(sa), i64::from(sb));
            for n in -m..=m {
                // N c_2 as an exact integer
                let scaled = big_n * (sa + sb + n * n) + 2 * (ka + kb + n * (sa - sb));
                acc.add(weight * (ln_q * scaled as f64 / rank as f64).exp());
            }
        }
    }
    let value = acc.value();
    Ok(CertifiedValue::new(value, ROUNDING_SLACK * value))
}

/// `C_θ >= sup_x Σ_n q^{(n+x)²}`. For `x ∈ [0,1)`, `(n+x)² >= n²` when `n >= 0`
/// and `>= (|n|-1)²` when `n < 0`, so `C_θ <= 2 Σ_{n>=0} q^{n²} = 1 + θ(q)`.
fn theta_sup_bound(q: f64) -> Result<f64> {
    let th = theta(64).evaluate(q, TailModel::THETA)?;
    Ok(1.0 + th.upper())
}

/// Upper bound for the mass of `Λ_N` outside the truncation region.
///
/// With `r = √q` and `c_2 >= (|α|+|β|)/2 + (n + (|α|-|β|)/N)²`:
/// the part with `|α| > m_part` is at most `C_θ · U · Σ_β r^{|β|}` where
/// `U = Σ_{s>m_part} p(s) r^s`, likewise for `β`, and the part with both sizes
/// kept but `|n| > m_int` is summed size by size in [`integer_tail`].
pub fn zn_tail_bound(rank: usize, q: f64, trunc: Truncation) -> Result<f64> {
    check_q(q)?;
    let r = q.sqrt();
    let inv_phi_r = inverse_phi(80).evaluate(r, TailModel::PARTITION)?.upper();
    let u = TailModel::PARTITION.bound(r, trunc.m_part as usize)?;
    let c_theta = theta_sup_bound(q)?;
    let mut total = 0.0;
    if alpha_length_cap(rank) > 0 {
        total += c_theta * u * if beta_length_cap(rank) > 0 { inv_phi_r } else { 1.0 };
    }
    if beta_length_cap(rank) > 0 {
        total += c_theta * u * if alpha_length_cap(rank) > 0 { inv_phi_r } else { 1.0 };
    }
    total += integer_tail(rank, q, trunc);
    Ok(total * (1.0 + 1e-12))
}

/// `Σ_{s <= 2 m_part} W_s · 2 Σ_{j > m_int} q^{((j - s/N)_+)²}` where `W_s` counts
/// the pairs `(α, β)` in the region with `|α| + |β| = s`, weighted by `r^s`.
/// Since `|n + (|α|-|β|)/N| >= |n| - s/N`, this dominates the region's mass at `|n| > m_int`.
fn integer_tail(rank: usize, q: f64, trunc: Truncation) -> f64 {
    let (ta, tb) = sector_tables(rank, trunc.m_part);
    let ln_r = 0.5 * q.ln();
    let m = trunc.m_part as usize;
    let mut total = 0.0;
    for s in 0..=2 * m {
        let pairs: f64 =
            (s.saturating_sub(m)..=s.min(m)).map(|a| ta.count(a as u32) as f64 * tb.count((s - a) as u32) as f64).sum();
        if pairs == 0.0 {
            continue;
        }
        let shift = s as f64 / rank as f64;
        let first = i64::from(trunc.m_int) + 1;
        // j <= shift contributes 1 each
        let flat = (shift.floor() as i64 - first + 1).max(0);
        let j0 = first.max(shift.floor() as i64 + 1);
        let x0 = j0 as f64 - shift;
        let decaying = q.powf(x0 * x0) / (1.0 - q.powf(2.0 * x0 + 1.0));
        total += pairs * (ln_r * s as f64).exp() * 2.0 * (flat as f64 + decaying);
    }
    total * (1.0 + 1e-12)
}

/// Certified `Z_N(q)`: the factorised region sum plus [`zn_tail_bound`].
pub fn zn_bruteforce(rank: usize, q: f64, trunc: Truncation) -> Result<CertifiedValue> {
    let region = zn_region(rank, q, trunc)?;
    let tail = zn_tail_bound(rank, q, trunc)?;
    if tail >= region.value {
        return Err(Error::Uncertifiable(format!(
            "tail bound {tail:e} exceeds the computed value {} (N = {rank}, m_part = {})",
            region.value, trunc.m_part
        )));
    }
    // The discarded terms are positive: the exact value lies in [region, region + tail].
    Ok(CertifiedValue::from_bounds(region.lower(), region.upper() + tail))
}

/// Which partitions enter the chiral sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiralSector {
    /// `ℓ(α) <= A_N`: the triples `(α, ∅, 0)` of `Λ_N`.
    Balanced,
    /// `ℓ(α) <= N`, each `α` padded with zeros to a weight of `U(N)`.
    FullLength,
}

/// Largest length in the sector.
pub fn chiral_length_cap(rank: usize, sector: ChiralSector) -> usize {
    match sector {
        ChiralSector::Balanced => alpha_length_cap(rank),
        ChiralSector::FullLength => rank,
    }
}

/// Certified `Σ_α q^{|α| + (2/N)K(α)}` over the sector, `|α| <= m_part`.
///
/// The exponent is `c_2` of `α` padded with zeros. In the balanced sector
/// it is at least `|α|/2`; with lengths up to `N` only `|α|/N` is guaranteed,
/// since every column of height `h <= N` contributes at least `h/N`.
pub fn zn_chiral(rank: usize, q: f64, m_part: u32, sector: ChiralSector) -> Result<CertifiedValue> {
    check_q(q)?;
    if rank == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let cap = chiral_length_cap(rank, sector);
    let table = SizeContentTable::shared(m_part, Some(cap as u32));
    let ln_q = q.ln();
    let terms: Vec<f64> = table
        .iter()
        .map(|(s, k, c)| {
            let scaled = rank as i64 * i64::from(s) + 2 * k;
            c as f64 * (ln_q * scaled as f64 / rank as f64).exp()
        })
        .collect();
    let value = pairwise_sum(&terms);
    let decay = match sector {
        ChiralSector::Balanced => q.sqrt(),
        ChiralSector::FullLength => q.powf(1.0 / rank as f64),
    };
    let tail = if cap == 0 { 0.0 } else { TailModel::PARTITION.bound(decay, m_part as usize)? };
    if tail >= value {
        return Err(Error::Uncertifiable(format!(
            "chiral tail bound {tail:e} exceeds the computed value {value} (N = {rank})"
        )));
    }
    Ok(CertifiedValue::from_bounds(value * (1.0 - ROUNDING_SLACK), value * (1.0 + ROUNDING_SLACK) + tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{casimir_direct, for_each_weight_in_box, phi_n};
    use num_traits::ToPrimitive;

    #[test]
    fn rank_one_is_theta() {
        for q in [0.05, 0.2, 0.5] {
            let z = zn_bruteforce(1, q, Truncation::default()).unwrap();
            let t = z1(q, 400).unwrap();
            assert!(z.agrees_with(&t), "q={q}: {z} vs {t}");
        }
    }

    #[test]
    fn theta_partial_sums() {
        let z = z1(0.25, 100).unwrap();
        let partial = 1.0 + 2.0 * 0.25 + 2.0 * 0.25f64.powi(4) + 2.0 * 0.25f64.powi(9) + 2.0 * 0.25f64.powi(16);
        assert!(z.value >= partial && z.value - partial < 1e-12);
        assert!((z1(1e-9, 10).unwrap().value - 1.0).abs() < 3e-9);
    }

    #[test]
    fn factorised_sum_matches_triple_loop() {
        for rank in [2usize, 3, 5, 8] {
            let trunc = Truncation::new(18, 6).unwrap();
            let a = zn_region(rank, 0.3, trunc).unwrap();
            let b = zn_region_triple_loop(rank, 0.3, trunc).unwrap();
            assert!((a.value - b.value).abs() <= 1e-13 * a.value, "N={rank}: {a} vs {b}");
        }
    }

    #[test]
    fn region_sum_matches_highest_weights() {
        // Every highest weight of U(3) with entries in [-9, 9] whose triple lies in
        // the region is summed directly from c_2.
        let q: f64 = 0.3;
        let trunc = Truncation::new(6, 3).unwrap();
        let mut direct = 0.0;
        for_each_weight_in_box(3, -9, 9, |lambda| {
            let t = phi_n(lambda);
            if t.alpha.size() <= 6 && t.beta.size() <= 6 && t.n.abs() <= 3 {
                direct += q.powf(casimir_direct(lambda).to_f64().unwrap());
            }
        });
        let z = zn_region(3, q, trunc).unwrap();
        assert!((z.value - direct).abs() < 1e-13 * direct, "{z} vs {direct}");
    }

    #[test]
    fn certified_value_encloses_a_much_larger_truncation() {
        let q = 0.3;
        for rank in [2usize, 4, 7] {
            let coarse = zn_bruteforce(rank, q, Truncation::new(25, 16).unwrap()).unwrap();
            let fine = zn_bruteforce(rank, q, Truncation::new(70, 20).unwrap()).unwrap();
            assert!(coarse.lower() <= fine.lower() + 1e-12 * fine.value, "N={rank}");
            assert!(fine.upper() <= coarse.upper() * (1.0 + 1e-12), "N={rank}");
            assert!(coarse.agrees_with(&fine));
        }
    }

    #[test]
    fn tiny_truncations_are_uncertifiable() {
        let err = zn_bruteforce(8, 0.9, Truncation::new(2, 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Uncertifiable(_)), "{err}");
        assert!(zn_bruteforce(8, 1.5, Truncation::default()).is_err());
        assert!(Truncation::new(0, 4).is_err());
    }

    #[test]
    fn approaches_the_limit() {
        let q = 0.2;
        let limit = limit_value(q, 200).unwrap();
        let mut last = f64::INFINITY;
        for rank in [8usize, 16, 32] {
            let z = zn_bruteforce(rank, q, Truncation::default()).unwrap();
            let gap = (z.value - limit.value).abs();
            assert!(gap < last);
            last = gap;
        }
    }

    #[test]
    fn chiral_balanced_sector() {
        let q = 0.3;
        let inv = inverse_phi(200).evaluate(q, TailModel::PARTITION).unwrap();
        let z = zn_chiral(200, q, 150, ChiralSector::Balanced).unwrap();
        assert!((z.value - inv.value).abs() < 0.01, "{z} vs {inv}");
        // the N = 1 sector is the empty partition alone
        let one = zn_chiral(1, q, 40, ChiralSector::Balanced).unwrap();
        assert!(one.contains(1.0));
    }

    #[test]
    fn full_length_sector_stays_away_from_inverse_phi() {
        // (1^m), m <= N, has exponent m - m(m-1)/N; m = N gives q^1 for every N.
        // A partial sum is a lower bound for the whole positive series.
        let q: f64 = 0.3;
        let inv = inverse_phi(200).evaluate(q, TailModel::PARTITION).unwrap();
        for rank in [10usize, 20, 40] {
            let table = SizeContentTable::shared(rank as u32, Some(rank as u32));
            let partial: f64 =
                table.iter().map(|(s, k, c)| c as f64 * q.powf(f64::from(s) + 2.0 * k as f64 / rank as f64)).sum();
            assert!(partial > inv.upper() + 0.1, "N={rank}: {partial} vs {inv}");
        }
    }

    #[test]
    fn t_and_q() {
        let q = q_from_t(3.2188758248682006).unwrap();
        assert!((q - 0.2).abs() < 1e-15);
        assert!((t_from_q(0.2).unwrap() - 3.2188758248682006).abs() < 1e-14);
        assert!(q_from_t(0.0).is_err());
        assert!(q_from_t(-1.0).is_err());
    }
}
