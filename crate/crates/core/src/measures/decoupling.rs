//! Total-variation distance between the law of `Φ_N(λ)`, `λ ~ 𝒢_N(q)`, and
//! the product measure `𝒰(q)⊗𝒰(q)⊗𝒢_1(q)`.

use crate::certified::{CertifiedValue, CompensatedSum};
use crate::error::{check_q, Error, Result};
use crate::partition::SizeContentTable;
use crate::partition_function::{zn_bruteforce, Truncation};
use crate::series::{euler_phi, theta, TailModel};
use crate::weight::{alpha_length_cap, beta_length_cap};

/// `½ Σ |p_i - q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidParameter("distributions have different supports".into()));
    }
    let mut acc = CompensatedSum::new();
    for (a, b) in p.iter().zip(q) {
        acc.add((a - b).abs());
    }
    Ok(0.5 * acc.value())
}

/// Size and content classes `(|α|, K(α), count, length within the cap)`.
fn classes(max_size: u32, cap: usize) -> Vec<(i64, i64, f64, bool)> {
    let all = SizeContentTable::shared(max_size, None);
    let capped = SizeContentTable::shared(max_size, Some(cap as u32));
    let mut out = Vec::new();
    for s in 0..=max_size {
        let inside = capped.row(s);
        for &(k, c) in all.row(s) {
            let c_in = inside.iter().find(|e| e.0 == k).map_or(0, |e| e.1);
            if c_in > 0 {
                out.push((i64::from(s), k, c_in as f64, true));
            }
            if c > c_in {
                out.push((i64::from(s), k, (c - c_in) as f64, false));
            }
        }
    }
    out
}

/// Certified total-variation distance between `(Φ_N)_*𝒢_N(q)` and
/// `𝒰(q)⊗𝒰(q)⊗𝒢_1(q)`.
///
/// The sum `½ Σ |P_1 - P_2|` is exact over `|α|, |β| <= m_part`, `|n| <= m_int`;
/// outside, each measure's mass is bounded and enters the upper end only.
pub fn tv_decoupling(rank: usize, q: f64, trunc: Truncation) -> Result<CertifiedValue> {
    check_q(q)?;
    if rank == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let zn = zn_bruteforce(rank, q, Truncation::default())?;
    let phi = euler_phi(200).evaluate(q, TailModel::UNIT)?;
    let th = theta(200).evaluate(q, TailModel::THETA)?;
    let product_norm = (phi * phi).checked_div(th)?;
    let gn_norm = zn.recip()?;

    let ln_q = q.ln();
    let alphas = classes(trunc.m_part, alpha_length_cap(rank));
    let betas = classes(trunc.m_part, beta_length_cap(rank));
    let m = i64::from(trunc.m_int);
    let big_n = rank as f64;
    let mut sum = CompensatedSum::new();
    let mut region = CompensatedSum::new();
    for &(sa, ka, ca, ina) in &alphas {
        for &(sb, kb, cb, inb) in &betas {
            let weight = ca * cb;
            for n in -m..=m {
                let base = (sa + sb + n * n) as f64;
                let p2 = product_norm.value * (ln_q * base).exp();
                let p1 = if ina && inb {
                    let coupling = (ka + kb + n * (sa - sb)) as f64;
                    let w = (ln_q * (base + 2.0 * coupling / big_n)).exp();
                    region.add(weight * w);
                    gn_norm.value * w
                } else {
                    0.0
                };
                sum.add(weight * (p1 - p2).abs());
            }
        }
    }
    let inside = sum.value();
    // |P_i - P̃_i| <= P̃_i · (relative error of its normalisation), summed over the region
    let inside_error =
        gn_norm.relative_error() * (1.0 + 1e-9) + product_norm.relative_error() * (1.0 + 1e-9) + 1e-12 * inside;

    let gn_outside = (zn.upper() - region.value() * (1.0 - 1e-12)).max(0.0) * gn_norm.upper();
    let product_outside = 2.0 * phi.upper() * TailModel::PARTITION.bound(q, trunc.m_part as usize)?
        + TailModel::THETA.bound(q, (m * m) as usize)? / th.lower();

    let lower = 0.5 * (inside - inside_error).max(0.0);
    let upper = 0.5 * (inside + inside_error + gn_outside + product_outside);
    Ok(CertifiedValue::from_bounds(lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_properties() {
        let p = [0.5, 0.25, 0.25];
        let q = [0.25, 0.25, 0.5];
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(total_variation(&p, &q).unwrap(), total_variation(&q, &p).unwrap());
        assert!((total_variation(&p, &q).unwrap() - 0.25).abs() < 1e-15);
        assert!(total_variation(&p, &q[..2]).is_err());
    }

    #[test]
    fn class_counts_add_up() {
        let c = classes(12, 3);
        let total: f64 = c.iter().filter(|x| x.0 == 12).map(|x| x.2).sum();
        assert_eq!(total, 77.0);
        let inside: f64 = c.iter().filter(|x| x.0 == 12 && x.3).map(|x| x.2).sum();
        assert_eq!(inside, 19.0);
    }

    #[test]
    fn decoupling_improves_with_rank() {
        let q = 0.2;
        let trunc = Truncation::new(16, 8).unwrap();
        let small = tv_decoupling(4, q, trunc).unwrap();
        let large = tv_decoupling(12, q, trunc).unwrap();
        assert!(large.strictly_below(&small), "{large} vs {small}");
        assert!(small.upper() < 1.0);
    }
}
