//! Deviation inequalities for `α ~ 𝒰(q)`: the length and the size of `α`
//! exceed a level `N` with probability at most `C q^{N/2}`.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::error::{check_q, Result};
use crate::partition::partition_counts;
use crate::series::{euler_phi, length_tail_constant, partition_tail_constant, TailModel, TruncatedSeries};

/// Exact probabilities are summed up to this size; the rest is a certified tail.
const SERIES_DEGREE: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    #[serde(rename = "N")]
    pub n: usize,
    /// `⌊(N-1)/2⌋`.
    pub length_cutoff: usize,
    /// `ℙ(ℓ(α) > ⌊(N-1)/2⌋)`.
    pub length_probability: CertifiedValue,
    /// `φ(q) · 5.44 Σ_m (1 + e^{π√(2m/3)}) q^m · q^{N/2}`.
    pub length_bound: f64,
    /// `ℙ(|α| > N)`.
    pub size_probability: CertifiedValue,
    /// `φ(q) · S_q T_q · q^{N/2}`.
    pub size_bound: f64,
    pub length_holds: bool,
    pub size_holds: bool,
}

/// `p_{<=L}(m)` for `m <= degree`: the coefficients of `Π_{j<=L} 1/(1 - q^j)`,
/// counting partitions with parts at most `L`, equivalently at most `L` parts.
fn at_most_length_counts(max_length: usize, degree: usize) -> Vec<BigUint> {
    let mut c = vec![BigUint::from(0u32); degree + 1];
    c[0] = BigUint::from(1u32);
    for j in 1..=max_length.min(degree) {
        for m in j..=degree {
            let add = c[m - j].clone();
            c[m] += add;
        }
    }
    c
}

fn rational(v: BigUint) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Both deviation probabilities and their explicit bounds for every `N` in the grid.
/// A bound holds when the whole certified interval of the probability lies below it.
pub fn deviation_check(q: f64, grid: &[usize]) -> Result<Vec<DeviationRow>> {
    check_q(q)?;
    let phi = euler_phi(SERIES_DEGREE).evaluate(q, TailModel::UNIT)?;
    let counts = partition_counts(SERIES_DEGREE);
    let length_constant = phi.upper() * length_tail_constant(q)?;
    let size_constant = phi.upper() * partition_tail_constant(q)?;
    let mut rows = Vec::new();
    for &n in grid {
        let cutoff = n.saturating_sub(1) / 2;
        let short = at_most_length_counts(cutoff, SERIES_DEGREE);
        let long: Vec<BigRational> = (0..=SERIES_DEGREE).map(|m| rational(&counts[m] - &short[m])).collect();
        let large: Vec<BigRational> = (0..=SERIES_DEGREE)
            .map(|m| if m > n { rational(counts[m].clone()) } else { rational(BigUint::from(0u32)) })
            .collect();
        // both coefficient sequences are dominated by p(m)
        let length_probability = phi * TruncatedSeries::from_coefficients(long).evaluate(q, TailModel::PARTITION)?;
        let size_probability = phi * TruncatedSeries::from_coefficients(large).evaluate(q, TailModel::PARTITION)?;
        let decay = q.powf(n as f64 / 2.0);
        let length_bound = length_constant * decay;
        let size_bound = size_constant * decay;
        rows.push(DeviationRow {
            n,
            length_cutoff: cutoff,
            length_probability,
            length_bound,
            size_probability,
            size_bound,
            length_holds: length_probability.upper() <= length_bound,
            size_holds: size_probability.upper() <= size_bound,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_counts_match_direct_counts() {
        let c = at_most_length_counts(3, 20);
        for (m, count) in c.iter().enumerate() {
            assert_eq!(*count, crate::partition::count_at_most_length(m, 3));
        }
    }

    #[test]
    fn bounds_hold_at_point_three() {
        for row in deviation_check(0.3, &[10, 20, 30]).unwrap() {
            assert!(row.length_holds && row.size_holds, "{row:?}");
        }
    }

    #[test]
    fn positive_length_is_everything_but_the_empty_partition() {
        // N = 1 and N = 2 have cutoff 0
        let q = 0.3;
        let row = deviation_check(q, &[1]).unwrap()[0];
        let phi = euler_phi(200).evaluate(q, TailModel::UNIT).unwrap();
        assert!(row.length_probability.agrees_with(&(CertifiedValue::exact(1.0) - phi)));
    }

    #[test]
    fn bound_ratio_is_a_power_of_q() {
        let rows = deviation_check(0.3, &[10, 30]).unwrap();
        let ratio = rows[1].size_bound / rows[0].size_bound;
        assert!((ratio / 0.3f64.powi(10) - 1.0).abs() < 1e-12);
        assert!((rows[1].length_bound / rows[0].length_bound / 0.3f64.powi(10) - 1.0).abs() < 1e-12);
    }
}
