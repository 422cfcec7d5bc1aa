use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

fn cache() -> &'static Mutex<Vec<BigUint>> {
    static TABLE: OnceLock<Mutex<Vec<BigUint>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![BigUint::one()]))
}

/// p(0), ..., p(n) via Euler's pentagonal recurrence.
///
/// The table is memoised behind a mutex and only ever grows.
pub fn partition_counts(n: usize) -> Vec<BigUint> {
    let mut table = cache().lock().expect("partition table poisoned");
    while table.len() <= n {
        let i = table.len() as i64;
        let mut acc = BigInt::zero();
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = BigInt::from(table[(i - g1) as usize].clone());
            if g2 <= i {
                term += BigInt::from(table[(i - g2) as usize].clone());
            }
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        table.push(acc.to_biguint().expect("p(n) is nonnegative"));
    }
    table[..=n].to_vec()
}

/// p(n), the number of partitions of `n`.
pub fn partition_count(n: usize) -> BigUint {
    partition_counts(n).pop().expect("nonempty table")
}

/// p(n) rounded to the nearest `f64`; used when evaluating series numerically.
pub fn partition_count_f64(n: usize) -> f64 {
    static TABLE: OnceLock<Mutex<Vec<f64>>> = OnceLock::new();
    let mut t = TABLE.get_or_init(|| Mutex::new(Vec::new())).lock().expect("poisoned");
    if t.len() <= n {
        let exact = partition_counts(n.max(2 * t.len()));
        *t = exact.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
    }
    t[n]
}

/// p_k(n): partitions of `n` with exactly `k` parts.
///
/// Uses `p_k(n) = p_{k-1}(n-1) + p_k(n-k)` (remove a part equal to one, or
/// subtract one from every part).
pub fn count_by_length(n: usize, k: usize) -> BigUint {
    if n == 0 && k == 0 {
        return BigUint::one();
    }
    if k == 0 || k > n {
        return BigUint::zero();
    }
    // table[j][m] = p_j(m) for j <= k, m <= n
    let mut table = vec![vec![BigUint::zero(); n + 1]; k + 1];
    table[0][0] = BigUint::one();
    for j in 1..=k {
        for m in j..=n {
            let v = &table[j - 1][m - 1] + &table[j][m - j];
            table[j][m] = v;
        }
    }
    table[k][n].clone()
}

/// p_{<=k}(n) = Σ_{j<=k} p_j(n).
pub fn count_at_most_length(n: usize, k: usize) -> BigUint {
    (0..=k.min(n)).map(|j| count_by_length(n, j)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;

    #[test]
    fn first_ten_counts() {
        let want = [1u32, 1, 2, 3, 5, 7, 11, 15, 22, 30];
        let got = partition_counts(9);
        for (g, w) in got.iter().zip(want) {
            assert_eq!(*g, BigUint::from(w));
        }
    }

    #[test]
    fn counts_match_enumeration_up_to_25() {
        for n in 0..=25usize {
            let enumerated = enumerate_partitions(n as u32, None).len();
            assert_eq!(partition_count(n), BigUint::from(enumerated));
            let by_len: BigUint = (0..=n).map(|k| count_by_length(n, k)).sum();
            assert_eq!(by_len, partition_count(n));
        }
    }

    #[test]
    fn length_counts() {
        assert_eq!(count_by_length(5, 2), BigUint::from(2u32));
        for n in 0..12 {
            for k in n..n + 3 {
                assert_eq!(count_at_most_length(n, k), partition_count(n));
            }
        }
    }

    #[test]
    fn does_not_wrap_past_u64() {
        let big = partition_count(500);
        assert!(big > BigUint::from(u64::MAX));
        assert_eq!(partition_count(100), BigUint::from(190_569_292u64));
    }
}
