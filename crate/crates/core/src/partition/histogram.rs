//! Joint counts of partitions by size and total content.
//!
//! Every sum over partitions in this crate that only depends on `|α|` and
//! `K(α)` (possibly under a length cap) goes through a [`SizeContentTable`].
//! Tables are filled by a dynamic programme over part values; a slower
//! [`ContentHistogram`] built by explicit enumeration serves as its oracle.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::for_each_partition_up_to;

/// Counts of partitions keyed by `(size, length, total content)`.
#[derive(Debug, Clone)]
pub struct ContentHistogram {
    max_size: u32,
    /// `rows[s]` holds `(length, content, count)` sorted by length then content.
    rows: Vec<Vec<(u32, i64, u64)>>,
}

impl ContentHistogram {
    /// Enumerates every partition with `|α| <= max_size` once.
    pub fn build(max_size: u32) -> Self {
        let m = max_size as usize;
        // Dense scratch: for size s, lengths 0..=s, contents in [-h, h], h = s(s-1)/2.
        let half = |s: usize| (s * s.saturating_sub(1) / 2) as i64;
        let mut dense: Vec<Vec<u64>> = (0..=m).map(|s| vec![0u64; (s + 1) * (2 * half(s) as usize + 1)]).collect();
        for_each_partition_up_to(max_size, None, |parts, size, content| {
            let s = size as usize;
            let width = 2 * half(s) as usize + 1;
            let idx = parts.len() * width + (content + half(s)) as usize;
            dense[s][idx] += 1;
        });
        let rows = dense
            .into_iter()
            .enumerate()
            .map(|(s, cells)| {
                let h = half(s);
                let width = 2 * h as usize + 1;
                cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(i, &c)| ((i / width) as u32, (i % width) as i64 - h, c))
                    .collect()
            })
            .collect();
        Self { max_size, rows }
    }

    pub fn max_size(&self) -> u32 {
        self.max_size
    }

    /// `(length, content, count)` triples for partitions of `size`.
    pub fn entries(&self, size: u32) -> &[(u32, i64, u64)] {
        &self.rows[size as usize]
    }

    /// Collapses lengths: counts by `(size, content)` for `ℓ <= max_length`
    /// and `size <= max_size`.
    pub fn size_content(&self, max_size: u32, max_length: Option<usize>) -> SizeContentTable {
        assert!(max_size <= self.max_size, "histogram built up to {} only", self.max_size);
        let cap = max_length.unwrap_or(usize::MAX);
        let rows = (0..=max_size)
            .map(|s| {
                let mut by_content: Vec<(i64, u64)> = Vec::new();
                let mut sorted: Vec<(i64, u64)> = self.rows[s as usize]
                    .iter()
                    .filter(|(len, _, _)| (*len as usize) <= cap)
                    .map(|&(_, k, c)| (k, c))
                    .collect();
                sorted.sort_unstable_by_key(|&(k, _)| k);
                for (k, c) in sorted {
                    match by_content.last_mut() {
                        Some((last, acc)) if *last == k => *acc += c,
                        _ => by_content.push((k, c)),
                    }
                }
                by_content
            })
            .collect();
        SizeContentTable { rows }
    }

    /// Σ_{α ⊢ n} K(α)^power, exactly.
    pub fn content_power_sum(&self, n: u32, power: u32) -> BigInt {
        let mut total = BigInt::zero();
        for &(_, k, c) in self.entries(n) {
            let term = if power == 0 { BigInt::one() } else { Pow::pow(BigInt::from(k), power) };
            total += term * BigInt::from(c);
        }
        total
    }
}

/// Counts of partitions by `(size, total content)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeContentTable {
    rows: Vec<Vec<(i64, u64)>>,
}

/// Largest size for which every count fits in 64 bits.
pub const MAX_TABLE_SIZE: u32 = 400;

impl SizeContentTable {
    /// Partitions with `|α| <= max_size` and every part `<= max_part`.
    ///
    /// Part values are processed in increasing order. Stacking `m` rows of
    /// length `v` on top of a partition of size `s` (all of whose parts are
    /// smaller) moves every old box down `m` rows, so the content changes by
    /// `m·v(v+1)/2 - v·m(m+1)/2 - m·s`, which only depends on `s`.
    ///
    /// # Panics
    /// Panics if `max_size > MAX_TABLE_SIZE`.
    pub fn with_max_part(max_size: u32, max_part: Option<u32>) -> Self {
        assert!(max_size <= MAX_TABLE_SIZE, "content tables are limited to size {MAX_TABLE_SIZE}");
        let m = max_size as usize;
        let half = |s: usize| (s * s.saturating_sub(1) / 2) as i64;
        let mut dense: Vec<Vec<u64>> = (0..=m).map(|s| vec![0u64; 2 * half(s) as usize + 1]).collect();
        dense[0][0] = 1;
        let top = max_part.map_or(m, |p| (p as usize).min(m));
        for v in 1..=top {
            let vi = v as i64;
            for s in (0..m).rev() {
                let hs = half(s);
                for idx in 0..dense[s].len() {
                    let c = dense[s][idx];
                    if c == 0 {
                        continue;
                    }
                    let k = idx as i64 - hs;
                    let mut mult = 1i64;
                    let mut target = s + v;
                    while target <= m {
                        let dk = mult * vi * (vi + 1) / 2 - vi * mult * (mult + 1) / 2 - mult * s as i64;
                        let slot = (k + dk + half(target)) as usize;
                        dense[target][slot] += c;
                        mult += 1;
                        target += v;
                    }
                }
            }
        }
        let rows = dense
            .into_iter()
            .enumerate()
            .map(|(s, cells)| {
                let h = half(s);
                cells.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i as i64 - h, c)).collect()
            })
            .collect();
        Self { rows }
    }

    /// Partitions with `|α| <= max_size` and `ℓ(α) <= max_length`, obtained by
    /// conjugating the part-capped table (`K(α') = -K(α)`).
    pub fn with_max_length(max_size: u32, max_length: Option<u32>) -> Self {
        let by_part = Self::with_max_part(max_size, max_length);
        let rows = by_part.rows.into_iter().map(|row| row.into_iter().rev().map(|(k, c)| (-k, c)).collect()).collect();
        Self { rows }
    }

    /// Process-wide cache of [`Self::with_max_length`]; a cached table built for a
    /// larger size is truncated instead of rebuilt.
    pub fn shared(max_size: u32, max_length: Option<u32>) -> Arc<Self> {
        type Cache = Mutex<HashMap<Option<u32>, Arc<SizeContentTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        // ℓ(α) <= |α|, so a cap at or above max_size is no cap at all.
        let key = max_length.filter(|&l| l < max_size);
        let mut map = CACHE.get_or_init(|| Mutex::new(HashMap::new())).lock().expect("content table cache poisoned");
        if let Some(t) = map.get(&key) {
            if t.max_size() >= max_size {
                if t.max_size() == max_size {
                    return Arc::clone(t);
                }
                return Arc::new(Self { rows: t.rows[..=max_size as usize].to_vec() });
            }
        }
        let built = Arc::new(Self::with_max_length(max_size, key));
        map.insert(key, Arc::clone(&built));
        built
    }

    /// Σ K(α)^power over the partitions of `size` in the table, exactly.
    pub fn content_power_sum(&self, size: u32, power: u32) -> BigInt {
        let mut total = BigInt::zero();
        for &(k, c) in self.row(size) {
            let term = if power == 0 { BigInt::one() } else { Pow::pow(BigInt::from(k), power) };
            total += term * BigInt::from(c);
        }
        total
    }

    pub fn max_size(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// `(content, count)` pairs for partitions of `size`, sorted by content.
    pub fn row(&self, size: u32) -> &[(i64, u64)] {
        &self.rows[size as usize]
    }

    /// Iterates `(size, content, count)` in increasing size then content.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i64, u64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(s, row)| row.iter().map(move |&(k, c)| (s as u32, k, c)))
    }

    /// Number of partitions of `size` in the table.
    pub fn count(&self, size: u32) -> u64 {
        self.row(size).iter().map(|&(_, c)| c).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{count_by_length, enumerate_partitions, partition_count};
    use num_bigint::BigUint;

    #[test]
    fn histogram_totals_match_counts() {
        let h = ContentHistogram::build(18);
        for n in 0..=18u32 {
            let total: u64 = h.entries(n).iter().map(|e| e.2).sum();
            assert_eq!(BigUint::from(total), partition_count(n as usize));
            for k in 0..=n {
                let by_len: u64 = h.entries(n).iter().filter(|e| e.0 == k).map(|e| e.2).sum();
                assert_eq!(BigUint::from(by_len), count_by_length(n as usize, k as usize));
            }
        }
    }

    #[test]
    fn content_power_sums_match_enumeration() {
        let h = ContentHistogram::build(9);
        for n in 1..=9u32 {
            for power in 0..5u32 {
                let direct: i64 = enumerate_partitions(n, None).iter().map(|a| a.total_content().pow(power)).sum();
                assert_eq!(h.content_power_sum(n, power), BigInt::from(direct));
            }
        }
    }

    #[test]
    fn length_capped_table() {
        let h = ContentHistogram::build(10);
        let t = h.size_content(10, Some(2));
        for n in 0..=10u32 {
            assert_eq!(t.count(n) as usize, enumerate_partitions(n, Some(2)).len());
        }
    }

    #[test]
    fn dynamic_programme_matches_enumeration() {
        let h = ContentHistogram::build(16);
        for cap in [None, Some(1), Some(2), Some(3), Some(5), Some(9)] {
            let dp = SizeContentTable::with_max_length(16, cap);
            assert_eq!(dp, h.size_content(16, cap.map(|c| c as usize)), "cap {cap:?}");
        }
        let by_part = SizeContentTable::with_max_part(12, Some(3));
        for n in 0..=12u32 {
            let mut want: Vec<(i64, u64)> = Vec::new();
            for a in enumerate_partitions(n, None).iter().filter(|a| a.parts().iter().all(|&p| p <= 3)) {
                match want.iter_mut().find(|e| e.0 == a.total_content()) {
                    Some(e) => e.1 += 1,
                    None => want.push((a.total_content(), 1)),
                }
            }
            want.sort_unstable();
            assert_eq!(by_part.row(n), want.as_slice());
        }
    }

    #[test]
    fn large_tables_count_partitions() {
        let t = SizeContentTable::shared(120, None);
        for n in [0u32, 50, 100, 120] {
            assert_eq!(BigUint::from(t.count(n)), partition_count(n as usize));
        }
        let small = SizeContentTable::shared(30, None);
        assert_eq!(small.max_size(), 30);
        assert_eq!(small.row(30), t.row(30));
        assert_eq!(t.content_power_sum(4, 2), BigInt::from(80));
        assert_eq!(t.content_power_sum(9, 3), BigInt::zero());
    }
}
