//! Integer partitions and their exact statistics.
//!
//! A [`Partition`] stores its parts as a nonincreasing sequence of positive
//! integers. Sizes, lengths, total contents, conjugates and hook-length
//! dimensions are computed exactly; counts use arbitrary-precision integers.
//!
//! Enumeration is reverse-lexicographic: `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`.

mod count;
mod histogram;

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use count::{count_at_most_length, count_by_length, partition_count, partition_count_f64, partition_counts};
pub use histogram::{ContentHistogram, SizeContentTable, MAX_TABLE_SIZE};

/// An integer partition, stored as its nonincreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition, rejecting zero parts and increasing steps.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Domain(format!("partition parts must be positive: {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("partition parts must be nonincreasing: {parts:?}")));
        }
        Ok(Self { parts })
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        Self { parts }
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// |α|, the sum of the parts.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }

    /// ℓ(α), the number of parts.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// Total content K(α): the sum of `column - row` over all boxes.
    pub fn total_content(&self) -> i64 {
        total_content_of(&self.parts)
    }

    /// Total content computed box by box. Slower; kept as an oracle.
    pub fn total_content_by_boxes(&self) -> i64 {
        let mut k = 0i64;
        for (row, &part) in self.parts.iter().enumerate() {
            for col in 0..part as i64 {
                k += col - row as i64;
            }
        }
        k
    }

    /// The conjugate partition, `α'_i = #{j : α_j >= i}`.
    pub fn conjugate(&self) -> Partition {
        let first = self.parts.first().copied().unwrap_or(0) as usize;
        let mut conj = Vec::with_capacity(first);
        for i in 1..=first as u32 {
            let column = self.parts.iter().take_while(|&&p| p >= i).count() as u32;
            conj.push(column);
        }
        Partition { parts: conj }
    }

    /// Hook length of the box in row `row`, column `col` (both 0-based).
    fn hook_length(&self, conj: &[u32], row: usize, col: usize) -> u64 {
        let arm = self.parts[row] as usize - col - 1;
        let leg = conj[col] as usize - row - 1;
        (arm + leg + 1) as u64
    }

    /// Number of standard Young tableaux `f^α = |α|! / ∏ hooks`.
    ///
    /// The empty partition is rejected; callers that want the convention
    /// `f^∅ = 1` apply it themselves.
    pub fn hook_dimension(&self) -> Result<BigUint> {
        if self.is_empty() {
            return Err(Error::Domain("hook dimension of the empty partition".into()));
        }
        let conj = self.conjugate();
        let mut hooks = BigUint::one();
        for (row, &part) in self.parts.iter().enumerate() {
            for col in 0..part as usize {
                hooks *= BigUint::from(self.hook_length(conj.parts(), row, col));
            }
        }
        let mut fact = BigUint::one();
        for m in 2..=self.size() {
            fact *= BigUint::from(m);
        }
        Ok(fact / hooks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// K(α) from the closed form `(1/2) Σ α_i (α_i + 1 - 2i)` with 1-based rows.
pub(crate) fn total_content_of(parts: &[u32]) -> i64 {
    let twice: i64 = parts
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let a = i64::from(a);
            a * (a + 1 - 2 * (i as i64 + 1))
        })
        .sum();
    twice / 2
}

/// Calls `visit` on every partition of `n` with at most `max_length` parts,
/// in reverse-lexicographic order, without allocating per partition.
pub fn for_each_partition<F: FnMut(&[u32])>(n: u32, max_length: Option<usize>, mut visit: F) {
    let max_len = max_length.unwrap_or(usize::MAX);
    let mut parts = Vec::new();
    fn rec<F: FnMut(&[u32])>(rem: u32, cap: u32, max_len: usize, parts: &mut Vec<u32>, visit: &mut F) {
        if rem == 0 {
            visit(parts);
            return;
        }
        if parts.len() == max_len {
            return;
        }
        for a in (1..=rem.min(cap)).rev() {
            parts.push(a);
            rec(rem - a, a, max_len, parts, visit);
            parts.pop();
        }
    }
    rec(n, n, max_len, &mut parts, &mut visit);
}

/// Every partition of `n` (with at most `max_length` parts when given),
/// each exactly once, in reverse-lexicographic order.
pub fn enumerate_partitions(n: u32, max_length: Option<usize>) -> Vec<Partition> {
    let mut out = Vec::new();
    for_each_partition(n, max_length, |p| out.push(Partition::from_parts_unchecked(p.to_vec())));
    out
}

/// Visits every partition with `|α| <= max_size` and `ℓ(α) <= max_length`,
/// passing `(parts, size, total_content)`. Order: by the recursion tree,
/// parents before children; deterministic.
pub fn for_each_partition_up_to<F>(max_size: u32, max_length: Option<usize>, mut visit: F)
where
    F: FnMut(&[u32], u32, i64),
{
    let max_len = max_length.unwrap_or(usize::MAX);
    let mut parts = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(&[u32], u32, i64)>(
        size: u32,
        content: i64,
        cap: u32,
        max_size: u32,
        max_len: usize,
        parts: &mut Vec<u32>,
        visit: &mut F,
    ) {
        visit(parts, size, content);
        if parts.len() == max_len {
            return;
        }
        let row = parts.len() as i64 + 1;
        for a in (1..=cap.min(max_size - size)).rev() {
            let ai = i64::from(a);
            let row_content = ai * (ai + 1) / 2 - ai * row;
            parts.push(a);
            rec(size + a, content + row_content, a, max_size, max_len, parts, visit);
            parts.pop();
        }
    }
    rec(0, 0, max_size, max_size, max_len, &mut parts, &mut visit);
}
