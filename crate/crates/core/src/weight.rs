//! Highest weights of U(N) and their description by two partitions and an integer.
//!
//! A highest weight `λ_1 >= ... >= λ_N` is cut at the middle index
//! `k = ⌊(N+1)/2⌋`. The strict steps above `λ_k` form a partition `α`, the
//! strict steps below form a partition `β`, and `n = λ_k`. The image of this
//! map is the set `Λ_N` of triples with `ℓ(α) <= A_N` and `ℓ(β) <= B_N`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// `A_N = ⌊(N+1)/2⌋ - 1`, the largest allowed `ℓ(α)`.
pub fn alpha_length_cap(n: usize) -> usize {
    n.div_ceil(2) - 1
}

/// `B_N = N - ⌊(N+1)/2⌋`, the largest allowed `ℓ(β)`.
pub fn beta_length_cap(n: usize) -> usize {
    n - n.div_ceil(2)
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A nonincreasing `N`-tuple of integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HighestWeight {
    entries: Vec<i64>,
}

impl HighestWeight {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("a highest weight needs N >= 1 entries".into()));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("highest weight must be nonincreasing: {entries:?}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// N.
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// `c_2(λ) = (1/N) Σ λ_i (λ_i + N + 1 - 2i)`, exactly.
    pub fn casimir(&self) -> BigRational {
        let n = self.rank() as i64;
        let total: BigInt = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, &l)| BigInt::from(l) * BigInt::from(l + n + 1 - 2 * (i as i64 + 1)))
            .sum();
        BigRational::new(total, BigInt::from(n))
    }

    /// `Σ_i (λ_i - ρ_i)²` with `ρ_i = i - (N+1)/2`.
    pub fn shifted_norm_squared(&self) -> BigRational {
        let n = self.rank() as i64;
        self.entries
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                // λ_i - ρ_i = (2λ_i - 2i + N + 1) / 2
                let twice = 2 * l - 2 * (i as i64 + 1) + n + 1;
                rational(twice * twice, 4)
            })
            .sum()
    }

    /// `‖ρ‖² = N(N² - 1)/12`.
    pub fn rho_norm_squared(rank: usize) -> BigRational {
        let n = rank as i64;
        rational(n * (n * n - 1), 12)
    }

    /// The triple `(α, β, n)` of this weight.
    pub fn to_triple(&self) -> WeightTriple {
        phi_n(self)
    }
}

impl fmt::Display for HighestWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Two partitions and an integer; the coordinates of a highest weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightTriple {
    pub alpha: Partition,
    pub beta: Partition,
    pub n: i64,
}

impl WeightTriple {
    pub fn new(alpha: Partition, beta: Partition, n: i64) -> Self {
        Self { alpha, beta, n }
    }

    /// Membership in `Λ_N`.
    pub fn in_lambda(&self, rank: usize) -> bool {
        rank >= 1 && self.alpha.length() <= alpha_length_cap(rank) && self.beta.length() <= beta_length_cap(rank)
    }

    pub fn check_lambda(&self, rank: usize) -> Result<()> {
        if rank == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        let (a, b) = (alpha_length_cap(rank), beta_length_cap(rank));
        if self.alpha.length() > a {
            return Err(Error::OutsideLambda {
                n: rank,
                reason: format!("length of alpha is {} > {a}", self.alpha.length()),
            });
        }
        if self.beta.length() > b {
            return Err(Error::OutsideLambda {
                n: rank,
                reason: format!("length of beta is {} > {b}", self.beta.length()),
            });
        }
        Ok(())
    }

    /// `F(α, β, n) = K(α) + K(β) + n(|α| - |β|)`.
    pub fn coupling_f(&self) -> i64 {
        let diff = self.alpha.size() as i64 - self.beta.size() as i64;
        self.alpha.total_content() + self.beta.total_content() + self.n * diff
    }

    /// `|α| + |β| + n² + (2/N) F`, which equals `c_2` of the corresponding weight.
    pub fn casimir_decomposed(&self, rank: usize) -> Result<BigRational> {
        self.check_lambda(rank)?;
        let base = self.alpha.size() as i64 + self.beta.size() as i64 + self.n * self.n;
        Ok(BigRational::from_integer(BigInt::from(base)) + rational(2 * self.coupling_f(), rank as i64))
    }

    /// `C_N = (|α| + |β|)/2 + (n + (|α| - |β|)/N)²`, a lower bound for `c_2` on `Λ_N`.
    pub fn domination_bound(&self, rank: usize) -> Result<BigRational> {
        self.check_lambda(rank)?;
        let n = rank as i64;
        let (a, b) = (self.alpha.size() as i64, self.beta.size() as i64);
        let shift = rational(self.n * n + a - b, n);
        Ok(rational(a + b, 2) + &shift * &shift)
    }
}

impl fmt::Display for WeightTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.alpha, self.beta, self.n)
    }
}

/// `c_2(λ)` straight from the entries.
pub fn casimir_direct(lambda: &HighestWeight) -> BigRational {
    lambda.casimir()
}

/// `λ ↦ (α, β, n)`: cut at `k = ⌊(N+1)/2⌋`.
pub fn phi_n(lambda: &HighestWeight) -> WeightTriple {
    let e = lambda.entries();
    let big_n = e.len();
    let k = big_n.div_ceil(2);
    let mid = e[k - 1];
    let alpha: Vec<u32> = e[..k - 1].iter().map(|&l| (l - mid) as u32).filter(|&a| a > 0).collect();
    let beta: Vec<u32> = e[k..].iter().rev().map(|&l| (mid - l) as u32).filter(|&b| b > 0).collect();
    WeightTriple { alpha: Partition::from_parts_unchecked(alpha), beta: Partition::from_parts_unchecked(beta), n: mid }
}

/// `(α, β, n) ↦ λ_N(α, β, n)`, rejecting triples outside `Λ_N`.
pub fn phi_n_inverse(t: &WeightTriple, rank: usize) -> Result<HighestWeight> {
    t.check_lambda(rank)?;
    let k = rank.div_ceil(2);
    let mut entries = vec![t.n; rank];
    for (i, &a) in t.alpha.parts().iter().enumerate() {
        entries[i] += i64::from(a);
    }
    for (j, &b) in t.beta.parts().iter().enumerate() {
        entries[rank - 1 - j] -= i64::from(b);
    }
    debug_assert!(entries[k - 1] == t.n);
    HighestWeight::new(entries)
}

/// `F(α, β, n)`.
pub fn coupling_f(t: &WeightTriple) -> i64 {
    t.coupling_f()
}

/// `|α| + |β| + n² + (2/N) F`.
pub fn casimir_decomposed(t: &WeightTriple, rank: usize) -> Result<BigRational> {
    t.casimir_decomposed(rank)
}

/// `C_N(α, β, n)`.
pub fn domination_bound(t: &WeightTriple, rank: usize) -> Result<BigRational> {
    t.domination_bound(rank)
}

/// Calls `visit` on every highest weight of rank `rank` with entries in `[lo, hi]`.
pub fn for_each_weight_in_box<F: FnMut(&HighestWeight)>(rank: usize, lo: i64, hi: i64, mut visit: F) {
    fn rec<F: FnMut(&HighestWeight)>(entries: &mut Vec<i64>, rank: usize, lo: i64, cap: i64, visit: &mut F) {
        if entries.len() == rank {
            visit(&HighestWeight { entries: entries.clone() });
            return;
        }
        for v in (lo..=cap).rev() {
            entries.push(v);
            rec(entries, rank, lo, v, visit);
            entries.pop();
        }
    }
    let mut entries = Vec::with_capacity(rank);
    rec(&mut entries, rank, lo, hi, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn figure_weight() -> HighestWeight {
        HighestWeight::new(vec![4, 3, 3, 2, 1, -1, -2, -2]).unwrap()
    }

    fn figure_triple() -> WeightTriple {
        WeightTriple::new(p(&[2, 1, 1]), p(&[4, 4, 3, 1]), 2)
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn worked_example_round_trip() {
        let lambda = figure_weight();
        assert_eq!(casimir_direct(&lambda), int(16));
        assert_eq!(phi_n(&lambda), figure_triple());
        assert_eq!(phi_n_inverse(&figure_triple(), 8).unwrap(), lambda);
        assert_eq!(coupling_f(&figure_triple()), -16);
        assert_eq!(casimir_decomposed(&figure_triple(), 8).unwrap(), int(16));
        assert_eq!(domination_bound(&figure_triple(), 8).unwrap(), int(9));
    }

    #[test]
    fn trivial_weights() {
        let zero = HighestWeight::new(vec![0; 5]).unwrap();
        assert!(casimir_direct(&zero).is_zero());
        assert_eq!(phi_n(&zero), WeightTriple::new(Partition::empty(), Partition::empty(), 0));
        let constant = HighestWeight::new(vec![3; 6]).unwrap();
        assert_eq!(phi_n(&constant), WeightTriple::new(Partition::empty(), Partition::empty(), 3));
        let t = WeightTriple::new(Partition::empty(), Partition::empty(), -4);
        for rank in 1..6 {
            assert_eq!(phi_n_inverse(&t, rank).unwrap().entries(), vec![-4; rank].as_slice());
            assert_eq!(t.domination_bound(rank).unwrap(), int(16));
            assert_eq!(t.coupling_f(), 0);
        }
        for m in -5..=5 {
            assert_eq!(casimir_direct(&HighestWeight::new(vec![m]).unwrap()), int(m * m));
        }
    }

    #[test]
    fn small_inverse_example() {
        let t = WeightTriple::new(p(&[1]), p(&[1]), 0);
        assert_eq!(phi_n_inverse(&t, 3).unwrap().entries(), &[1, 0, -1]);
    }

    #[test]
    fn outside_lambda_is_rejected() {
        let t = WeightTriple::new(p(&[1, 1]), Partition::empty(), 0);
        assert!(matches!(phi_n_inverse(&t, 4), Err(Error::OutsideLambda { .. })));
        assert!(t.casimir_decomposed(4).is_err());
        assert!(t.domination_bound(4).is_err());
        assert!(phi_n_inverse(&t, 5).is_ok());
        assert!(HighestWeight::new(vec![0, 1]).is_err());
        assert!(HighestWeight::new(vec![]).is_err());
    }

    #[test]
    fn length_caps_partition_the_remaining_rows() {
        for rank in 1..40 {
            assert_eq!(alpha_length_cap(rank) + beta_length_cap(rank), rank - 1);
        }
    }

    #[test]
    fn exhaustive_small_box() {
        for rank in 1..=7 {
            let mut count = 0;
            for_each_weight_in_box(rank, -3, 3, |lambda| {
                let t = phi_n(lambda);
                assert!(t.in_lambda(rank));
                assert_eq!(&phi_n_inverse(&t, rank).unwrap(), lambda);
                let c2 = casimir_direct(lambda);
                assert_eq!(t.casimir_decomposed(rank).unwrap(), c2);
                assert!(t.domination_bound(rank).unwrap() <= c2);
                let rank_q = int(rank as i64);
                assert_eq!(&rank_q * &c2 + HighestWeight::rho_norm_squared(rank), lambda.shifted_norm_squared());
                count += 1;
            });
            assert!(count > 0);
        }
    }

    #[test]
    fn domination_over_enumerated_triples() {
        for rank in [4usize, 8, 16] {
            let (ca, cb) = (alpha_length_cap(rank), beta_length_cap(rank));
            let alphas: Vec<Partition> = (0..=7).flat_map(|s| enumerate_partitions(s, Some(ca))).collect();
            let betas: Vec<Partition> = (0..=7).flat_map(|s| enumerate_partitions(s, Some(cb))).collect();
            for a in &alphas {
                for b in &betas {
                    for n in -6..=6 {
                        let t = WeightTriple::new(a.clone(), b.clone(), n);
                        let c2 = t.casimir_decomposed(rank).unwrap();
                        assert!(t.domination_bound(rank).unwrap() <= c2, "{t} at N={rank}");
                        let lambda = phi_n_inverse(&t, rank).unwrap();
                        assert_eq!(phi_n(&lambda), t);
                    }
                }
            }
        }
    }

    fn weight_strategy() -> impl Strategy<Value = HighestWeight> {
        (1usize..=30).prop_flat_map(|rank| proptest::collection::vec(-40i64..=40, rank)).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            HighestWeight::new(v).unwrap()
        })
    }

    fn partition_strategy(max_len: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(1u32..=12, 0..=max_len).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Partition::new(v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rho_identity_and_round_trip(lambda in weight_strategy()) {
            let rank = lambda.rank();
            let c2 = casimir_direct(&lambda);
            let lhs = int(rank as i64) * &c2 + HighestWeight::rho_norm_squared(rank);
            prop_assert_eq!(lhs, lambda.shifted_norm_squared());
            let t = phi_n(&lambda);
            prop_assert!(t.in_lambda(rank));
            prop_assert_eq!(t.casimir_decomposed(rank).unwrap(), c2.clone());
            prop_assert!(t.domination_bound(rank).unwrap() <= c2);
            prop_assert_eq!(phi_n_inverse(&t, rank).unwrap(), lambda);
        }

        #[test]
        fn triples_round_trip(rank in 2usize..=24, n in -20i64..=20, seed_a in partition_strategy(12), seed_b in partition_strategy(12)) {
            let cut = |p: &Partition, cap: usize| Partition::new(p.parts().iter().copied().take(cap).collect()).unwrap();
            let t = WeightTriple::new(cut(&seed_a, alpha_length_cap(rank)), cut(&seed_b, beta_length_cap(rank)), n);
            let lambda = phi_n_inverse(&t, rank).unwrap();
            prop_assert_eq!(phi_n(&lambda), t.clone());
            prop_assert_eq!(casimir_direct(&lambda), t.casimir_decomposed(rank).unwrap());
            let half = BigRational::one() / int(2);
            prop_assert!(t.domination_bound(rank).unwrap() >= half * int((t.alpha.size() + t.beta.size()) as i64));
        }
    }
}
