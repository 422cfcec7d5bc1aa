//! Exact samplers by inverse CDF over certified finite supports.

use super::{inverse_cdf, RandomSource};
use crate::certified::CertifiedValue;
use crate::error::{check_q, Error, Result};
use crate::partition::{for_each_partition_up_to, Partition};
use crate::partition_function::{zn_bruteforce, Truncation};
use crate::series::{euler_phi, theta, TailModel};
use crate::weight::{alpha_length_cap, beta_length_cap, phi_n_inverse, HighestWeight, WeightTriple};

/// Default size cap of [`QUniformSampler`].
pub const DEFAULT_SIZE_CAP: u32 = 200;

/// Largest probability mass allowed beyond the size cap.
const CAP_MASS: f64 = 1e-12;

/// `𝒰(q)`: draws `|α| = n` with probability `∝ p(n) qⁿ`, then a uniform
/// partition of `n`.
#[derive(Debug, Clone)]
pub struct QUniformSampler {
    q: f64,
    cap: u32,
    cumulative: Vec<f64>,
    /// `bounded[m][k]`: partitions of `m` with all parts `<= k`.
    bounded: Vec<Vec<u128>>,
}

impl QUniformSampler {
    /// Fails when the mass of `|α| > cap` may exceed `1e-12`.
    pub fn new(q: f64, cap: u32) -> Result<Self> {
        check_q(q)?;
        let phi = euler_phi(cap as usize + 1).evaluate(q, TailModel::UNIT)?;
        let beyond = phi.upper() * TailModel::PARTITION.bound(q, cap as usize)?;
        if beyond > CAP_MASS {
            return Err(Error::Uncertifiable(format!(
                "mass {beyond:e} beyond size {cap} exceeds {CAP_MASS:e}; raise the cap or lower q"
            )));
        }
        let m = cap as usize;
        let mut bounded = vec![vec![0u128; m + 1]; m + 1];
        bounded[0].iter_mut().for_each(|x| *x = 1);
        for n in 1..=m {
            for k in 1..=m {
                let without_k = bounded[n][k - 1];
                let with_k = if k <= n { bounded[n - k][k] } else { 0 };
                bounded[n][k] = without_k + with_k;
            }
        }
        let ln_q = q.ln();
        let mut acc = 0.0;
        let cumulative = (0..=m)
            .map(|n| {
                acc += bounded[n][n] as f64 * (ln_q * n as f64).exp();
                acc
            })
            .collect();
        Ok(Self { q, cap, cumulative, bounded })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Number of partitions of `n` with parts at most `k`, for `n, k <= cap`.
    pub fn bounded_count(&self, n: u32, k: u32) -> u128 {
        self.bounded[n as usize][k as usize]
    }

    pub fn sample_size(&self, rng: &mut RandomSource) -> u32 {
        inverse_cdf(&self.cumulative, rng.uniform()) as u32
    }

    /// A uniformly random partition of `n`: the largest part is `j` with
    /// probability `P(n-j, j)/P(n, k)`, then recurse with parts at most `j`.
    pub fn sample_of_size(&self, n: u32, rng: &mut RandomSource) -> Result<Partition> {
        if n > self.cap {
            return Err(Error::InvalidParameter(format!("size {n} exceeds the cap {}", self.cap)));
        }
        let mut parts = Vec::new();
        let (mut rest, mut k) = (n as usize, n as usize);
        while rest > 0 {
            let mut r = rng.below(self.bounded[rest][k]);
            let mut j = k.min(rest);
            loop {
                let c = self.bounded[rest - j][j];
                if r < c {
                    break;
                }
                r -= c;
                j -= 1;
            }
            parts.push(j as u32);
            rest -= j;
            k = j;
        }
        Partition::new(parts)
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Partition {
        let n = self.sample_size(rng);
        self.sample_of_size(n, rng).expect("size within the cap")
    }
}

/// One draw from `𝒰(q)`; builds the tables each call.
pub fn sample_q_uniform(q: f64, rng: &mut RandomSource, cap: u32) -> Result<Partition> {
    Ok(QUniformSampler::new(q, cap)?.sample(rng))
}

/// `𝒢_1(q)` over `|m| <= L`, with `L` chosen so that the omitted mass is below `1e-15`.
#[derive(Debug, Clone)]
pub struct G1Sampler {
    range: i64,
    cumulative: Vec<f64>,
}

impl G1Sampler {
    pub fn new(q: f64) -> Result<Self> {
        check_q(q)?;
        let mut range = 1i64;
        while TailModel::THETA.bound(q, (range * range) as usize)? > 1e-15 {
            range += 1;
        }
        let ln_q = q.ln();
        let mut acc = 0.0;
        let cumulative = (-range..=range)
            .map(|m| {
                acc += (ln_q * (m * m) as f64).exp();
                acc
            })
            .collect();
        Ok(Self { range, cumulative })
    }

    pub fn sample(&self, rng: &mut RandomSource) -> i64 {
        inverse_cdf(&self.cumulative, rng.uniform()) as i64 - self.range
    }
}

/// One draw from `𝒢_1(q)`.
pub fn sample_g1(q: f64, rng: &mut RandomSource) -> Result<i64> {
    Ok(G1Sampler::new(q)?.sample(rng))
}

/// `𝒢_N(q)` conditioned on the truncation region `|α|, |β| <= m_part`,
/// `|n| <= m_int`, sampled by inverse CDF over its enumerated support.
#[derive(Debug, Clone)]
pub struct GnSampler {
    rank: usize,
    q: f64,
    alphas: Vec<Partition>,
    betas: Vec<Partition>,
    /// `(α index, β index, n)`.
    support: Vec<(u32, u32, i64)>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    tv_error: f64,
}

fn partitions_up_to(max_size: u32, max_length: usize) -> Vec<(Partition, i64)> {
    let mut out = Vec::new();
    for_each_partition_up_to(max_size, Some(max_length), |parts, _, content| {
        out.push((Partition::new(parts.to_vec()).expect("valid parts"), content));
    });
    out
}

impl GnSampler {
    /// Fails when the total-variation distance to `𝒢_N(q)`, bounded by
    /// `(Z_N - region mass)/region mass`, may exceed `tolerance`.
    pub fn new(rank: usize, q: f64, trunc: Truncation, tolerance: f64) -> Result<Self> {
        check_q(q)?;
        if rank == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        let alphas = partitions_up_to(trunc.m_part, alpha_length_cap(rank));
        let betas = partitions_up_to(trunc.m_part, beta_length_cap(rank));
        let ln_q = q.ln();
        let big_n = rank as i64;
        let m = i64::from(trunc.m_int);
        let mut support = Vec::with_capacity(alphas.len() * betas.len() * (2 * m as usize + 1));
        let mut weights = Vec::with_capacity(support.capacity());
        for (i, (a, ka)) in alphas.iter().enumerate() {
            let sa = a.size() as i64;
            for (j, (b, kb)) in betas.iter().enumerate() {
                let sb = b.size() as i64;
                for n in -m..=m {
                    let scaled = big_n * (sa + sb + n * n) + 2 * (ka + kb + n * (sa - sb));
                    weights.push((ln_q * scaled as f64 / rank as f64).exp());
                    support.push((i as u32, j as u32, n));
                }
            }
        }
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        // the finite sum is a lower bound for Z_N; the certified Z_N bounds the rest
        let zn = zn_bruteforce(rank, q, Truncation::default())?;
        let region = acc * (1.0 - 1e-12);
        let tv_error = (zn.upper() - region).max(0.0) / region;
        if tv_error > tolerance {
            return Err(Error::Uncertifiable(format!(
                "truncation error {tv_error:e} exceeds the tolerance {tolerance:e}"
            )));
        }
        Ok(Self {
            rank,
            q,
            alphas: alphas.into_iter().map(|x| x.0).collect(),
            betas: betas.into_iter().map(|x| x.0).collect(),
            support,
            weights,
            cumulative,
            tv_error,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Upper bound for the total-variation distance to `𝒢_N(q)`.
    pub fn tv_error(&self) -> f64 {
        self.tv_error
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn triple(&self, index: usize) -> WeightTriple {
        let (i, j, n) = self.support[index];
        WeightTriple::new(self.alphas[i as usize].clone(), self.betas[j as usize].clone(), n)
    }

    /// Probability of each support point under the truncated measure.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = *self.cumulative.last().expect("nonempty support");
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn sample_index(&self, rng: &mut RandomSource) -> usize {
        inverse_cdf(&self.cumulative, rng.uniform())
    }

    pub fn sample_triple(&self, rng: &mut RandomSource) -> WeightTriple {
        self.triple(self.sample_index(rng))
    }

    pub fn sample(&self, rng: &mut RandomSource) -> HighestWeight {
        let t = self.sample_triple(rng);
        phi_n_inverse(&t, self.rank).expect("support lies in Λ_N")
    }
}

/// `ℙ(α, β, n) = θ/(Z_N φ²) · q^{(2/N)F} · 𝒰(α) 𝒰(β) 𝒢_1(n)` on `Λ_N`,
/// the law of `Φ_N(λ)` written as a density against the product measure.
#[derive(Debug, Clone, Copy)]
pub struct TransferDensity {
    rank: usize,
    q: f64,
    phi: CertifiedValue,
    theta: CertifiedValue,
    zn: CertifiedValue,
}

impl TransferDensity {
    pub fn new(rank: usize, q: f64, zn: CertifiedValue) -> Result<Self> {
        check_q(q)?;
        let phi = euler_phi(200).evaluate(q, TailModel::UNIT)?;
        let theta = theta(200).evaluate(q, TailModel::THETA)?;
        Ok(Self { rank, q, phi, theta, zn })
    }

    /// The density `θ/(Z_N φ²) · q^{(2/N)F}`; zero off `Λ_N`.
    pub fn density(&self, t: &WeightTriple) -> f64 {
        if !t.in_lambda(self.rank) {
            return 0.0;
        }
        let prefactor = self.theta.value / (self.zn.value * self.phi.value * self.phi.value);
        prefactor * self.q.powf(2.0 * t.coupling_f() as f64 / self.rank as f64)
    }

    /// Product-measure probability `𝒰(α) 𝒰(β) 𝒢_1(n)`.
    pub fn product_probability(&self, t: &WeightTriple) -> f64 {
        let sizes = (t.alpha.size() + t.beta.size()) as f64;
        self.phi.value * self.phi.value * self.q.powf(sizes) * self.q.powf((t.n * t.n) as f64) / self.theta.value
    }

    pub fn probability(&self, t: &WeightTriple) -> f64 {
        self.density(t) * self.product_probability(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::chi_square_p_value;
    use crate::partition::{enumerate_partitions, partition_count};
    use crate::partition_function::theta_moment;
    use crate::weight::{casimir_direct, phi_n};
    use num_traits::ToPrimitive;

    #[test]
    fn bounded_counts() {
        let s = QUniformSampler::new(0.3, 60).unwrap();
        for n in 0..=30u32 {
            assert_eq!(s.bounded_count(n, n), partition_count(n as usize).to_u128().unwrap());
        }
        assert_eq!(s.bounded_count(5, 2), 3);
        assert!(QUniformSampler::new(0.9, 50).is_err());
    }

    #[test]
    fn uniform_on_partitions_of_six() {
        let s = QUniformSampler::new(0.3, 60).unwrap();
        let all = enumerate_partitions(6, None);
        let mut counts = vec![0u64; all.len()];
        let mut rng = RandomSource::new(11);
        for _ in 0..22_000 {
            let p = s.sample_of_size(6, &mut rng).unwrap();
            counts[all.iter().position(|x| *x == p).unwrap()] += 1;
        }
        let probs = vec![1.0 / all.len() as f64; all.len()];
        assert!(chi_square_p_value(&counts, &probs).unwrap() > 1e-3);
    }

    #[test]
    fn small_q_gives_the_empty_partition() {
        let s = QUniformSampler::new(1e-6, 20).unwrap();
        let mut rng = RandomSource::new(1);
        let empty = (0..1000).filter(|_| s.sample(&mut rng).is_empty()).count();
        assert!(empty >= 995);
    }

    #[test]
    fn g1_second_moment() {
        let q = 0.4;
        let s = G1Sampler::new(q).unwrap();
        let mut rng = RandomSource::new(5);
        let draws: Vec<f64> = (0..40_000).map(|_| s.sample(&mut rng) as f64).collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let m2 = draws.iter().map(|x| x * x).sum::<f64>() / n;
        let m4 = draws.iter().map(|x| x.powi(4)).sum::<f64>() / n;
        let exact = theta_moment(2, q, 100).unwrap().value;
        assert!((m2 - exact).abs() < 4.0 * ((m4 - m2 * m2) / n).sqrt());
        assert!(mean.abs() < 4.0 * (m2 / n).sqrt());
    }

    #[test]
    fn rank_one_sampler_is_g1() {
        let q: f64 = 0.4;
        let s = GnSampler::new(1, q, Truncation::new(1, 12).unwrap(), 1e-9).unwrap();
        assert_eq!(s.support_len(), 25);
        let th = theta(200).evaluate(q, TailModel::THETA).unwrap();
        for (idx, p) in s.probabilities().iter().enumerate() {
            let t = s.triple(idx);
            assert!(t.alpha.is_empty() && t.beta.is_empty());
            assert!((p - q.powi((t.n * t.n) as i32) / th.value).abs() < 1e-12);
        }
    }

    #[test]
    fn support_weights_are_casimir_weights() {
        let q: f64 = 0.2;
        let s = GnSampler::new(6, q, Truncation::new(8, 4).unwrap(), 1e-2).unwrap();
        let probs = s.probabilities();
        let ratio = probs[0] / q.powf(casimir_direct(&phi_n_inverse(&s.triple(0), 6).unwrap()).to_f64().unwrap());
        for idx in (0..s.support_len()).step_by(97) {
            let lambda = phi_n_inverse(&s.triple(idx), 6).unwrap();
            assert_eq!(phi_n(&lambda), s.triple(idx));
            let w = q.powf(casimir_direct(&lambda).to_f64().unwrap());
            assert!((probs[idx] / w - ratio).abs() < 1e-9 * ratio);
        }
    }

    #[test]
    fn transfer_density_reproduces_casimir_weights() {
        let q = 0.2;
        let trunc = Truncation::new(18, 6).unwrap();
        let zn = zn_bruteforce(6, q, Truncation::default()).unwrap();
        let d = TransferDensity::new(6, q, zn).unwrap();
        let s = GnSampler::new(6, q, trunc, 1e-6).unwrap();
        let probs = s.probabilities();
        for idx in (0..s.support_len()).step_by(53) {
            let t = s.triple(idx);
            assert!((d.probability(&t) - probs[idx]).abs() < 1e-6 * probs[idx] + 1e-15);
        }
    }
}
