//! The measures `𝒰(q)`, `𝒢_1(q)` and `𝒢_N(q)`: exact samplers, deviation
//! bounds for `𝒰(q)`, and the total-variation distance between the pushforward
//! of `𝒢_N(q)` and the product `𝒰(q)⊗𝒰(q)⊗𝒢_1(q)`.

mod decoupling;
mod deviation;
mod samplers;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::certified::CertifiedValue;
use crate::error::{check_q, Error, Result};
use crate::hurwitz::{hurwitz_gf, hurwitz_number, hurwitz_tail};
use crate::partition::partition_count_f64;
use crate::partition_function::{zn_bruteforce, Truncation};
use crate::series::{euler_phi, theta, TailModel};

pub use decoupling::{total_variation, tv_decoupling};
pub use deviation::{deviation_check, DeviationRow};
pub use samplers::{
    sample_g1, sample_q_uniform, G1Sampler, GnSampler, QUniformSampler, TransferDensity, DEFAULT_SIZE_CAP,
};

/// Which measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MeasureKind {
    /// `ℙ(α) = φ(q) q^{|α|}`.
    QUniform,
    /// `ℙ(n) = q^{n²}/θ(q)` on `ℤ`.
    G1,
    /// `ℙ(λ) = q^{c_2(λ)}/Z_N(q)` on highest weights of `U(N)`.
    Gn { rank: usize },
    /// `ℙ(α) ∝ K(α)^{2g'-2} q^{|α|}` over the torus.
    Frobenius { base_genus: u32, cover_genus: u32 },
    /// `ℙ(α) ∝ K(α)^{2g'-2}` on the partitions of `size`.
    PlancherelHurwitz { base_genus: u32, cover_genus: u32, size: u32 },
}

/// A measure together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    /// Absent for the Plancherel–Hurwitz measures, which do not depend on `q`.
    pub q: Option<f64>,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind, q: Option<f64>) -> Result<Self> {
        match (kind, q) {
            (MeasureKind::PlancherelHurwitz { .. }, None) => {}
            (MeasureKind::PlancherelHurwitz { .. }, Some(_)) => {
                return Err(Error::InvalidParameter("Plancherel-Hurwitz measures take no q".into()))
            }
            (_, Some(q)) => check_q(q)?,
            (_, None) => return Err(Error::InvalidParameter("this measure needs q".into())),
        }
        Ok(Self { kind, q })
    }

    /// Certified normalising constant: `φ(q)` for `𝒰(q)` (the weight of the
    /// empty partition), `θ(q)`, `Z_N(q)`, `𝓕_{1,g'}(q)` or `H_1(n, 2g'-2)`.
    pub fn normalization(&self, degree: usize) -> Result<CertifiedValue> {
        let value = match (self.kind, self.q) {
            (MeasureKind::QUniform, Some(q)) => euler_phi(degree).evaluate(q, TailModel::UNIT)?,
            (MeasureKind::G1, Some(q)) => theta(degree).evaluate(q, TailModel::THETA)?,
            (MeasureKind::Gn { rank }, Some(q)) => zn_bruteforce(rank, q, Truncation::default())?,
            (MeasureKind::Frobenius { base_genus, cover_genus }, Some(q)) => {
                if base_genus != 1 {
                    return Err(Error::InvalidParameter("Frobenius measures are implemented over the torus".into()));
                }
                hurwitz_gf(cover_genus, degree)?.evaluate(q, hurwitz_tail(cover_genus, 0))?
            }
            (MeasureKind::PlancherelHurwitz { base_genus, cover_genus, size }, None) => {
                if cover_genus == 0 {
                    return Err(Error::InvalidParameter("cover genus must be positive".into()));
                }
                let h = hurwitz_number(base_genus, size, 2 * cover_genus - 2)?;
                CertifiedValue::exact(num_traits::ToPrimitive::to_f64(&h).unwrap_or(f64::NAN))
            }
            _ => return Err(Error::InvalidParameter("q does not match the measure".into())),
        };
        if value.lower() <= 0.0 {
            return Err(Error::Uncertifiable(format!("normalisation {value} is not certified positive")));
        }
        Ok(value)
    }
}

/// A seeded ChaCha8 stream. Identical `(seed, stream)` pairs give identical
/// draws on every platform.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// An independent child stream: child `i` of stream `s` is stream `(s << 32) | (i + 1)`.
    pub fn split(&self, index: u32) -> Self {
        Self::with_stream(self.seed, (self.stream << 32) | (u64::from(index) + 1))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u128) -> u128 {
        self.rng.random_range(0..bound)
    }
}

/// Index of the first cumulative weight exceeding `u · total`.
pub(crate) fn inverse_cdf(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("nonempty support");
    let x = u * total;
    cumulative.partition_point(|&c| c <= x).min(cumulative.len() - 1)
}

/// Pearson χ² p-value of observed counts against cell probabilities.
///
/// Cells with expected count below 5 are pooled together with the
/// probability not covered by `probabilities`.
pub fn chi_square_p_value(observed: &[u64], probabilities: &[f64]) -> Result<f64> {
    if observed.len() != probabilities.len() {
        return Err(Error::InvalidParameter("observed and expected cells differ in number".into()));
    }
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, (1.0 - probabilities.iter().sum::<f64>()).max(0.0) * n);
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = p * n;
        if e < 5.0 {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled.1 >= 5.0 {
        cells.push(pooled);
    } else if let Some(last) = cells.last_mut() {
        last.0 += pooled.0;
        last.1 += pooled.1;
    }
    if cells.len() < 2 {
        return Err(Error::InvalidParameter("fewer than two cells with expected count >= 5".into()));
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dist = ChiSquared::new((cells.len() - 1) as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(dist.sf(stat))
}

/// Exact mean size `𝔼|α|` under `𝒰(q)`, summed up to `max_size` with a certified tail.
pub fn q_uniform_mean_size(q: f64, max_size: usize) -> Result<CertifiedValue> {
    check_q(q)?;
    let partial: f64 = (1..=max_size).map(|n| n as f64 * partition_count_f64(n) * q.powi(n as i32)).sum();
    let tail = TailModel::PARTITION.with_d(1).bound(q, max_size)?;
    let phi = euler_phi(max_size.max(60)).evaluate(q, TailModel::UNIT)?;
    Ok(phi * CertifiedValue::new(partial, tail + 1e-12 * partial))
}

/// One line of a sample dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleRecord {
    Triple { alpha: Vec<u32>, beta: Vec<u32>, n: i64 },
    Weight { lambda: Vec<i64> },
    Partition { alpha: Vec<u32> },
    Integer { n: i64 },
}

/// Header line of a sample dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub seed: u64,
    pub stream: u64,
    pub measure: MeasureSpec,
    pub count: usize,
}

/// Writes the header and then one JSON object per record, one per line.
pub fn write_samples_jsonl<W: Write>(
    mut out: W,
    header: &SampleHeader,
    records: &[SampleRecord],
) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, header)?;
    writeln!(out)?;
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}
