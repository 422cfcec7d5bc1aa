use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use casimir_core::partition_function::{q_from_t, t_from_q, ChiralSector, Truncation};
use casimir_core::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Directory that relative `--out` paths are resolved against.
pub const OUT_DIR_VAR: &str = "CASIMIR_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "casimir", version, about = "Certified computations for the Gaussian measure on the dual of U(N)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Nome in (0,1). Mutually exclusive with --t.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Area, with q = exp(-t/2). Mutually exclusive with --q.
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Rank of U(N).
    #[arg(long = "N", global = true)]
    pub rank: Option<usize>,
    /// Comma-separated ranks.
    #[arg(long = "N-grid", global = true, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// Expansion order.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Largest partition size kept in truncated sums.
    #[arg(long = "M-part", global = true)]
    pub m_part: Option<u32>,
    /// Largest |n| kept in truncated sums.
    #[arg(long = "M-int", global = true)]
    pub m_int: Option<u32>,
    /// Degree of the q-series.
    #[arg(long = "M-series", global = true)]
    pub m_series: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; relative paths go under $CASIMIR_OUT_DIR when it is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Balanced,
    FullLength,
}

impl From<Sector> for ChiralSector {
    fn from(s: Sector) -> Self {
        match s {
            Sector::Balanced => ChiralSector::Balanced,
            Sector::FullLength => ChiralSector::FullLength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesName {
    Phi,
    InversePhi,
    Theta,
    /// Torus Hurwitz generating function of the cover genus given by --genus.
    Hurwitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    QUniform,
    G1,
    Gn,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Command {
    /// Certified Z_N(q).
    Zn,
    /// Certified chiral partition function.
    Chiral {
        #[arg(long, value_enum, default_value = "balanced")]
        sector: Sector,
    },
    /// Coefficients a_0, a_2, ..., a_{2p} of the 1/N² expansion.
    Coeffs,
    /// Residuals of the truncated expansion along --N-grid.
    Verify,
    /// Table of H_1(n, 2k).
    Hurwitz {
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        #[arg(long, default_value_t = 2)]
        k_max: u32,
    },
    /// Exact coefficients of a q-series, evaluated at q when one is given.
    Series {
        #[arg(long, value_enum)]
        which: SeriesName,
        #[arg(long, default_value_t = 2)]
        genus: u32,
    },
    /// Moments of n under G_1, of F by two independent routes, and one bracket A.
    Moments {
        /// Power of n and of F.
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Genus index of the bracket.
        #[arg(long, default_value_t = 1)]
        genus: u32,
        /// Power of |α| in the bracket.
        #[arg(long, default_value_t = 0)]
        ell: u32,
        /// Size cutoff of the raw class-sum route.
        #[arg(long, default_value_t = 25)]
        raw_size: u32,
    },
    /// Exact samples, one JSON object per line.
    Sample {
        #[arg(long, value_enum)]
        measure: Measure,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Largest partition size reachable by the q-uniform sampler.
        #[arg(long = "M-cap", default_value_t = casimir_core::measures::DEFAULT_SIZE_CAP)]
        m_cap: u32,
        /// Largest admissible truncation error of the rank-N sampler.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Deviation inequalities for the q-uniform measure along --N-grid.
    Deviation,
    /// Certified total variation to the product measure, at --N or along --N-grid.
    Tv,
    /// Fast invariant checks; exits 0 when all hold.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Zn => "zn",
            Command::Chiral { .. } => "chiral",
            Command::Coeffs => "coeffs",
            Command::Verify => "verify",
            Command::Hurwitz { .. } => "hurwitz",
            Command::Series { .. } => "series",
            Command::Moments { .. } => "moments",
            Command::Sample { .. } => "sample",
            Command::Deviation => "deviation",
            Command::Tv => "tv",
            Command::Selftest => "selftest",
        }
    }
}

/// Validated settings, echoed verbatim into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub q: Option<f64>,
    pub t: Option<f64>,
    #[serde(rename = "N")]
    pub rank: Option<usize>,
    #[serde(rename = "N_grid")]
    pub grid: Option<Vec<usize>>,
    pub p: u32,
    #[serde(rename = "M_part")]
    pub m_part: u32,
    #[serde(rename = "M_int")]
    pub m_int: u32,
    #[serde(rename = "M_series")]
    pub m_series: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn truncation(&self) -> Result<Truncation> {
        Truncation::new(self.m_part, self.m_int)
    }

    pub fn require_q(&self) -> Result<f64> {
        self.q.ok_or_else(|| Error::InvalidParameter(format!("`{}` needs --q or --t", self.command.name())))
    }

    pub fn require_t(&self) -> Result<f64> {
        self.t.ok_or_else(|| Error::InvalidParameter(format!("`{}` needs --q or --t", self.command.name())))
    }

    pub fn require_rank(&self) -> Result<usize> {
        match self.rank {
            Some(0) => Err(Error::InvalidParameter("--N must be positive".into())),
            Some(n) => Ok(n),
            None => Err(Error::InvalidParameter(format!("`{}` needs --N", self.command.name()))),
        }
    }

    pub fn require_grid(&self) -> Result<Vec<usize>> {
        self.grid
            .clone()
            .filter(|g| !g.is_empty())
            .ok_or_else(|| Error::InvalidParameter(format!("`{}` needs --N-grid", self.command.name())))
    }
}

impl Cli {
    pub fn resolve(&self) -> Result<RunConfig> {
        let c = &self.common;
        let (q, t) = match (c.q, c.t) {
            (Some(_), Some(_)) => return Err(Error::InvalidParameter("give either --q or --t, not both".into())),
            (Some(q), None) => (Some(q), Some(t_from_q(q)?)),
            (None, Some(t)) => (Some(q_from_t(t)?), Some(t)),
            (None, None) => (None, None),
        };
        // enumerating samplers and the total-variation sum scale with the square of the region
        let default_part = match self.command {
            Command::Sample { .. } | Command::Tv => 20,
            _ => Truncation::default().m_part,
        };
        let base = Truncation::with_part(c.m_part.unwrap_or(default_part));
        let m_int = c.m_int.unwrap_or(base.m_int);
        let out = c.out.as_ref().map(|p| match std::env::var_os(OUT_DIR_VAR) {
            Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
            _ => p.clone(),
        });
        let run = RunConfig {
            command: self.command.clone(),
            q,
            t,
            rank: c.rank,
            grid: c.grid.clone(),
            p: c.p.unwrap_or(0),
            m_part: base.m_part,
            m_int,
            m_series: c.m_series.unwrap_or(160),
            seed: c.seed.unwrap_or(0),
            format: c.format.unwrap_or(Format::Json),
            out,
        };
        run.truncation()?;
        if run.m_series == 0 {
            return Err(Error::InvalidParameter("--M-series must be positive".into()));
        }
        Ok(run)
    }
}
