//! Exact and certified computations for the Gaussian measure on the highest
//! weights of `U(N)`, `ℙ(λ) ∝ q^{c_2(λ)}`.
//!
//! - [`partition`]: partitions, contents, counting and `(size, content)` tables.
//! - [`series`]: truncated `q`-series with exact coefficients and certified tails.
//! - [`weight`]: highest weights, the Casimir `c_2` and the bijection with triples `(α, β, n)`.
//! - [`hurwitz`]: Hurwitz numbers of the torus and their generating functions.
//! - [`partition_function`]: `Z_N(q)`, moments of the coupling and the `1/N²` expansion.
//! - [`measures`]: samplers, deviation bounds and total-variation decoupling.
//!
//! Numerical results are [`CertifiedValue`]s: a value with a rigorous error bound.

pub mod certified;
pub mod error;
pub mod hurwitz;
pub mod measures;
pub mod partition;
pub mod partition_function;
pub mod series;
pub mod weight;

pub use certified::CertifiedValue;
pub use error::{Error, Result};
pub use hurwitz::HurwitzSpec;
pub use measures::{MeasureKind, MeasureSpec, RandomSource};
pub use partition::Partition;
pub use partition_function::{ExpansionReport, Truncation};
pub use series::{TailModel, TruncatedSeries};
pub use weight::{HighestWeight, WeightTriple};

/// Version of this library, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
