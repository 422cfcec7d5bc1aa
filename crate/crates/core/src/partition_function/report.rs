//! Residuals of the truncated `1/N²` expansion and their decay rate.

use serde::{Deserialize, Serialize};

use super::expansion::{chiral_coefficient, expansion_coeff};
use super::{q_from_t, zn_bruteforce, zn_chiral, ChiralSector, Truncation};
use crate::certified::CertifiedValue;
use crate::error::{Error, Result};

/// Coefficient of `N^{-2k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub k: u32,
    pub value: f64,
    pub error: f64,
}

/// `r_p(N) = Z_N - Σ_{k<=p} a_{2k} N^{-2k}` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub value: f64,
    pub error: f64,
    /// The certified interval excludes zero, so `|r_p(N)|` is known to within its error.
    pub resolved: bool,
}

/// Coefficients, residuals and fitted slope for one of the two sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub coefficients: Vec<CoefficientEntry>,
    pub residuals: Vec<ResidualPoint>,
    /// Least-squares slope of `log|r_p|` against `log N` over the resolved points.
    pub slope: Option<f64>,
    /// Some residual could not be separated from zero.
    pub inconclusive: bool,
    /// All residuals share one sign. Informational.
    pub sign_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub t: f64,
    pub q: f64,
    pub order: u32,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<usize>,
    pub truncation: Truncation,
    pub series_degree: usize,
    pub full: SectorReport,
    pub chiral: SectorReport,
}

impl ExpansionReport {
    /// One row per sector and grid point: `(sector, N, value, error, resolved)`.
    pub fn csv_rows(&self) -> Vec<(String, usize, f64, f64, bool)> {
        let mut rows = Vec::new();
        for (name, sector) in [("full", &self.full), ("chiral", &self.chiral)] {
            for r in &sector.residuals {
                rows.push((name.to_string(), r.n, r.value, r.error, r.resolved));
            }
        }
        rows
    }
}

/// Least-squares slope of `y` against `x`; `None` for fewer than two points.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn sector_report(
    coefficients: &[CertifiedValue],
    grid: &[usize],
    value_at: impl Fn(usize) -> Result<CertifiedValue>,
) -> Result<SectorReport> {
    let mut residuals = Vec::new();
    for &n in grid {
        let inv = 1.0 / (n as f64 * n as f64);
        let mut predicted = CertifiedValue::exact(0.0);
        let mut scale = 1.0;
        for c in coefficients {
            predicted = predicted + c.scale(scale);
            scale *= inv;
        }
        let r = value_at(n)? - predicted;
        residuals.push(ResidualPoint { n, value: r.value, error: r.error, resolved: r.value.abs() > r.error });
    }
    let fit: Vec<(f64, f64)> =
        residuals.iter().filter(|r| r.resolved).map(|r| ((r.n as f64).ln(), r.value.abs().ln())).collect();
    let inconclusive = residuals.iter().any(|r| !r.resolved);
    let sign_consistent = residuals.iter().all(|r| r.value > 0.0) || residuals.iter().all(|r| r.value < 0.0);
    Ok(SectorReport {
        coefficients: coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| CoefficientEntry { k: 2 * k as u32, value: c.value, error: c.error })
            .collect(),
        residuals,
        slope: least_squares_slope(&fit),
        inconclusive,
        sign_consistent,
    })
}

/// Residuals of the order-`p` truncation of the full and the chiral expansion
/// along `grid`, with their log-log slopes. The chiral sum is the balanced sector.
pub fn verify_expansion(
    grid: &[usize],
    t: f64,
    order: u32,
    truncation: Truncation,
    series_degree: usize,
) -> Result<ExpansionReport> {
    let q = q_from_t(t)?;
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("the N grid must be nonempty and strictly increasing".into()));
    }
    if let Some(&n) = grid.iter().find(|&&n| n < 2 * order as usize + 2) {
        return Err(Error::InvalidParameter(format!("grid point N = {n} is below 2p + 2 = {}", 2 * order + 2)));
    }
    let full_coeffs: Vec<CertifiedValue> =
        (0..=order).map(|k| expansion_coeff(k, t, series_degree)).collect::<Result<_>>()?;
    let chiral_coeffs: Vec<CertifiedValue> =
        (0..=order).map(|k| chiral_coefficient(k, t, series_degree)).collect::<Result<_>>()?;
    let full = sector_report(&full_coeffs, grid, |n| zn_bruteforce(n, q, truncation))?;
    let chiral = sector_report(&chiral_coeffs, grid, |n| zn_chiral(n, q, truncation.m_part, ChiralSector::Balanced))?;
    Ok(ExpansionReport { t, q, order, n_grid: grid.to_vec(), truncation, series_degree, full, chiral })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0].iter().map(|&n| (n.ln(), (3.0 * n.powi(-2)).ln())).collect();
        assert!((least_squares_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(least_squares_slope(&pts[..1]), None);
    }

    #[test]
    fn rejects_bad_grids() {
        let tr = Truncation::default();
        assert!(verify_expansion(&[8, 8], 2.0, 0, tr, 80).is_err());
        assert!(verify_expansion(&[3, 8], 2.0, 1, tr, 80).is_err());
        assert!(verify_expansion(&[], 2.0, 0, tr, 80).is_err());
    }

    #[test]
    fn leading_order_residuals_decay() {
        let t = -2.0 * 0.2f64.ln();
        let report = verify_expansion(&[8, 16, 32], t, 0, Truncation::default(), 120).unwrap();
        assert!(!report.full.inconclusive);
        assert!(report.full.slope.unwrap() < -1.5, "{:?}", report.full);
        assert_eq!(report.csv_rows().len(), 6);
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["full"]["residuals"][0]["N"].is_number());
    }
}
