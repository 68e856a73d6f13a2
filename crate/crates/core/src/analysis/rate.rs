use serde::{Deserialize, Serialize};

use super::time::TimeAggregation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    H1,
}

impl NormKind {
    pub fn label(self) -> &'static str {
        match self {
            NormKind::L2 => "L2",
            NormKind::H1 => "H1",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            NormKind::L2 => 0,
            NormKind::H1 => 1,
        }
    }
}

/// One error value of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub level: u32,
    pub h: f64,
    pub norm: NormKind,
    pub aggregation: TimeAggregation,
    pub value: f64,
    /// A truncation or aggregation guard did not pass.
    pub degraded: bool,
}

/// Least-squares slope of log(error) against log(h) and the RMS residual of
/// the fit in log space.
pub fn fit_rate(h: &[f64], errors: &[f64]) -> Result<(f64, f64)> {
    if h.len() != errors.len() || h.len() < 3 {
        return Err(Error::ParameterDomain(format!(
            "a rate needs at least 3 levels, got {}",
            h.len().min(errors.len())
        )));
    }
    if errors.iter().chain(h).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::ParameterDomain(
            "rate fit needs positive finite errors and mesh sizes".into(),
        ));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    Ok((slope, (rss / n).sqrt()))
}

/// Records of one (norm, aggregation) column with their fitted rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub records: Vec<ErrorRecord>,
    pub rate: Option<f64>,
    pub residual: Option<f64>,
}

impl ConvergenceReport {
    /// Sorts by level; the rate is left empty with fewer than 3 levels.
    pub fn from_records(mut records: Vec<ErrorRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.level);
        if records.len() < 3 {
            return Ok(Self {
                records,
                rate: None,
                residual: None,
            });
        }
        let h: Vec<f64> = records.iter().map(|r| r.h).collect();
        let e: Vec<f64> = records.iter().map(|r| r.value).collect();
        let (rate, residual) = fit_rate(&h, &e)?;
        Ok(Self {
            records,
            rate: Some(rate),
            residual: Some(residual),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_rates() {
        let h: Vec<f64> = (3..8).map(|k| 0.5f64.powi(k)).collect();
        let e2: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        let (r, res) = fit_rate(&h, &e2).unwrap();
        assert!((r - 2.0).abs() < 1e-12 && res < 1e-12);
        let e5: Vec<f64> = h.iter().map(|h| h.sqrt()).collect();
        assert!((fit_rate(&h, &e5).unwrap().0 - 0.5).abs() < 1e-12);
        assert!(fit_rate(&h[..2], &e2[..2]).is_err());
        let mut z = e2.clone();
        z[1] = 0.0;
        assert!(fit_rate(&h, &z).is_err());
    }
}
