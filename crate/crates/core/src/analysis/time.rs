use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::quadrature::{graded_towards_left, GaussRule};

/// How an error history e(t) is reduced to one number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeAggregation {
    /// e(t) at a single time.
    AtTime { t: f64 },
    /// (∫_0^T e(t)² dt)^{1/2}.
    L2,
    /// max over a sample grid of [0, T].
    LInf,
}

/// Accuracy knobs for the L² and L∞ reductions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregationRule {
    /// Geometric levels of the graded partition after 0 and each jump.
    pub levels: usize,
    pub ratio: f64,
    pub gauss_points: usize,
    /// Base uniform intervals of the L∞ grid (≥ 256).
    pub grid: usize,
    /// Relative change tolerated under one refinement.
    pub tol: f64,
    /// Refinements attempted before giving up.
    pub max_refinements: usize,
}

impl Default for AggregationRule {
    fn default() -> Self {
        Self {
            levels: 24,
            ratio: 0.5,
            gauss_points: 6,
            grid: 256,
            tol: 5e-3,
            max_refinements: 2,
        }
    }
}

/// Result of a time reduction together with its refinement check.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregated {
    pub values: Vec<f64>,
    /// Largest relative change under the last refinement (0 at a single time).
    pub drift: f64,
    pub converged: bool,
}

/// Reduce a vector-valued error history componentwise. The result is
/// accepted when one refinement of the time grid changes every component
/// by at most `rule.tol` (relative); otherwise the grid is refined up to
/// `rule.max_refinements` times before failing.
pub fn time_aggregate<F>(
    f: F,
    aggregation: TimeAggregation,
    horizon: f64,
    jumps: &[f64],
    rule: &AggregationRule,
    exec: Execution,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    let out = time_aggregate_report(f, aggregation, horizon, jumps, rule, exec)?;
    if out.converged {
        Ok(out.values)
    } else {
        Err(Error::Aggregation(format!(
            "relative change {:.3e} after {} refinements exceeds {:.1e}",
            out.drift, rule.max_refinements, rule.tol
        )))
    }
}

/// As `time_aggregate`, returning the finest values with `converged` false
/// instead of failing when the refinement check never passes.
pub fn time_aggregate_report<F>(
    f: F,
    aggregation: TimeAggregation,
    horizon: f64,
    jumps: &[f64],
    rule: &AggregationRule,
    exec: Execution,
) -> Result<Aggregated>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    if !(horizon > 0.0) {
        return Err(Error::ParameterDomain(format!("horizon {horizon} must be positive")));
    }
    if let TimeAggregation::AtTime { t } = aggregation {
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::ParameterDomain(format!("time {t} outside [0, {horizon}]")));
        }
        return Ok(Aggregated {
            values: f(t)?,
            drift: 0.0,
            converged: true,
        });
    }
    let mut refinement = 0;
    let mut previous = reduce(&f, aggregation, horizon, jumps, rule, 0, exec)?;
    loop {
        refinement += 1;
        let next = reduce(&f, aggregation, horizon, jumps, rule, refinement, exec)?;
        let drift = previous
            .iter()
            .zip(&next)
            .map(|(a, b)| if *b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() })
            .fold(0.0, f64::max);
        if drift <= rule.tol || refinement >= rule.max_refinements {
            return Ok(Aggregated {
                values: next,
                drift,
                converged: drift <= rule.tol,
            });
        }
        previous = next;
    }
}

fn reduce<F>(
    f: &F,
    aggregation: TimeAggregation,
    horizon: f64,
    jumps: &[f64],
    rule: &AggregationRule,
    refinement: usize,
    exec: Execution,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    let mut starts = vec![0.0];
    starts.extend(jumps.iter().copied().filter(|&t| t > 0.0 && t < horizon));
    starts.sort_by(f64::total_cmp);
    starts.dedup();
    let mut ends = starts[1..].to_vec();
    ends.push(horizon);
    match aggregation {
        TimeAggregation::L2 => {
            let gauss = GaussRule::new(rule.gauss_points);
            let split = 1usize << refinement;
            let mut nodes = Vec::new();
            for (&a, &b) in starts.iter().zip(&ends) {
                let edges = graded_towards_left(a, b, rule.levels + 2 * refinement, rule.ratio);
                for w in edges.windows(2) {
                    let step = (w[1] - w[0]) / split as f64;
                    for s in 0..split {
                        let lo = w[0] + s as f64 * step;
                        nodes.extend(gauss.on(lo, lo + step));
                    }
                }
            }
            let values = exec.map_slice(&nodes, |&(t, _)| f(t));
            let mut acc: Vec<f64> = Vec::new();
            for ((_, w), v) in nodes.iter().zip(values) {
                let v = v?;
                if acc.is_empty() {
                    acc = vec![0.0; v.len()];
                }
                for (a, x) in acc.iter_mut().zip(&v) {
                    *a += w * x * x;
                }
            }
            Ok(acc.into_iter().map(f64::sqrt).collect())
        }
        TimeAggregation::LInf => {
            let n = rule.grid.max(256) << refinement;
            let dt = horizon / n as f64;
            let mut times: Vec<f64> = (1..=n).map(|i| i as f64 * dt).collect();
            // four times finer over the first four intervals after 0 and
            // after each jump
            for &a in &starts {
                for i in 1..16 {
                    if i % 4 != 0 {
                        let t = a + i as f64 * dt / 4.0;
                        if t < horizon {
                            times.push(t);
                        }
                    }
                }
            }
            times.sort_by(f64::total_cmp);
            let values = exec.map_slice(&times, |&t| f(t));
            let mut acc: Vec<f64> = Vec::new();
            for v in values {
                let v = v?;
                if acc.is_empty() {
                    acc = vec![0.0; v.len()];
                }
                for (a, x) in acc.iter_mut().zip(&v) {
                    *a = a.max(x.abs());
                }
            }
            Ok(acc)
        }
        TimeAggregation::AtTime { t } => f(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl Fn(f64) -> f64 + Sync + Send, agg: TimeAggregation) -> f64 {
        time_aggregate(
            |t| Ok(vec![f(t)]),
            agg,
            1.0,
            &[0.5],
            &AggregationRule::default(),
            Execution::Parallel,
        )
        .unwrap()[0]
    }

    #[test]
    fn constant_and_linear() {
        assert!((run(|_| 0.3, TimeAggregation::L2) - 0.3).abs() < 1e-14);
        assert!((run(|_| 0.3, TimeAggregation::LInf) - 0.3).abs() < 1e-14);
        assert!((run(|t| t, TimeAggregation::L2) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(run(|t| t, TimeAggregation::AtTime { t: 0.25 }), 0.25);
    }

    #[test]
    fn singular_history_converges() {
        // e(t) = t^{0.05}: L² norm (1/1.1)^{1/2}
        let v = run(|t| t.powf(0.05), TimeAggregation::L2);
        assert!((v - (1.0f64 / 1.1).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn unstable_history_is_reported() {
        let bad = time_aggregate(
            |t| Ok(vec![(1.0 / t).sin()]),
            TimeAggregation::L2,
            1.0,
            &[],
            &AggregationRule {
                tol: 1e-12,
                ..Default::default()
            },
            Execution::Sequential,
        );
        assert!(matches!(bad, Err(Error::Aggregation(_))));
    }
}
