use crate::analysis::{
    nested_error, time_aggregate_report, AggregationRule, ErrorEvaluator, NormKind, TimeAggregation,
};
use crate::error::{Error, Result};
use crate::fem::{Mesh1D, SemidiscreteSolver};
use crate::l1::l1_march;
use crate::par::Execution;
use crate::special::FracOrder;

use super::artifact::{TableArtifact, TableRow};
use super::config::{ExampleId, StudyConfig};

/// Run every (α, level) cell of a study. Cells for different α run
/// concurrently; the artifact does not depend on the execution mode.
pub fn run_study(config: &StudyConfig, exec: Execution) -> Result<TableArtifact> {
    run_study_with_workers(config, exec, None)
}

/// As `run_study` inside a pool of `workers` threads.
pub fn run_study_with_workers(config: &StudyConfig, exec: Execution, workers: Option<usize>) -> Result<TableArtifact> {
    config.validate()?;
    if workers == Some(0) {
        return Err(Error::Validation("workers must be at least 1".into()));
    }
    let cells = exec.install(workers, || {
        exec.map_slice(&config.alphas, |&alpha| run_cell(config, alpha, exec))
    });
    let mut rows = Vec::new();
    for cell in cells {
        rows.extend(cell?);
    }
    TableArtifact::assemble(config, rows)
}

/// Rows of a single α.
pub fn run_cell(config: &StudyConfig, alpha: f64, exec: Execution) -> Result<Vec<TableRow>> {
    let order = FracOrder::new(alpha)?;
    let per_level = match config.example {
        ExampleId::Variable1c => l1_cell(config, order, exec)?,
        _ => spectral_cell(config, order, exec)?,
    };
    let mut rows = Vec::new();
    for (&level, errors) in config.levels.iter().zip(per_level) {
        let h = config.example.mesh(level)?.h();
        for &norm in &config.norms {
            let (value, degraded) = errors.get(norm);
            rows.push(TableRow {
                alpha,
                norm,
                level,
                h,
                error: value,
                degraded,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
struct LevelErrors {
    l2: (f64, bool),
    h1: (f64, bool),
}

impl LevelErrors {
    fn get(&self, norm: NormKind) -> (f64, bool) {
        match norm {
            NormKind::L2 => self.l2,
            NormKind::H1 => self.h1,
        }
    }
}

/// Semidiscrete solutions against the spectral reference. The history of
/// every (level, norm) error at truncations J and J/2 is reduced in one
/// vector-valued aggregation so the reference is computed once per time.
fn spectral_cell(config: &StudyConfig, alpha: FracOrder, exec: Execution) -> Result<Vec<LevelErrors>> {
    let example = config.example;
    let source = example.source();
    let solvers = config
        .levels
        .iter()
        .map(|&k| {
            SemidiscreteSolver::new(example.mesh(k)?, config.scheme, example.projection(), alpha, &source)
                .map(|s| s.with_execution(exec))
        })
        .collect::<Result<Vec<_>>>()?;
    let evaluator = ErrorEvaluator::new(&source, alpha, config.reference_truncation(), exec)?;
    let history = |t: f64| -> Result<Vec<f64>> {
        let reference = evaluator.reference_at(t)?;
        let mut out = Vec::with_capacity(4 * solvers.len());
        for solver in &solvers {
            let u = solver.solve_at(t)?;
            let e = evaluator.evaluate_with(&u, &reference, t)?;
            out.extend([e.l2.value, e.l2.half_truncation, e.h1.value, e.h1.half_truncation]);
        }
        Ok(out)
    };
    let rule = AggregationRule {
        tol: config.tolerances.aggregation,
        ..AggregationRule::default()
    };
    let temporal = &source.temporal;
    let agg = time_aggregate_report(
        history,
        config.aggregation,
        temporal.horizon(),
        temporal.jumps(),
        &rule,
        exec,
    )?;
    let tol = config.tolerances.truncation_drift;
    let guard = |value: f64, half: f64| {
        let drift = if value == 0.0 {
            0.0
        } else {
            (value - half).abs() / value
        };
        (value, !agg.converged || !value.is_finite() || drift > tol)
    };
    Ok(agg
        .values
        .chunks(4)
        .map(|c| LevelErrors {
            l2: guard(c[0], c[1]),
            h1: guard(c[2], c[3]),
        })
        .collect())
}

/// L1 time stepping on each level against the same scheme on the benchmark
/// mesh with the same time step.
fn l1_cell(config: &StudyConfig, alpha: FracOrder, exec: Execution) -> Result<Vec<LevelErrors>> {
    let TimeAggregation::AtTime { t } = config.aggregation else {
        return Err(Error::Validation("example 1c supports only at_time aggregation".into()));
    };
    let example = config.example;
    let source = example.source();
    let (k, q) = example.coefficients();
    let tau = config.tolerances.tau;
    let march = |level: u32| -> Result<_> {
        let mesh = Mesh1D::dyadic(level)?;
        l1_march(&mesh, k, q, config.scheme, alpha, &source, tau, t, exec)?.last()
    };
    let benchmark = march(config.tolerances.benchmark_level)?;
    let fields = exec.map_slice(&config.levels, |&level| march(level));
    fields
        .into_iter()
        .map(|u| {
            let u = u?;
            let (l2, h1) = nested_error(&u, &benchmark)?;
            Ok(LevelErrors {
                l2: (l2, !l2.is_finite()),
                h1: (h1, !h1.is_finite()),
            })
        })
        .collect()
}
