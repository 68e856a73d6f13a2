use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fracfem::analysis::ErrorEvaluator;
use fracfem::fem::{Mesh, Mesh1D, NodalField, SchemeKind, SemidiscreteSolver};
use fracfem::l1::l1_march;
use fracfem::special::{ml_eval, ml_oracle, FracOrder, MittagLeffler, MlParams};
use fracfem::study::{fmt_sig, resolve_output_dir, run_study_with_workers, ExampleId, StudyConfig, TableArtifact};
use fracfem::{Error, Execution, Result};

#[derive(Parser)]
#[command(
    name = "fracfem",
    version,
    about = "Finite element convergence studies for time-fractional diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study described by a JSON config.
    Study {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for concurrent cells (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run every loop on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Evaluate E_{α,β}(-x).
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        /// Also print the extended-precision value and the relative error.
        #[arg(long)]
        oracle: bool,
    },
    /// Re-emit stored study artifacts as CSV or gnuplot input.
    Emit {
        #[arg(long, value_enum)]
        format: EmitFormat,
        /// Artifact to read (default: every `*.artifact.json` in the output
        /// directory).
        #[arg(long)]
        artifact: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one example on one mesh and write the nodal values.
    Solve {
        #[arg(long)]
        example: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        level: u32,
        #[arg(long, value_enum, default_value = "lumped-mass")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// L1 time step (example 1c).
        #[arg(long, default_value_t = 2e-4)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitFormat {
    Csv,
    Plot,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Galerkin,
    LumpedMass,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Galerkin => SchemeKind::Galerkin,
            SchemeArg::LumpedMass => SchemeKind::LumpedMass,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study {
            config,
            workers,
            out,
            sequential,
        } => study(&config, workers, out.as_deref(), sequential),
        Command::MlEval { alpha, beta, x, oracle } => ml(alpha, beta, x, oracle),
        Command::Emit { format, artifact, out } => emit(format, artifact.as_deref(), out.as_deref()),
        Command::Solve {
            example,
            alpha,
            level,
            scheme,
            t,
            tau,
            out,
        } => solve(&example, alpha, level, scheme.into(), t, tau, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

fn study(config: &Path, workers: Option<usize>, out: Option<&Path>, sequential: bool) -> Result<()> {
    let config = StudyConfig::load(config)?;
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let artifact = run_study_with_workers(&config, exec, workers)?;
    let dir = config.resolve_output_dir(out);
    let stem = config.stem();
    let json = dir.join(format!("{stem}.artifact.json"));
    let csv = dir.join(format!("{stem}.csv"));
    artifact.save(&json)?;
    artifact.emit_csv(&csv)?;
    print!("{}", artifact.to_csv());
    let degraded = artifact.rows.iter().filter(|r| r.degraded).count();
    if degraded > 0 {
        eprintln!("warning: {degraded} cells degraded (guard tolerance not met)");
    }
    eprintln!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

fn ml(alpha: f64, beta: f64, x: f64, oracle: bool) -> Result<()> {
    let params = MlParams::new(alpha, beta)?;
    let value = ml_eval(params, x)?;
    let regime = MittagLeffler::new(params).regime(x);
    println!("E_{{{alpha},{beta}}}(-{x}) = {value:.17e} ({regime})");
    if oracle {
        let exact = ml_oracle(params, x, 30)?.to_f64();
        let rel = if exact == 0.0 {
            (value - exact).abs()
        } else {
            ((value - exact) / exact).abs()
        };
        println!("oracle = {exact:.17e}, relative error = {rel:.3e}");
    }
    Ok(())
}

fn emit(format: EmitFormat, artifact: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let dir = resolve_output_dir(out, None);
    let sources = match artifact {
        Some(p) => vec![p.to_path_buf()],
        None => {
            let mut found: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| Error::Validation(format!("cannot list {}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.to_string_lossy().ends_with(".artifact.json"))
                .collect();
            found.sort();
            found
        }
    };
    if sources.is_empty() {
        return Err(Error::Validation(format!("no *.artifact.json in {}", dir.display())));
    }
    for path in sources {
        let artifact = TableArtifact::load(&path)?;
        let stem = artifact.config.stem();
        match format {
            EmitFormat::Csv => {
                let csv = dir.join(format!("{stem}.csv"));
                artifact.emit_csv(&csv)?;
                eprintln!("wrote {}", csv.display());
            }
            EmitFormat::Plot => {
                for p in artifact.emit_plot(&dir, &stem)? {
                    eprintln!("wrote {}", p.display());
                }
            }
        }
    }
    Ok(())
}

fn solve(
    example: &str,
    alpha: f64,
    level: u32,
    scheme: SchemeKind,
    t: f64,
    tau: f64,
    out: Option<&Path>,
) -> Result<()> {
    let example = ExampleId::parse(example)?;
    let order = FracOrder::new(alpha)?;
    let source = example.source();
    if !(t > 0.0 && t <= source.temporal.horizon()) {
        return Err(Error::Validation(format!(
            "time {t} outside (0, {}]",
            source.temporal.horizon()
        )));
    }
    let exec = Execution::default();
    let field = if example == ExampleId::Variable1c {
        let (k, q) = example.coefficients();
        l1_march(&Mesh1D::dyadic(level)?, k, q, scheme, order, &source, tau, t, exec)?.last()?
    } else {
        let mesh = example.mesh(level)?;
        let u = SemidiscreteSolver::new(mesh, scheme, example.projection(), order, &source)?
            .with_execution(exec)
            .solve_at(t)?;
        let evaluator = ErrorEvaluator::new(&source, order, 1024, exec)?;
        let e = evaluator.evaluate(&u, t)?;
        println!(
            "L2 error {} H1 error {}",
            fmt_sig(e.l2.value, 6),
            fmt_sig(e.h1.value, 6)
        );
        u
    };
    let dir = resolve_output_dir(out, None);
    let path = dir.join(format!(
        "solve_{}_alpha{}_k{level}_t{}.csv",
        example.name(),
        fmt_sig(alpha, 6),
        fmt_sig(t, 6)
    ));
    write_field(&path, &field)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn write_field(path: &Path, field: &NodalField) -> Result<()> {
    let mut text = String::new();
    match field.mesh {
        Mesh::D1(m) => {
            text.push_str("x,u\n");
            for (k, v) in field.values.iter().enumerate() {
                text.push_str(&format!("{},{}\n", fmt_sig(m.node(k + 1), 6), fmt_sig(*v, 10)));
            }
        }
        Mesh::D2(m) => {
            text.push_str("x,y,u\n");
            let side = m.side();
            for (idx, v) in field.values.iter().enumerate() {
                let (i, j) = (idx / side + 1, idx % side + 1);
                let (x, y) = (i as f64 * m.h(), j as f64 * m.h());
                text.push_str(&format!("{},{},{}\n", fmt_sig(x, 6), fmt_sig(y, 6), fmt_sig(*v, 10)));
            }
        }
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
