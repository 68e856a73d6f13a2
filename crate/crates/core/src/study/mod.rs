//! Configuration-driven convergence studies and their CSV and plot
//! artifacts.

mod artifact;
mod config;
mod format;
mod run;

pub use artifact::{Provenance, RateRow, TableArtifact, TableRow};
pub use config::{resolve_output_dir, ExampleId, StudyConfig, Tolerances, SCHEMA_VERSION};
pub use format::fmt_sig;
pub use run::{run_cell, run_study, run_study_with_workers};
