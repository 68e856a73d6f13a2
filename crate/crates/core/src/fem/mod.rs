//! Piecewise-linear finite elements on uniform meshes of the unit interval
//! and of the unit square (one global diagonal orientation), semidiscrete
//! Galerkin and lumped-mass solutions through explicit discrete eigenpairs.

mod assembly;
mod load;
mod mesh;
mod semidiscrete;
mod spectrum;

pub use assembly::{assemble_matrices, Matrices1D};
pub use load::{load_vector, project_source, project_source_with, Projection};
pub use mesh::{Mesh, Mesh1D, Mesh2D, NodalField};
pub use semidiscrete::{quadrature_error_apply, semidiscrete_solve, SemidiscreteSolver};
pub use spectrum::{discrete_spectrum, DiscreteSpectrum};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Galerkin,
    LumpedMass,
}
