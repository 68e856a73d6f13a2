use super::load::{project_source_with, Projection};
use super::spectrum::{discrete_spectrum, DiscreteSpectrum};
use super::{Mesh, NodalField, SchemeKind};
use crate::error::{Error, Result};
use crate::linalg::solve_five_point;
use crate::par::Execution;
use crate::reference::mode_response;
use crate::special::{FracOrder, Kernels};
use crate::spectral::{SourceTerm, TimeProfile};

/// Semidiscrete solution u_h(t) = Σ_i m(λ_i^h, t) (f_h, φ_i^h) φ_i^h in the
/// explicit discrete eigenbasis of the scheme.
#[derive(Debug, Clone)]
pub struct SemidiscreteSolver {
    spectrum: DiscreteSpectrum,
    kernels: Kernels,
    temporal: TimeProfile,
    projected: NodalField,
    source_coeffs: Vec<f64>,
    exec: Execution,
}

impl SemidiscreteSolver {
    /// `projection` defaults to the one matching the scheme when `None`.
    pub fn new(
        mesh: Mesh,
        scheme: SchemeKind,
        projection: Option<Projection>,
        alpha: FracOrder,
        source: &SourceTerm,
    ) -> Result<Self> {
        source.temporal.validate()?;
        let spectrum = discrete_spectrum(mesh, scheme)?;
        let projection = projection.unwrap_or_else(|| scheme.into());
        let projected = project_source_with(mesh, projection, &source.spatial)?;
        let weighted = match scheme {
            SchemeKind::Galerkin => mesh.mass_apply(&projected.values),
            SchemeKind::LumpedMass => {
                let w = mesh.lumped_weight();
                projected.values.iter().map(|v| v * w).collect()
            }
        };
        let source_coeffs = spectrum.analyze(&weighted);
        Ok(Self {
            spectrum,
            kernels: Kernels::new(alpha),
            temporal: source.temporal.clone(),
            projected,
            source_coeffs,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn spectrum(&self) -> &DiscreteSpectrum {
        &self.spectrum
    }

    pub fn mesh(&self) -> Mesh {
        self.spectrum.mesh()
    }

    /// The discrete source f_h.
    pub fn projected_source(&self) -> &NodalField {
        &self.projected
    }

    /// (f_h, φ_i^h) in the scheme's inner product.
    pub fn source_coefficients(&self) -> &[f64] {
        &self.source_coeffs
    }

    /// Discrete modal coefficients of u_h(t).
    pub fn modal_coefficients(&self, t: f64) -> Result<Vec<f64>> {
        let lambda = self.spectrum.eigenvalues();
        self.exec
            .map_range(lambda.len(), |i| {
                let f = self.source_coeffs[i];
                if f == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(f * mode_response(&self.kernels, lambda[i], &self.temporal, t)?)
                }
            })
            .into_iter()
            .collect()
    }

    pub fn solve_at(&self, t: f64) -> Result<NodalField> {
        let a = self.modal_coefficients(t)?;
        NodalField::new(self.mesh(), self.spectrum.synthesize(&a))
    }
}

/// u_h(t) for a scheme with its matching source projection.
pub fn semidiscrete_solve(
    mesh: Mesh,
    scheme: SchemeKind,
    alpha: FracOrder,
    source: &SourceTerm,
    t: f64,
) -> Result<NodalField> {
    SemidiscreteSolver::new(mesh, scheme, None, alpha, source)?.solve_at(t)
}

/// Q_h χ: the solution of S q = (M_L - M) χ, the quadrature-error operator
/// of mass lumping.
pub fn quadrature_error_apply(chi: &NodalField) -> Result<NodalField> {
    let mesh = chi.mesh;
    let w = mesh.lumped_weight();
    let mx = mesh.mass_apply(&chi.values);
    let rhs: Vec<f64> = chi.values.iter().zip(&mx).map(|(c, m)| w * c - m).collect();
    let q = match mesh {
        Mesh::D1(m) => m.stiffness().solve(&rhs)?,
        Mesh::D2(m) => solve_five_point(&rhs, m.side()),
    };
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite value in the quadrature-error solve".into()));
    }
    NodalField::new(mesh, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{Mesh1D, Mesh2D};
    use crate::spectral::{ProfileKind, SpatialProfile};

    fn source_1d() -> SourceTerm {
        SourceTerm {
            spatial: SpatialProfile::new(ProfileKind::CharInterval { a: 0.0, b: 0.5 }, 1.0).unwrap(),
            temporal: TimeProfile::step_up(),
        }
    }

    #[test]
    fn zero_at_time_zero() {
        let mesh = Mesh::D1(Mesh1D::new(15).unwrap());
        let a = FracOrder::new(0.5).unwrap();
        let u = semidiscrete_solve(mesh, SchemeKind::Galerkin, a, &source_1d(), 0.0).unwrap();
        assert!(u.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn classical_limit_matches_backward_euler_fine_step() {
        // α = 1 with constant forcing: u_h(t) = (I - e^{-tA}) A^{-1} f_h;
        // compare with the steady state for large t
        let m = Mesh1D::new(31).unwrap();
        let mesh = Mesh::D1(m);
        let src = SourceTerm {
            spatial: source_1d().spatial,
            temporal: TimeProfile::constant(1.0, 10.0),
        };
        let a = FracOrder::new(1.0).unwrap();
        let u = semidiscrete_solve(mesh, SchemeKind::Galerkin, a, &src, 10.0).unwrap();
        let b = crate::fem::load_vector(mesh, &src.spatial).unwrap();
        let steady = m.stiffness().solve(&b).unwrap();
        for (x, y) in u.values.iter().zip(&steady) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn modal_ode_residual_vanishes_for_lumped_2d() {
        // steady limit again, in 2D with the lumped scheme: S u = M_L f_h = b
        let m = Mesh2D::new(8).unwrap();
        let mesh = Mesh::D2(m);
        let src = SourceTerm {
            spatial: SpatialProfile::new(
                ProfileKind::CharRect {
                    a: 0.25,
                    b: 0.75,
                    c: 0.25,
                    d: 0.75,
                },
                1.0,
            )
            .unwrap(),
            temporal: TimeProfile::constant(1.0, 20.0),
        };
        let a = FracOrder::new(1.0).unwrap();
        let u = semidiscrete_solve(mesh, SchemeKind::LumpedMass, a, &src, 20.0).unwrap();
        let b = crate::fem::load_vector(mesh, &src.spatial).unwrap();
        let steady = solve_five_point(&b, 7);
        for (x, y) in u.values.iter().zip(&steady) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_error_operator() {
        let m = Mesh1D::new(20).unwrap();
        let mesh = Mesh::D1(m);
        let chi = NodalField::new(mesh, (1..=20).map(|k| (k as f64).sin()).collect()).unwrap();
        let q = quadrature_error_apply(&chi).unwrap();
        let sq = m.stiffness().mul(&q.values);
        let mx = m.mass().mul(&chi.values);
        for k in 0..20 {
            assert!((sq[k] - (m.h() * chi.values[k] - mx[k])).abs() < 1e-12);
        }
        let m2 = Mesh2D::new(6).unwrap();
        let chi = NodalField::new(Mesh::D2(m2), (0..25).map(|k| (k as f64 * 0.3).cos()).collect()).unwrap();
        let q = quadrature_error_apply(&chi).unwrap();
        let sq = m2.stiffness_apply(&q.values);
        let mx = m2.mass_apply(&chi.values);
        let h2 = m2.h() * m2.h();
        for k in 0..25 {
            assert!((sq[k] - (h2 * chi.values[k] - mx[k])).abs() < 1e-12);
        }
    }
}
