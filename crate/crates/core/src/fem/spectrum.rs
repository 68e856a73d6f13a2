use std::f64::consts::{PI, SQRT_2};

use super::{Mesh, SchemeKind};
use crate::error::{Error, Result};
use crate::linalg::Dst1;
use crate::spectral::ModeIndex;

/// Explicit eigenpairs of the discrete Laplacian for a scheme on a uniform
/// mesh. Eigenvectors are sampled sines, orthonormal in the scheme's inner
/// product (consistent mass for Galerkin, lumped mass otherwise).
#[derive(Debug, Clone)]
pub struct DiscreteSpectrum {
    mesh: Mesh,
    scheme: SchemeKind,
    lambda: Vec<f64>,
    scale: Vec<f64>,
    dst: Dst1,
}

pub fn discrete_spectrum(mesh: Mesh, scheme: SchemeKind) -> Result<DiscreteSpectrum> {
    let h = mesh.h();
    let axis = |j: usize| 4.0 / (h * h) * (j as f64 * PI * h / 2.0).sin().powi(2);
    match (mesh, scheme) {
        (Mesh::D1(m), _) => {
            let n = m.interior();
            let mut lambda = Vec::with_capacity(n);
            let mut scale = Vec::with_capacity(n);
            for j in 1..=n {
                let lumped = axis(j);
                match scheme {
                    SchemeKind::LumpedMass => {
                        lambda.push(lumped);
                        scale.push(SQRT_2);
                    }
                    SchemeKind::Galerkin => {
                        let r = 1.0 - h * h * lumped / 6.0;
                        lambda.push(lumped / r);
                        scale.push(SQRT_2 / r.sqrt());
                    }
                }
            }
            Ok(DiscreteSpectrum {
                mesh,
                scheme,
                lambda,
                scale,
                dst: Dst1::new(n),
            })
        }
        (Mesh::D2(m), SchemeKind::LumpedMass) => {
            let s = m.side();
            let ax: Vec<f64> = (1..=s).map(axis).collect();
            let lambda = (0..s * s).map(|i| ax[i / s] + ax[i % s]).collect();
            Ok(DiscreteSpectrum {
                mesh,
                scheme,
                lambda,
                scale: vec![2.0; s * s],
                dst: Dst1::new(s),
            })
        }
        (Mesh::D2(_), SchemeKind::Galerkin) => Err(Error::UnsupportedScheme(
            "the consistent-mass eigenpairs on the triangulated square are not separable".into(),
        )),
    }
}

impl DiscreteSpectrum {
    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Eigenvalues in the flat mode order (x-mode major in 2D).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    pub fn index_at(&self, i: usize) -> ModeIndex {
        match self.mesh {
            Mesh::D1(_) => ModeIndex::D1(i + 1),
            Mesh::D2(m) => ModeIndex::D2(i / m.side() + 1, i % m.side() + 1),
        }
    }

    pub fn eigenvalue(&self, idx: ModeIndex) -> Result<f64> {
        self.flat(idx).map(|i| self.lambda[i])
    }

    /// Nodal eigenvector.
    pub fn eigenvector(&self, idx: ModeIndex) -> Result<Vec<f64>> {
        let i = self.flat(idx)?;
        let c = self.scale[i];
        Ok(match idx {
            ModeIndex::D1(j) => (1..=self.dst.len()).map(|k| c * self.dst.sin(j, k)).collect(),
            ModeIndex::D2(n, m) => {
                let s = self.dst.len();
                (0..s * s)
                    .map(|q| c * self.dst.sin(n, q / s + 1) * self.dst.sin(m, q % s + 1))
                    .collect()
            }
        })
    }

    /// Coefficients a_i = wᵀ φ_i for all modes.
    pub fn analyze(&self, w: &[f64]) -> Vec<f64> {
        self.sine(w).into_iter().zip(&self.scale).map(|(v, c)| v * c).collect()
    }

    /// Σ_i a_i φ_i.
    pub fn synthesize(&self, a: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = a.iter().zip(&self.scale).map(|(v, c)| v * c).collect();
        self.sine(&scaled)
    }

    fn sine(&self, x: &[f64]) -> Vec<f64> {
        match self.mesh {
            Mesh::D1(_) => self.dst.apply(x),
            Mesh::D2(_) => self.dst.apply_2d(x),
        }
    }

    fn flat(&self, idx: ModeIndex) -> Result<usize> {
        let n = self.dst.len();
        let bad = || Error::ParameterDomain(format!("mode {idx:?} outside the discrete spectrum"));
        match (self.mesh, idx) {
            (Mesh::D1(_), ModeIndex::D1(j)) if (1..=n).contains(&j) => Ok(j - 1),
            (Mesh::D2(_), ModeIndex::D2(a, b)) if (1..=n).contains(&a) && (1..=n).contains(&b) => {
                Ok((a - 1) * n + (b - 1))
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{Mesh1D, Mesh2D};
    use crate::linalg::generalized_eigenvalues;

    fn mass_form(mesh: Mesh, scheme: SchemeKind, x: &[f64], y: &[f64]) -> f64 {
        let mx = match scheme {
            SchemeKind::Galerkin => mesh.mass_apply(x),
            SchemeKind::LumpedMass => x.iter().map(|v| v * mesh.lumped_weight()).collect(),
        };
        mx.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn matches_dense_generalized_eigenproblem_1d() {
        let m = Mesh1D::new(15).unwrap();
        let mesh = Mesh::D1(m);
        let s = m.stiffness().to_dense();
        for scheme in [SchemeKind::Galerkin, SchemeKind::LumpedMass] {
            let mass = match scheme {
                SchemeKind::Galerkin => m.mass().to_dense(),
                SchemeKind::LumpedMass => {
                    let mut d = vec![vec![0.0; 15]; 15];
                    (0..15).for_each(|i| d[i][i] = m.h());
                    d
                }
            };
            let dense = generalized_eigenvalues(&s, &mass).unwrap();
            let sp = discrete_spectrum(mesh, scheme).unwrap();
            for (a, b) in dense.iter().zip(sp.eigenvalues()) {
                assert!((a - b).abs() < 1e-10 * b, "{scheme:?} {a} {b}");
            }
        }
    }

    #[test]
    fn matches_dense_generalized_eigenproblem_2d() {
        let m = Mesh2D::new(6).unwrap();
        let mesh = Mesh::D2(m);
        let n = 25;
        let s: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                m.stiffness_apply(&e)
            })
            .collect();
        let mut ml = vec![vec![0.0; n]; n];
        (0..n).for_each(|i| ml[i][i] = m.h() * m.h());
        let mut dense = generalized_eigenvalues(&s, &ml).unwrap();
        dense.sort_by(f64::total_cmp);
        let sp = discrete_spectrum(mesh, SchemeKind::LumpedMass).unwrap();
        let mut ours = sp.eigenvalues().to_vec();
        ours.sort_by(f64::total_cmp);
        for (a, b) in dense.iter().zip(&ours) {
            assert!((a - b).abs() < 1e-10 * b);
        }
        assert!(matches!(
            discrete_spectrum(mesh, SchemeKind::Galerkin),
            Err(Error::UnsupportedScheme(_))
        ));
    }

    #[test]
    fn eigenvectors_are_orthonormal_and_solve_the_pencil() {
        let cases = [
            (Mesh::D1(Mesh1D::new(9).unwrap()), SchemeKind::Galerkin),
            (Mesh::D1(Mesh1D::new(9).unwrap()), SchemeKind::LumpedMass),
            (Mesh::D2(Mesh2D::new(5).unwrap()), SchemeKind::LumpedMass),
        ];
        for (mesh, scheme) in cases {
            let sp = discrete_spectrum(mesh, scheme).unwrap();
            let vecs: Vec<Vec<f64>> = (0..sp.len()).map(|i| sp.eigenvector(sp.index_at(i)).unwrap()).collect();
            for i in 0..sp.len() {
                for j in 0..sp.len() {
                    let g = mass_form(mesh, scheme, &vecs[i], &vecs[j]);
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-12, "{scheme:?} {i} {j} {g}");
                }
                let sv = mesh.stiffness_apply(&vecs[i]);
                let mv = match scheme {
                    SchemeKind::Galerkin => mesh.mass_apply(&vecs[i]),
                    SchemeKind::LumpedMass => vecs[i].iter().map(|v| v * mesh.lumped_weight()).collect(),
                };
                for (a, b) in sv.iter().zip(&mv) {
                    assert!((a - sp.eigenvalues()[i] * b).abs() < 1e-9 * sp.eigenvalues()[i]);
                }
            }
        }
    }

    #[test]
    fn galerkin_above_lumped_below_exact() {
        let mesh = Mesh::D1(Mesh1D::new(31).unwrap());
        let g = discrete_spectrum(mesh, SchemeKind::Galerkin).unwrap();
        let l = discrete_spectrum(mesh, SchemeKind::LumpedMass).unwrap();
        for j in 1..=31 {
            let exact = (j as f64 * PI).powi(2);
            let gj = g.eigenvalue(ModeIndex::D1(j)).unwrap();
            let lj = l.eigenvalue(ModeIndex::D1(j)).unwrap();
            assert!(lj <= exact && exact <= gj);
        }
    }

    #[test]
    fn analyze_inverts_synthesize() {
        let mesh = Mesh::D2(Mesh2D::new(7).unwrap());
        let sp = discrete_spectrum(mesh, SchemeKind::LumpedMass).unwrap();
        let a: Vec<f64> = (0..36).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = sp.synthesize(&a);
        let w: Vec<f64> = u.iter().map(|v| v * mesh.lumped_weight()).collect();
        let back = sp.analyze(&w);
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
