//! Fully discrete L1 time stepping for 1D problems with variable
//! coefficients, where no explicit eigenbasis is available.

use crate::error::{Error, Result};
use crate::fem::{assemble_matrices, load_vector, Mesh, Mesh1D, NodalField, SchemeKind};
use crate::linalg::SymTridiag;
use crate::par::Execution;
use crate::special::gamma::gamma;
use crate::special::FracOrder;
use crate::spectral::SourceTerm;

/// b_j = (j+1)^{1-α} - j^{1-α}, j = 0..n-1.
pub fn l1_weights(alpha: FracOrder, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha.value();
    (0..n)
        .map(|j| {
            if j == 0 {
                // 0^0 would make b_0 vanish at α = 1
                return 1.0;
            }
            let j = j as f64;
            (j + 1.0).powf(e) - j.powf(e)
        })
        .collect()
}

/// Step parameters of the L1 scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Scheme {
    pub alpha: FracOrder,
    pub tau: f64,
    pub n_steps: usize,
    pub weights: Vec<f64>,
}

impl L1Scheme {
    /// Uniform steps on [0, horizon]; `tau` must divide the horizon.
    pub fn new(alpha: FracOrder, tau: f64, horizon: f64) -> Result<Self> {
        if !(tau > 0.0) || !(horizon > 0.0) || !tau.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "time step {tau} and horizon {horizon} must be positive"
            )));
        }
        let n = (horizon / tau).round();
        if (n * tau - horizon).abs() > 1e-9 * horizon || n < 1.0 {
            return Err(Error::ParameterDomain(format!(
                "time step {tau} does not divide the horizon {horizon}"
            )));
        }
        let n_steps = n as usize;
        Ok(Self {
            alpha,
            tau: horizon / n,
            n_steps,
            weights: l1_weights(alpha, n_steps),
        })
    }

    /// 1 / (Γ(2-α) τ^α).
    pub fn scale(&self) -> f64 {
        let a = self.alpha.value();
        1.0 / (gamma(2.0 - a) * self.tau.powf(a))
    }

    /// L1 approximation of the Caputo derivative at t_n from samples u_0..u_n.
    pub fn derivative(&self, samples: &[f64]) -> f64 {
        let n = samples.len() - 1;
        let s: f64 = (0..n)
            .map(|j| self.weights[j] * (samples[n - j] - samples[n - j - 1]))
            .sum();
        self.scale() * s
    }
}

/// Nodal values U^0 = 0, U^1, ..., U^n on the uniform time grid.
#[derive(Debug, Clone)]
pub struct L1Trajectory {
    pub mesh: Mesh1D,
    pub tau: f64,
    pub steps: Vec<Vec<f64>>,
}

impl L1Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn field(&self, n: usize) -> Result<NodalField> {
        NodalField::new(Mesh::D1(self.mesh), self.steps[n].clone())
    }

    pub fn last(&self) -> Result<NodalField> {
        self.field(self.steps.len() - 1)
    }
}

/// Solve c M (U^n - U^{n-1} + Σ_{j≥1} b_j (U^{n-j} - U^{n-j-1})) + S U^n = F^n
/// with c = 1/(Γ(2-α)τ^α), M consistent or lumped per scheme and F^n the
/// load at the right-continuous source value at t_n.
#[allow(clippy::too_many_arguments)]
pub fn l1_march<K, Q>(
    mesh: &Mesh1D,
    k: K,
    q: Q,
    scheme: SchemeKind,
    alpha: FracOrder,
    source: &SourceTerm,
    tau: f64,
    horizon: f64,
    exec: Execution,
) -> Result<L1Trajectory>
where
    K: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    source.temporal.validate()?;
    if horizon > source.temporal.horizon() * (1.0 + 1e-12) {
        return Err(Error::ParameterDomain(format!(
            "horizon {horizon} beyond the source profile"
        )));
    }
    let l1 = L1Scheme::new(alpha, tau, horizon)?;
    let mats = assemble_matrices(mesh, k, q)?;
    let mass = match scheme {
        SchemeKind::Galerkin => mats.mass.clone(),
        SchemeKind::LumpedMass => SymTridiag::new(mats.lumped.clone(), vec![0.0; mesh.interior() - 1]),
    };
    let c = l1.scale();
    let system = mass.combine(c, &mats.stiffness, 1.0);
    let load = load_vector(Mesh::D1(*mesh), &source.spatial)?;
    let n_nodes = mesh.interior();
    let mut steps = vec![vec![0.0; n_nodes]];
    // differences D^m = U^m - U^{m-1}
    let mut diffs: Vec<Vec<f64>> = Vec::with_capacity(l1.n_steps);
    for n in 1..=l1.n_steps {
        let mut history = vec![0.0; n_nodes];
        exec.for_each_chunk_mut(&mut history, 64, |ci, chunk| {
            let start = ci * 64;
            for j in 1..n {
                let (b, d) = (l1.weights[j], &diffs[n - j - 1]);
                for (i, h) in chunk.iter_mut().enumerate() {
                    *h += b * d[start + i];
                }
            }
        });
        let prev = &steps[n - 1];
        let w: Vec<f64> = prev.iter().zip(&history).map(|(u, h)| c * (u - h)).collect();
        let level = source.temporal.value_right(n as f64 * l1.tau, 1e-9 * l1.tau);
        let mut rhs = mass.mul(&w);
        rhs.iter_mut().zip(&load).for_each(|(r, b)| *r += level * b);
        let u = system.solve(&rhs)?;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver(format!("non-finite solution at step {n}")));
        }
        diffs.push(u.iter().zip(prev).map(|(a, b)| a - b).collect());
        steps.push(u);
    }
    Ok(L1Trajectory {
        mesh: *mesh,
        tau: l1.tau,
        steps,
    })
}
