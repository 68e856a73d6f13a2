//! Truncated spectral solution of the continuous problem with zero initial
//! value, via per-mode closed-form time convolution against the
//! piecewise-constant source profile.

use crate::error::{Error, Result};
use crate::par::{sum_range, Execution};
use crate::special::{FracOrder, Kernels};
use crate::spectral::{expand_profile, SourceTerm, SpectralField, TimeProfile};

/// Response of one mode with eigenvalue λ to `temporal`:
/// Σ_i c_i [S((t - t_{i-1})_+) - S((t - t_i)_+)], S the step response.
pub fn mode_response(kernels: &Kernels, lambda: f64, temporal: &TimeProfile, t: f64) -> Result<f64> {
    check_time(temporal, t)?;
    let mut acc = 0.0;
    for (lo, hi, c) in temporal.pieces() {
        if t <= lo {
            break;
        }
        let on = kernels.step_response(lambda, t - lo)?;
        let off = if t > hi {
            kernels.step_response(lambda, t - hi)?
        } else {
            0.0
        };
        acc += c * (on - off);
    }
    Ok(acc)
}

/// Relaxation part ρ = L(t) - λ·m(t), where L is the left-continuous level
/// and m the mode response: ρ = Σ_i c_i [ê((t - t_{i-1})_+) - ê((t - t_i)_+)],
/// ê(τ) = E_{α,1}(-λτ^α) for τ > 0 and 0 otherwise.
pub fn mode_relaxation(kernels: &Kernels, lambda: f64, temporal: &TimeProfile, t: f64) -> Result<f64> {
    check_time(temporal, t)?;
    let a = kernels.alpha();
    let e = |tau: f64| -> Result<f64> {
        if tau > 0.0 {
            kernels.e1(lambda * tau.powf(a))
        } else {
            Ok(0.0)
        }
    };
    let mut acc = 0.0;
    for (lo, hi, c) in temporal.pieces() {
        if t <= lo {
            break;
        }
        acc += c * (e(t - lo)? - e(t - hi)?);
    }
    Ok(acc)
}

fn check_time(temporal: &TimeProfile, t: f64) -> Result<()> {
    let horizon = temporal.horizon();
    if t >= 0.0 && t <= horizon * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("time {t} outside [0, {horizon}]")))
    }
}

/// Tail tolerances for choosing the truncation by doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Relative to the leading mode, for L²-type norms.
    pub l2_tol: f64,
    /// Relative to the leading mode, for H¹-type norms.
    pub h1_tol: f64,
    pub initial: usize,
    pub max: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            l2_tol: 1e-10,
            h1_tol: 1e-6,
            initial: 16,
            max: 1 << 16,
        }
    }
}

/// Truncated spectral solution for a separable source.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    source: SourceTerm,
    kernels: Kernels,
    expansion: SpectralField,
    exec: Execution,
}

impl ReferenceSolution {
    /// Reference with an explicit truncation `J` per axis.
    pub fn new(source: SourceTerm, alpha: FracOrder, truncation: usize) -> Result<Self> {
        source.temporal.validate()?;
        let expansion = expand_profile(&source.spatial, truncation)?;
        Ok(Self {
            source,
            kernels: Kernels::new(alpha),
            expansion,
            exec: Execution::default(),
        })
    }

    /// Reference whose truncation is doubled until the contribution of the
    /// modes in (J, 2J] to the Ḣ^p norm at time `t` falls below the policy
    /// tolerance relative to the leading mode.
    pub fn with_policy(source: SourceTerm, alpha: FracOrder, p: u32, t: f64, policy: TruncationPolicy) -> Result<Self> {
        let tol = if p == 0 { policy.l2_tol } else { policy.h1_tol };
        let mut j = policy.initial.max(1);
        loop {
            if 2 * j > policy.max {
                return Err(Error::Truncation(format!(
                    "tail tolerance {tol:e} not met with {j} modes per axis (cap {})",
                    policy.max
                )));
            }
            let fine = Self::new(source.clone(), alpha, 2 * j)?;
            let u = fine.solution_at(t)?;
            let lead = u.eigenvalue_at(0).powi(p as i32) * u.coeffs()[0].powi(2);
            let tail = sum_range(fine.exec, u.coeffs().len(), |i| {
                let within = match u.index_at(i) {
                    crate::spectral::ModeIndex::D1(k) => k <= j,
                    crate::spectral::ModeIndex::D2(n, m) => n <= j && m <= j,
                };
                if within {
                    0.0
                } else {
                    u.eigenvalue_at(i).powi(p as i32) * u.coeffs()[i].powi(2)
                }
            });
            if tail.sqrt() <= tol * lead.sqrt() {
                return Self::new(source, alpha, j);
            }
            j *= 2;
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn source(&self) -> &SourceTerm {
        &self.source
    }

    pub fn kernels(&self) -> &Kernels {
        &self.kernels
    }

    pub fn alpha(&self) -> f64 {
        self.kernels.alpha()
    }

    pub fn expansion(&self) -> &SpectralField {
        &self.expansion
    }

    pub fn truncation(&self) -> usize {
        self.expansion.truncation()
    }

    /// Solution coefficients u_j(t) = g_j m_j(t).
    pub fn solution_at(&self, t: f64) -> Result<SpectralField> {
        let g = &self.expansion;
        let temporal = &self.source.temporal;
        let values = self.exec.map_range(g.coeffs().len(), |i| {
            let gi = g.coeffs()[i];
            if gi == 0.0 {
                return Ok(0.0);
            }
            Ok(gi * mode_response(&self.kernels, g.eigenvalue_at(i), temporal, t)?)
        });
        let coeffs = values.into_iter().collect::<Result<Vec<f64>>>()?;
        SpectralField::from_coeffs(g.domain(), g.truncation(), coeffs)
    }
}
