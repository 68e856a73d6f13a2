use crate::error::{Error, Result};
use crate::fem::{load_vector, Mesh, NodalField};
use crate::par::{sum_range, Execution};
use crate::quadrature::GaussRule;
use crate::reference::mode_response;
use crate::special::{FracOrder, Kernels};
use crate::spectral::profile_energy;
use crate::spectral::{expand_profile, ModeIndex, ProfileKind, SourceTerm, SpatialProfile, SpectralField};

use super::sine::fe_sine_coefficients_with;

/// ‖u_h - u‖ in Ḣ^p, p ∈ {0, 1}, by Parseval over the modes of `reference`
/// (truncated at its truncation).
pub fn error_norm(u: &NodalField, reference: &SpectralField, p: u32) -> Result<f64> {
    check_p(p)?;
    let c = fe_sine_coefficients_with(u, reference.truncation(), Execution::default())?;
    if c.domain() != reference.domain() {
        return Err(Error::ParameterDomain(
            "field and reference live on different domains".into(),
        ));
    }
    let s: f64 = (0..c.coeffs().len())
        .map(|i| reference.eigenvalue_at(i).powi(p as i32) * (reference.coeffs()[i] - c.coeffs()[i]).powi(2))
        .sum();
    Ok(s.sqrt())
}

fn check_p(p: u32) -> Result<()> {
    if p > 1 {
        Err(Error::ParameterDomain(format!("norm index must be 0 or 1, got {p}")))
    } else {
        Ok(())
    }
}

/// A norm value computed with the full reference truncation J and with J/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub half_truncation: f64,
}

impl NormValue {
    /// Relative change between the J/2 and J evaluations.
    pub fn truncation_drift(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            (self.value - self.half_truncation).abs() / self.value
        }
    }

    pub fn degraded(&self, tol: f64) -> bool {
        !self.value.is_finite() || self.truncation_drift() > tol
    }
}

/// L² and H¹ error of one discrete field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub l2: NormValue,
    pub h1: NormValue,
}

/// Error norms against the spectral solution of a separable source with
/// exact tails. With u_j = g_j m_j and the relaxation ρ_j = L - λ_j m_j
/// (L the source level at t),
///
///   ‖u_h - u‖²_p = Σ_{≤J} λ^p (u_j - c_j)² + [‖u_h‖²_p - Σ_{≤J} λ^p c_j²]
///                + [‖u‖²_p - Σ_{≤J} λ^p u_j²] - 2 [(u, u_h)_p - Σ_{≤J} λ^p u_j c_j],
///
/// where ‖u_h‖²_p is UᵀMU or UᵀSU, ‖u‖²_p uses the closed-form sums
/// Σ g²/λ^{2-p}, and (u, u_h)_p uses ⟨g, u_h⟩ = b·U (p = 1) or
/// ⟨(-Δ)^{-1} g, u_h⟩ (p = 0, exact in 1D, partial sum in 2D). Only the
/// terms carrying ρ_j beyond J are dropped; they are O(1/λ_J) smaller than
/// the retained tails.
#[derive(Debug, Clone)]
pub struct ErrorEvaluator {
    source: SourceTerm,
    kernels: Kernels,
    expansion: SpectralField,
    /// Σ over all modes of g²/λ and g²/λ².
    energy: [f64; 2],
    exec: Execution,
}

impl ErrorEvaluator {
    pub fn new(source: &SourceTerm, alpha: FracOrder, truncation: usize, exec: Execution) -> Result<Self> {
        source.temporal.validate()?;
        if truncation < 2 {
            return Err(Error::ParameterDomain("reference truncation must be at least 2".into()));
        }
        let expansion = expand_profile(&source.spatial, truncation)?;
        let energy = [
            profile_energy(&source.spatial, 1, exec)?,
            profile_energy(&source.spatial, 2, exec)?,
        ];
        Ok(Self {
            source: source.clone(),
            kernels: Kernels::new(alpha),
            expansion,
            energy,
            exec,
        })
    }

    pub fn truncation(&self) -> usize {
        self.expansion.truncation()
    }

    pub fn source(&self) -> &SourceTerm {
        &self.source
    }

    /// Reference coefficients u_j(t) = g_j m_j(t).
    pub fn reference_at(&self, t: f64) -> Result<SpectralField> {
        let g = &self.expansion;
        let temporal = &self.source.temporal;
        let values = self.exec.map_range(g.coeffs().len(), |i| {
            let gi = g.coeffs()[i];
            if gi == 0.0 {
                Ok(0.0)
            } else {
                Ok(gi * mode_response(&self.kernels, g.eigenvalue_at(i), temporal, t)?)
            }
        });
        let coeffs = values.into_iter().collect::<Result<Vec<f64>>>()?;
        SpectralField::from_coeffs(g.domain(), g.truncation(), coeffs)
    }

    pub fn evaluate(&self, u: &NodalField, t: f64) -> Result<FieldErrors> {
        let r = self.reference_at(t)?;
        self.evaluate_with(u, &r, t)
    }

    /// As `evaluate`, with the reference coefficients at t supplied.
    pub fn evaluate_with(&self, u: &NodalField, reference: &SpectralField, t: f64) -> Result<FieldErrors> {
        let g = &self.expansion;
        let j = g.truncation();
        if reference.truncation() != j || reference.domain() != g.domain() {
            return Err(Error::ParameterDomain("reference does not match the evaluator".into()));
        }
        let domain_ok = matches!(
            (u.mesh, g.domain()),
            (Mesh::D1(_), crate::spectral::Domain::Interval01) | (Mesh::D2(_), crate::spectral::Domain::Square01)
        );
        if !domain_ok {
            return Err(Error::ParameterDomain(
                "field and source live on different domains".into(),
            ));
        }
        let level = self.source.temporal.value_left(t);
        let c = fe_sine_coefficients_with(u, j, self.exec)?;
        let b = load_vector(u.mesh, &self.source.spatial)?;
        let bu: f64 = b.iter().zip(&u.values).map(|(x, y)| x * y).sum();
        let green = green_pairing(&self.source.spatial, u);
        let fe_norm = [u.l2_norm_sq(), u.h1_seminorm_sq()];

        // partial sums over modes within the cut, for cut = J and J/2
        let half = j / 2;
        let n = g.coeffs().len();
        let within = |i: usize, cut: usize| match g.index_at(i) {
            ModeIndex::D1(k) => k <= cut,
            ModeIndex::D2(a, bb) => a <= cut && bb <= cut,
        };
        let partial = |cut: usize, term: &(dyn Fn(usize) -> f64 + Sync)| {
            sum_range(self.exec, n, |i| if within(i, cut) { term(i) } else { 0.0 })
        };
        let mut out = [[0.0; 2]; 2];
        for p in 0..2usize {
            let w = |i: usize| if p == 0 { 1.0 } else { g.eigenvalue_at(i) };
            let u_c = |i: usize| reference.coeffs()[i];
            let c_c = |i: usize| c.coeffs()[i];
            for (slot, cut) in [j, half].into_iter().enumerate() {
                let diff = partial(cut, &|i| w(i) * (u_c(i) - c_c(i)).powi(2));
                let head_c = partial(cut, &|i| w(i) * c_c(i).powi(2));
                let head_g = partial(cut, &|i| g.coeffs()[i].powi(2) / g.eigenvalue_at(i).powi(2 - p as i32));
                let head_gc = partial(cut, &|i| g.coeffs()[i] * c_c(i) * g.eigenvalue_at(i).powi(p as i32 - 1));
                let cross_total = match (p, green) {
                    (1, _) => bu,
                    (0, Some(v)) => v,
                    // no closed form: the partial sum at the full truncation
                    _ => partial(j, &|i| g.coeffs()[i] * c_c(i) / g.eigenvalue_at(i)),
                };
                let tail_fe = fe_norm[p] - head_c;
                let tail_ref = level * level * (self.energy[1 - p] - head_g);
                let tail_cross = level * (cross_total - head_gc);
                let e2 = diff + tail_fe + tail_ref - 2.0 * tail_cross;
                out[p][slot] = e2.max(0.0).sqrt();
            }
        }
        Ok(FieldErrors {
            l2: NormValue {
                value: out[0][0],
                half_truncation: out[0][1],
            },
            h1: NormValue {
                value: out[1][0],
                half_truncation: out[1][1],
            },
        })
    }
}

/// ⟨(-Δ)^{-1} g, u_h⟩ for 1D profiles, integrated exactly per element.
fn green_pairing(profile: &SpatialProfile, u: &NodalField) -> Option<f64> {
    let Mesh::D1(m) = u.mesh else { return None };
    let amp = profile.amplitude;
    let (w, kinks): (Box<dyn Fn(f64) -> f64>, Vec<f64>) = match profile.kind {
        ProfileKind::CharInterval { a, b } => (
            Box::new(move |x: f64| {
                let c = x.clamp(a, b);
                amp * ((1.0 - x) * (c * c - a * a) / 2.0 + x * ((b - c) - (b * b - c * c) / 2.0))
            }),
            vec![a, b],
        ),
        ProfileKind::PointMass { x0 } => (Box::new(move |x: f64| amp * x.min(x0) * (1.0 - x.max(x0))), vec![x0]),
        _ => return None,
    };
    let rule = GaussRule::new(3);
    let mut acc = 0.0;
    for e in 0..=m.interior() {
        let (lo, hi) = (m.node(e), m.node(e + 1));
        let mut cuts = vec![lo, hi];
        cuts.extend(kinks.iter().copied().filter(|&k| k > lo && k < hi));
        cuts.sort_by(f64::total_cmp);
        for s in cuts.windows(2) {
            acc += rule.integrate(s[0], s[1], |x| w(x) * u.value_at(&[x]));
        }
    }
    Some(acc)
}
