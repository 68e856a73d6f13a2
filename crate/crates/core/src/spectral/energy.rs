//! Closed-form sums E_k = Σ g²/λ^k over all modes of a source profile
//! (k = 1, 2), used for the exact tails of error norms.
//!
//! In 1D these are ⟨g, w⟩ and ‖w‖² with w = (-Δ)^{-1} g, integrated exactly.
//! In 2D the sum over one index is done in closed form (hyperbolic formulas
//! for Σ cos(qθ)/(q²+s) and relatives) and the other index is summed
//! numerically. Squared denominators come from differentiating in s = a²
//! with dual numbers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::par::{sum_range, Execution};
use crate::quadrature::GaussRule;
use crate::spectral::{interval_sine_integral, ProfileKind, SpatialProfile};

const OUTER_TERMS: usize = 1 << 20;

/// Σ over all modes of g² / λ^k, k ∈ {1, 2}.
pub fn profile_energy(profile: &SpatialProfile, k: u32, exec: Execution) -> Result<f64> {
    profile.validate()?;
    if !(k == 1 || k == 2) {
        return Err(Error::ParameterDomain(format!("energy order must be 1 or 2, got {k}")));
    }
    let amp2 = profile.amplitude * profile.amplitude;
    let v = match profile.kind {
        ProfileKind::PointMass { x0 } => {
            let g = x0 * (1.0 - x0);
            if k == 1 {
                g
            } else {
                g * g / 3.0
            }
        }
        ProfileKind::CharInterval { a, b } => char_interval(a, b, k),
        ProfileKind::CharRect { a, b, c, d } => char_rect(a, b, c, d, k, exec),
        ProfileKind::CurveMass { a, b, c, d } => curve_mass(a, b, c, d, k, exec),
    };
    Ok(amp2 * v)
}

fn char_interval(a: f64, b: f64, k: u32) -> f64 {
    // w = ∫_a^b G(x, y) dy with G(x, y) = min(x,y)(1 - max(x,y))
    let w = |x: f64| {
        let c = x.clamp(a, b);
        (1.0 - x) * (c * c - a * a) / 2.0 + x * ((b - c) - (b * b - c * c) / 2.0)
    };
    let rule = GaussRule::new(5);
    if k == 1 {
        rule.integrate(a, b, w)
    } else {
        [(0.0, a), (a, b), (b, 1.0)]
            .iter()
            .filter(|(lo, hi)| hi > lo)
            .map(|&(lo, hi)| rule.integrate(lo, hi, |x| w(x).powi(2)))
            .sum()
    }
}

/// Value and derivative with respect to s.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn var(s: f64) -> Self {
        Dual { v: s, d: 1.0 }
    }
    fn cst(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        Dual {
            v: r,
            d: self.d / (2.0 * r),
        }
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        Dual { v: e, d: e * self.d }
    }
    fn scale(self, c: f64) -> Self {
        Dual {
            v: c * self.v,
            d: c * self.d,
        }
    }
    /// Order-k sum from the closed form: k = 1 is the value, k = 2 the
    /// negated derivative (∂_s 1/(q²+s) = -1/(q²+s)²).
    fn order(self, k: u32) -> f64 {
        if k == 1 {
            self.v
        } else {
            -self.d
        }
    }
}

impl std::ops::Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl std::ops::Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl std::ops::Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

impl std::ops::Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual {
            v: self.v / o.v,
            d: (self.d * o.v - self.v * o.d) / (o.v * o.v),
        }
    }
}

/// (e^{-aθ} ± e^{-a(2π-θ)}) / (1 - e^{-2πa}) for θ ∈ [0, 2π].
fn hyperbolic_ratio(theta: f64, a: Dual, sign: f64) -> Dual {
    let e1 = a.scale(-theta).exp();
    let e2 = a.scale(-(2.0 * PI - theta)).exp();
    let den = Dual::cst(1.0) - a.scale(-2.0 * PI).exp();
    (e1 + e2.scale(sign)) / den
}

/// Σ_{q≥1} cos(qθ) / (q² + s), θ ∈ [0, 2π].
fn cos_sum(theta: f64, s: Dual) -> Dual {
    let a = s.sqrt();
    let f = hyperbolic_ratio(theta, a, 1.0);
    Dual::cst(PI / 2.0) * f / a - Dual::cst(0.5) / s
}

/// Σ_{q≥1} cos(qθ) / (q² (q² + s)), θ ∈ [0, 2π].
fn cos_sum_q2(theta: f64, s: Dual) -> Dual {
    let b2 = PI * PI / 6.0 - PI * theta / 2.0 + theta * theta / 4.0;
    (Dual::cst(b2) - cos_sum(theta, s)) / s
}

/// Σ_{q≥1} sin(qθ) / (q (q² + s)), θ ∈ [0, 2π].
fn sin_sum_q(theta: f64, s: Dual) -> Dual {
    let a = s.sqrt();
    let f = hyperbolic_ratio(theta, a, -1.0);
    (Dual::cst((PI - theta) / 2.0) - f.scale(PI / 2.0)) / s
}

/// Σ_q (∫_c^d sin qπy dy)² / (q² + s)^k.
fn inner_char_sq(c: f64, d: f64, s: f64, k: u32) -> f64 {
    let s = Dual::var(s);
    let t = cos_sum_q2(0.0, s) + cos_sum_q2(2.0 * PI * c, s).scale(0.5) + cos_sum_q2(2.0 * PI * d, s).scale(0.5)
        - cos_sum_q2(PI * (d - c), s)
        - cos_sum_q2(PI * (c + d), s);
    t.order(k) / (PI * PI)
}

/// Σ_q (sin qπc + sin qπd)² / (q² + s)^k.
fn inner_trace_sq(c: f64, d: f64, s: f64, k: u32) -> f64 {
    let s = Dual::var(s);
    let t = cos_sum(0.0, s) - cos_sum(2.0 * PI * c, s).scale(0.5) - cos_sum(2.0 * PI * d, s).scale(0.5)
        + cos_sum(PI * (d - c), s)
        - cos_sum(PI * (c + d), s);
    t.order(k)
}

/// Σ_q (sin qπc + sin qπd)(∫_c^d sin qπy dy) / (q² + s)^k.
fn inner_mixed(c: f64, d: f64, s: f64, k: u32) -> f64 {
    let s = Dual::var(s);
    let t = sin_sum_q(2.0 * PI * c, s).scale(0.5) - sin_sum_q(2.0 * PI * d, s).scale(0.5) + sin_sum_q(PI * (d - c), s);
    t.order(k) / PI
}

fn char_rect(a: f64, b: f64, c: f64, d: f64, k: u32, exec: Execution) -> f64 {
    let s = sum_range(exec, OUTER_TERMS, |i| {
        let p = i + 1;
        let ix = interval_sine_integral(p, a, b);
        ix * ix * inner_char_sq(c, d, (p * p) as f64, k)
    });
    4.0 * s / PI.powi(2 * k as i32)
}

fn curve_mass(a: f64, b: f64, c: f64, d: f64, k: u32, exec: Execution) -> f64 {
    // g = 2 [σ_y(q) I_x(p) + σ_x(p) I_y(q)]; each product is summed with the
    // bounded trace factor on the inner (closed-form) index
    let s = sum_range(exec, OUTER_TERMS, |i| {
        let p = i + 1;
        let pf = p as f64;
        let s = pf * pf;
        let ix = interval_sine_integral(p, a, b);
        let iy = interval_sine_integral(p, c, d);
        let sx = (pf * PI * a).sin() + (pf * PI * b).sin();
        ix * ix * inner_trace_sq(c, d, s, k)
            + iy * iy * inner_trace_sq(a, b, s, k)
            + 2.0 * sx * ix * inner_mixed(c, d, s, k)
    });
    4.0 * s / PI.powi(2 * k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{expand_profile, flat_eigenvalue};

    fn direct(profile: &SpatialProfile, j: usize, k: u32) -> f64 {
        let f = expand_profile(profile, j).unwrap();
        let d = profile.domain();
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(i, &g)| g * g / flat_eigenvalue(d, j, i).powi(k as i32))
            .sum()
    }

    #[test]
    fn closed_form_sums() {
        // against brute-force partial sums of the series
        let s = Dual::var(2.3);
        for &th in &[0.0, 0.7, PI, 5.9, 2.0 * PI] {
            let (mut c0, mut c2, mut s1) = (0.0, 0.0, 0.0);
            let (mut c0d, mut c2d) = (0.0, 0.0);
            for q in 1..2_000_000usize {
                let q = q as f64;
                let den = q * q + 2.3;
                c0 += (q * th).cos() / den;
                c0d += (q * th).cos() / (den * den);
                c2 += (q * th).cos() / (q * q * den);
                c2d += (q * th).cos() / (q * q * den * den);
                s1 += (q * th).sin() / (q * den);
            }
            assert!((cos_sum(th, s).v - c0).abs() < 1e-6, "{th}");
            assert!((cos_sum(th, s).order(2) - c0d).abs() < 1e-10, "{th}");
            assert!((cos_sum_q2(th, s).v - c2).abs() < 1e-12, "{th}");
            assert!((cos_sum_q2(th, s).order(2) - c2d).abs() < 1e-12, "{th}");
            assert!((sin_sum_q(th, s).v - s1).abs() < 1e-12, "{th}");
        }
    }

    #[test]
    fn one_dimensional_energies() {
        let p = SpatialProfile::new(ProfileKind::CharInterval { a: 0.0, b: 0.5 }, 1.0).unwrap();
        let e2 = profile_energy(&p, 2, Execution::Sequential).unwrap();
        assert!((e2 - direct(&p, 20_000, 2)).abs() < 1e-14);
        let e1 = profile_energy(&p, 1, Execution::Sequential).unwrap();
        assert!((e1 - direct(&p, 200_000, 1)).abs() < 1e-9);
        let q = SpatialProfile::new(ProfileKind::PointMass { x0: 0.3 }, 2.0).unwrap();
        let e2 = profile_energy(&q, 2, Execution::Sequential).unwrap();
        assert!((e2 - direct(&q, 20_000, 2)).abs() < 1e-13);
    }

    #[test]
    fn two_dimensional_energies() {
        let r = SpatialProfile::new(
            ProfileKind::CharRect {
                a: 0.25,
                b: 0.75,
                c: 0.1,
                d: 0.6,
            },
            1.0,
        )
        .unwrap();
        let c = SpatialProfile::new(
            ProfileKind::CurveMass {
                a: 0.25,
                b: 0.75,
                c: 0.2,
                d: 0.9,
            },
            1.0,
        )
        .unwrap();
        for p in [r, c] {
            let e = profile_energy(&p, 2, Execution::Parallel).unwrap();
            let d = direct(&p, 1500, 2);
            assert!((e - d).abs() < 1e-8 * e, "{p:?}: {e} {d}");
        }
        let e = profile_energy(&r, 1, Execution::Parallel).unwrap();
        let d = direct(&r, 1500, 1);
        assert!((e - d).abs() < 1e-6 * e, "{e} {d}");
    }
}
