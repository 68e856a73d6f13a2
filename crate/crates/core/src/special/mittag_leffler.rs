//! Two-parameter Mittag-Leffler function on the non-positive real axis,
//! E_{α,β}(-x) for x ≥ 0.
//!
//! Three regimes are used:
//!
//! * Taylor series of the defining sum for small x,
//! * the real-line Laplace-type integral
//!   `E_{α,β}(-x) = 1/(απ) ∫_0^∞ v^{(1-β)/α} (v sin βπ + x sin (β-α)π) e^{-v^{1/α}}
//!   / (v² + 2vx cos απ + x²) dv`, valid for 0 < α < 1 and 0 < β < 1 + α,
//! * the algebraic asymptotic expansion `Σ_{k≥1} (-1)^{k+1} x^{-k} / Γ(β - αk)`.
//!
//! The asymptotic threshold is picked per (α, β) as the smallest x at which the
//! optimally truncated expansion is accurate to 1e-16 relative.

use std::f64::consts::PI;

use crate::error::{Error, MlRegime, Result};
use crate::par::CompensatedSum;
use crate::quadrature;
use crate::special::gamma::rgamma;

const TAYLOR_LIMIT: f64 = 0.5;
const TAYLOR_TERMS: usize = 400;
const ASYM_TERMS: usize = 120;
const ASYM_CANDIDATES: [f64; 16] = [
    4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0, 150.0, 200.0,
];

/// Admissible (α, β) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    alpha: f64,
    beta: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::ParameterDomain(format!(
                "Mittag-Leffler alpha must lie in (0, 2), got {alpha}"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "Mittag-Leffler beta must be finite, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn integral_valid(&self) -> bool {
        self.alpha < 1.0 && self.beta > 0.0 && self.beta < 1.0 + self.alpha
    }
}

/// Prepared evaluator for one (α, β); reuse it for bulk evaluation.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    params: MlParams,
    taylor: Vec<f64>,
    asym: Vec<f64>,
    asym_from: f64,
}

impl MittagLeffler {
    pub fn new(params: MlParams) -> Self {
        let MlParams { alpha, beta } = params;
        let taylor = (0..TAYLOR_TERMS).map(|k| rgamma(alpha * k as f64 + beta)).collect();
        let asym: Vec<f64> = (0..=ASYM_TERMS)
            .map(|k| if k == 0 { 0.0 } else { rgamma(beta - alpha * k as f64) })
            .collect();
        let asym_from = if params.integral_valid() {
            ASYM_CANDIDATES
                .iter()
                .copied()
                .find(|&x| asymptotic_sum(&asym, x).is_some_and(|(_, rel)| rel < 1e-16))
                .unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        Self {
            params,
            taylor,
            asym,
            asym_from,
        }
    }

    pub fn params(&self) -> MlParams {
        self.params
    }

    /// Lower end of the asymptotic regime.
    pub fn asymptotic_threshold(&self) -> f64 {
        self.asym_from
    }

    /// Regime that `eval(x)` will use.
    pub fn regime(&self, x: f64) -> MlRegime {
        if x <= TAYLOR_LIMIT || !self.params.integral_valid() {
            MlRegime::Taylor
        } else if x >= self.asym_from {
            MlRegime::Asymptotic
        } else {
            MlRegime::Integral
        }
    }

    /// E_{α,β}(-x).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(Error::ParameterDomain(format!(
                "Mittag-Leffler argument must be finite and >= 0, got {x}"
            )));
        }
        let MlParams { alpha, beta } = self.params;
        if x == 0.0 {
            return Ok(self.taylor[0]);
        }
        if alpha == 1.0 && beta == 1.0 {
            return Ok((-x).exp());
        }
        match self.regime(x) {
            MlRegime::Taylor => self.taylor_sum(x),
            MlRegime::Asymptotic => match asymptotic_sum(&self.asym, x) {
                Some((v, rel)) if rel < 1e-13 => Ok(v),
                _ => Err(Error::Evaluation {
                    regime: MlRegime::Asymptotic,
                    detail: format!("expansion did not reach tolerance at x = {x}"),
                }),
            },
            MlRegime::Integral => self.integral(x),
        }
    }

    fn taylor_sum(&self, x: f64) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        let mut pow = 1.0;
        let mut largest: f64 = 0.0;
        let mut prev = f64::INFINITY;
        for (k, &c) in self.taylor.iter().enumerate() {
            let term = pow * c;
            acc.add(term);
            largest = largest.max(term.abs());
            let s = acc.value();
            if k > 2 && term.abs() <= 1e-17 * s.abs() && term.abs() <= prev {
                // roundoff from cancellation must stay below the target
                if largest * 1e-16 > 1e-11 * s.abs() {
                    break;
                }
                return Ok(s);
            }
            prev = term.abs();
            pow *= -x;
        }
        Err(Error::Evaluation {
            regime: MlRegime::Taylor,
            detail: format!("series cannot reach tolerance at x = {x}"),
        })
    }

    fn integral(&self, x: f64) -> Result<f64> {
        let MlParams { alpha, beta } = self.params;
        let sb = (beta * PI).sin();
        let sba = ((beta - alpha) * PI).sin();
        let ca = (alpha * PI).cos();
        let p = (1.0 - beta) / alpha;
        let q = 1.0 / alpha;
        let upper = 745f64.powf(alpha);
        let f = |v: f64| {
            if v == 0.0 {
                return if p > 0.0 {
                    0.0
                } else if p == 0.0 {
                    x * sba / (x * x)
                } else {
                    0.0
                };
            }
            v.powf(p) * (v * sb + x * sba) * (-v.powf(q)).exp() / (v * v + 2.0 * v * x * ca + x * x)
        };
        let mut breaks = vec![1.0, 0.5 * upper.min(1.0)];
        if ca < 0.0 {
            let peak = -x * ca;
            let width = x * (alpha * PI).sin();
            breaks.extend([peak - width, peak, peak + width]);
        }
        let r = quadrature::adaptive(f, 0.0, upper, &breaks, 1e-300, 1e-14, 4000);
        let value = r.value / (alpha * PI);
        if !r.converged && r.error > 1e-12 * r.value.abs() {
            return Err(Error::Evaluation {
                regime: MlRegime::Integral,
                detail: format!(
                    "quadrature error estimate {:.3e} (relative) at x = {x}",
                    r.error / r.value.abs()
                ),
            });
        }
        Ok(value)
    }
}

/// Optimally truncated asymptotic sum and the relative size of the smallest
/// omitted term.
fn asymptotic_sum(coeffs: &[f64], x: f64) -> Option<(f64, f64)> {
    let inv = 1.0 / x;
    let mut acc = CompensatedSum::new();
    let mut pow = 1.0;
    let mut prev = f64::INFINITY;
    let mut seen_nonzero = false;
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        pow *= inv;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * c * pow;
        if term == 0.0 {
            continue;
        }
        if seen_nonzero && term.abs() > prev {
            // divergence: stop at the smallest term
            return Some((acc.value(), prev / acc.value().abs()));
        }
        seen_nonzero = true;
        acc.add(term);
        prev = term.abs();
        if term.abs() < 1e-18 * acc.value().abs() {
            return Some((acc.value(), prev / acc.value().abs()));
        }
    }
    if seen_nonzero {
        Some((acc.value(), prev / acc.value().abs()))
    } else {
        None
    }
}

/// E_{α,β}(-x) with a one-off evaluator.
pub fn ml_eval(params: MlParams, x: f64) -> Result<f64> {
    MittagLeffler::new(params).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ml(a: f64, b: f64) -> MittagLeffler {
        MittagLeffler::new(MlParams::new(a, b).unwrap())
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MlParams::new(0.0, 1.0).is_err());
        assert!(MlParams::new(2.0, 1.0).is_err());
        assert!(MlParams::new(0.5, f64::NAN).is_err());
        assert!(ml(0.5, 1.0).eval(-1.0).is_err());
    }

    #[test]
    fn exponential_case() {
        let v = ml(1.0, 1.0).eval(1.0).unwrap();
        assert!((v - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_is_reciprocal_gamma() {
        assert_eq!(ml(0.5, 1.0).eval(0.0).unwrap(), 1.0);
        assert!((ml(0.5, 0.5).eval(0.0).unwrap() - 0.564_189_583_5).abs() < 1e-10);
    }

    #[test]
    fn regimes_agree_at_boundaries() {
        for &a in &[0.1, 0.3, 0.5, 0.75, 0.95] {
            for &b in &[1.0, a] {
                let e = ml(a, b);
                let xa = e.asymptotic_threshold();
                assert!(xa.is_finite(), "alpha={a} beta={b}");
                // integral on both sides of each boundary against the other method
                let i_lo = e.integral(TAYLOR_LIMIT).unwrap();
                let t_lo = e.taylor_sum(TAYLOR_LIMIT).unwrap();
                assert!((i_lo - t_lo).abs() <= 1e-11 * t_lo.abs(), "{a} {b}: {i_lo} {t_lo}");
                let i_hi = e.integral(xa).unwrap();
                let (s_hi, _) = asymptotic_sum(&e.asym, xa).unwrap();
                assert!((i_hi - s_hi).abs() <= 1e-11 * s_hi.abs(), "{a} {b}: {i_hi} {s_hi}");
            }
        }
    }
}
