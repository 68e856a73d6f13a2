//! Fractional relaxation kernels built from the Mittag-Leffler function.

use crate::error::{Error, Result};
use crate::special::gamma::rgamma;
use crate::special::mittag_leffler::{MittagLeffler, MlParams};

const SMALL_ARG: f64 = 1e-4;

/// Fractional order α of the time derivative. The classical limit α = 1 is
/// admitted so that the heat equation can serve as a degenerate check.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::ParameterDomain(format!(
                "fractional order must lie in (0, 1], got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Prepared E_{α,1} and E_{α,α} evaluators for one fractional order.
#[derive(Debug, Clone)]
pub struct Kernels {
    alpha: f64,
    e1: MittagLeffler,
    ea: MittagLeffler,
    small: [f64; 4],
}

impl Kernels {
    pub fn new(alpha: FracOrder) -> Self {
        let a = alpha.value();
        let e1 = MittagLeffler::new(MlParams::new(a, 1.0).expect("order in (0, 1]"));
        let ea = MittagLeffler::new(MlParams::new(a, a).expect("order in (0, 1]"));
        let small = [
            rgamma(1.0 + a),
            rgamma(1.0 + 2.0 * a),
            rgamma(1.0 + 3.0 * a),
            rgamma(1.0 + 4.0 * a),
        ];
        Self {
            alpha: a,
            e1,
            ea,
            small,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// E_{α,1}(-x).
    pub fn e1(&self, x: f64) -> Result<f64> {
        self.e1.eval(x)
    }

    /// E_{α,α}(-x).
    pub fn ea(&self, x: f64) -> Result<f64> {
        self.ea.eval(x)
    }

    /// t^{α-1} E_{α,α}(-λ t^α).
    pub fn relaxation(&self, lambda: f64, t: f64) -> Result<f64> {
        check_lambda(lambda)?;
        if t == 0.0 {
            return Err(Error::SingularArgument(
                "relaxation kernel is unbounded at t = 0".into(),
            ));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::ParameterDomain(format!("time must be positive, got {t}")));
        }
        let ta = t.powf(self.alpha);
        Ok(ta / t * self.ea.eval(lambda * ta)?)
    }

    /// (1 - E_{α,1}(-λ t^α)) / λ.
    pub fn step_response(&self, lambda: f64, t: f64) -> Result<f64> {
        check_lambda(lambda)?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::ParameterDomain(format!("time must be non-negative, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let ta = t.powf(self.alpha);
        let z = lambda * ta;
        if z < SMALL_ARG {
            // 1 - E_{α,1}(-z) = z Σ_k (-z)^k / Γ(α(k+1)+1)
            let s = self.small[0] - z * (self.small[1] - z * (self.small[2] - z * self.small[3]));
            return Ok(ta * s);
        }
        Ok((1.0 - self.e1.eval(z)?) / lambda)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "eigenvalue must be positive, got {lambda}"
        )))
    }
}

/// t^{α-1} E_{α,α}(-λ t^α) with a one-off evaluator.
pub fn relaxation_kernel(lambda: f64, alpha: FracOrder, t: f64) -> Result<f64> {
    Kernels::new(alpha).relaxation(lambda, t)
}

/// (1 - E_{α,1}(-λ t^α)) / λ with a one-off evaluator.
pub fn step_response(lambda: f64, alpha: FracOrder, t: f64) -> Result<f64> {
    Kernels::new(alpha).step_response(lambda, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_limit() {
        let one = FracOrder::new(1.0).unwrap();
        assert!((relaxation_kernel(1.0, one, 2.0).unwrap() - (-2f64).exp()).abs() < 1e-15);
        for &t in &[1e-6, 0.3, 2.0] {
            let s = step_response(1.0, one, t).unwrap();
            assert!((s - (1.0 - (-t).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn order_domain() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.2).is_err());
        assert!(FracOrder::new(0.5).is_ok());
    }

    #[test]
    fn singular_and_zero_time() {
        let a = FracOrder::new(0.5).unwrap();
        assert!(matches!(
            relaxation_kernel(1.0, a, 0.0),
            Err(Error::SingularArgument(_))
        ));
        assert_eq!(step_response(3.0, a, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn small_argument_series_matches_direct_formula() {
        let k = Kernels::new(FracOrder::new(0.3).unwrap());
        let lambda = 2.0;
        let t = (0.99 * SMALL_ARG / lambda).powf(1.0 / 0.3);
        let series = k.step_response(lambda, t).unwrap();
        let direct = (1.0 - k.e1(lambda * t.powf(0.3)).unwrap()) / lambda;
        // the direct form loses about four digits to cancellation here
        assert!((series - direct).abs() <= 1e-11 * series);
    }
}
