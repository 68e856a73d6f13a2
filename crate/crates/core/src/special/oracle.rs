//! Extended-precision reference values of E_{α,β}(-x), independent of the
//! double-precision evaluator.
//!
//! Two routes, both in MPFR arithmetic:
//!
//! * the defining series, summed with enough guard bits to absorb the
//!   cancellation (the largest term is about e^{x^{1/α}}) and stopped with a
//!   rigorous geometric bound on the tail;
//! * for arguments where the series would need too many terms or bits, the
//!   real-line integral representation (0 < α < 1, 0 < β < 1 + α) by
//!   tanh-sinh quadrature with level doubling.
//!
//! Accuracy is relative: |error| ≤ 10^{-digits} |E|.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::special::gamma::ln_gamma;
use crate::special::mittag_leffler::MlParams;

const MAX_SERIES_TERMS: usize = 2_000;
const MAX_GUARD_DIGITS: f64 = 300.0;
const MAX_LEVEL: u32 = 12;

/// E_{α,β}(-x) to `digits` significant decimal digits.
pub fn ml_oracle(params: MlParams, x: f64, digits: u32) -> Result<Float> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "oracle argument must be finite and >= 0, got {x}"
        )));
    }
    if digits == 0 || digits > 200 {
        return Err(Error::ParameterDomain(format!(
            "oracle digits must lie in 1..=200, got {digits}"
        )));
    }
    if let Some(terms) = series_terms(params, x, digits) {
        return Ok(series(params, x, digits, terms));
    }
    let (a, b) = (params.alpha(), params.beta());
    if a < 1.0 && b > 0.0 && b < 1.0 + a {
        return integral(params, x, digits);
    }
    Err(Error::OracleRange(format!(
        "no extended-precision route for alpha={a}, beta={b}, x={x}"
    )))
}

fn bits(decimal_digits: f64) -> u32 {
    (decimal_digits * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

fn is_pole(y: f64) -> bool {
    y <= 0.0 && y == y.floor()
}

/// Guard digits and number of terms needed by the series, or `None` when the
/// budget is exceeded.
fn series_terms(params: MlParams, x: f64, digits: u32) -> Option<(usize, f64)> {
    let (a, b) = (params.alpha(), params.beta());
    if x == 0.0 {
        return Some((1, 0.0));
    }
    let lx = x.ln();
    // log of the largest term magnitude and the index where terms fall below
    // the target relative to it
    let mut peak = f64::NEG_INFINITY;
    let target = digits as f64 * std::f64::consts::LN_10;
    for k in 0..MAX_SERIES_TERMS {
        let y = a * k as f64 + b;
        if is_pole(y) {
            continue;
        }
        let lt = k as f64 * lx - ln_gamma_abs(y);
        peak = peak.max(lt);
        let guard = (peak.max(0.0)) / std::f64::consts::LN_10;
        if guard > MAX_GUARD_DIGITS {
            return None;
        }
        // past the maximum, terms decrease monotonically
        if lt < peak && lt < -target - 2.0 * guard * std::f64::consts::LN_10 - 5.0 {
            return Some((k + 1, guard));
        }
    }
    None
}

fn ln_gamma_abs(y: f64) -> f64 {
    if y > 0.0 {
        ln_gamma(y)
    } else {
        // |Γ(y)| = π / (|sin πy| Γ(1-y))
        std::f64::consts::PI.ln() - crate::special::gamma::sin_pi(y).abs().ln() - ln_gamma(1.0 - y)
    }
}

fn series(params: MlParams, x: f64, digits: u32, (terms, guard): (usize, f64)) -> Float {
    let prec = bits(digits as f64 + guard + 10.0);
    let (a, b) = (params.alpha(), params.beta());
    let xf = Float::with_val(prec, x);
    let af = Float::with_val(prec, a);
    let bf = Float::with_val(prec, b);
    let mut pow = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 0);
    let mut k = 0usize;
    loop {
        let y = a * k as f64 + b;
        if !is_pole(y) {
            // the argument is formed in extended precision: the cancellation
            // would amplify its f64 rounding
            let g = (Float::with_val(prec, &af * k as u32) + &bf).gamma();
            let term = Float::with_val(prec, &pow / &g);
            sum += &term;
            if k + 1 >= terms && tail_negligible(a, b, k, x, &term, &sum, digits) {
                return sum;
            }
        }
        pow *= &xf;
        pow = -pow;
        k += 1;
    }
}

/// Rigorous tail check: once αk + β > 0 the ratio |t_{k+1}/t_k| =
/// x Γ(αk+β)/Γ(αk+α+β) decreases in k, so if it is at most 1/2 the tail is
/// bounded by |t_k|.
fn tail_negligible(a: f64, b: f64, k: usize, x: f64, term: &Float, sum: &Float, digits: u32) -> bool {
    let y = a * k as f64 + b;
    if y <= 0.0 {
        return false;
    }
    let ratio = x * (ln_gamma(y) - ln_gamma(y + a)).exp();
    if ratio > 0.5 {
        return false;
    }
    let bound = term.to_f64().abs();
    let s = sum.to_f64().abs();
    bound <= 10f64.powi(-(digits as i32) - 1) * s || (s == 0.0 && bound == 0.0)
}

fn integral(params: MlParams, x: f64, digits: u32) -> Result<Float> {
    let prec = bits(digits as f64 + 15.0);
    let (a, b) = (params.alpha(), params.beta());
    let pi = Float::with_val(prec, Constant::Pi);
    let sb = Float::with_val(prec, &pi * b).sin();
    let sba = Float::with_val(prec, &pi * (b - a)).sin();
    let ca = Float::with_val(prec, &pi * a).cos();
    let p = Float::with_val(prec, (1.0 - b) / a);
    let q = Float::with_val(prec, 1.0 / a);
    let xf = Float::with_val(prec, x);
    let x2 = Float::with_val(prec, &xf * &xf);
    let two_x_ca = Float::with_val(prec, &xf * &ca) * 2u32;
    let x_sba = Float::with_val(prec, &xf * &sba);

    let f = |v: &Float| -> Float {
        if v.is_zero() {
            return Float::with_val(prec, 0);
        }
        let vp = v.clone().pow(&p);
        let e = (-v.clone().pow(&q)).exp();
        let num = Float::with_val(prec, v * &sb) + &x_sba;
        let den = Float::with_val(prec, v * v) + Float::with_val(prec, v * &two_x_ca) + &x2;
        vp * num * e / den
    };

    // upper cut where e^{-v^{1/α}} v^{p+1} is far below the target
    let pexp = ((1.0 - b) / a).max(0.0) + 1.0;
    let mut l = (digits as f64 + 40.0) * std::f64::consts::LN_10;
    l += pexp * a * l.ln();
    let upper = l.powf(a);

    let mut edges = vec![0.0, upper];
    edges.push(1.0f64.min(upper / 2.0));
    if (a * std::f64::consts::PI).cos() < 0.0 {
        let peak = -x * (a * std::f64::consts::PI).cos();
        let w = x * (a * std::f64::consts::PI).sin();
        for s in [-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 4.0] {
            edges.push(peak + s * w);
        }
    }
    edges.retain(|&e| (0.0..=upper).contains(&e));
    edges.sort_by(|u, v| u.partial_cmp(v).unwrap());
    edges.dedup();

    let mut total = Float::with_val(prec, 0);
    for w in edges.windows(2) {
        total += tanh_sinh(&f, w[0], w[1], prec, digits)?;
    }
    let scale = Float::with_val(prec, &pi * a);
    Ok(total / scale)
}

/// Tanh-sinh quadrature on [lo, hi], doubling the level until successive
/// estimates agree to well below the target.
fn tanh_sinh<F: Fn(&Float) -> Float>(f: &F, lo: f64, hi: f64, prec: u32, digits: u32) -> Result<Float> {
    let a = Float::with_val(prec, lo);
    let b = Float::with_val(prec, hi);
    let r = Float::with_val(prec, (hi - lo) / 2.0);
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let d = prec as f64 / std::f64::consts::LOG2_10;
    let tmax = (d * std::f64::consts::LN_10 / std::f64::consts::PI).asinh() + 0.5;

    // contribution of abscissa t ≥ 0 (and its mirror)
    let node = |t: f64| -> Float {
        let tf = Float::with_val(prec, t);
        let sh = tf.clone().sinh();
        let ch = tf.cosh();
        let u = Float::with_val(prec, &half_pi * &sh);
        let cu = u.clone().cosh();
        let w = Float::with_val(prec, &half_pi * &ch) / Float::with_val(prec, &cu * &cu);
        // distance to the endpoints: r (1 - tanh u) = 2r / (e^{2u} + 1)
        let e2u = Float::with_val(prec, &u * 2u32).exp();
        let delta = Float::with_val(prec, &r * 2u32) / (e2u + 1u32);
        if t == 0.0 {
            let mid = Float::with_val(prec, &a + &r);
            return f(&mid) * w;
        }
        let left = Float::with_val(prec, &a + &delta);
        let right = Float::with_val(prec, &b - &delta);
        (f(&left) + f(&right)) * w
    };

    let mut h = 1.0;
    let mut acc = Float::with_val(prec, 0);
    let n0 = tmax.ceil() as usize;
    for k in 0..=n0 {
        acc += node(k as f64);
    }
    let mut est = Float::with_val(prec, &acc * &r) * h;
    for level in 1..=MAX_LEVEL {
        h /= 2.0;
        let n = (tmax / h).ceil() as usize;
        let mut k = 1;
        while k <= n {
            acc += node(k as f64 * h);
            k += 2;
        }
        let next = Float::with_val(prec, &acc * &r) * h;
        let diff = Float::with_val(prec, &next - &est).abs().to_f64();
        let mag = next.to_f64().abs();
        est = next;
        if level >= 3 && diff <= 10f64.powi(-(digits as i32) - 2) * mag {
            return Ok(est);
        }
        if level >= 3 && mag == 0.0 && diff == 0.0 {
            return Ok(est);
        }
    }
    Err(Error::OracleRange(format!(
        "tanh-sinh did not converge on [{lo}, {hi}]"
    )))
}
