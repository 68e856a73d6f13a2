use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::fem::{Mesh, NodalField};
use crate::linalg::Dst1;
use crate::par::Execution;
use crate::spectral::{Domain, SpectralField};

/// Exact sine coefficients (u_h, φ_j) of a piecewise-linear function for
/// every mode up to `truncation` per axis.
pub fn fe_sine_coefficients(u: &NodalField, truncation: usize) -> Result<SpectralField> {
    fe_sine_coefficients_with(u, truncation, Execution::default())
}

pub fn fe_sine_coefficients_with(u: &NodalField, truncation: usize, exec: Execution) -> Result<SpectralField> {
    if truncation == 0 {
        return Err(Error::ParameterDomain("truncation must be at least 1".into()));
    }
    match u.mesh {
        Mesh::D1(m) => {
            let n = m.interior();
            let h = m.h();
            let period = 2 * (n + 1);
            // S(r) = Σ_k U_k sin(rπk/(n+1)) is odd and 2(n+1)-periodic in r
            let base = Dst1::new(n).apply(&u.values);
            let s = |j: usize| {
                let r = j % period;
                if r == 0 || r == n + 1 {
                    0.0
                } else if r <= n {
                    base[r - 1]
                } else {
                    -base[period - r - 1]
                }
            };
            let coeffs = (1..=truncation)
                .map(|j| {
                    let w = j as f64 * PI;
                    SQRT_2 * 2.0 * (1.0 - (w * h).cos()) / (h * w * w) * s(j)
                })
                .collect();
            SpectralField::from_coeffs(Domain::Interval01, truncation, coeffs)
        }
        Mesh::D2(m) => {
            let n = m.subdivisions();
            let side = m.side();
            let h = m.h();
            let period = 2 * n;
            // separable transforms over one period of (p, q)
            let sin_t: Vec<f64> = (0..period * side)
                .map(|x| (PI * ((x / side) * (x % side + 1)) as f64 / n as f64).sin())
                .collect();
            let cos_t: Vec<f64> = (0..period * side)
                .map(|x| (PI * ((x / side) * (x % side + 1)) as f64 / n as f64).cos())
                .collect();
            let ts = separable(&sin_t, &u.values, period, side, exec);
            let tc = separable(&cos_t, &u.values, period, side, exec);
            let j = truncation;
            let rows = exec.map_range(j, |pi| {
                let p = pi + 1;
                let w = p as f64 * PI;
                (1..=j)
                    .map(|q| {
                        let v = q as f64 * PI;
                        let fp = hat_transform(w, v, h);
                        let fm = hat_transform(w, -v, h);
                        let idx = (p % period) * period + (q % period);
                        (fp + fm) * ts[idx] + (fm - fp) * tc[idx]
                    })
                    .collect::<Vec<f64>>()
            });
            SpectralField::from_coeffs(Domain::Square01, j, rows.into_iter().flatten().collect())
        }
    }
}

/// Fourier transform of the hat function of this triangulation at the
/// origin: h² sinc(ωh/2) sinc(νh/2) sinc((ω+ν)h/2).
fn hat_transform(w: f64, v: f64, h: f64) -> f64 {
    h * h * sinc(0.5 * w * h) * sinc(0.5 * v * h) * sinc(0.5 * (w + v) * h)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// T[p][q] = Σ_{i,j} K[p][i] U[i][j] K[q][j] with K of shape period × side.
fn separable(k: &[f64], u: &[f64], period: usize, side: usize, exec: Execution) -> Vec<f64> {
    // first contract over j: R[i][q] = Σ_j U[i][j] K[q][j]
    let r = exec.map_range(side, |i| {
        (0..period)
            .map(|q| (0..side).map(|j| u[i * side + j] * k[q * side + j]).sum::<f64>())
            .collect::<Vec<f64>>()
    });
    exec.map_range(period, |p| {
        (0..period)
            .map(|q| (0..side).map(|i| k[p * side + i] * r[i][q]).sum::<f64>())
            .collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .collect()
}
