use super::Mesh1D;
use crate::error::{Error, Result};
use crate::linalg::SymTridiag;
use crate::quadrature::GaussRule;

/// Matrices for -(k u')' + q u on a 1D mesh.
#[derive(Debug, Clone)]
pub struct Matrices1D {
    /// ∫ k φ_i' φ_j' + q φ_i φ_j.
    pub stiffness: SymTridiag,
    /// ∫ φ_i φ_j.
    pub mass: SymTridiag,
    /// Row sums of the mass (h on every node).
    pub lumped: Vec<f64>,
}

/// Elementwise assembly with 3-point Gauss quadrature. Fails if k is not
/// positive or q is negative at some quadrature point.
pub fn assemble_matrices<K, Q>(mesh: &Mesh1D, k: K, q: Q) -> Result<Matrices1D>
where
    K: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let n = mesh.interior();
    let h = mesh.h();
    let rule = GaussRule::new(3);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    // element e spans [x_e, x_{e+1}], e = 0..=n, with local nodes e and e+1
    for e in 0..=n {
        let (lo, hi) = (mesh.node(e), mesh.node(e + 1));
        let (mut kk, mut q00, mut q01, mut q11) = (0.0, 0.0, 0.0, 0.0);
        for (x, w) in rule.on(lo, hi) {
            let (kv, qv) = (k(x), q(x));
            if !(kv > 0.0) || !(qv >= 0.0) || !kv.is_finite() || !qv.is_finite() {
                return Err(Error::Ellipticity(format!("k = {kv}, q = {qv} at x = {x}")));
            }
            let s = (x - lo) / h;
            kk += w * kv;
            q00 += w * qv * (1.0 - s) * (1.0 - s);
            q01 += w * qv * (1.0 - s) * s;
            q11 += w * qv * s * s;
        }
        let kk = kk / (h * h);
        if e >= 1 {
            diag[e - 1] += kk + q00;
        }
        if e < n {
            diag[e] += kk + q11;
        }
        if e >= 1 && e < n {
            off[e - 1] += -kk + q01;
        }
    }
    Ok(Matrices1D {
        stiffness: SymTridiag::new(diag, off),
        mass: mesh.mass(),
        lumped: vec![h; n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive;
    use std::f64::consts::PI;

    #[test]
    fn unit_coefficients_reproduce_the_standard_matrices() {
        let m = Mesh1D::new(7).unwrap();
        let a = assemble_matrices(&m, |_| 1.0, |_| 0.0).unwrap();
        let s = m.stiffness();
        assert!(a.stiffness.diag.iter().zip(&s.diag).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(a.stiffness.off.iter().zip(&s.off).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn variable_coefficient_entries_match_adaptive_quadrature() {
        let m = Mesh1D::new(255).unwrap();
        let k = |x: f64| 3.0 + (2.0 * PI * x).sin();
        let q = |x: f64| x * x;
        let a = assemble_matrices(&m, k, q).unwrap();
        let h = m.h();
        for i in [1usize, 100, 255] {
            let dphi = |x: f64| {
                let d = x - m.node(i);
                if d.abs() >= h {
                    0.0
                } else if d < 0.0 {
                    1.0 / h
                } else {
                    -1.0 / h
                }
            };
            let f = |x: f64| k(x) * dphi(x) * dphi(x) + q(x) * m.hat(i, x).powi(2);
            let bp = [m.node(i)];
            let r = adaptive(f, m.node(i - 1), m.node(i + 1), &bp, 1e-15, 1e-15, 200);
            assert!((r.value - a.stiffness.diag[i - 1]).abs() < 1e-12 * r.value);
            if i < 255 {
                let g = |x: f64| {
                    k(x) * dphi(x) * (if x > m.node(i) { 1.0 / h } else { 0.0 }) + q(x) * m.hat(i, x) * m.hat(i + 1, x)
                };
                let r = adaptive(g, m.node(i), m.node(i + 1), &[], 1e-15, 1e-15, 200);
                assert!((r.value - a.stiffness.off[i - 1]).abs() < 1e-12 * r.value.abs());
            }
        }
    }

    #[test]
    fn rejects_non_elliptic_coefficients() {
        let m = Mesh1D::new(7).unwrap();
        assert!(matches!(
            assemble_matrices(&m, |x| x - 0.5, |_| 0.0),
            Err(Error::Ellipticity(_))
        ));
        assert!(matches!(
            assemble_matrices(&m, |_| 1.0, |_| -1.0),
            Err(Error::Ellipticity(_))
        ));
    }
}
