//! Small linear-algebra kernels: tridiagonal solves, conjugate gradients,
//! the type-I discrete sine transform and a dense symmetric eigensolver.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples i and i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &SymTridiag, b: f64) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(x, y)| a * x + b * y).collect(),
            off: self.off.iter().zip(&other.off).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn dot_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// Thomas algorithm. Fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let sub = if i > 0 { self.off[i - 1] } else { 0.0 };
            let piv = self.diag[i] - if i > 0 { sub * c[i - 1] } else { 0.0 };
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::Solver(format!("zero pivot in row {i}")));
            }
            c[i] = if i + 1 < n { self.off[i] / piv } else { 0.0 };
            d[i] = (rhs[i] - if i > 0 { sub * d[i - 1] } else { 0.0 }) / piv;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }
}

/// Conjugate gradients for an SPD operator given as a closure.
pub fn conjugate_gradient<A>(apply: A, rhs: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let b2 = dot(rhs, rhs);
    if b2 == 0.0 {
        return Ok(x);
    }
    let mut rr = b2;
    for _ in 0..max_iter {
        if rr <= rel_tol * rel_tol * b2 {
            return Ok(x);
        }
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver("operator is not positive definite".into()));
        }
        let step = rr / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr <= rel_tol * rel_tol * b2 {
        Ok(x)
    } else {
        Err(Error::Solver(format!(
            "conjugate gradients stalled at relative residual {:.3e}",
            (rr / b2).sqrt()
        )))
    }
}

/// Type-I discrete sine transform of length n:
/// y_j = Σ_{k=1}^{n} x_k sin(jkπ/(n+1)), j = 1..n. Dense table, O(n²).
#[derive(Debug, Clone)]
pub struct Dst1 {
    n: usize,
    table: Vec<f64>,
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        let m = 2 * (n + 1);
        // sin(rπ/(n+1)) for r mod 2(n+1)
        let table = (0..m).map(|r| (PI * r as f64 / (n + 1) as f64).sin()).collect();
        Self { n, table }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn sin(&self, j: usize, k: usize) -> f64 {
        self.table[(j * k) % self.table.len()]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (1..=self.n)
            .map(|j| (1..=self.n).map(|k| x[k - 1] * self.sin(j, k)).sum())
            .collect()
    }

    /// Row-major n×n grid, transform along both axes.
    pub fn apply_2d(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            let row = self.apply(&x[i * n..(i + 1) * n]);
            tmp[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        let mut out = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = tmp[i * n + j];
            }
            let c = self.apply(&col);
            for i in 0..n {
                out[i * n + j] = c[i];
            }
        }
        out
    }
}

/// Solve the 5-point system (4u_ij - neighbours) = rhs on an n×n interior
/// grid with zero boundary by sine diagonalization.
pub fn solve_five_point(rhs: &[f64], n: usize) -> Vec<f64> {
    let dst = Dst1::new(n);
    let hat = dst.apply_2d(rhs);
    let mu: Vec<f64> = (1..=n)
        .map(|j| 4.0 * (PI * j as f64 / (2.0 * (n + 1) as f64)).sin().powi(2))
        .collect();
    let scaled: Vec<f64> = (0..n * n).map(|idx| hat[idx] / (mu[idx / n] + mu[idx % n])).collect();
    // DST-I is its own inverse up to the factor 2/(n+1) per axis
    let f = 2.0 / (n + 1) as f64;
    dst.apply_2d(&scaled).into_iter().map(|v| v * f * f).collect()
}

/// Cholesky factor L (lower) of a dense SPD matrix.
pub fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = a[i][i] - s;
                if !(v > 0.0) {
                    return Err(Error::Solver("matrix is not positive definite".into()));
                }
                l[i][i] = v.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Eigenvalues (ascending) and column eigenvectors of a dense symmetric
/// matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (lo, hi) = a.split_at_mut(q);
                for (apk, aqk) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (vals, vecs)
}

/// Eigenvalues (ascending) of the generalized problem A x = λ B x with
/// A symmetric and B SPD, through L^{-1} A L^{-T}.
pub fn generalized_eigenvalues(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = a.len();
    let l = cholesky(b)?;
    // forward-substitute columns: Y = L^{-1} A, then C = Y L^{-T}
    let lower_solve = |rhs: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[i][k] * x[k]).sum();
            x[i] = (rhs[i] - s) / l[i][i];
        }
        x
    };
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| lower_solve(&(0..n).map(|i| a[i][j]).collect::<Vec<_>>()))
        .collect();
    // cols[j][i] = (L^{-1} A)_{ij}; rows of (L^{-1} A) solved again
    let c_rows: Vec<Vec<f64>> = (0..n)
        .map(|i| lower_solve(&(0..n).map(|j| cols[j][i]).collect::<Vec<_>>()))
        .collect();
    Ok(jacobi_eigen(&c_rows).0)
}
