//! Dirichlet-Laplacian eigenpairs on the unit interval and unit square, sine
//! expansions of the source profiles and Ḣ^s norms.

mod energy;

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use energy::profile_energy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Interval01,
    Square01,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::Interval01 => 1,
            Domain::Square01 => 2,
        }
    }
}

/// Mode index: `j` on the interval, `(n, m)` on the square. All entries ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeIndex {
    D1(usize),
    D2(usize, usize),
}

impl ModeIndex {
    fn check(self, domain: Domain) -> Result<()> {
        match (domain, self) {
            (Domain::Interval01, ModeIndex::D1(j)) if j >= 1 => Ok(()),
            (Domain::Square01, ModeIndex::D2(n, m)) if n >= 1 && m >= 1 => Ok(()),
            _ => Err(Error::ParameterDomain(format!(
                "mode index {self:?} is not valid on {domain:?}"
            ))),
        }
    }
}

/// Eigenvalue of -Δ: (jπ)² or (n² + m²)π².
pub fn eigenvalue(domain: Domain, idx: ModeIndex) -> Result<f64> {
    idx.check(domain)?;
    Ok(match idx {
        ModeIndex::D1(j) => (j as f64 * PI).powi(2),
        ModeIndex::D2(n, m) => ((n * n + m * m) as f64) * PI * PI,
    })
}

/// L²-normalized eigenfunction √2 sin(jπx) or 2 sin(nπx) sin(mπy).
pub fn eigenfunction_value(domain: Domain, idx: ModeIndex, point: &[f64]) -> Result<f64> {
    idx.check(domain)?;
    if point.len() != domain.dim() || point.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::ParameterDomain(format!(
            "point {point:?} is not in the closed {domain:?}"
        )));
    }
    Ok(match idx {
        ModeIndex::D1(j) => SQRT_2 * (j as f64 * PI * point[0]).sin(),
        ModeIndex::D2(n, m) => 2.0 * (n as f64 * PI * point[0]).sin() * (m as f64 * PI * point[1]).sin(),
    })
}

/// Truncated sine-series coefficients with explicit truncation `J` per axis.
/// Storage is dense: index `j-1` in 1D, `(n-1) * J + (m-1)` in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    domain: Domain,
    truncation: usize,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(domain: Domain, truncation: usize) -> Self {
        let len = truncation.pow(domain.dim() as u32);
        Self {
            domain,
            truncation,
            coeffs: vec![0.0; len],
        }
    }

    pub fn from_coeffs(domain: Domain, truncation: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != truncation.pow(domain.dim() as u32) {
            return Err(Error::ParameterDomain(format!(
                "expected {} coefficients for J = {truncation} on {domain:?}, got {}",
                truncation.pow(domain.dim() as u32),
                coeffs.len()
            )));
        }
        Ok(Self {
            domain,
            truncation,
            coeffs,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficient of a mode; zero beyond the truncation.
    pub fn get(&self, idx: ModeIndex) -> f64 {
        let j = self.truncation;
        match (self.domain, idx) {
            (Domain::Interval01, ModeIndex::D1(k)) if (1..=j).contains(&k) => self.coeffs[k - 1],
            (Domain::Square01, ModeIndex::D2(n, m)) if (1..=j).contains(&n) && (1..=j).contains(&m) => {
                self.coeffs[(n - 1) * j + (m - 1)]
            }
            _ => 0.0,
        }
    }

    /// Eigenvalue of the mode stored at flat position `i`.
    pub fn eigenvalue_at(&self, i: usize) -> f64 {
        flat_eigenvalue(self.domain, self.truncation, i)
    }

    /// Mode index stored at flat position `i`.
    pub fn index_at(&self, i: usize) -> ModeIndex {
        match self.domain {
            Domain::Interval01 => ModeIndex::D1(i + 1),
            Domain::Square01 => ModeIndex::D2(i / self.truncation + 1, i % self.truncation + 1),
        }
    }

    /// Point value of the truncated series.
    pub fn value_at(&self, point: &[f64]) -> Result<f64> {
        let mut acc = crate::par::CompensatedSum::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                acc.add(c * eigenfunction_value(self.domain, self.index_at(i), point)?);
            }
        }
        Ok(acc.value())
    }

    pub fn scale(&mut self, factor: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= factor);
    }
}

pub(crate) fn flat_eigenvalue(domain: Domain, truncation: usize, i: usize) -> f64 {
    match domain {
        Domain::Interval01 => ((i + 1) as f64 * PI).powi(2),
        Domain::Square01 => {
            let n = (i / truncation + 1) as f64;
            let m = (i % truncation + 1) as f64;
            (n * n + m * m) * PI * PI
        }
    }
}

/// (Σ λ^s c²)^{1/2} over the stored modes.
pub fn norm_dot_h(field: &SpectralField, s: f64) -> Result<f64> {
    if !(-2.0..=3.0).contains(&s) {
        return Err(Error::ParameterDomain(format!(
            "smoothness index must lie in [-2, 3], got {s}"
        )));
    }
    let acc: crate::par::CompensatedSum = field
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, &c)| field.eigenvalue_at(i).powf(s) * c * c)
        .collect();
    Ok(acc.value().sqrt())
}

/// Spatial shape of a source term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    /// χ_{[a,b]} on the interval.
    CharInterval { a: f64, b: f64 },
    /// δ_{x0} on the interval.
    PointMass { x0: f64 },
    /// χ_{[a,b]×[c,d]} on the square.
    CharRect { a: f64, b: f64, c: f64, d: f64 },
    /// Line measure on the boundary of [a,b]×[c,d].
    CurveMass { a: f64, b: f64, c: f64, d: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialProfile {
    pub kind: ProfileKind,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl SpatialProfile {
    pub fn new(kind: ProfileKind, amplitude: f64) -> Result<Self> {
        let p = Self { kind, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |lo: f64, hi: f64| (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo < hi;
        let ok = match self.kind {
            ProfileKind::CharInterval { a, b } => unit(a, b),
            ProfileKind::PointMass { x0 } => x0 > 0.0 && x0 < 1.0,
            ProfileKind::CharRect { a, b, c, d } | ProfileKind::CurveMass { a, b, c, d } => unit(a, b) && unit(c, d),
        };
        if ok && self.amplitude.is_finite() {
            Ok(())
        } else {
            Err(Error::UnsupportedProfile(format!(
                "invalid geometry or amplitude in {self:?}"
            )))
        }
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            ProfileKind::CharInterval { .. } | ProfileKind::PointMass { .. } => Domain::Interval01,
            ProfileKind::CharRect { .. } | ProfileKind::CurveMass { .. } => Domain::Square01,
        }
    }

    /// Exact coefficient (g, φ) for one mode.
    pub fn coefficient(&self, idx: ModeIndex) -> f64 {
        let amp = self.amplitude;
        match (self.kind, idx) {
            (ProfileKind::CharInterval { a, b }, ModeIndex::D1(j)) => amp * SQRT_2 * interval_sine_integral(j, a, b),
            (ProfileKind::PointMass { x0 }, ModeIndex::D1(j)) => amp * SQRT_2 * (j as f64 * PI * x0).sin(),
            (ProfileKind::CharRect { a, b, c, d }, ModeIndex::D2(n, m)) => {
                amp * 2.0 * interval_sine_integral(n, a, b) * interval_sine_integral(m, c, d)
            }
            (ProfileKind::CurveMass { a, b, c, d }, ModeIndex::D2(n, m)) => {
                let (nf, mf) = (n as f64 * PI, m as f64 * PI);
                let sy = (mf * c).sin() + (mf * d).sin();
                let sx = (nf * a).sin() + (nf * b).sin();
                amp * 2.0 * (sy * interval_sine_integral(n, a, b) + sx * interval_sine_integral(m, c, d))
            }
            _ => 0.0,
        }
    }
}

/// ∫_a^b sin(jπx) dx.
pub(crate) fn interval_sine_integral(j: usize, a: f64, b: f64) -> f64 {
    let w = j as f64 * PI;
    ((w * a).cos() - (w * b).cos()) / w
}

/// Sine expansion of a profile truncated at `J` modes per axis.
pub fn expand_profile(profile: &SpatialProfile, truncation: usize) -> Result<SpectralField> {
    profile.validate()?;
    if truncation == 0 {
        return Err(Error::ParameterDomain("truncation must be at least 1".into()));
    }
    let domain = profile.domain();
    let mut field = SpectralField::zeros(domain, truncation);
    for i in 0..field.coeffs.len() {
        field.coeffs[i] = profile.coefficient(field.index_at(i));
    }
    Ok(field)
}

/// Piecewise-constant function of time: `levels[i]` on
/// `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeProfile {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
}

impl TimeProfile {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        let p = Self { breakpoints, levels };
        p.validate()?;
        Ok(p)
    }

    /// Constant level on [0, T].
    pub fn constant(level: f64, horizon: f64) -> Self {
        Self {
            breakpoints: vec![0.0, horizon],
            levels: vec![level],
        }
    }

    /// 1 on [0, 1/2), 2 on [1/2, 1].
    pub fn step_up() -> Self {
        Self {
            breakpoints: vec![0.0, 0.5, 1.0],
            levels: vec![1.0, 2.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.breakpoints;
        let ok = b.len() >= 2
            && self.levels.len() + 1 == b.len()
            && b[0] == 0.0
            && b.windows(2).all(|w| w[1] > w[0])
            && b.iter().chain(&self.levels).all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "time profile needs ascending breakpoints from 0 and one level per piece: {self:?}"
            )))
        }
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().expect("validated")
    }

    /// Interior jump times (breakpoints strictly inside (0, T)).
    pub fn jumps(&self) -> &[f64] {
        &self.breakpoints[1..self.breakpoints.len() - 1]
    }

    /// Pieces as (start, end, level).
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.levels)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    /// Left-continuous value: level of the piece with t ∈ (t_{i-1}, t_i];
    /// zero at t ≤ 0.
    pub fn value_left(&self, t: f64) -> f64 {
        self.pieces()
            .find(|&(lo, hi, _)| t > lo && t <= hi)
            .map_or(0.0, |p| p.2)
    }

    /// Right-continuous value: level of the piece with t ∈ [t_{i-1}, t_i),
    /// the last piece also covering T. Times within `snap` of a breakpoint
    /// are treated as that breakpoint.
    pub fn value_right(&self, t: f64, snap: f64) -> f64 {
        let n = self.levels.len();
        for (i, (lo, hi, c)) in self.pieces().enumerate() {
            let last = i + 1 == n;
            if t >= lo - snap && (t < hi - snap || (last && t <= hi + snap)) {
                return c;
            }
        }
        0.0
    }
}

/// Separable source f(x, t) = temporal(t) · spatial(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceTerm {
    pub spatial: SpatialProfile,
    pub temporal: TimeProfile,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussRule;

    #[test]
    fn eigenvalues() {
        let pi2 = PI * PI;
        assert!((eigenvalue(Domain::Interval01, ModeIndex::D1(1)).unwrap() - pi2).abs() < 1e-13);
        assert!((eigenvalue(Domain::Interval01, ModeIndex::D1(3)).unwrap() - 9.0 * pi2).abs() < 1e-12);
        assert!((eigenvalue(Domain::Square01, ModeIndex::D2(1, 1)).unwrap() - 2.0 * pi2).abs() < 1e-13);
        assert!(eigenvalue(Domain::Square01, ModeIndex::D1(1)).is_err());
        assert!(eigenvalue(Domain::Interval01, ModeIndex::D1(0)).is_err());
    }

    #[test]
    fn eigenfunction_examples() {
        let v = eigenfunction_value(Domain::Interval01, ModeIndex::D1(1), &[0.5]).unwrap();
        assert!((v - SQRT_2).abs() < 1e-15);
        assert_eq!(
            eigenfunction_value(Domain::Interval01, ModeIndex::D1(7), &[0.0]).unwrap(),
            0.0
        );
        let v = eigenfunction_value(Domain::Square01, ModeIndex::D2(2, 1), &[0.25, 0.5]).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormality_on_interval() {
        let rule = GaussRule::new(40);
        for i in 1..=8 {
            for j in 1..=8 {
                let v = rule.integrate(0.0, 1.0, |x| {
                    eigenfunction_value(Domain::Interval01, ModeIndex::D1(i), &[x]).unwrap()
                        * eigenfunction_value(Domain::Interval01, ModeIndex::D1(j), &[x]).unwrap()
                });
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-10, "{i} {j} {v}");
            }
        }
    }

    #[test]
    fn char_interval_coefficients() {
        let p = SpatialProfile::new(ProfileKind::CharInterval { a: 0.0, b: 0.5 }, 1.0).unwrap();
        let f = expand_profile(&p, 8).unwrap();
        let rule = GaussRule::new(30);
        for j in 1..=8 {
            let q = rule.integrate(0.0, 0.5, |x| SQRT_2 * (j as f64 * PI * x).sin());
            assert!((f.get(ModeIndex::D1(j)) - q).abs() < 1e-13);
        }
    }

    #[test]
    fn point_mass_coefficients() {
        let p = SpatialProfile::new(ProfileKind::PointMass { x0: 0.5 }, 1.0).unwrap();
        let f = expand_profile(&p, 6).unwrap();
        for j in 1..=6 {
            let expect = if j % 2 == 0 {
                0.0
            } else {
                SQRT_2 * if j % 4 == 1 { 1.0 } else { -1.0 }
            };
            assert!((f.get(ModeIndex::D1(j)) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn curve_mass_matches_line_quadrature() {
        let (a, b, c, d) = (0.25, 0.75, 0.25, 0.75);
        let p = SpatialProfile::new(ProfileKind::CurveMass { a, b, c, d }, 1.0).unwrap();
        let rule = GaussRule::new(40);
        for &(n, m) in &[(1, 1), (2, 3), (5, 4), (7, 7)] {
            let phi = |x: f64, y: f64| eigenfunction_value(Domain::Square01, ModeIndex::D2(n, m), &[x, y]).unwrap();
            let q = rule.integrate(a, b, |x| phi(x, c) + phi(x, d)) + rule.integrate(c, d, |y| phi(a, y) + phi(b, y));
            assert!((p.coefficient(ModeIndex::D2(n, m)) - q).abs() < 1e-12, "{n} {m}");
        }
    }

    #[test]
    fn norm_examples() {
        let f = SpectralField::from_coeffs(Domain::Interval01, 3, vec![1.0, 0.0, 0.0]).unwrap();
        assert!((norm_dot_h(&f, 1.0).unwrap() - PI).abs() < 1e-14);
        let g = SpectralField::from_coeffs(Domain::Interval01, 2, vec![3.0, 4.0]).unwrap();
        assert!((norm_dot_h(&g, 0.0).unwrap() - 5.0).abs() < 1e-14);
        assert!(norm_dot_h(&g, 3.5).is_err());
    }

    #[test]
    fn time_profile_values() {
        let p = TimeProfile::step_up();
        assert_eq!(p.value_left(0.0), 0.0);
        assert_eq!(p.value_left(0.5), 1.0);
        assert_eq!(p.value_left(0.50001), 2.0);
        assert_eq!(p.value_right(0.5, 1e-12), 2.0);
        assert_eq!(p.value_right(0.5 - 1e-14, 1e-12), 2.0);
        assert_eq!(p.value_right(1.0, 1e-12), 2.0);
        assert_eq!(p.value_right(0.0, 1e-12), 1.0);
        assert_eq!(p.jumps(), &[0.5]);
    }
}
