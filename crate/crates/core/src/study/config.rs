use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{NormKind, TimeAggregation};
use crate::error::{Error, Result};
use crate::fem::{Mesh, Mesh1D, Mesh2D, Projection, SchemeKind};
use crate::spectral::{Domain, ProfileKind, SourceTerm, SpatialProfile, TimeProfile};

/// Version of the configuration schema this build reads.
pub const SCHEMA_VERSION: u32 = 1;

/// A spatially varying coefficient of the elliptic operator.
pub type Coefficient = fn(f64) -> f64;

/// The benchmark data sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExampleId {
    /// χ_[0,1/2](x) on (0,1), h = 1/2^k.
    #[serde(rename = "1a")]
    Smooth1a,
    /// δ_{1/2} with h = 1/(2^k+1), the source between nodes.
    #[serde(rename = "1b-offgrid")]
    DeltaOffGrid,
    /// δ_{1/2} with h = 1/2^k, the source on a node.
    #[serde(rename = "1b-ongrid")]
    DeltaOnGrid,
    /// χ_[0,1/2](x) with k(x) = 3 + sin 2πx, L1 in time, self-benchmarked.
    #[serde(rename = "1c")]
    Variable1c,
    /// χ on [1/4,3/4]² in the unit square.
    #[serde(rename = "2a")]
    Square2a,
    /// Line measure on the boundary of [1/4,3/4]², lumped projection.
    #[serde(rename = "2b")]
    Curve2b,
    /// As 2b with the L² projection of the source.
    #[serde(rename = "2b-consistent-projection")]
    Curve2bConsistent,
}

impl ExampleId {
    pub const ALL: [ExampleId; 7] = [
        ExampleId::Smooth1a,
        ExampleId::DeltaOffGrid,
        ExampleId::DeltaOnGrid,
        ExampleId::Variable1c,
        ExampleId::Square2a,
        ExampleId::Curve2b,
        ExampleId::Curve2bConsistent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Smooth1a => "1a",
            ExampleId::DeltaOffGrid => "1b-offgrid",
            ExampleId::DeltaOnGrid => "1b-ongrid",
            ExampleId::Variable1c => "1c",
            ExampleId::Square2a => "2a",
            ExampleId::Curve2b => "2b",
            ExampleId::Curve2bConsistent => "2b-consistent-projection",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown example id {s:?}")))
    }

    pub fn domain(self) -> Domain {
        match self {
            ExampleId::Square2a | ExampleId::Curve2b | ExampleId::Curve2bConsistent => Domain::Square01,
            _ => Domain::Interval01,
        }
    }

    /// f(x, t) = (χ_[1/2,1](t) + 1) g(x).
    pub fn source(self) -> SourceTerm {
        let kind = match self {
            ExampleId::Smooth1a | ExampleId::Variable1c => ProfileKind::CharInterval { a: 0.0, b: 0.5 },
            ExampleId::DeltaOffGrid | ExampleId::DeltaOnGrid => ProfileKind::PointMass { x0: 0.5 },
            ExampleId::Square2a => ProfileKind::CharRect {
                a: 0.25,
                b: 0.75,
                c: 0.25,
                d: 0.75,
            },
            ExampleId::Curve2b | ExampleId::Curve2bConsistent => ProfileKind::CurveMass {
                a: 0.25,
                b: 0.75,
                c: 0.25,
                d: 0.75,
            },
        };
        SourceTerm {
            spatial: SpatialProfile { kind, amplitude: 1.0 },
            temporal: TimeProfile::step_up(),
        }
    }

    /// Mesh of refinement level k.
    pub fn mesh(self, k: u32) -> Result<Mesh> {
        Ok(match self {
            ExampleId::DeltaOffGrid => Mesh::D1(Mesh1D::shifted(k)?),
            _ if self.domain() == Domain::Square01 => Mesh::D2(Mesh2D::dyadic(k)?),
            _ => Mesh::D1(Mesh1D::dyadic(k)?),
        })
    }

    /// Source projection; `None` follows the scheme.
    pub fn projection(self) -> Option<Projection> {
        match self {
            ExampleId::Curve2b => Some(Projection::Lumped),
            ExampleId::Curve2bConsistent => Some(Projection::L2),
            _ => None,
        }
    }

    /// Diffusion coefficient k(x) and potential q(x) of the operator.
    pub fn coefficients(self) -> (Coefficient, Coefficient) {
        fn unit(_: f64) -> f64 {
            1.0
        }
        fn zero(_: f64) -> f64 {
            0.0
        }
        fn wavy(x: f64) -> f64 {
            3.0 + (2.0 * std::f64::consts::PI * x).sin()
        }
        match self {
            ExampleId::Variable1c => (wavy, zero),
            _ => (unit, zero),
        }
    }

    /// Reference-slope guides (L², H¹) expected for this data set.
    pub fn guide_slopes(self) -> [f64; 2] {
        match self {
            ExampleId::Smooth1a | ExampleId::Variable1c | ExampleId::Square2a => [2.0, 1.0],
            ExampleId::DeltaOffGrid | ExampleId::Curve2bConsistent => [1.5, 0.5],
            ExampleId::DeltaOnGrid | ExampleId::Curve2b => [2.0, 0.5],
        }
    }
}

/// Numerical guards and discretization knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Largest accepted relative change of an error between reference
    /// truncations J and J/2.
    pub truncation_drift: f64,
    /// Relative change accepted under one refinement of a time quadrature.
    pub aggregation: f64,
    /// Modes per axis of the reference; chosen per dimension when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_truncation: Option<usize>,
    /// L1 time step (example 1c).
    pub tau: f64,
    /// Level of the self-benchmark mesh (example 1c).
    pub benchmark_level: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            truncation_drift: 1e-2,
            aggregation: 5e-3,
            reference_truncation: None,
            tau: 2e-4,
            benchmark_level: 9,
        }
    }
}

fn default_scheme() -> SchemeKind {
    SchemeKind::LumpedMass
}

fn default_norms() -> Vec<NormKind> {
    vec![NormKind::L2, NormKind::H1]
}

/// A convergence study: one example, several fractional orders, a
/// sequence of refinement levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub schema_version: u32,
    pub example: ExampleId,
    pub alphas: Vec<f64>,
    pub levels: Vec<u32>,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeKind,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormKind>,
    pub aggregation: TimeAggregation,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl StudyConfig {
    /// Parse and validate a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: StudyConfig = serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.levels.is_empty() {
            return fail("levels must not be empty".into());
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return fail(format!("levels must be strictly ascending: {:?}", self.levels));
        }
        let max_level = if self.example.domain() == Domain::Square01 {
            10
        } else {
            16
        };
        if self.levels[0] < 1 || *self.levels.last().unwrap() > max_level {
            return fail(format!("levels must lie in 1..={max_level}"));
        }
        if self.alphas.is_empty() {
            return fail("alphas must not be empty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return fail(format!("alpha {a} outside (0, 1)"));
        }
        let mut sorted = self.alphas.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return fail("alphas must be distinct".into());
        }
        if self.norms.is_empty() {
            return fail("norms must not be empty".into());
        }
        if (1..self.norms.len()).any(|i| self.norms[..i].contains(&self.norms[i])) {
            return fail("norms must be distinct".into());
        }
        if self.example.domain() == Domain::Square01 && self.scheme != SchemeKind::LumpedMass {
            return fail(format!(
                "example {} is two-dimensional and requires the lumped_mass scheme",
                self.example.name()
            ));
        }
        let horizon = self.example.source().temporal.horizon();
        if let TimeAggregation::AtTime { t } = self.aggregation {
            if !(t > 0.0 && t <= horizon) {
                return fail(format!("evaluation time {t} outside (0, {horizon}]"));
            }
        }
        let tol = &self.tolerances;
        if !(tol.truncation_drift > 0.0) || !(tol.aggregation > 0.0) {
            return fail("tolerances must be positive".into());
        }
        if matches!(tol.reference_truncation, Some(j) if j < 16) {
            return fail("reference_truncation must be at least 16".into());
        }
        if self.example == ExampleId::Variable1c {
            let TimeAggregation::AtTime { t } = self.aggregation else {
                return fail("example 1c supports only at_time aggregation".into());
            };
            if !(tol.tau > 0.0) {
                return fail("tau must be positive".into());
            }
            let steps = t / tol.tau;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return fail(format!("tau {} must divide the evaluation time {t}", tol.tau));
            }
            if tol.benchmark_level <= *self.levels.last().unwrap() || tol.benchmark_level > 16 {
                return fail("benchmark_level must exceed every study level (and be at most 16)".into());
            }
        }
        Ok(())
    }

    /// Reference truncation J per axis: the configured value, otherwise
    /// max(1024, 8/h) in 1D and max(512, 4/h) in 2D for the finest level.
    pub fn reference_truncation(&self) -> usize {
        let finest = 1usize << self.levels.last().copied().unwrap_or(1);
        self.tolerances
            .reference_truncation
            .unwrap_or(match self.example.domain() {
                Domain::Interval01 => (8 * finest).max(1024),
                Domain::Square01 => (4 * finest).max(512),
            })
    }

    /// See [`resolve_output_dir`].
    pub fn resolve_output_dir(&self, cli: Option<&Path>) -> PathBuf {
        resolve_output_dir(cli, self.output_dir.as_deref())
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// File stem shared by every artifact of this study.
    pub fn stem(&self) -> String {
        let agg = match self.aggregation {
            TimeAggregation::AtTime { .. } => "t",
            TimeAggregation::L2 => "l2t",
            TimeAggregation::LInf => "linft",
        };
        format!("{}_{agg}", self.example.name())
    }
}

/// Output directory: the command-line value, then `FRACFEM_OUT`, then the
/// config file's value, then `out`.
pub fn resolve_output_dir(cli: Option<&Path>, configured: Option<&Path>) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os("FRACFEM_OUT").filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    configured.map_or_else(|| PathBuf::from("out"), Path::to_path_buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> &'static str {
        r#"{"schema_version": 1, "example": "1a", "alphas": [0.1, 0.5, 0.95],
            "levels": [3, 4, 5, 6, 7], "aggregation": {"kind": "at_time", "t": 1.0}}"#
    }

    #[test]
    fn parses_with_defaults_and_round_trips() {
        let c = StudyConfig::from_json(table2()).unwrap();
        assert_eq!(c.scheme, SchemeKind::LumpedMass);
        assert_eq!(c.norms, vec![NormKind::L2, NormKind::H1]);
        assert_eq!(StudyConfig::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn rejects_invalid_documents() {
        let bad = [
            table2().replace("\"levels\": [3, 4, 5, 6, 7]", "\"levels\": []"),
            table2().replace("[3, 4, 5, 6, 7]", "[4, 3]"),
            table2().replace("0.95", "1.0"),
            table2().replace("\"schema_version\": 1", "\"schema_version\": 2"),
            table2().replace("\"example\": \"1a\"", "\"example\": \"3z\""),
            table2().replace("\"t\": 1.0", "\"t\": 1.0, \"extra\": 1"),
            table2().replace("\"levels\"", "\"colour\": 1, \"levels\""),
            table2()
                .replace("\"1a\"", "\"2a\"")
                .replace("\"levels\"", "\"scheme\": \"galerkin\", \"levels\""),
        ];
        for text in bad {
            let e = StudyConfig::from_json(&text).unwrap_err();
            assert!(e.is_validation(), "{text}: {e}");
        }
    }

    #[test]
    fn example_ids_round_trip() {
        for e in ExampleId::ALL {
            assert_eq!(ExampleId::parse(e.name()).unwrap(), e);
            let json = serde_json::to_string(&e).unwrap();
            assert_eq!(json, format!("\"{}\"", e.name()));
        }
    }

    #[test]
    fn output_dir_precedence() {
        let cli = Path::new("/a");
        assert_eq!(
            resolve_output_dir(Some(cli), Some(Path::new("/c"))),
            PathBuf::from("/a")
        );
    }
}
