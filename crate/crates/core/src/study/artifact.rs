use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{fit_rate, NormKind};
use crate::error::{Error, Result};

use super::config::{StudyConfig, SCHEMA_VERSION};
use super::format::fmt_sig;

/// One (α, norm, level) error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub alpha: f64,
    pub norm: NormKind,
    pub level: u32,
    pub h: f64,
    pub error: f64,
    /// A truncation or aggregation guard did not pass for this cell.
    pub degraded: bool,
}

/// Fitted rate of one (α, norm) column; empty below three levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRow {
    pub alpha: f64,
    pub norm: NormKind,
    pub rate: Option<f64>,
    /// RMS residual of the log-log fit.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// SHA-256 of the canonical configuration.
    pub config_hash: String,
    pub schema_version: u32,
    pub crate_name: String,
    pub crate_version: String,
}

/// A finished convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableArtifact {
    pub provenance: Provenance,
    pub config: StudyConfig,
    pub rows: Vec<TableRow>,
    pub rates: Vec<RateRow>,
}

fn row_order(a: &TableRow, b: &TableRow) -> std::cmp::Ordering {
    a.alpha
        .total_cmp(&b.alpha)
        .then_with(|| a.norm.label().cmp(b.norm.label()))
        .then(a.level.cmp(&b.level))
}

impl TableArtifact {
    /// Sort rows by (α, norm label, level) and fit one rate per column.
    pub fn assemble(config: &StudyConfig, mut rows: Vec<TableRow>) -> Result<Self> {
        rows.sort_by(row_order);
        let mut config = config.clone();
        config.output_dir = None;
        let mut rates = Vec::new();
        for group in rows.chunk_by(|a, b| a.alpha == b.alpha && a.norm == b.norm) {
            let h: Vec<f64> = group.iter().map(|r| r.h).collect();
            let e: Vec<f64> = group.iter().map(|r| r.error).collect();
            let fit = if group.len() >= 3 { fit_rate(&h, &e).ok() } else { None };
            rates.push(RateRow {
                alpha: group[0].alpha,
                norm: group[0].norm,
                rate: fit.map(|f| f.0),
                residual: fit.map(|f| f.1),
            });
        }
        Ok(Self {
            provenance: Provenance {
                config_hash: config.hash(),
                schema_version: SCHEMA_VERSION,
                crate_name: env!("CARGO_PKG_NAME").into(),
                crate_version: env!("CARGO_PKG_VERSION").into(),
            },
            config,
            rows,
            rates,
        })
    }

    pub fn rate(&self, alpha: f64, norm: NormKind) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.alpha == alpha && r.norm == norm)
            .and_then(|r| r.rate)
    }

    pub fn value(&self, alpha: f64, norm: NormKind, level: u32) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.alpha == alpha && r.norm == norm && r.level == level)
            .map(|r| r.error)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: TableArtifact = serde_json::from_str(text).map_err(|e| Error::Validation(format!("artifact: {e}")))?;
        a.config.validate()?;
        Ok(a)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_json())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// CSV text: header `alpha,norm,k,h,error,rate,degraded`, one row per
    /// cell in (α, norm, k) order, 6 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,norm,k,h,error,rate,degraded\n");
        let mut rows = self.rows.clone();
        rows.sort_by(row_order);
        for r in &rows {
            let rate = self.rate(r.alpha, r.norm).map(|v| fmt_sig(v, 6)).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_sig(r.alpha, 6),
                r.norm.label(),
                r.level,
                fmt_sig(r.h, 6),
                fmt_sig(r.error, 6),
                rate,
                r.degraded
            )
            .expect("string write");
        }
        out
    }

    pub fn emit_csv(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_csv())
    }

    /// Write one `h error` data file per α (one gnuplot index block per
    /// norm) and a gnuplot script `<stem>.gp` drawing them on log-log axes
    /// with reference-slope guides. Returns the paths written.
    pub fn emit_plot(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut rows = self.rows.clone();
        rows.sort_by(row_order);
        let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
        alphas.dedup();
        let norms = self.plot_norms();
        let mut written = Vec::new();
        let mut plots = Vec::new();
        for &alpha in &alphas {
            let name = format!("{stem}_alpha{}.dat", fmt_sig(alpha, 6));
            let mut text = String::new();
            for (block, &norm) in norms.iter().enumerate() {
                if block > 0 {
                    text.push_str("\n\n");
                }
                writeln!(text, "# alpha {} norm {}", fmt_sig(alpha, 6), norm.label()).unwrap();
                text.push_str("# h error\n");
                for r in rows.iter().filter(|r| r.alpha == alpha && r.norm == norm) {
                    writeln!(text, "{} {}", fmt_sig(r.h, 6), fmt_sig(r.error, 6)).unwrap();
                }
                plots.push(format!(
                    "'{name}' index {block} using 1:2 with linespoints title 'alpha={} {}'",
                    fmt_sig(alpha, 6),
                    norm.label()
                ));
            }
            let path = dir.join(&name);
            write_file(&path, &text)?;
            written.push(path);
        }
        let script = self.plot_script(stem, &rows, &norms, plots);
        let path = dir.join(format!("{stem}.gp"));
        write_file(&path, &script)?;
        written.push(path);
        Ok(written)
    }

    fn plot_norms(&self) -> Vec<NormKind> {
        let mut norms: Vec<NormKind> = self.rows.iter().map(|r| r.norm).collect();
        norms.sort();
        norms.dedup();
        norms
    }

    fn plot_script(&self, stem: &str, rows: &[TableRow], norms: &[NormKind], mut plots: Vec<String>) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# log-log error against mesh size, example {}",
            self.config.example.name()
        )
        .unwrap();
        writeln!(s, "set terminal pngcairo size 900,640").unwrap();
        writeln!(s, "set output '{stem}.png'").unwrap();
        writeln!(s, "set logscale xy").unwrap();
        writeln!(s, "set format y '10^{{%L}}'").unwrap();
        writeln!(s, "set xlabel 'h'").unwrap();
        writeln!(s, "set ylabel 'error'").unwrap();
        writeln!(s, "set key outside right").unwrap();
        writeln!(s, "set grid").unwrap();
        if plots.is_empty() {
            writeln!(s, "# no data").unwrap();
            return s;
        }
        let mut levels: Vec<u32> = rows.iter().map(|r| r.level).collect();
        levels.sort();
        levels.dedup();
        if levels.len() >= 2 {
            let slopes = self.config.example.guide_slopes();
            for (i, &norm) in norms.iter().enumerate() {
                let slope = slopes[norm.order() as usize];
                // anchored half a decade below the finest point of the first α
                let Some(anchor) = rows
                    .iter()
                    .filter(|r| r.norm == norm)
                    .min_by(|a, b| a.h.total_cmp(&b.h))
                else {
                    continue;
                };
                let c = 0.3 * anchor.error / anchor.h.powf(slope);
                writeln!(s, "g{i}(x) = {} * x**{}", fmt_sig(c, 6), fmt_sig(slope, 6)).unwrap();
                plots.push(format!(
                    "g{i}(x) with lines dashtype 2 title 'O(h^{{{}}})'",
                    fmt_sig(slope, 6)
                ));
            }
        }
        writeln!(s, "plot \\\n    {}", plots.join(", \\\n    ")).unwrap();
        s
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(levels: &[u32]) -> StudyConfig {
        StudyConfig::from_json(&format!(
            r#"{{"schema_version": 1, "example": "1a", "alphas": [0.5, 0.1],
                "levels": {levels:?}, "aggregation": {{"kind": "at_time", "t": 1.0}}}}"#
        ))
        .unwrap()
    }

    fn planted(levels: &[u32]) -> TableArtifact {
        let mut rows = Vec::new();
        for &alpha in &[0.5, 0.1] {
            for &norm in &[NormKind::L2, NormKind::H1] {
                for &k in levels.iter().rev() {
                    let h = 0.5f64.powi(k as i32);
                    let e = if norm == NormKind::L2 { 0.06 * h * h } else { 0.2 * h };
                    rows.push(TableRow {
                        alpha,
                        norm,
                        level: k,
                        h,
                        error: e,
                        degraded: false,
                    });
                }
            }
        }
        TableArtifact::assemble(&config(levels), rows).unwrap()
    }

    #[test]
    fn csv_layout() {
        let a = planted(&[3, 4, 5, 6, 7]);
        let csv = a.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 21);
        assert_eq!(lines[0], "alpha,norm,k,h,error,rate,degraded");
        assert_eq!(lines[1], "0.1,H1,3,0.125,0.025,1,false");
        assert_eq!(lines[6], "0.1,L2,3,0.125,0.0009375,2,false");
        assert!(lines[11].starts_with("0.5,H1,3,"));
        assert!(!csv.contains('\r'));
        assert!((a.rate(0.5, NormKind::L2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_artifact_is_header_only() {
        let a = TableArtifact::assemble(&config(&[3]), Vec::new()).unwrap();
        assert_eq!(a.to_csv(), "alpha,norm,k,h,error,rate,degraded\n");
    }

    #[test]
    fn json_round_trip() {
        let a = planted(&[3, 4, 5]);
        assert_eq!(TableArtifact::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn plot_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = planted(&[3, 4, 5]);
        let files = a.emit_plot(dir.path(), "demo").unwrap();
        assert_eq!(files.len(), 3);
        let script = std::fs::read_to_string(dir.path().join("demo.gp")).unwrap();
        assert!(script.contains("x**2") && script.contains("x**1\n"));
        let data = std::fs::read_to_string(dir.path().join("demo_alpha0.1.dat")).unwrap();
        assert!(data.contains("0.125 0.0009375"));
        assert_eq!(data.matches("# h error").count(), 2);
        let single = planted(&[4]);
        single.emit_plot(dir.path(), "one").unwrap();
        let script = std::fs::read_to_string(dir.path().join("one.gp")).unwrap();
        assert!(!script.contains("g0(x)"));
    }
}
