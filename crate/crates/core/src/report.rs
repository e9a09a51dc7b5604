//! Experiment reports: tabular series, fitted constants and verdicts, with CSV
//! and JSON persistence and two-column plot data.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quadrature::linear_fit;

/// Shortest readable form: scientific outside `[1e-3, 1e6)`.
pub fn fmt_short(v: f64) -> String {
    if v == 0.0 || !v.is_finite() || (1e-3..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// One acceptance rule applied to one measured value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// Human-readable rule, e.g. `"max/median < 10"`.
    pub rule: String,
    pub value: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, rule: impl Into<String>, value: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            rule: rule.into(),
            value,
            pass: pass && !value.is_nan(),
        }
    }

    /// `value < limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, format!("< {}", fmt_short(limit)), value, value < limit)
    }

    /// `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, format!(">= {}", fmt_short(limit)), value, value >= limit)
    }

    /// `lo <= value <= hi`.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, format!("in [{}, {}]", fmt_short(lo), fmt_short(hi)), value, value >= lo && value <= hi)
    }
}

/// How the absolute constants of a report were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMode {
    /// Constants appear explicitly in the inequality (no fitting).
    Explicit,
    /// Constants are fitted from the data, and the fit's stability is tested.
    Fitted,
    /// No constant is involved.
    None,
}

/// Time- or parameter-indexed record of measured functionals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fitted: BTreeMap<String, f64>,
    pub constant_mode: ConstantMode,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl NormReport {
    pub fn new(experiment: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.into(),
            params: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fitted: BTreeMap::new(),
            constant_mode: ConstantMode::None,
            verdicts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn fit(&mut self, key: &str, value: f64) {
        self.fitted.insert(key.to_string(), value);
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Every numeric entry (rows and fitted constants) is finite.
    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
            && self.fitted.values().all(|v| v.is_finite())
    }

    /// CSV body with a header row; values printed with 17 significant digits.
    pub fn to_csv(&self) -> Result<String> {
        write_table(&self.columns, &self.rows)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// JSON sidecar: parameters, seed, fitted constants, verdicts and a
    /// timestamp. Timestamps live only here so CSV bodies are reproducible.
    pub fn sidecar(&self, seed: Option<u64>) -> Value {
        serde_json::json!({
            "experiment": self.experiment,
            "params": self.params,
            "seed": seed,
            "fitted": self.fitted,
            "constant_mode": self.constant_mode,
            "verdicts": self.verdicts,
            "notes": self.notes,
            "all_pass": self.all_pass(),
            "timestamp": chrono::Utc::now().to_rfc3339(),
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>, seed: Option<u64>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(&self.sidecar(seed))?)?;
        Ok(())
    }
}

/// Scientific notation with 17 significant digits (round-trip exact).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_table(columns: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(|v| fmt_f64(*v)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Which two-column plot file to derive from a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// `logN,logF3Norm` plus a fitted-line sidecar.
    Growth,
    /// `t,ratio`.
    Decay,
    /// `n,supErr`.
    Convergence,
}

impl PlotKind {
    fn spec(self) -> (&'static str, &'static str, &'static str, &'static str, bool) {
        // (source x column, source y column, header x, header y, take logs)
        match self {
            PlotKind::Growth => ("N", "f3_norm", "logN", "logF3Norm", true),
            PlotKind::Decay => ("t", "ratio", "t", "ratio", false),
            PlotKind::Convergence => ("n", "sup_err", "n", "supErr", false),
        }
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::Growth => "plot_growth",
            PlotKind::Decay => "plot_decay",
            PlotKind::Convergence => "plot_convergence",
        }
    }
}

/// Writes the plot CSV (and, for growth, a `*_fit.json` sidecar with slope,
/// intercept and R²) into `dir`. Returns the written paths.
pub fn emit_plotdata(report: &NormReport, kind: PlotKind, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let (sx, sy, hx, hy, logs) = kind.spec();
    let missing = |c: &str| Error::param("report", format!("column `{c}` missing for {kind:?} plot"));
    let xs = report.column(sx).ok_or_else(|| missing(sx))?;
    let ys = report.column(sy).ok_or_else(|| missing(sy))?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = if logs {
        (xs.iter().map(|v| v.ln()).collect(), ys.iter().map(|v| v.ln()).collect())
    } else {
        (xs, ys)
    };
    let rows: Vec<Vec<f64>> = xs.iter().zip(&ys).map(|(x, y)| vec![*x, *y]).collect();
    let body = write_table(&[hx.to_string(), hy.to_string()], &rows)?;
    let dir = dir.as_ref();
    let csv_path = dir.join(format!("{}.csv", kind.file_stem()));
    fs::write(&csv_path, body)?;
    let mut out = vec![csv_path];
    if kind == PlotKind::Growth {
        let fit = linear_fit(&xs, &ys)?;
        let fit_path = dir.join(format!("{}_fit.json", kind.file_stem()));
        fs::write(
            &fit_path,
            serde_json::to_string_pretty(&serde_json::json!({
                "slope": fit.slope,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
            }))?,
        )?;
        out.push(fit_path);
    }
    Ok(out)
}
