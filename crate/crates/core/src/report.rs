//! Run configuration, JSON reports and atomic output files.
//!
//! Configuration files are flat `key = value` text with `#` comments; keys
//! match the long command-line flags without the leading dashes.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Default master seed.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub seed: u64,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub band_limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            seed: DEFAULT_SEED,
            ..Default::default()
        }
    }

    /// Set one field from its flag name (`alpha`, `s-min`, `L`, ...).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim().replace('_', "-").as_str() {
            "command" => self.command = value.trim().to_string(),
            "alpha" => self.alpha = Some(parse_num(key, value)?),
            "rho" => self.rho = Some(parse_num(key, value)?),
            "alpha-min" => self.alpha_min = Some(parse_num(key, value)?),
            "alpha-max" => self.alpha_max = Some(parse_num(key, value)?),
            "l" => self.l = Some(parse_num(key, value)?),
            "beta" => self.beta = Some(parse_num(key, value)?),
            "s" => self.s = Some(parse_num(key, value)?),
            "s-min" => self.s_min = Some(parse_num(key, value)?),
            "s-max" => self.s_max = Some(parse_num(key, value)?),
            "n" => self.n = Some(parse_num(key, value)?),
            "trials" => self.trials = Some(parse_num(key, value)?),
            "seed" => self.seed = parse_num(key, value)?,
            "L" => self.band_limit = Some(parse_num(key, value)?),
            "r-max" => self.r_max = Some(parse_num(key, value)?),
            "tol" => self.tol = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "csv" => self.csv = Some(PathBuf::from(value.trim())),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, v) in Self::parse_text(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Fill α from ρ = 1/α or the reverse, and check the ranges.
    pub fn validate(&mut self) -> Result<()> {
        match (self.alpha, self.rho) {
            (Some(a), Some(r)) if (a * r - 1.0).abs() > 1e-12 => {
                return Err(Error::Config(format!(
                    "alpha = {a} and rho = {r} violate rho·alpha = 1"
                )));
            }
            (Some(a), None) if a > 0.0 => self.rho = Some(1.0 / a),
            (None, Some(r)) if r > 0.0 => self.alpha = Some(1.0 / r),
            _ => {}
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return Err(Error::Config(format!("alpha must be positive, got {a}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.s_min, self.s_max) {
            if !(lo < hi) {
                return Err(Error::Config(format!("empty range s-min = {lo}, s-max = {hi}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.alpha_min, self.alpha_max) {
            if !(lo <= hi) {
                return Err(Error::Config(format!("empty range alpha-min = {lo}, alpha-max = {hi}")));
            }
        }
        if self.n == Some(0) || self.trials == Some(0) {
            return Err(Error::Config("n and trials must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!("tol must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// A mathematical check failed.
    Violated,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportVerdict {
    pub status: Status,
    pub checks: usize,
    pub failed: usize,
    pub notes: Vec<String>,
}

impl ReportVerdict {
    pub fn from_checks(checks: &[(bool, String)]) -> Self {
        let notes: Vec<String> = checks.iter().filter(|(ok, _)| !ok).map(|(_, n)| n.clone()).collect();
        Self {
            status: if notes.is_empty() {
                Status::Pass
            } else {
                Status::Violated
            },
            checks: checks.len(),
            failed: notes.len(),
            notes,
        }
    }
}

/// One result row: an `anchor` naming the statement it exercises, plus the
/// measured fields.
pub fn row(anchor: &str, fields: impl Serialize) -> Value {
    let mut map = BTreeMap::new();
    map.insert("anchor".to_string(), Value::String(anchor.to_string()));
    if let Value::Object(obj) = serde_json::to_value(fields).unwrap_or(Value::Null) {
        map.extend(obj);
    }
    serde_json::to_value(map).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub version: String,
    pub rows: Vec<Value>,
    pub verdict: ReportVerdict,
    pub elapsed_s: f64,
}

impl Report {
    pub fn new(config: RunConfig, rows: Vec<Value>, verdict: ReportVerdict, elapsed_s: f64) -> Self {
        Self {
            command: config.command.clone(),
            seed: config.seed,
            version: crate::VERSION.to_string(),
            config,
            rows,
            verdict,
            elapsed_s,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The rows alone; identical across reruns of the same configuration.
    pub fn rows_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("rows serialize")
    }
}

/// Write through a temporary sibling file and rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write {}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Header row plus comma-separated rows.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Round-trip scientific notation with a `.` decimal point.
pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_config_and_overrides() {
        let mut c = RunConfig::new("shoot");
        c.apply_text("# anchor\nl = 1\ns = 2.4849   # ln 12\nr_max = 100\n\nseed=7\n")
            .unwrap();
        c.set("r-max", "200").unwrap();
        c.validate().unwrap();
        assert_eq!(c.l, Some(1.0));
        assert_eq!(c.s, Some(2.4849));
        assert_eq!(c.r_max, Some(200.0));
        assert_eq!(c.seed, 7);
        assert!(c.apply_text("nonsense").is_err());
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("alpha", "x").is_err());
    }

    #[test]
    fn alpha_rho_correspondence() {
        let mut c = RunConfig::new("minimize");
        c.rho = Some(1.25);
        c.validate().unwrap();
        assert_eq!(c.alpha, Some(0.8));
        let mut c = RunConfig::new("minimize");
        c.alpha = Some(0.7);
        c.rho = Some(1.5);
        assert!(c.validate().is_err());
        let mut c = RunConfig::new("beta-curve");
        c.s_min = Some(1.0);
        c.s_max = Some(1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn report_keys() {
        let c = RunConfig::new("verify");
        let r = Report::new(
            c,
            vec![row("x", serde_json::json!({"beta": 6.0}))],
            ReportVerdict::from_checks(&[(true, "a".into())]),
            0.5,
        );
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        for k in ["command", "config", "seed", "version", "rows", "verdict", "elapsed_s"] {
            assert!(keys.iter().any(|x| *x == k), "{k}");
        }
        assert_eq!(v["rows"][0]["anchor"], "x");
        assert_eq!(v["rows"][0]["beta"], 6.0);
        assert_eq!(v["verdict"]["status"], "pass");
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("onofri-report-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_layout() {
        let t = csv_table(&["s", "beta"], &[vec![num(1.0), num(4.0)]]);
        assert_eq!(t, "s,beta\n1.00000000000000000e0,4.00000000000000000e0\n");
    }
}
