//! Run reports: JSON with a content hash, and the per-(curve, W) CSV table.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use holonomy_core::LaplacianReport;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// One row of the CSV table.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub curve: String,
    #[serde(rename = "W")]
    pub w: String,
    pub route: String,
    pub norm: f64,
    /// `yang_mills;left_pairing;right_pairing`, or empty.
    pub term_norms: String,
    pub scale: f64,
    pub rel_norm: f64,
}

impl CsvRow {
    pub fn from_report<const N: usize>(curve: &str, w: &str, r: &LaplacianReport<N>) -> Self {
        let t = &r.term_norms;
        Self {
            curve: curve.into(),
            w: w.into(),
            route: r.route.as_str().into(),
            norm: r.norm,
            term_norms: format!("{:e};{:e};{:e}", t.yang_mills, t.left_pairing, t.right_pairing),
            scale: r.scale,
            rel_norm: r.rel_norm(),
        }
    }
}

/// A tolerance check evaluated in acceptance mode.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `[lo, hi]`; a one-sided bound leaves `lo` empty (`null`).
    pub bound: [Option<f64>; 2],
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: [None, Some(limit)],
            passed: value <= limit,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: [Some(lo), Some(hi)],
            passed: (lo..=hi).contains(&value),
        }
    }
}

/// Output of one experiment before serialization.
#[derive(Debug, Default)]
pub struct Outcome {
    /// JSON rows; serialized with sorted keys.
    pub rows: Vec<Value>,
    pub summary: Map<String, Value>,
    pub csv: Vec<CsvRow>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `serde_json` turns non-finite floats into `null`, so a `null` anywhere in
/// the tables marks a non-finite cell.
fn has_null_number_cell(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().any(has_null_number_cell),
        Value::Object(o) => o.values().any(has_null_number_cell),
        Value::Null => true,
        _ => false,
    }
}

/// Files written for one run.
pub struct Written {
    pub json: PathBuf,
    pub csv: Option<PathBuf>,
    pub hash: String,
}

/// Assembles the JSON document. `report_hash` covers everything except the
/// `timestamp` and the hash itself.
pub fn build_json(experiment: &str, config: &Value, outcome: &Outcome, accept: bool) -> Result<(Value, String)> {
    let tables = json!({ "rows": outcome.rows, "summary": outcome.summary });
    if has_null_number_cell(&tables) {
        bail!("report contains a non-finite numeric cell");
    }
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": "holonomy-lab", "version": env!("CARGO_PKG_VERSION") },
        "experiment": experiment,
        "accept_mode": accept,
        "config": config,
        "options_hash": sha256_hex(serde_json::to_string(config)?.as_bytes()),
        "tables": tables,
        "checks": outcome.checks,
        "passed": outcome.passed(),
    });
    let hash = sha256_hex(serde_json::to_string(&doc)?.as_bytes());
    let obj = doc.as_object_mut().expect("object");
    obj.insert("report_hash".into(), Value::String(hash.clone()));
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    obj.insert("timestamp".into(), json!(ts));
    Ok((doc, hash))
}

pub fn write(dir: &Path, experiment: &str, doc: &Value, hash: String, csv_rows: Option<&[CsvRow]>) -> Result<Written> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let json_path = dir.join(format!("{experiment}.json"));
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    std::fs::write(&json_path, text).with_context(|| format!("cannot write {}", json_path.display()))?;
    let csv = match csv_rows {
        Some(rows) if !rows.is_empty() => {
            let path = dir.join(format!("{experiment}.csv"));
            let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Some(path)
        }
        _ => None,
    };
    Ok(Written {
        json: json_path,
        csv,
        hash,
    })
}
