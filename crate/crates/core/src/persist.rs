//! Run persistence: one JSON document per run, a CSV summary with one row
//! per amplitude, and the sweep summary as JSON.
//!
//! CSV columns: `eps, T_eps, q_eps, bound_value, status, fingerprint`.
//! `q_eps` is `eps^{2 theta/d} T_eps^{1-theta}`; `bound_value` is empty when
//! the bound is undefined (for instance `Im lambda <= 0`). Lines starting
//! with `#` are comments; a sweep ends the file with `# verdict: ...`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::DiagnosticRow;
use crate::lifespan::{RunRecord, SweepSummary};

pub const SUMMARY_CSV: &str = "summary.csv";
pub const SWEEP_JSON: &str = "sweep.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub eps: f64,
    #[serde(rename = "T_eps")]
    pub t_eps: f64,
    pub q_eps: f64,
    pub bound_value: Option<f64>,
    pub status: String,
    pub fingerprint: String,
}

impl From<&RunRecord> for SummaryRow {
    fn from(r: &RunRecord) -> Self {
        SummaryRow {
            eps: r.eps,
            t_eps: r.t_eps,
            q_eps: r.invariant_quantity,
            bound_value: r.bound_value,
            status: r.status_label().to_string(),
            fingerprint: r.fingerprint.clone(),
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// File name of a run document, keyed by amplitude.
pub fn run_file_name(eps: f64) -> String {
    format!("run_eps_{eps:.6e}.json")
}

pub fn write_run(dir: &Path, record: &RunRecord) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(run_file_name(record.eps));
    let json = serde_json::to_vec_pretty(record).map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(&path, &json)?;
    Ok(path)
}

pub fn read_run(path: &Path) -> Result<RunRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn csv_bytes(rows: &[SummaryRow], trailer: Option<&str>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record([
            "eps",
            "T_eps",
            "q_eps",
            "bound_value",
            "status",
            "fingerprint",
        ])
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let mut bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(t) = trailer {
        bytes.extend_from_slice(format!("# {t}\n").as_bytes());
    }
    Ok(bytes)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

/// Inserts or replaces (by fingerprint) the row of a single run, keeping
/// rows sorted by decreasing amplitude.
pub fn upsert_summary_row(dir: &Path, record: &RunRecord) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(SUMMARY_CSV);
    let mut rows = if path.exists() {
        read_summary(&path)?
    } else {
        Vec::new()
    };
    let row = SummaryRow::from(record);
    rows.retain(|r| r.fingerprint != row.fingerprint);
    rows.push(row);
    rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    write_atomic(&path, &csv_bytes(&rows, None)?)?;
    Ok(path)
}

/// Writes every run document, the summary CSV (overwritten) and the sweep
/// summary JSON.
pub fn write_sweep(dir: &Path, records: &[RunRecord], summary: &SweepSummary) -> Result<PathBuf> {
    ensure_dir(dir)?;
    for r in records {
        write_run(dir, r)?;
    }
    let rows: Vec<SummaryRow> = records.iter().map(SummaryRow::from).collect();
    let trailer = verdict_line(summary);
    let path = dir.join(SUMMARY_CSV);
    write_atomic(&path, &csv_bytes(&rows, Some(&trailer))?)?;
    let json = serde_json::to_vec_pretty(summary).map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(&dir.join(SWEEP_JSON), &json)?;
    Ok(path)
}

pub fn verdict_line(summary: &SweepSummary) -> String {
    let min_q = summary
        .running_min
        .last()
        .copied()
        .flatten()
        .map_or_else(|| "n/a".to_string(), |m| format!("{m:.6}"));
    format!(
        "verdict: {} min_q={} bound_value={:.6} tolerance={}",
        summary.verdict, min_q, summary.bound_value, summary.tolerance
    )
}

pub fn read_sweep_summary(path: &Path) -> Result<SweepSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Writes any serializable value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    let json = serde_json::to_vec_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(path, &json)
}

/// Writes `diagnostics.csv` (one row per diagnostic time).
pub fn write_diagnostics(dir: &Path, rows: &[DiagnosticRow]) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join("diagnostics.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(&path, &bytes)?;
    Ok(path)
}
