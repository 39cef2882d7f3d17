//! Writers for results, critical values and run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use discrete_fdr::Outcome;

use crate::error::{CliError, CliResult};

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x != 0.0 && (x.abs() < 1e-5 || x.abs() >= 1e16) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Builds a CSV document in memory.
pub fn csv_document(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

/// `index,raw_p,adjusted_p,rejected` with 1-based indices.
pub fn result_csv(result: &Outcome) -> String {
    let rejected = result.rejection_mask();
    let rows = (0..result.m).map(|i| {
        vec![
            (i + 1).to_string(),
            fmt_float(result.pvalues[i]),
            result
                .adjusted_pvalues
                .as_ref()
                .map_or_else(String::new, |a| fmt_float(a[i])),
            rejected[i].to_string(),
        ]
    });
    csv_document(&["index", "raw_p", "adjusted_p", "rejected"], rows)
}

pub fn critical_csv(tau: &[f64]) -> String {
    let rows = tau
        .iter()
        .enumerate()
        .map(|(k, &t)| vec![(k + 1).to_string(), fmt_float(t)]);
    csv_document(&["k", "tau_k"], rows)
}

/// `<path><suffix>`, e.g. `out.csv.crit.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| CliError::io(p, e)),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunFlags {
    pub critical_values: bool,
    pub alternative: Option<String>,
    pub emit: String,
    pub chunk_budget_bytes: usize,
}

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub supports: Option<String>,
    pub format: &'static str,
    pub method: String,
    pub direction: String,
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub flags: RunFlags,
    /// SHA-256 of the input file, followed by the supports file if any.
    pub input_sha256: Vec<String>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

pub fn write_manifest(output: &Path, manifest: &RunManifest) -> CliResult<()> {
    let path = sibling(output, ".manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("serialisable manifest");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}
