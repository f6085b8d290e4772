//! CSV and summary writers.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Header line plus one line per row, 17 significant digits, `\n` endings.
pub fn csv_string(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            // `+ 0.0` folds negative zero so equal values print identically.
            let _ = write!(out, "{:.16e}", v + 0.0);
        }
        out.push('\n');
    }
    out
}

/// SHA-256 of the canonical JSON form (keys sorted, no whitespace).
pub fn spec_hash<T: Serialize>(spec: &T) -> String {
    let canonical = serde_json::to_value(spec).map(|v| v.to_string()).unwrap_or_default();
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Output(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

pub fn pretty(summary: &Value) -> String {
    let mut s = serde_json::to_string_pretty(summary).unwrap_or_default();
    s.push('\n');
    s
}
