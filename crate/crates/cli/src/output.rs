//! Artifact writers: provenance headers, atomic file output and
//! full-precision CSV.

use std::io::Write;
use std::path::Path;

use jspec_core::ToleranceConfig;
use serde_json::{json, Value};

use crate::CliError;

/// Provenance block attached to every artifact.
pub fn provenance(seed: u64, cfg: &ToleranceConfig) -> Value {
    json!({
        "tool": "jspec",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "tolerances": {
            "tau_comm": cfg.tau_comm,
            "tau_rank": cfg.tau_rank,
            "tau_dedup": cfg.tau_dedup,
            "tau_feas": cfg.tau_feas,
        },
    })
}

/// Atomically writes `bytes` to `path` (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .map_err(|e| CliError::io(format!("creating temp file for {}: {e}", path.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("serializing JSON: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Scientific notation with 17 significant digits; lossless for f64.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV artifact: `#`-prefixed provenance comments, a header row, then rows
/// of full-precision fields.
pub struct CsvArtifact {
    lines: Vec<String>,
}

impl CsvArtifact {
    pub fn new(seed: u64, cfg: &ToleranceConfig, extra_comments: &[String], header: &str) -> Self {
        let mut lines = vec![
            format!("# tool=jspec version={}", env!("CARGO_PKG_VERSION")),
            format!("# seed={seed}"),
            format!(
                "# tau_comm={} tau_rank={} tau_dedup={} tau_feas={}",
                fmt_full(cfg.tau_comm),
                fmt_full(cfg.tau_rank),
                fmt_full(cfg.tau_dedup),
                fmt_full(cfg.tau_feas)
            ),
        ];
        for c in extra_comments {
            lines.push(format!("# {c}"));
        }
        lines.push(header.to_string());
        Self { lines }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn write(self, path: &Path) -> Result<(), CliError> {
        let mut text = self.lines.join("\n");
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}
