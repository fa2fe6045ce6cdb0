//! CSV output with a self-describing metadata header.
//!
//! Every file starts with `#`-prefixed lines carrying the toolkit version,
//! the resolved parameter echo, and the wall time. Reruns with the same
//! configuration are byte-identical except for the wall-time line.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::CliError;

pub struct CsvWriter {
    lines: Vec<String>,
    started: Instant,
}

impl CsvWriter {
    /// Starts a file with the standard metadata block. `params` is the full
    /// parameter echo, one logical setting per entry.
    pub fn new(command: &str, params: &[String]) -> Self {
        let mut lines = Vec::new();
        lines.push(format!("# crd {}", env!("CARGO_PKG_VERSION")));
        lines.push(format!("# command: {command}"));
        for p in params {
            lines.push(format!("# {p}"));
        }
        Self {
            lines,
            started: Instant::now(),
        }
    }

    /// Adds an extra metadata line.
    pub fn meta(&mut self, line: impl AsRef<str>) {
        self.lines.push(format!("# {}", line.as_ref()));
    }

    /// Writes the column header.
    pub fn header(&mut self, header: &str) {
        self.lines.push(header.to_string());
    }

    /// Appends one data row.
    pub fn row(&mut self, row: String) {
        self.lines.push(row);
    }

    /// Writes the file, inserting the wall-time metadata line immediately
    /// before the column header so stripping it restores byte identity.
    pub fn finish(self, path: &Path) -> Result<(), CliError> {
        let mut out = String::new();
        let mut wrote_wall = false;
        for line in &self.lines {
            if !wrote_wall && !line.starts_with('#') {
                out.push_str(&format!("# wall_time_s: {:.6}\n", self.started.elapsed().as_secs_f64()));
                wrote_wall = true;
            }
            out.push_str(line);
            out.push('\n');
        }
        if !wrote_wall {
            out.push_str(&format!("# wall_time_s: {:.6}\n", self.started.elapsed().as_secs_f64()));
        }
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)
                    .map_err(|e| CliError::io(format!("creating {}: {e}", parent.display())))?;
            }
        }
        let mut file = fs::File::create(path)
            .map_err(|e| CliError::io(format!("creating {}: {e}", path.display())))?;
        file.write_all(out.as_bytes())
            .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Formats a float with shortest round-trip representation.
pub fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}
