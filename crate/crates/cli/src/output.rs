//! Report rendering and destination handling shared by every subcommand.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Provenance line embedded in every output: tool version, the echoed
/// configuration and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(command: &'static str, config: Value, seed: Option<u64>) -> Self {
        Self {
            tool: "qst",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seed,
        }
    }

    fn comment_lines(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# {} {} {}\n# config: {}\n# seed: {}\n",
            self.tool, self.version, self.command, self.config, seed
        )
    }
}

/// A flat table for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Report {
    pub header: Header,
    pub text: String,
    pub json: Value,
    pub csv: Option<Table>,
    /// Human-readable descriptions of failed checks; empty on success.
    pub failures: Vec<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Text => Ok(format!("{}{}", self.header.comment_lines(), self.text)),
            Format::Json => {
                let doc = json!({ "header": self.header, "result": self.json });
                let mut out = serde_json::to_string_pretty(&doc)
                    .map_err(|e| CliError::Io(format!("encoding JSON: {e}")))?;
                out.push('\n');
                Ok(out)
            }
            Format::Csv => {
                let table = self.csv.as_ref().ok_or_else(|| {
                    CliError::Usage(format!("`{}` has no CSV output", self.header.command))
                })?;
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.columns).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                let body = String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?;
                Ok(format!("{}{}", self.header.comment_lines(), body))
            }
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(format!("writing CSV: {e}"))
}

/// Where the rendered report goes.
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    /// An explicit `--output` wins; otherwise a default directory produces
    /// `<dir>/<command>.<ext>`; otherwise standard output.
    pub fn resolve(output: Option<&Path>, dir: Option<&Path>, command: &str, format: Format) -> Self {
        match (output, dir) {
            (Some(path), _) => Destination::File(path.to_path_buf()),
            (None, Some(dir)) => Destination::File(dir.join(format!("{command}.{}", format.extension()))),
            (None, None) => Destination::Stdout,
        }
    }

    pub fn write(&self, content: &str) -> Result<(), CliError> {
        match self {
            Destination::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())
                    .map_err(|e| CliError::Io(format!("writing to stdout: {e}")))
            }
            Destination::File(path) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
                }
                fs::write(path, content).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
                eprintln!("wrote {}", path.display());
                Ok(())
            }
        }
    }
}

/// Twelve significant digits, as used in every CSV column.
pub fn num(x: f64) -> String {
    qst::format::sig12(x)
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Left-aligned columns separated by two spaces.
pub fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
