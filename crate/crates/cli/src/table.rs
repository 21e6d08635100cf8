//! Result tables and their CSV / JSON emitters.

use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// String-valued table. Cells are pre-formatted so that multiprecision values
/// survive serialization unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub config_hash: String,
    /// Ordered `key, value` annotations such as fitted slopes.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            config_hash: String::new(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn annotate(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of column `name`, in row order.
    pub fn values(&self, name: &str) -> Vec<&str> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i].as_str()).collect(),
            None => Vec::new(),
        }
    }

    /// `# config_hash=...` and `# key=value` comment lines, then the header and rows.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = format!("# config_hash={}\n", self.config_hash);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Format(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Format(e.to_string()))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut t = Table::new(&[]);
        let mut body = String::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(rest) => {
                    let (k, v) = rest.split_once('=').ok_or_else(|| CliError::Format(format!("bad comment `{line}`")))?;
                    if k == "config_hash" {
                        t.config_hash = v.to_string();
                    } else {
                        t.meta.push((k.to_string(), v.to_string()));
                    }
                }
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let mut r = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        t.columns = r.headers().map_err(|e| CliError::Format(e.to_string()))?.iter().map(String::from).collect();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Format(e.to_string()))?;
            t.rows.push(rec.iter().map(String::from).collect());
        }
        Ok(t)
    }

    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Write `table` to `path` in `format`.
pub fn emit(table: &Table, format: Format, path: &Path) -> CliResult<()> {
    let text = table.render(format)?;
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
