//! Deterministic CSV emission and parsing.
//!
//! Numbers carry 12 significant digits, line endings are LF, and an
//! emitted file parses and re-emits byte-identically.

use crate::CliError;
use std::io::Write;

/// 12-significant-digit scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// A parsed CSV document: optional `#` comment lines, one header, rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvDoc {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(comments: Vec<String>, header: Vec<String>) -> Self {
        Self {
            comments,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Serialize with LF endings.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push('#');
            out.push(' ');
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse text produced by [`CsvDoc::emit`].
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut comments = Vec::new();
        let mut header = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                comments.push(rest.to_string());
            } else if let Some(rest) = line.strip_prefix('#') {
                comments.push(rest.to_string());
            } else if header.is_none() {
                header = Some(line.split(',').map(str::to_string).collect());
            } else {
                rows.push(line.split(',').map(str::to_string).collect());
            }
        }
        let header = header.ok_or_else(|| CliError::Config("CSV has no header row".into()))?;
        Ok(Self {
            comments,
            header,
            rows,
        })
    }

    pub fn write_to(&self, path: &str) -> Result<(), CliError> {
        let file = std::fs::File::create(path)
            .map_err(|e| CliError::Io(format!("cannot write '{path}': {e}")))?;
        let mut w = std::io::BufWriter::new(file);
        w.write_all(self.emit().as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

/// Sanitize free text for a CSV field (no commas, no newlines).
pub fn csv_safe(text: &str) -> String {
    text.replace([',', '\n', '\r'], ";")
}
