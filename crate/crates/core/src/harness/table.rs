use std::io::Write;

use crate::error::{Error, Result};

/// Rectangular numeric table with a metadata block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// `(key, value)` lines written as `# key: value`.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Rows whose `converged` column is 0.
    pub fn unconverged(&self) -> usize {
        self.column("converged")
            .map_or(0, |c| c.iter().filter(|v| **v == 0.0).count())
    }

    /// CSV with a `#`-prefixed metadata header; multi-line values continue
    /// on further `#` lines.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        for (k, v) in &self.metadata {
            let mut lines = v.lines();
            writeln!(out, "# {k}: {}", lines.next().unwrap_or(""))?;
            for line in lines {
                writeln!(out, "#   {line}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        if !self.columns.is_empty() {
            w.write_record(&self.columns)?;
        }
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}
