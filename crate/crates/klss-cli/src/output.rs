//! Result emission: CSV (default) or JSON, each carrying the command name,
//! the fully resolved configuration, and a digest of that configuration.
//! Identical configurations always produce identical bytes.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use klss_core::{Error, Result};

/// One table cell. Counts that exceed float precision travel as exact
/// decimal strings.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    U64(u64),
    F64(f64),
    Str(String),
    Null,
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::U64(v) => write!(f, "{v}"),
            Value::F64(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
            Value::Null => Ok(()),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::U64(v) => s.serialize_u64(*v),
            Value::F64(v) => s.serialize_f64(*v),
            Value::Str(v) => s.serialize_str(v),
            Value::Null => s.serialize_none(),
        }
    }
}

pub struct ExperimentResult {
    pub command: &'static str,
    pub config_json: String,
    pub digest: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl ExperimentResult {
    pub fn new<C: Serialize>(command: &'static str, config: &C, columns: Vec<String>) -> Self {
        let config_json = serde_json::to_string(config).expect("configs serialize");
        let digest = digest16(&config_json);
        Self {
            command,
            config_json,
            digest,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# config: {}", self.config_json)?;
        writeln!(w, "# digest: {}", self.digest)?;
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&cell.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: &mut W) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            command: &'a str,
            digest: &'a str,
            config: serde_json::Value,
            columns: &'a [String],
            rows: &'a [Vec<Value>],
        }
        let doc = Doc {
            command: self.command,
            digest: &self.digest,
            config: serde_json::from_str(&self.config_json).expect("config round-trips"),
            columns: &self.columns,
            rows: &self.rows,
        };
        serde_json::to_writer_pretty(&mut *w, &doc)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn emit(&self, json: bool) -> Result<()> {
        let stdout = std::io::stdout();
        let mut w = stdout.lock();
        if json {
            self.write_json(&mut w)
        } else {
            self.write_csv(&mut w)
        }
    }
}

/// First 16 hex characters of the SHA-256 of the canonical config string.
pub fn digest16(canonical: &str) -> String {
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
