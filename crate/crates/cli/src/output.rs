//! Versioned JSON and CSV documents and atomic file output.
//!
//! JSON documents are objects carrying `schema_version` and `command`.  CSV
//! documents start with one `#` comment line holding the same two fields,
//! followed by a header row.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Serialises `body` (which must be a JSON object) with the schema fields
/// prepended.
pub fn json_document(command: &str, body: impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    match serde_json::to_value(body)? {
        Value::Object(fields) => {
            let map = doc.as_object_mut().expect("object literal");
            map.extend(fields);
        }
        other => {
            doc["result"] = other;
        }
    }
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// CSV document builder.
pub struct CsvDocument {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvDocument {
    pub fn new(command: &str, header: &[&str]) -> Result<Self, CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "# schema_version={SCHEMA_VERSION} command={command}")?;
        let mut writer = csv::Writer::from_writer(buf);
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<Vec<u8>, CliError> {
        self.writer
            .into_inner()
            .map_err(|e| CliError::Failure(format!("csv: {}", e.error())))
    }
}

/// Shortest round-trip rendering (exponent form for very small or large
/// magnitudes); empty for `None`.
pub fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and an atomic rename, or to standard output.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::Failure(format!("{}: {}", path.display(), e.error)))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_carries_schema_fields() {
        let bytes = json_document("moments", json!({ "a": 1 })).unwrap();
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["command"], "moments");
        assert_eq!(v["a"], 1);
        let arr: Value = serde_json::from_slice(&json_document("x", [1, 2]).unwrap()).unwrap();
        assert_eq!(arr["result"][1], 2);
    }

    #[test]
    fn csv_has_comment_then_header() {
        let mut doc = CsvDocument::new("vacuum", &["delta", "p"]).unwrap();
        doc.row([num(Some(0.25)), num(None)]).unwrap();
        let text = String::from_utf8(doc.finish().unwrap()).unwrap();
        assert_eq!(text, "# schema_version=1 command=vacuum\ndelta,p\n0.25,\n");
    }

    #[test]
    fn emit_replaces_file_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit(Some(&path), b"one").unwrap();
        emit(Some(&path), b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
