//! JSON Lines reading and writing shared by every stage.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

/// Parses one value per nonblank line. `path` only labels errors.
pub fn read_jsonl_from<T: DeserializeOwned>(reader: impl BufRead, path: &Path) -> Result<Vec<T>, JsonlError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| JsonlError::Io { path: path.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line)
            .map_err(|e| JsonlError::Parse { path: path.into(), line: idx + 1, message: e.to_string() })?;
        out.push(value);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, JsonlError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| JsonlError::Io { path: path.into(), source })?;
    read_jsonl_from(BufReader::new(file), path)
}

pub fn write_jsonl_to<T: Serialize>(mut writer: impl Write, values: &[T]) -> std::io::Result<()> {
    for v in values {
        serde_json::to_writer(&mut writer, v)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, values: &[T]) -> Result<(), JsonlError> {
    let path = path.as_ref();
    let wrap = |source| JsonlError::Io { path: path.into(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(wrap)?;
    }
    let file = File::create(path).map_err(wrap)?;
    write_jsonl_to(BufWriter::new(file), values).map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.jsonl");
        let vals = vec![serde_json::json!({"a": 1}), serde_json::json!({"b": [1, 2]})];
        write_jsonl(&p, &vals).unwrap();
        assert_eq!(read_jsonl::<serde_json::Value>(&p).unwrap(), vals);
        let bad = "{\"a\":1}\n\n{oops\n";
        match read_jsonl_from::<serde_json::Value>(bad.as_bytes(), Path::new("bad")) {
            Err(JsonlError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
