use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::IngestError;

/// A data row with the 1-based line number it started on.
pub(super) struct Row {
    pub line: u64,
    pub fields: csv::StringRecord,
}

impl Row {
    pub fn get(&self, i: usize) -> &str {
        self.fields.get(i).unwrap_or_default()
    }

    pub fn count(&self, file: &str, i: usize, column: &str) -> Result<u64, IngestError> {
        let raw = self.get(i).trim();
        raw.parse().map_err(|_| IngestError::MalformedRow {
            file: file.to_owned(),
            line: self.line,
            reason: format!("{column} must be a non-negative integer, got `{raw}`"),
        })
    }
}

fn open(dir: &Path, name: &str) -> Result<Option<File>, IngestError> {
    let path = dir.join(name);
    match File::open(&path) {
        Ok(f) => Ok(Some(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(IngestError::Io { path, source }),
    }
}

/// Reads `dir/name` with an exact header row. Returns `None` when the file
/// does not exist.
pub(super) fn read_table(dir: &Path, name: &str, header: &[&str]) -> Result<Option<Vec<Row>>, IngestError> {
    let Some(file) = open(dir, name)? else {
        return Ok(None);
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let malformed = |line: u64, reason: String| IngestError::MalformedRow {
        file: name.to_owned(),
        line,
        reason,
    };

    let found = reader.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(IngestError::BadHeader {
            file: name.to_owned(),
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut rows = Vec::new();
    for result in reader.records() {
        let fields = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = fields.position().map_or(0, |p| p.line());
        if fields.len() != header.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        rows.push(Row { line, fields });
    }
    Ok(Some(rows))
}

/// Reads a one-id-per-line list; blank lines and `#` comment lines are skipped.
pub(super) fn read_id_list(dir: &Path, name: &str) -> Result<Option<Vec<(u64, String)>>, IngestError> {
    let Some(file) = open(dir, name)? else {
        return Ok(None);
    };
    let mut ids = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| IngestError::Io {
            path: dir.join(name),
            source,
        })?;
        let id = line.trim();
        if id.is_empty() || id.starts_with('#') {
            continue;
        }
        ids.push((i as u64 + 1, id.to_owned()));
    }
    Ok(Some(ids))
}
