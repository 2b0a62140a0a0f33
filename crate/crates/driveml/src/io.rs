//! CSV reading and writing for [`Table`].

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use driveml_core::table::MissingTokens;
use driveml_core::{Error as CoreError, Table};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Table(#[from] CoreError),
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
}

/// Reads a headed CSV file and infers column kinds. Cells are trimmed before
/// the missing-token check.
pub fn read_csv(path: &Path, tokens: &MissingTokens) -> Result<Table, IoError> {
    let file = File::open(path).map_err(|source| IoError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    read_csv_from(file, &name, tokens)
}

pub fn read_csv_from<R: Read>(reader: R, name: &str, tokens: &MissingTokens) -> Result<Table, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != header.len() {
            let line = record.position().map_or(rows.len() + 2, |p| p.line() as usize);
            return Err(CoreError::RaggedRow {
                line,
                expected: header.len(),
                found: record.len(),
            }
            .into());
        }
        rows.push(record.iter().map(String::from).collect());
    }
    Ok(Table::from_text(name, &header, &rows, tokens)?)
}

/// Writes `t` with missing cells as `NA`.
pub fn write_csv(t: &Table, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(|source| IoError::Open {
        path: path.display().to_string(),
        source,
    })?;
    write_csv_to(t, file)
}

pub fn write_csv_to<W: Write>(t: &Table, writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(t.names())?;
    for i in 0..t.n_rows() {
        w.write_record(
            t.columns()
                .iter()
                .map(|c| c.text(i).unwrap_or_else(|| String::from("NA"))),
        )?;
    }
    w.flush()?;
    Ok(())
}
