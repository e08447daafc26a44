//! Row-oriented table data and CSV ingestion.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// One table row, one string per schema column.
pub type Row = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub table: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("row {row} has {found} fields, schema has {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
}

impl Schema {
    pub fn new(table: impl Into<String>, columns: Vec<String>) -> Result<Self, SchemaError> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(SchemaError::DuplicateColumn(c.clone()));
            }
        }
        Ok(Schema {
            table: table.into(),
            columns,
        })
    }

    /// Case-sensitive column lookup.
    pub fn index_of(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }
}

/// A table's rows in ingestion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableData {
    schema: Schema,
    rows: Vec<Row>,
}

impl TableData {
    pub fn new(schema: Schema, rows: Vec<Row>) -> Result<Self, SchemaError> {
        if let Some((i, r)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != schema.width())
        {
            return Err(SchemaError::RowWidth {
                row: i,
                expected: schema.width(),
                found: r.len(),
            });
        }
        Ok(TableData { schema, rows })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("CSV input has no header line")]
    MissingHeader,
    #[error("ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column '{0}' in CSV header")]
    DuplicateColumn(String),
}

/// Reads a CSV file whose first line is the header. The table is named after
/// the file stem (`data/teachers.csv` → `teachers`).
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<TableData, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let table = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, table)
}

pub fn read_csv(reader: impl Read, table: impl Into<String>) -> Result<TableData, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(IngestError::MissingHeader),
    };
    let columns: Vec<String> = header.iter().map(|f| f.trim().to_string()).collect();
    let schema = Schema::new(table, columns).map_err(|e| match e {
        SchemaError::DuplicateColumn(c) => IngestError::DuplicateColumn(c),
        other => IngestError::Csv(other.to_string()),
    })?;

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != schema.width() {
            return Err(IngestError::RaggedRow {
                line: rec.position().map_or(0, |p| p.line()),
                expected: schema.width(),
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(TableData { schema, rows })
}

fn csv_error(e: csv::Error) -> IngestError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => IngestError::Io {
            path: PathBuf::new(),
            source,
        },
        kind => IngestError::Csv(format!("{kind:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<TableData, IngestError> {
        read_csv(text.as_bytes(), "t")
    }

    #[test]
    fn header_and_rows() {
        let t = read("State,School_Type\nKerala,Primary School\n\"Andhra, Pradesh\",x\n").unwrap();
        assert_eq!(t.schema().columns, ["State", "School_Type"]);
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows()[1][0], "Andhra, Pradesh");
    }

    #[test]
    fn crlf_and_blank_lines() {
        let t = read("a,b\r\n1,2\r\n\r\n3,4\r\n").unwrap();
        assert_eq!(t.rows(), &[vec!["1", "2"], vec!["3", "4"]]);
    }

    #[test]
    fn header_only_is_empty_table() {
        let t = read("a,b,c\n").unwrap();
        assert!(t.is_empty());
        assert_eq!(t.schema().width(), 3);
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = read("a,b,c,d\n1,2,3,4\n1,2,3\n").unwrap_err();
        assert!(
            matches!(
                err,
                IngestError::RaggedRow {
                    line: 3,
                    expected: 4,
                    found: 3
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn duplicate_and_missing_header() {
        assert!(matches!(read("a,b,a\n"), Err(IngestError::DuplicateColumn(c)) if c == "a"));
        assert!(matches!(read(""), Err(IngestError::MissingHeader)));
    }

    #[test]
    fn file_stem_names_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("teachers.csv");
        std::fs::write(&path, "State\nKerala\n").unwrap();
        let t = ingest_csv(&path).unwrap();
        assert_eq!(t.schema().table, "teachers");
        assert!(matches!(
            ingest_csv(dir.path().join("missing.csv")),
            Err(IngestError::Io { .. })
        ));
    }

    #[test]
    fn table_data_checks_width() {
        let schema = Schema::new("t", vec!["a".into(), "b".into()]).unwrap();
        assert!(TableData::new(schema, vec![vec!["1".into()]]).is_err());
    }
}
