use std::collections::BTreeMap;

use genmr_sql::{Direction, Predicate, Projection, QueryAst, Row, TableData};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultKind {
    /// `SELECT *` with a WHERE clause (or none): key column first, then the rest.
    Rows,
    Count,
    Distinct,
    Upper,
    Substring,
    OrderBy,
    GroupCount,
}

impl ResultKind {
    /// Whether results must match as sequences rather than multisets.
    pub fn ordered(self) -> bool {
        matches!(self, ResultKind::Distinct | ResultKind::OrderBy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub rows: Vec<Row>,
    pub kind: ResultKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
}

pub fn eval(ast: &QueryAst, table: &TableData) -> Result<OracleResult, OracleError> {
    let schema = table.schema();
    let col = |name: &str| {
        schema
            .index_of(name)
            .ok_or_else(|| OracleError::UnknownColumn(name.to_string()))
    };

    let filter: Option<(bool, Vec<(usize, &str)>)> = match &ast.predicate {
        None => None,
        Some(p) => {
            let is_or = matches!(p, Predicate::Or(..));
            let mut terms = Vec::new();
            for t in p.terms() {
                terms.push((col(&t.column)?, t.literal.as_str()));
            }
            Some((is_or, terms))
        }
    };
    let matching: Vec<&Row> = table
        .rows()
        .iter()
        .filter(|row| match &filter {
            None => true,
            Some((true, terms)) => terms.iter().any(|(i, lit)| row[*i] == *lit),
            Some((false, terms)) => terms.iter().all(|(i, lit)| row[*i] == *lit),
        })
        .collect();

    let result = match &ast.projection {
        Projection::Star => {
            let key_name = match (&ast.order_by, &ast.predicate) {
                (Some(o), _) => o.column.as_str(),
                (None, Some(p)) => p.first().column.as_str(),
                (None, None) => schema.columns.first().map(String::as_str).unwrap_or(""),
            };
            let key = if schema.width() == 0 {
                0
            } else {
                col(key_name)?
            };
            let mut rows: Vec<Row> = matching.iter().map(|r| key_first(r, key)).collect();
            match &ast.order_by {
                Some(o) => {
                    // sort_by is stable: equal keys keep table order.
                    match o.direction {
                        Direction::Asc => rows.sort_by(|a, b| a[0].cmp(&b[0])),
                        Direction::Desc => rows.sort_by(|a, b| b[0].cmp(&a[0])),
                    }
                    OracleResult {
                        rows,
                        kind: ResultKind::OrderBy,
                    }
                }
                None => OracleResult {
                    rows,
                    kind: ResultKind::Rows,
                },
            }
        }
        Projection::Count(c) => {
            col(c)?;
            OracleResult {
                rows: vec![vec![matching.len().to_string()]],
                kind: ResultKind::Count,
            }
        }
        Projection::Distinct(c) => {
            let i = col(c)?;
            let mut values: Vec<&str> = matching.iter().map(|r| r[i].as_str()).collect();
            values.sort_unstable();
            values.dedup();
            OracleResult {
                rows: values.into_iter().map(|v| vec![v.to_string()]).collect(),
                kind: ResultKind::Distinct,
            }
        }
        Projection::Upper(c) => {
            let i = col(c)?;
            OracleResult {
                rows: matching
                    .iter()
                    .map(|r| vec![r[i].chars().map(|ch| ch.to_ascii_uppercase()).collect()])
                    .collect(),
                kind: ResultKind::Upper,
            }
        }
        Projection::Substring { column, start, len } => {
            let i = col(column)?;
            OracleResult {
                rows: matching
                    .iter()
                    .map(|r| vec![sql_substring(&r[i], *start, *len)])
                    .collect(),
                kind: ResultKind::Substring,
            }
        }
        Projection::GroupCount(c) => {
            let i = col(c)?;
            let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
            for r in &matching {
                *counts.entry(r[i].as_str()).or_default() += 1;
            }
            OracleResult {
                rows: counts
                    .into_iter()
                    .map(|(k, n)| vec![k.to_string(), n.to_string()])
                    .collect(),
                kind: ResultKind::GroupCount,
            }
        }
    };
    Ok(result)
}

fn key_first(row: &Row, key: usize) -> Row {
    let mut out = Vec::with_capacity(row.len());
    out.push(row[key].clone());
    for (j, v) in row.iter().enumerate() {
        if j != key {
            out.push(v.clone());
        }
    }
    out
}

/// SQL `SUBSTRING(s, start, len)`: 1-based, counted in characters, clamped.
fn sql_substring(s: &str, start: u32, len: Option<u32>) -> String {
    let chars: Vec<char> = s.chars().collect();
    let from = (start as usize).saturating_sub(1).min(chars.len());
    let to = match len {
        Some(l) => (from + l as usize).min(chars.len()),
        None => chars.len(),
    };
    chars[from..to].iter().collect()
}
