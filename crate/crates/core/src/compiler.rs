//! Query → MapReduce plan translation.
//!
//! Every supported query is a single map + reduce round. The mapper keys each
//! surviving row on one column and emits either the constant `1` or the rest
//! of the row; the reducer applies one aggregation to the grouped values.
//!
//! | projection             | key                        | value       | reduce          |
//! |------------------------|----------------------------|-------------|-----------------|
//! | `*` + WHERE            | first predicate column     | rest of row | collect         |
//! | `*` + ORDER BY         | order column               | rest of row | sort by key     |
//! | `COUNT(c)`             | `c`                        | 1           | sum             |
//! | `DISTINCT c`           | `c`                        | 1           | distinct keys   |
//! | `UPPER(c)`             | `c`                        | 1           | upper per row   |
//! | `SUBSTRING(c, s, l)`   | `c`                        | 1           | substr per row  |
//! | `c, COUNT(c)` GROUP BY | `c`                        | 1           | count per key   |

use std::fmt::{self, Write};

use serde::Serialize;

use genmr_sql::{Direction, Predicate, Projection, QueryAst, Row, Schema, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValueSpec {
    /// The constant 1.
    One,
    /// Every field except the key column, in schema order.
    RestOfRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReduceOp {
    Collect,
    Sum,
    DistinctSet,
    UpperPerRow,
    SubstringPerRow { start: u32, len: Option<u32> },
    SortByKey(Direction),
    GroupCount,
}

impl ReduceOp {
    /// Whether the final result order is part of the contract.
    pub fn ordered(self) -> bool {
        matches!(self, ReduceOp::DistinctSet | ReduceOp::SortByKey(_))
    }
}

/// A map filter with columns resolved to field indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundFilter {
    terms: Vec<(usize, String)>,
    any: bool,
}

impl BoundFilter {
    pub fn matches(&self, row: &[String]) -> bool {
        let mut hits = self.terms.iter().map(|(i, lit)| row[*i] == *lit);
        if self.any {
            hits.any(|h| h)
        } else {
            hits.all(|h| h)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapReducePlan {
    pub key_column: String,
    pub map_filter: Option<Predicate>,
    pub value_spec: ValueSpec,
    pub reduce_op: ReduceOp,
    key_index: usize,
    filter: Option<BoundFilter>,
    width: usize,
    extension: bool,
}

impl MapReducePlan {
    pub fn key_index(&self) -> usize {
        self.key_index
    }

    pub fn bound_filter(&self) -> Option<&BoundFilter> {
        self.filter.as_ref()
    }

    /// Number of fields in the rows this plan was compiled against.
    pub fn width(&self) -> usize {
        self.width
    }

    /// True for `SELECT * FROM t` with neither WHERE nor ORDER BY, which has
    /// no listed query form and is keyed on the first column.
    pub fn is_extension(&self) -> bool {
        self.extension
    }

    pub fn accepts(&self, row: &Row) -> bool {
        self.filter.as_ref().is_none_or(|f| f.matches(row))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("unknown table '{found}' (loaded table is '{expected}')")]
    UnknownTable { expected: String, found: String },
    #[error("unknown column '{column}' in table '{table}'")]
    UnknownColumn { column: String, table: String },
    #[error("invalid query: {0}")]
    Invalid(String),
}

pub fn compile(ast: &QueryAst, schema: &Schema) -> Result<MapReducePlan, CompileError> {
    ast.validate().map_err(CompileError::Invalid)?;
    if ast.table != schema.table {
        return Err(CompileError::UnknownTable {
            expected: schema.table.clone(),
            found: ast.table.clone(),
        });
    }
    let resolve = |column: &str| {
        schema
            .index_of(column)
            .ok_or_else(|| CompileError::UnknownColumn {
                column: column.to_string(),
                table: schema.table.clone(),
            })
    };
    for column in ast.referenced_columns() {
        resolve(column)?;
    }

    let mut extension = false;
    let (key_column, value_spec, reduce_op) = match &ast.projection {
        Projection::Star => {
            let key = match (&ast.order_by, &ast.predicate) {
                (Some(order), _) => order.column.clone(),
                (None, Some(pred)) => pred.first().column.clone(),
                (None, None) => {
                    extension = true;
                    schema
                        .columns
                        .first()
                        .cloned()
                        .ok_or_else(|| CompileError::Invalid("table has no columns".into()))?
                }
            };
            let op = match &ast.order_by {
                Some(order) => ReduceOp::SortByKey(order.direction),
                None => ReduceOp::Collect,
            };
            (key, ValueSpec::RestOfRow, op)
        }
        Projection::Count(c) => (c.clone(), ValueSpec::One, ReduceOp::Sum),
        Projection::Distinct(c) => (c.clone(), ValueSpec::One, ReduceOp::DistinctSet),
        Projection::Upper(c) => (c.clone(), ValueSpec::One, ReduceOp::UpperPerRow),
        Projection::Substring { column, start, len } => (
            column.clone(),
            ValueSpec::One,
            ReduceOp::SubstringPerRow {
                start: *start,
                len: *len,
            },
        ),
        Projection::GroupCount(c) => (c.clone(), ValueSpec::One, ReduceOp::GroupCount),
    };

    let filter = match &ast.predicate {
        None => None,
        Some(pred) => Some(BoundFilter {
            terms: pred
                .terms()
                .into_iter()
                .map(|t| Ok((resolve(&t.column)?, t.literal.clone())))
                .collect::<Result<_, CompileError>>()?,
            any: matches!(pred, Predicate::Or(..)),
        }),
    };

    Ok(MapReducePlan {
        key_index: resolve(&key_column)?,
        key_column,
        map_filter: ast.predicate.clone(),
        value_spec,
        reduce_op,
        filter,
        width: schema.width(),
        extension,
    })
}

/// One-line summary: `key=State value=1 reduce=SUM filter=∅`.
pub fn describe_plan(plan: &MapReducePlan) -> String {
    let value = match plan.value_spec {
        ValueSpec::One => "1",
        ValueSpec::RestOfRow => "rest-of-row",
    };
    let reduce = match plan.reduce_op {
        ReduceOp::Collect => "COLLECT".to_string(),
        ReduceOp::Sum => "SUM".to_string(),
        ReduceOp::DistinctSet => "DISTINCT".to_string(),
        ReduceOp::UpperPerRow => "UPPER".to_string(),
        ReduceOp::SubstringPerRow {
            start,
            len: Some(len),
        } => format!("SUBSTRING({start},{len})"),
        ReduceOp::SubstringPerRow { start, len: None } => format!("SUBSTRING({start})"),
        ReduceOp::SortByKey(Direction::Asc) => "ORDER ASC".to_string(),
        ReduceOp::SortByKey(Direction::Desc) => "ORDER DESC".to_string(),
        ReduceOp::GroupCount => "GROUP-COUNT".to_string(),
    };
    let filter = match &plan.map_filter {
        None => "∅".to_string(),
        Some(Predicate::Single(t)) => term(t),
        Some(Predicate::And(a, b)) => format!("{} AND {}", term(a), term(b)),
        Some(Predicate::Or(a, b)) => format!("{} OR {}", term(a), term(b)),
    };
    format!(
        "key={} value={value} reduce={reduce} filter={filter}",
        plan.key_column
    )
}

fn term(t: &Term) -> String {
    format!("{}='{}'", t.column, t.literal)
}

/// Which of the nineteen catalogued query forms a query is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryForm {
    /// 1-19, or `None` when the query has no catalogued form.
    pub number: Option<u8>,
    pub label: String,
    /// True when the query only approximates the numbered form (for example
    /// `SELECT *` with a two-term WHERE).
    pub extension: bool,
}

impl fmt::Display for QueryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number {
            Some(n) => write!(f, "form {n}: {}", self.label)?,
            None => write!(f, "form -: {}", self.label)?,
        }
        if self.extension {
            f.write_str(" (extension)")?;
        }
        Ok(())
    }
}

pub fn classify(ast: &QueryAst) -> QueryForm {
    let form = |number: Option<u8>, label: &str, extension: bool| QueryForm {
        number,
        label: label.to_string(),
        extension,
    };
    let func = |offset: u8, name: &str| {
        let (base, clause) = match &ast.predicate {
            None => (2, ""),
            Some(Predicate::Single(_)) => (6, " with WHERE"),
            Some(Predicate::And(..)) => (10, " with WHERE ... AND ..."),
            Some(Predicate::Or(..)) => (14, " with WHERE ... OR ..."),
        };
        let mut label = String::from(name);
        let _ = write!(label, "{clause}");
        form(Some(base + offset), &label, false)
    };
    match (&ast.projection, &ast.predicate, &ast.order_by) {
        (Projection::Star, Some(Predicate::Single(_)), None) => {
            form(Some(1), "SELECT * with WHERE", false)
        }
        (Projection::Star, Some(_), None) => form(Some(1), "SELECT * with two-term WHERE", true),
        (Projection::Star, None, Some(_)) => form(Some(18), "SELECT * ORDER BY", false),
        (Projection::Star, Some(_), Some(_)) => {
            form(Some(18), "SELECT * with WHERE and ORDER BY", true)
        }
        (Projection::Star, None, None) => form(None, "SELECT * without WHERE", true),
        (Projection::Count(_), ..) => func(0, "COUNT"),
        (Projection::Distinct(_), ..) => func(1, "DISTINCT"),
        (Projection::Upper(_), ..) => func(2, "UPPER"),
        (Projection::Substring { .. }, ..) => func(3, "SUBSTRING"),
        (Projection::GroupCount(_), pred, _) => form(Some(19), "GROUP BY count", pred.is_some()),
    }
}
