//! Dialect-neutral query representation.
//!
//! The shape is deliberately narrow: one table, one projection, at most a
//! two-term equality predicate, and either an `ORDER BY` (only with `*`) or a
//! `GROUP BY` (only with the `col, COUNT(col)` projection). Constructors that
//! could break those rules live in the parser, which is the only producer.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryAst {
    pub projection: Projection,
    pub table: String,
    pub predicate: Option<Predicate>,
    pub order_by: Option<OrderBy>,
    pub group_by: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Projection {
    Star,
    Count(String),
    Distinct(String),
    Upper(String),
    /// 1-based `start`; `len` of `None` means "to the end of the value".
    Substring {
        column: String,
        start: u32,
        len: Option<u32>,
    },
    /// `SELECT col, COUNT(col) ... GROUP BY col`
    GroupCount(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProjectionKind {
    Star,
    Count,
    Distinct,
    Upper,
    Substring,
    GroupCount,
}

impl Projection {
    pub fn kind(&self) -> ProjectionKind {
        match self {
            Projection::Star => ProjectionKind::Star,
            Projection::Count(_) => ProjectionKind::Count,
            Projection::Distinct(_) => ProjectionKind::Distinct,
            Projection::Upper(_) => ProjectionKind::Upper,
            Projection::Substring { .. } => ProjectionKind::Substring,
            Projection::GroupCount(_) => ProjectionKind::GroupCount,
        }
    }

    /// The column the projection applies to, `None` for `*`.
    pub fn column(&self) -> Option<&str> {
        match self {
            Projection::Star => None,
            Projection::Count(c)
            | Projection::Distinct(c)
            | Projection::Upper(c)
            | Projection::GroupCount(c) => Some(c),
            Projection::Substring { column, .. } => Some(column),
        }
    }
}

/// `column = 'literal'`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub column: String,
    pub literal: String,
}

impl Term {
    pub fn new(column: impl Into<String>, literal: impl Into<String>) -> Self {
        Term {
            column: column.into(),
            literal: literal.into(),
        }
    }
}

/// A WHERE clause: one term, or two terms joined by a single connective.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Predicate {
    Single(Term),
    And(Term, Term),
    Or(Term, Term),
}

impl Predicate {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Predicate::Single(t) => vec![t],
            Predicate::And(a, b) | Predicate::Or(a, b) => vec![a, b],
        }
    }

    pub fn first(&self) -> &Term {
        match self {
            Predicate::Single(t) | Predicate::And(t, _) | Predicate::Or(t, _) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderBy {
    pub column: String,
    pub direction: Direction,
}

impl QueryAst {
    /// A bare `SELECT <projection> FROM <table>`.
    pub fn simple(projection: Projection, table: impl Into<String>) -> Self {
        QueryAst {
            projection,
            table: table.into(),
            predicate: None,
            order_by: None,
            group_by: None,
        }
    }

    pub fn with_predicate(mut self, predicate: Predicate) -> Self {
        self.predicate = Some(predicate);
        self
    }

    pub fn with_order_by(mut self, column: impl Into<String>, direction: Direction) -> Self {
        self.order_by = Some(OrderBy {
            column: column.into(),
            direction,
        });
        self
    }

    /// Every column name the query mentions, in first-mention order.
    pub fn referenced_columns(&self) -> Vec<&str> {
        let mentions = self
            .projection
            .column()
            .into_iter()
            .chain(
                self.predicate
                    .iter()
                    .flat_map(|p| p.terms())
                    .map(|t| t.column.as_str()),
            )
            .chain(self.order_by.iter().map(|o| o.column.as_str()))
            .chain(self.group_by.as_deref());
        let mut cols: Vec<&str> = Vec::new();
        for c in mentions {
            if !cols.contains(&c) {
                cols.push(c);
            }
        }
        cols
    }

    /// Checks the structural rules the parser guarantees. Useful for ASTs
    /// built by hand.
    pub fn validate(&self) -> Result<(), String> {
        if let Projection::Substring { start, len, .. } = &self.projection {
            if *start < 1 {
                return Err("substring start must be >= 1".into());
            }
            if *len == Some(0) {
                return Err("substring length must be positive".into());
            }
        }
        if self.order_by.is_some() && self.projection != Projection::Star {
            return Err("ORDER BY requires a * projection".into());
        }
        match (&self.projection, &self.group_by) {
            (Projection::GroupCount(c), Some(g)) if c == g => {}
            (Projection::GroupCount(_), _) => {
                return Err("grouped count needs a GROUP BY on its column".into())
            }
            (_, Some(_)) => return Err("GROUP BY requires a grouped count projection".into()),
            _ => {}
        }
        Ok(())
    }
}
