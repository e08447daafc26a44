use std::fmt::Write;

use crate::ast::{Direction, Predicate, Projection, QueryAst, Term};

/// Renders an AST as canonical SQL-dialect text.
///
/// `parse(&render_canonical(ast), Dialect::Sql)` reproduces `ast` for every
/// AST that satisfies [`QueryAst::validate`] and whose literals contain no
/// single quote (literal escaping is not part of the grammar).
pub fn render_canonical(ast: &QueryAst) -> String {
    let mut out = String::from("SELECT ");
    match &ast.projection {
        Projection::Star => out.push('*'),
        Projection::Count(c) => {
            let _ = write!(out, "COUNT({c})");
        }
        Projection::Distinct(c) => {
            let _ = write!(out, "DISTINCT {c}");
        }
        Projection::Upper(c) => {
            let _ = write!(out, "UPPER({c})");
        }
        Projection::Substring { column, start, len } => {
            let _ = match len {
                Some(len) => write!(out, "SUBSTRING({column}, {start}, {len})"),
                None => write!(out, "SUBSTRING({column}, {start})"),
            };
        }
        Projection::GroupCount(c) => {
            let _ = write!(out, "{c}, COUNT({c})");
        }
    }
    let _ = write!(out, " FROM {}", ast.table);

    if let Some(pred) = &ast.predicate {
        out.push_str(" WHERE ");
        match pred {
            Predicate::Single(t) => push_term(&mut out, t),
            Predicate::And(a, b) => {
                push_term(&mut out, a);
                out.push_str(" AND ");
                push_term(&mut out, b);
            }
            Predicate::Or(a, b) => {
                push_term(&mut out, a);
                out.push_str(" OR ");
                push_term(&mut out, b);
            }
        }
    }
    if let Some(order) = &ast.order_by {
        let dir = match order.direction {
            Direction::Asc => "ASC",
            Direction::Desc => "DESC",
        };
        let _ = write!(out, " ORDER BY {} {dir}", order.column);
    }
    if let Some(group) = &ast.group_by {
        let _ = write!(out, " GROUP BY {group}");
    }
    out
}

fn push_term(out: &mut String, term: &Term) {
    let _ = write!(out, "{} = '{}'", term.column, term.literal);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse, Dialect};

    #[test]
    fn count() {
        let ast = QueryAst::simple(Projection::Count("State".into()), "teachers");
        assert_eq!(render_canonical(&ast), "SELECT COUNT(State) FROM teachers");
    }

    #[test]
    fn order_by() {
        let ast =
            QueryAst::simple(Projection::Star, "teachers").with_order_by("State", Direction::Asc);
        assert_eq!(
            render_canonical(&ast),
            "SELECT * FROM teachers ORDER BY State ASC"
        );
    }

    #[test]
    fn round_trip_examples() {
        for q in [
            "SELECT * FROM teachers WHERE State = 'Andhra Pradesh'",
            "SELECT SUBSTRING(State, 1, 5) FROM teachers WHERE State = 'x' OR School_Type = 'y'",
            "SELECT State, COUNT(State) FROM teachers GROUP BY State",
            "SELECT DISTINCT State FROM teachers",
            "SELECT * FROM teachers ORDER BY State DESC",
        ] {
            let ast = parse(q, Dialect::Sql).unwrap();
            assert_eq!(render_canonical(&ast), q);
            assert_eq!(parse(&render_canonical(&ast), Dialect::Sql).unwrap(), ast);
        }
    }
}
