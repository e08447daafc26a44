//! Recursive-descent parser for the supported query forms.
//!
//! ```text
//! query      := SELECT projection FROM ident [WHERE predicate]
//!               [ORDER BY ident [ASC | DESC]] [GROUP BY ident] [';']
//! projection := '*'
//!             | COUNT arg | DISTINCT arg            arg := '(' ident ')' | ident
//!             | UPPER '(' ident ')'                 (UCASE in MySQL / DB2)
//!             | SUBSTRING '(' ident ',' int [',' int] ')'
//!                                                   (SUBSTR in Oracle / DB2)
//!             | ident ',' COUNT '(' ident ')'       (requires GROUP BY ident)
//! predicate  := term [(AND | OR) term]
//! term       := ident '=' (string | int)
//! ```

use crate::ast::{Direction, OrderBy, Predicate, Projection, QueryAst, Term};
use crate::dialect::Dialect;
use crate::token::{tokenize, Token, TokenKind, TokenizeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported construct at byte {position}: {construct}")]
    UnsupportedConstruct { position: usize, construct: String },
    #[error("predicate too complex at byte {position}: at most two terms joined by one AND/OR")]
    PredicateTooComplex { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Tokenize(e) => e.position(),
            ParseError::Syntax { position, .. }
            | ParseError::UnsupportedConstruct { position, .. }
            | ParseError::PredicateTooComplex { position } => *position,
        }
    }
}

pub fn parse(text: &str, dialect: Dialect) -> Result<QueryAst, ParseError> {
    let tokens = tokenize(text)?;
    Parser {
        tokens,
        pos: 0,
        end: text.len(),
        dialect,
    }
    .query()
}

type PResult<T> = Result<T, ParseError>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    dialect: Dialect,
}

const JOIN_WORDS: &[&str] = &["JOIN", "INNER", "LEFT", "RIGHT", "FULL", "CROSS", "OUTER"];
const STATEMENT_WORDS: &[&str] = &["INSERT", "UPDATE", "DELETE"];

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            position: self.here(),
            message: message.into(),
        })
    }

    fn unsupported<T>(&self, construct: impl Into<String>) -> PResult<T> {
        Err(ParseError::UnsupportedConstruct {
            position: self.here(),
            construct: construct.into(),
        })
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!("found '{t}'"),
            None => "found end of input".to_string(),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn at_symbol(&self, sym: &str) -> bool {
        self.peek().is_some_and(|t| t.is_symbol(sym))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_symbol(&mut self, sym: &str) -> bool {
        if self.at_symbol(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.syntax(format!("expected {kw}, {}", self.found()))
        }
    }

    fn expect_symbol(&mut self, sym: &str) -> PResult<()> {
        if self.eat_symbol(sym) {
            Ok(())
        } else {
            self.syntax(format!("expected '{sym}', {}", self.found()))
        }
    }

    fn identifier(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let text = t.text.clone();
                self.pos += 1;
                Ok(text)
            }
            Some(t) if t.is_symbol("*") => self.unsupported(format!("{what} '*'")),
            Some(t) if t.is_symbol("(") => self.unsupported(format!("subquery as {what}")),
            _ => self.syntax(format!("expected {what}, {}", self.found())),
        }
    }

    fn positive_int(&mut self, what: &str) -> PResult<u32> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::NumberLiteral => {
                let value = t.text.parse::<u32>().ok().filter(|v| *v >= 1);
                match value {
                    Some(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    None => self.syntax(format!("{what} must be an integer >= 1")),
                }
            }
            _ => self.syntax(format!("expected {what}, {}", self.found())),
        }
    }

    fn query(mut self) -> PResult<QueryAst> {
        if self.tokens.is_empty() {
            return self.syntax("empty query");
        }
        if let Some(kw) = STATEMENT_WORDS.iter().find(|kw| self.at_keyword(kw)) {
            return self.unsupported(format!("{kw} statement"));
        }
        self.expect_keyword("SELECT")?;
        let projection = self.projection()?;
        if self.at_symbol(",") {
            return self.unsupported("multi-column projection");
        }
        self.expect_keyword("FROM")?;
        let table = self.identifier("table name")?;
        self.after_table()?;

        let mut ast = QueryAst::simple(projection, table);
        if self.eat_keyword("WHERE") {
            ast.predicate = Some(self.predicate()?);
        }

        loop {
            let clause_pos = self.here();
            if self.eat_keyword("ORDER") {
                self.expect_keyword("BY")?;
                if ast.order_by.is_some() {
                    return self.syntax("duplicate ORDER BY");
                }
                let column = self.identifier("ORDER BY column")?;
                let direction = if self.eat_keyword("DESC") {
                    Direction::Desc
                } else {
                    self.eat_keyword("ASC");
                    Direction::Asc
                };
                if self.at_symbol(",") {
                    return self.unsupported("multi-column ORDER BY");
                }
                if ast.projection != Projection::Star {
                    return Err(ParseError::UnsupportedConstruct {
                        position: clause_pos,
                        construct: "ORDER BY with a projection other than *".into(),
                    });
                }
                ast.order_by = Some(OrderBy { column, direction });
            } else if self.eat_keyword("GROUP") {
                self.expect_keyword("BY")?;
                if ast.group_by.is_some() {
                    return self.syntax("duplicate GROUP BY");
                }
                let column = self.identifier("GROUP BY column")?;
                if self.at_symbol(",") {
                    return self.unsupported("multi-column GROUP BY");
                }
                match &ast.projection {
                    Projection::GroupCount(c) if *c == column => {}
                    Projection::GroupCount(_) => {
                        return Err(ParseError::UnsupportedConstruct {
                            position: clause_pos,
                            construct: "GROUP BY a column other than the grouped one".into(),
                        })
                    }
                    _ => {
                        return Err(ParseError::UnsupportedConstruct {
                            position: clause_pos,
                            construct: "GROUP BY without a 'col, COUNT(col)' projection".into(),
                        })
                    }
                }
                ast.group_by = Some(column);
            } else {
                break;
            }
        }
        if ast.order_by.is_some() && ast.group_by.is_some() {
            return self.unsupported("ORDER BY combined with GROUP BY");
        }

        for kw in ["LIMIT", "FETCH", "HAVING", "UNION"] {
            if self.at_keyword(kw) {
                return self.unsupported(kw);
            }
        }
        self.eat_symbol(";");
        if self.peek().is_some() {
            return self.syntax(format!("unexpected trailing input, {}", self.found()));
        }
        if matches!(ast.projection, Projection::GroupCount(_)) && ast.group_by.is_none() {
            return Err(ParseError::UnsupportedConstruct {
                position: 0,
                construct: "'col, COUNT(col)' projection without GROUP BY".into(),
            });
        }
        Ok(ast)
    }

    fn after_table(&mut self) -> PResult<()> {
        if self.at_symbol(",") {
            return self.unsupported("JOIN (multiple tables in FROM)");
        }
        if JOIN_WORDS.iter().any(|kw| self.at_keyword(kw)) {
            return self.unsupported("JOIN");
        }
        if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
            return self.unsupported("table alias");
        }
        Ok(())
    }

    /// `( ident )` or bare `ident`, as accepted by COUNT and DISTINCT.
    fn loose_arg(&mut self, func: &str) -> PResult<String> {
        if self.eat_symbol("(") {
            if self.at_symbol("*") {
                return self.unsupported(format!("{func}(*)"));
            }
            let col = self.identifier(&format!("{func} argument"))?;
            self.expect_symbol(")")?;
            Ok(col)
        } else {
            if self.at_symbol("*") {
                return self.unsupported(format!("{func} *"));
            }
            self.identifier(&format!("{func} argument"))
        }
    }

    fn paren_arg(&mut self, func: &str) -> PResult<String> {
        self.expect_symbol("(")?;
        let col = self.identifier(&format!("{func} argument"))?;
        self.expect_symbol(")")?;
        Ok(col)
    }

    fn projection(&mut self) -> PResult<Projection> {
        let Some(tok) = self.peek().cloned() else {
            return self.syntax("expected projection, found end of input");
        };
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Symbol, "*") => {
                self.advance();
                Ok(Projection::Star)
            }
            (TokenKind::Keyword, "COUNT") => {
                self.advance();
                Ok(Projection::Count(self.loose_arg("COUNT")?))
            }
            (TokenKind::Keyword, "DISTINCT") => {
                self.advance();
                Ok(Projection::Distinct(self.loose_arg("DISTINCT")?))
            }
            (TokenKind::Keyword, "UPPER") => {
                self.advance();
                Ok(Projection::Upper(self.paren_arg("UPPER")?))
            }
            (TokenKind::Keyword, "UCASE") => {
                if !self.dialect.accepts_ucase() {
                    return self.unsupported(format!(
                        "UCASE is not available in the {} dialect",
                        self.dialect
                    ));
                }
                self.advance();
                Ok(Projection::Upper(self.paren_arg("UCASE")?))
            }
            (TokenKind::Keyword, "SUBSTRING") => {
                self.advance();
                self.substring_args("SUBSTRING")
            }
            (TokenKind::Keyword, "SUBSTR") => {
                if !self.dialect.accepts_substr() {
                    return self.unsupported(format!(
                        "SUBSTR is not available in the {} dialect",
                        self.dialect
                    ));
                }
                self.advance();
                self.substring_args("SUBSTR")
            }
            (TokenKind::Identifier, _) => {
                if self.peek_at(1).is_some_and(|t| t.is_symbol("(")) {
                    return self.unsupported(format!("function {}", tok.text));
                }
                self.advance();
                if !self.eat_symbol(",") {
                    return self.unsupported("bare column projection");
                }
                if !self.at_keyword("COUNT") {
                    return self.unsupported("multi-column projection");
                }
                self.advance();
                let counted = self.paren_arg("COUNT")?;
                if counted != tok.text {
                    return self.unsupported("grouped count over a different column");
                }
                Ok(Projection::GroupCount(counted))
            }
            _ => self.syntax(format!("expected projection, {}", self.found())),
        }
    }

    fn substring_args(&mut self, func: &str) -> PResult<Projection> {
        self.expect_symbol("(")?;
        let column = self.identifier(&format!("{func} argument"))?;
        self.expect_symbol(",")?;
        let start = self.positive_int("substring start")?;
        let len = if self.eat_symbol(",") {
            Some(self.positive_int("substring length")?)
        } else {
            None
        };
        self.expect_symbol(")")?;
        Ok(Projection::Substring { column, start, len })
    }

    fn predicate(&mut self) -> PResult<Predicate> {
        let where_pos = self.tokens[self.pos - 1].position;
        let first = self.term()?;
        let connective = if self.at_keyword("AND") || self.at_keyword("OR") {
            self.advance().map(|t| t.text)
        } else {
            None
        };
        let Some(connective) = connective else {
            return Ok(Predicate::Single(first));
        };
        let second = self.term()?;
        if self.at_keyword("AND") || self.at_keyword("OR") {
            return Err(ParseError::PredicateTooComplex {
                position: where_pos,
            });
        }
        Ok(if connective == "AND" {
            Predicate::And(first, second)
        } else {
            Predicate::Or(first, second)
        })
    }

    fn term(&mut self) -> PResult<Term> {
        if self.at_symbol("(") {
            return self.unsupported("parenthesized predicate");
        }
        if self.at_keyword("NOT") {
            return self.unsupported("NOT");
        }
        let column = self.identifier("predicate column")?;
        match self.peek() {
            Some(t) if t.is_symbol("=") => {
                self.advance();
            }
            Some(t) if t.is_symbol("<") || t.is_symbol(">") || t.is_symbol("!") => {
                return self.unsupported("comparison operator other than =");
            }
            Some(t)
                if t.kind == TokenKind::Keyword
                    && ["IS", "LIKE", "IN", "NOT"].contains(&t.text.as_str()) =>
            {
                let kw = t.text.clone();
                return self.unsupported(format!("{kw} predicate"));
            }
            _ => return self.syntax(format!("expected '=', {}", self.found())),
        }
        match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::StringLiteral | TokenKind::NumberLiteral) => {
                let literal = t.text.clone();
                self.advance();
                Ok(Term { column, literal })
            }
            Some(t) if t.kind == TokenKind::Identifier => {
                self.unsupported("column-to-column comparison")
            }
            _ => self.syntax(format!("expected a quoted literal, {}", self.found())),
        }
    }
}
