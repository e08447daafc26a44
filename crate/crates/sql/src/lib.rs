//! Query front end for genmr.
//!
//! Tokenizes and parses queries written in the SQL, MySQL, Oracle or DB2
//! flavour into one dialect-neutral [`QueryAst`], renders ASTs back to
//! canonical text, and holds the row-oriented [`TableData`] model that both
//! the MapReduce engine and the reference evaluator consume.

pub mod ast;
pub mod dialect;
pub mod parser;
pub mod render;
pub mod table;
pub mod token;

pub use ast::{Direction, OrderBy, Predicate, Projection, ProjectionKind, QueryAst, Term};
pub use dialect::Dialect;
pub use parser::{parse, ParseError};
pub use render::render_canonical;
pub use table::{ingest_csv, read_csv, IngestError, Row, Schema, SchemaError, TableData};
pub use token::{tokenize, Token, TokenKind, TokenizeError};
