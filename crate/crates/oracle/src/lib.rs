//! Reference semantics for the supported query forms.
//!
//! Evaluates a [`QueryAst`] straight over a [`TableData`] in one pass, with no
//! partitioning, placement or shuffling. This crate must only ever depend on
//! `genmr-sql`; it is the independent side of every MapReduce result check.

mod diff;
mod eval;

pub use diff::{diff, Diff, Mismatch};
pub use eval::{eval, OracleError, OracleResult, ResultKind};
