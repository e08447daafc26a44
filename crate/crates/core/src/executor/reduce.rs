use rayon::prelude::*;

use genmr_sql::{Direction, Row};

use crate::compiler::{MapReducePlan, ReduceOp};

use super::map::{KeyValue, Value};
use super::shuffle::ReducerInput;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("substring start {0} is out of range (must be >= 1)")]
    SubstringOutOfRange(u32),
}

/// The merged output of all reducers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReduceOutput {
    pub rows: Vec<Row>,
    /// Number of distinct keys, for `DistinctSet`.
    pub distinct_count: Option<u64>,
    /// Per-key counts behind a `Sum` total, keys ascending.
    pub count_by_key: Option<Vec<(String, u64)>>,
}

enum Partial {
    Counts(Vec<(String, u64)>),
    Keys(Vec<String>),
    Rows(Vec<(String, usize, Row)>),
}

/// ASCII-only upper-casing; other characters pass through untouched.
pub fn ascii_upper(s: &str) -> String {
    s.to_ascii_uppercase()
}

/// 1-based, character-counted substring with the length clamped at the end.
pub fn substring(s: &str, start: u32, len: Option<u32>) -> Result<String, ReduceError> {
    if start < 1 {
        return Err(ReduceError::SubstringOutOfRange(start));
    }
    let skipped = s.chars().skip(start as usize - 1);
    Ok(match len {
        Some(len) => skipped.take(len as usize).collect(),
        None => skipped.collect(),
    })
}

fn full_row(kv: &KeyValue) -> Row {
    let mut row = vec![kv.key.clone()];
    if let Value::Row(rest) = &kv.value {
        row.extend(rest.iter().cloned());
    }
    row
}

fn reduce_one(plan: &MapReducePlan, input: &ReducerInput) -> Result<Partial, ReduceError> {
    let records = || input.values().flatten();
    Ok(match plan.reduce_op {
        ReduceOp::Sum | ReduceOp::GroupCount => Partial::Counts(
            input
                .iter()
                .map(|(k, vs)| (k.clone(), vs.len() as u64))
                .collect(),
        ),
        ReduceOp::DistinctSet => Partial::Keys(input.keys().cloned().collect()),
        ReduceOp::Collect | ReduceOp::SortByKey(_) => Partial::Rows(
            records()
                .map(|kv| (kv.key.clone(), kv.origin, full_row(kv)))
                .collect(),
        ),
        ReduceOp::UpperPerRow => Partial::Rows(
            records()
                .map(|kv| (kv.key.clone(), kv.origin, vec![ascii_upper(&kv.key)]))
                .collect(),
        ),
        ReduceOp::SubstringPerRow { start, len } => Partial::Rows(
            records()
                .map(|kv| {
                    Ok((
                        kv.key.clone(),
                        kv.origin,
                        vec![substring(&kv.key, start, len)?],
                    ))
                })
                .collect::<Result<_, ReduceError>>()?,
        ),
    })
}

/// Runs every reducer over its shuffled input (in parallel on the current
/// rayon pool) and merges the partial results in reducer order.
pub fn run_reduce(
    plan: &MapReducePlan,
    groups: &[ReducerInput],
) -> Result<ReduceOutput, ReduceError> {
    let partials = groups
        .par_iter()
        .map(|g| reduce_one(plan, g))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = ReduceOutput::default();
    match plan.reduce_op {
        ReduceOp::Sum | ReduceOp::GroupCount => {
            let mut counts: Vec<(String, u64)> = partials
                .into_iter()
                .flat_map(|p| match p {
                    Partial::Counts(c) => c,
                    _ => unreachable!("count reducers produce counts"),
                })
                .collect();
            counts.sort();
            if plan.reduce_op == ReduceOp::Sum {
                let total: u64 = counts.iter().map(|(_, n)| n).sum();
                out.rows = vec![vec![total.to_string()]];
                out.count_by_key = Some(counts);
            } else {
                out.rows = counts
                    .into_iter()
                    .map(|(k, n)| vec![k, n.to_string()])
                    .collect();
            }
        }
        ReduceOp::DistinctSet => {
            let mut keys: Vec<String> = partials
                .into_iter()
                .flat_map(|p| match p {
                    Partial::Keys(k) => k,
                    _ => unreachable!("distinct reducers produce keys"),
                })
                .collect();
            keys.sort();
            keys.dedup();
            out.distinct_count = Some(keys.len() as u64);
            out.rows = keys.into_iter().map(|k| vec![k]).collect();
        }
        _ => {
            let mut rows: Vec<(String, usize, Row)> = partials
                .into_iter()
                .flat_map(|p| match p {
                    Partial::Rows(r) => r,
                    _ => unreachable!("row reducers produce rows"),
                })
                .collect();
            match plan.reduce_op {
                ReduceOp::SortByKey(Direction::Asc) => {
                    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
                }
                ReduceOp::SortByKey(Direction::Desc) => {
                    rows.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)))
                }
                _ => {}
            }
            out.rows = rows.into_iter().map(|(_, _, r)| r).collect();
        }
    }
    Ok(out)
}
