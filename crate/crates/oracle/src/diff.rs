use std::collections::BTreeMap;
use std::fmt;

use genmr_sql::Row;

use crate::OracleResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    /// Present in the oracle result, absent (or under-represented) in the actual rows.
    Missing {
        row: Row,
        expected: usize,
        actual: usize,
    },
    /// Present in the actual rows more often than in the oracle result.
    Unexpected {
        row: Row,
        expected: usize,
        actual: usize,
    },
    /// First position where two ordered results disagree.
    Divergent {
        index: usize,
        expected: Option<Row>,
        actual: Option<Row>,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Missing {
                row,
                expected,
                actual,
            } => {
                write!(f, "missing row {row:?} (expected {expected}, got {actual})")
            }
            Mismatch::Unexpected {
                row,
                expected,
                actual,
            } => {
                write!(
                    f,
                    "unexpected row {row:?} (expected {expected}, got {actual})"
                )
            }
            Mismatch::Divergent {
                index,
                expected,
                actual,
            } => write!(
                f,
                "results diverge at index {index}: expected {}, got {}",
                expected
                    .as_ref()
                    .map_or("<end>".to_string(), |r| format!("{r:?}")),
                actual
                    .as_ref()
                    .map_or("<end>".to_string(), |r| format!("{r:?}")),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diff {
    pub ordered: bool,
    pub mismatches: Vec<Mismatch>,
}

impl Diff {
    pub fn is_match(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `match` or one mismatch per line.
impl fmt::Display for Diff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_match() {
            return f.write_str("match");
        }
        for (i, m) in self.mismatches.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Compares actual result rows against the oracle. `ordered` selects sequence
/// equality; otherwise rows are compared as multisets.
pub fn diff(expected: &OracleResult, actual: &[Row], ordered: bool) -> Diff {
    let mut mismatches = Vec::new();
    if ordered {
        let n = expected.rows.len().max(actual.len());
        if let Some(index) = (0..n).find(|&i| expected.rows.get(i) != actual.get(i)) {
            mismatches.push(Mismatch::Divergent {
                index,
                expected: expected.rows.get(index).cloned(),
                actual: actual.get(index).cloned(),
            });
            // Also name rows that went missing entirely, which is the usual
            // cause of a divergence.
            mismatches.extend(multiset_mismatches(&expected.rows, actual));
        }
    } else {
        mismatches = multiset_mismatches(&expected.rows, actual);
    }
    Diff {
        ordered,
        mismatches,
    }
}

fn multiset_mismatches(expected: &[Row], actual: &[Row]) -> Vec<Mismatch> {
    let mut counts: BTreeMap<&Row, (usize, usize)> = BTreeMap::new();
    for r in expected {
        counts.entry(r).or_default().0 += 1;
    }
    for r in actual {
        counts.entry(r).or_default().1 += 1;
    }
    // Missing rows first, each group in row order.
    let (missing, unexpected): (Vec<_>, Vec<_>) = counts
        .into_iter()
        .filter(|(_, (e, a))| e != a)
        .map(|(row, (expected, actual))| {
            if expected > actual {
                Mismatch::Missing {
                    row: row.clone(),
                    expected,
                    actual,
                }
            } else {
                Mismatch::Unexpected {
                    row: row.clone(),
                    expected,
                    actual,
                }
            }
        })
        .partition(|m| matches!(m, Mismatch::Missing { .. }));
    missing.into_iter().chain(unexpected).collect()
}
