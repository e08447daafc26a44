use serde::Serialize;

use crate::compiler::{MapReducePlan, ValueSpec};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Value {
    One,
    /// The row's fields minus the key column, in schema order.
    Row(Vec<String>),
}

/// One intermediate record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyValue {
    pub key: String,
    pub value: Value,
    /// Index of the table row that produced this record. Carried for
    /// ordering ties only; it is never shuffled as data.
    pub origin: usize,
}

/// Applies the plan's map filter and emits one record per surviving row.
pub fn run_map<'a>(
    plan: &MapReducePlan,
    rows: impl IntoIterator<Item = (usize, &'a [String])>,
) -> Vec<KeyValue> {
    let key_index = plan.key_index();
    rows.into_iter()
        .filter(|(_, row)| plan.bound_filter().is_none_or(|f| f.matches(row)))
        .map(|(origin, row)| {
            let value = match plan.value_spec {
                ValueSpec::One => Value::One,
                ValueSpec::RestOfRow => Value::Row(
                    row.iter()
                        .enumerate()
                        .filter(|(i, _)| *i != key_index)
                        .map(|(_, v)| v.clone())
                        .collect(),
                ),
            };
            KeyValue {
                key: row[key_index].clone(),
                value,
                origin,
            }
        })
        .collect()
}
