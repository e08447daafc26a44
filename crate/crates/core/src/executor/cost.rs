use serde::{Deserialize, Serialize};

use crate::placement::PlacementPlan;

use super::shuffle::ShuffleLog;

/// Per-record and per-task charges, all in integer milli-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub t_map: u64,
    pub t_reduce: u64,
    pub t_local: u64,
    pub t_intra: u64,
    pub t_inter: u64,
    pub t_start: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            t_map: 1000,
            t_reduce: 1000,
            t_local: 0,
            t_intra: 500,
            t_inter: 5000,
            t_start: 2000,
        }
    }
}

impl CostModel {
    /// True when moving a record farther never makes it cheaper.
    pub fn is_ordered(&self) -> bool {
        self.t_inter >= self.t_intra && self.t_intra >= self.t_local
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PhaseTimes {
    pub map_time: u64,
    pub shuffle_time: u64,
    pub reduce_time: u64,
    pub makespan: u64,
}

/// Charges one execution against `cost`. Each phase takes as long as its
/// slowest task (or channel), and phases never overlap.
///
/// `reducer_inputs[i]` is the number of records reducer `i` received.
pub fn simulate_time(
    placement: &PlacementPlan,
    log: &ShuffleLog,
    cost: &CostModel,
    reducer_inputs: &[u64],
) -> PhaseTimes {
    let map_time = placement
        .mappers
        .iter()
        .map(|m| cost.t_start + m.rows.len() as u64 * cost.t_map)
        .max()
        .unwrap_or(0);
    let shuffle_time = log
        .transfers
        .iter()
        .map(|t| {
            let per_record = if t.source == t.dest {
                cost.t_local
            } else if t.source.rack == t.dest.rack {
                cost.t_intra
            } else {
                cost.t_inter
            };
            t.records * per_record
        })
        .max()
        .unwrap_or(0);
    let reduce_time = reducer_inputs
        .iter()
        .map(|n| cost.t_start + n * cost.t_reduce)
        .max()
        .unwrap_or(0);
    PhaseTimes {
        map_time,
        shuffle_time,
        reduce_time,
        makespan: map_time + shuffle_time + reduce_time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let c: CostModel = serde_json::from_str(r#"{"t_inter": 9000}"#).unwrap();
        assert_eq!(c.t_inter, 9000);
        assert_eq!(c.t_start, 2000);
        assert!(c.is_ordered());
        assert!(serde_json::from_str::<CostModel>(r#"{"t_bogus": 1}"#).is_err());
    }

    #[test]
    fn ordering_check() {
        let c = CostModel {
            t_intra: 6000,
            ..CostModel::default()
        };
        assert!(!c.is_ordered());
    }
}
