use std::collections::BTreeMap;

use serde::Serialize;

use crate::cluster::NodeId;
use crate::placement::PlacementPlan;

use super::map::KeyValue;

const FNV_OFFSET_BASIS: u64 = 14695981039346656037;
const FNV_PRIME: u64 = 1099511628211;

/// 64-bit FNV-1a over the key's UTF-8 bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET_BASIS, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME)
    })
}

/// Reducer index for `key`: `fnv1a64(key) mod r_count`.
pub fn assign_reducer(key: &str, r_count: usize) -> usize {
    assert!(r_count >= 1, "reducer count must be at least 1");
    (fnv1a64(key.as_bytes()) % r_count as u64) as usize
}

/// Records moved from one datanode to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub source: NodeId,
    pub dest: NodeId,
    pub records: u64,
}

/// Every (source node → destination node) channel used by a shuffle, in
/// (source, destination) order. Counts are always positive.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ShuffleLog {
    pub transfers: Vec<Transfer>,
}

impl ShuffleLog {
    pub fn total(&self) -> u64 {
        self.transfers.iter().map(|t| t.records).sum()
    }
}

/// One reducer's input: values grouped by key, keys ascending, values in
/// (mapper task id, emission order).
pub type ReducerInput = BTreeMap<String, Vec<KeyValue>>;

/// Routes every mapper emission to its reducer. `emissions[i]` must belong to
/// `placement.mappers[i]`.
pub fn shuffle(
    emissions: &[Vec<KeyValue>],
    placement: &PlacementPlan,
) -> (Vec<ReducerInput>, ShuffleLog) {
    let r_count = placement.reducers.len();
    let mut groups: Vec<ReducerInput> = vec![BTreeMap::new(); r_count];
    let mut channels: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();

    for (mapper, emitted) in placement.mappers.iter().zip(emissions) {
        for kv in emitted {
            let r = assign_reducer(&kv.key, r_count);
            *channels
                .entry((mapper.node_id(), placement.reducers[r].node_id()))
                .or_default() += 1;
            groups[r]
                .entry(kv.key.clone())
                .or_default()
                .push(kv.clone());
        }
    }

    let log = ShuffleLog {
        transfers: channels
            .into_iter()
            .map(|((source, dest), records)| Transfer {
                source,
                dest,
                records,
            })
            .collect(),
    };
    (groups, log)
}
