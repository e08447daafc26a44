//! Mapper and reducer placement.
//!
//! Mappers always run where their data lives: one mapper per occupied
//! datanode, owning exactly that node's rows. Reducers are placed under one of
//! three strategies:
//!
//! * [`PlacementStrategy::Colocated`]: on a mapper's datanode.
//! * [`PlacementStrategy::IntraRackReducer`]: on a different datanode of a
//!   rack that holds mapper data.
//! * [`PlacementStrategy::InterRackReducer`]: on a rack holding no mapper data.
//!
//! Ties go to the lowest (rack, node). With more reducers than eligible nodes
//! the eligible list is reused round-robin.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterTopology, NodeId, PartitionLayout};
use crate::executor::ShuffleLog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlacementStrategy {
    #[serde(rename = "colocated")]
    Colocated,
    #[serde(rename = "intra-reducer")]
    IntraRackReducer,
    #[serde(rename = "inter-reducer")]
    InterRackReducer,
}

impl PlacementStrategy {
    pub const ALL: [PlacementStrategy; 3] = [
        PlacementStrategy::Colocated,
        PlacementStrategy::IntraRackReducer,
        PlacementStrategy::InterRackReducer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlacementStrategy::Colocated => "colocated",
            PlacementStrategy::IntraRackReducer => "intra-reducer",
            PlacementStrategy::InterRackReducer => "inter-reducer",
        }
    }
}

impl fmt::Display for PlacementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlacementStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlacementStrategy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown strategy '{s}' (expected colocated, intra-reducer or inter-reducer)"
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapperTask {
    #[serde(rename = "id")]
    pub task_id: usize,
    pub rack: usize,
    pub node: usize,
    /// Row indices this mapper scans, ascending.
    pub rows: Vec<usize>,
}

impl MapperTask {
    pub fn node_id(&self) -> NodeId {
        NodeId::new(self.rack, self.node)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducerTask {
    #[serde(rename = "id")]
    pub task_id: usize,
    pub rack: usize,
    pub node: usize,
}

impl ReducerTask {
    pub fn node_id(&self) -> NodeId {
        NodeId::new(self.rack, self.node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapperPlacement {
    pub tasks: Vec<MapperTask>,
    /// Set when the layout holds no rows, so no mapper was created.
    pub empty_layout: bool,
}

pub fn place_mappers(layout: &PartitionLayout) -> MapperPlacement {
    let tasks: Vec<MapperTask> = layout
        .occupied_nodes()
        .enumerate()
        .map(|(task_id, n)| MapperTask {
            task_id,
            rack: n.rack,
            node: n.node,
            rows: layout.rows_of(n).to_vec(),
        })
        .collect();
    MapperPlacement {
        empty_layout: tasks.is_empty(),
        tasks,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlacementError {
    #[error("strategy {strategy} is infeasible: {reason}")]
    StrategyInfeasible {
        strategy: PlacementStrategy,
        reason: String,
    },
    #[error("reducer count must be at least 1")]
    NoReducers,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducerPlacement {
    pub tasks: Vec<ReducerTask>,
    /// Explains how the strategy was relaxed when its preferred nodes do not
    /// exist (for example every rack already holds mapper data).
    pub relaxed: Option<String>,
}

pub fn place_reducers(
    strategy: PlacementStrategy,
    topology: &ClusterTopology,
    mappers: &[MapperTask],
    r_count: usize,
) -> Result<ReducerPlacement, PlacementError> {
    if r_count == 0 {
        return Err(PlacementError::NoReducers);
    }
    let mapper_nodes: BTreeSet<NodeId> = mappers.iter().map(MapperTask::node_id).collect();
    let mut mapper_racks: BTreeSet<usize> = mapper_nodes.iter().map(|n| n.rack).collect();
    let infeasible = |reason: &str| PlacementError::StrategyInfeasible {
        strategy,
        reason: reason.to_string(),
    };
    let mut relaxed = None;

    let candidates: Vec<NodeId> = match strategy {
        PlacementStrategy::Colocated => {
            if mapper_nodes.is_empty() {
                vec![NodeId::new(0, 0)]
            } else {
                mapper_nodes.iter().copied().collect()
            }
        }
        PlacementStrategy::IntraRackReducer => {
            if topology.nodes_per_rack() < 2 {
                return Err(infeasible(
                    "racks have a single datanode, so no second node exists on a mapper rack",
                ));
            }
            if mapper_racks.is_empty() {
                mapper_racks.insert(0);
            }
            let free: Vec<NodeId> = topology
                .nodes()
                .filter(|n| mapper_racks.contains(&n.rack) && !mapper_nodes.contains(n))
                .collect();
            if free.is_empty() {
                relaxed = Some(
                    "every datanode on the mapper racks runs a mapper; reducers share mapper nodes"
                        .to_string(),
                );
                mapper_nodes.iter().copied().collect()
            } else {
                free
            }
        }
        PlacementStrategy::InterRackReducer => {
            if topology.racks() < 2 {
                return Err(infeasible(
                    "the topology has a single rack, so no foreign rack exists",
                ));
            }
            let foreign: Vec<NodeId> = topology
                .nodes()
                .filter(|n| !mapper_racks.contains(&n.rack))
                .collect();
            if foreign.is_empty() {
                let rack = lightest_rack(topology, mappers);
                relaxed = Some(format!(
                    "every rack holds mapper data; reducers placed on rack {rack}, which holds the least data"
                ));
                let on_rack: Vec<NodeId> = topology.nodes().filter(|n| n.rack == rack).collect();
                let free: Vec<NodeId> = on_rack
                    .iter()
                    .copied()
                    .filter(|n| !mapper_nodes.contains(n))
                    .collect();
                if free.is_empty() {
                    on_rack
                } else {
                    free
                }
            } else {
                foreign
            }
        }
    };

    let tasks = (0..r_count)
        .map(|task_id| {
            let n = candidates[task_id % candidates.len()];
            ReducerTask {
                task_id,
                rack: n.rack,
                node: n.node,
            }
        })
        .collect();
    Ok(ReducerPlacement { tasks, relaxed })
}

/// Rack whose mappers own the fewest rows; lowest index on ties.
fn lightest_rack(topology: &ClusterTopology, mappers: &[MapperTask]) -> usize {
    let mut rows = vec![0usize; topology.racks()];
    for m in mappers {
        rows[m.rack] += m.rows.len();
    }
    (0..topology.racks())
        .min_by_key(|&r| (rows[r], r))
        .unwrap_or(0)
}

/// Mappers and reducers for one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementPlan {
    pub strategy: PlacementStrategy,
    pub mappers: Vec<MapperTask>,
    pub reducers: Vec<ReducerTask>,
    pub empty_layout: bool,
    pub relaxed: Option<String>,
}

impl PlacementPlan {
    pub fn build(
        layout: &PartitionLayout,
        strategy: PlacementStrategy,
        r_count: usize,
    ) -> Result<Self, PlacementError> {
        let mappers = place_mappers(layout);
        let reducers = place_reducers(strategy, layout.topology(), &mappers.tasks, r_count)?;
        Ok(PlacementPlan {
            strategy,
            mappers: mappers.tasks,
            reducers: reducers.tasks,
            empty_layout: mappers.empty_layout,
            relaxed: reducers.relaxed,
        })
    }

    /// `{"mappers": [{id, rack, node, rows}], "reducers": [{id, rack, node}]}`
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            mappers: &'a [MapperTask],
            reducers: &'a [ReducerTask],
        }
        serde_json::to_string(&Export {
            mappers: &self.mappers,
            reducers: &self.reducers,
        })
        .expect("placement serializes")
    }
}

/// Per-rack traffic product `m_i * d_i * r_i`.
pub fn eq1_cost(mappers: u64, datanodes: u64, reducers: u64) -> u64 {
    mappers * datanodes * reducers
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RackCost {
    pub rack: usize,
    pub mappers: u64,
    /// Occupied datanodes on the rack.
    pub datanodes: u64,
    pub reducers: u64,
    pub cost: u64,
}

/// Evaluates [`eq1_cost`] for every rack, with `d_i` taken as the number of
/// datanodes on rack `i` that hold data.
pub fn rack_costs(plan: &PlacementPlan, layout: &PartitionLayout) -> Vec<RackCost> {
    (0..layout.topology().racks())
        .map(|rack| {
            let mappers = plan.mappers.iter().filter(|m| m.rack == rack).count() as u64;
            let datanodes = layout.occupied_nodes().filter(|n| n.rack == rack).count() as u64;
            let reducers = plan.reducers.iter().filter(|r| r.rack == rack).count() as u64;
            RackCost {
                rack,
                mappers,
                datanodes,
                reducers,
                cost: eq1_cost(mappers, datanodes, reducers),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RackTraffic {
    pub rack: usize,
    pub records_out: u64,
    pub records_in: u64,
}

/// Records leaving and entering each rack during the shuffle.
pub fn rack_traffic(log: &ShuffleLog, topology: &ClusterTopology) -> Vec<RackTraffic> {
    let mut traffic: Vec<RackTraffic> = (0..topology.racks())
        .map(|rack| RackTraffic {
            rack,
            ..Default::default()
        })
        .collect();
    for t in &log.transfers {
        if t.source.rack != t.dest.rack {
            traffic[t.source.rack].records_out += t.records;
            traffic[t.dest.rack].records_in += t.records;
        }
    }
    traffic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{partition_rows, PartitionMode, RoundingMode};
    use crate::executor::Transfer;

    fn topo(n: usize, m: usize, q: usize) -> ClusterTopology {
        ClusterTopology::new(n, m, q).unwrap()
    }

    fn mapper(task_id: usize, rack: usize, node: usize) -> MapperTask {
        MapperTask {
            task_id,
            rack,
            node,
            rows: vec![task_id],
        }
    }

    #[test]
    fn table6_mapper_count() {
        let l = partition_rows(
            325,
            &topo(3, 12, 10),
            PartitionMode::InterRack,
            RoundingMode::FloorCompat,
        )
        .unwrap();
        let m = place_mappers(&l);
        assert_eq!(m.tasks.len(), 32);
        assert!(!m.empty_layout);
        for t in &m.tasks {
            assert_eq!(t.rows, l.rows_of(t.node_id()));
        }
        assert!(m.tasks.windows(2).all(|w| w[0].node_id() < w[1].node_id()));
    }

    #[test]
    fn single_node_and_empty() {
        let l = partition_rows(
            7,
            &topo(1, 3, 10),
            PartitionMode::IntraRack,
            RoundingMode::Ceil,
        )
        .unwrap();
        let m = place_mappers(&l);
        assert_eq!(m.tasks.len(), 1);
        assert_eq!(m.tasks[0].rows, (0..7).collect::<Vec<_>>());
        let l = partition_rows(
            0,
            &topo(1, 3, 10),
            PartitionMode::IntraRack,
            RoundingMode::Ceil,
        )
        .unwrap();
        let m = place_mappers(&l);
        assert!(m.tasks.is_empty() && m.empty_layout);
    }

    #[test]
    fn colocated_lowest_mapper_node() {
        let mappers = [mapper(0, 0, 0), mapper(1, 0, 1), mapper(2, 0, 2)];
        let r = place_reducers(PlacementStrategy::Colocated, &topo(1, 3, 10), &mappers, 1).unwrap();
        assert_eq!(
            r.tasks,
            [ReducerTask {
                task_id: 0,
                rack: 0,
                node: 0
            }]
        );
        assert!(r.relaxed.is_none());
    }

    #[test]
    fn inter_reducer_picks_mapper_free_rack() {
        let mappers = [mapper(0, 0, 0), mapper(1, 1, 0)];
        let r = place_reducers(
            PlacementStrategy::InterRackReducer,
            &topo(3, 2, 10),
            &mappers,
            1,
        )
        .unwrap();
        assert_eq!(
            r.tasks,
            [ReducerTask {
                task_id: 0,
                rack: 2,
                node: 0
            }]
        );
    }

    #[test]
    fn inter_reducer_on_one_rack_is_infeasible() {
        let mappers = [mapper(0, 0, 0)];
        let err = place_reducers(
            PlacementStrategy::InterRackReducer,
            &topo(1, 4, 10),
            &mappers,
            1,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            PlacementError::StrategyInfeasible {
                strategy: PlacementStrategy::InterRackReducer,
                ..
            }
        ));
        assert!(
            place_reducers(PlacementStrategy::InterRackReducer, &topo(1, 4, 10), &[], 1).is_err()
        );
    }

    #[test]
    fn intra_reducer_uses_free_node_on_mapper_rack() {
        let mappers = [mapper(0, 1, 0), mapper(1, 1, 1)];
        let r = place_reducers(
            PlacementStrategy::IntraRackReducer,
            &topo(2, 3, 10),
            &mappers,
            2,
        )
        .unwrap();
        assert_eq!(
            r.tasks,
            [
                ReducerTask {
                    task_id: 0,
                    rack: 1,
                    node: 2
                },
                ReducerTask {
                    task_id: 1,
                    rack: 1,
                    node: 2
                }
            ]
        );
        assert!(place_reducers(
            PlacementStrategy::IntraRackReducer,
            &topo(2, 1, 10),
            &mappers[..1],
            1
        )
        .is_err());
    }

    #[test]
    fn relaxed_placements_are_reported() {
        let mappers = [mapper(0, 0, 0), mapper(1, 0, 1)];
        let r = place_reducers(
            PlacementStrategy::IntraRackReducer,
            &topo(1, 2, 10),
            &mappers,
            1,
        )
        .unwrap();
        assert!(r.relaxed.is_some());
        let mut mappers = vec![mapper(0, 0, 0), mapper(1, 1, 0), mapper(2, 0, 1)];
        mappers[2].rows = vec![2, 3];
        let r = place_reducers(
            PlacementStrategy::InterRackReducer,
            &topo(2, 2, 10),
            &mappers,
            1,
        )
        .unwrap();
        assert_eq!(r.tasks[0].node_id(), NodeId::new(1, 1));
        assert!(r.relaxed.unwrap().contains("rack 1"));
    }

    #[test]
    fn round_robin_beyond_candidates() {
        let mappers = [mapper(0, 0, 0), mapper(1, 0, 1)];
        let r = place_reducers(PlacementStrategy::Colocated, &topo(1, 2, 10), &mappers, 3).unwrap();
        let nodes: Vec<_> = r.tasks.iter().map(|t| t.node).collect();
        assert_eq!(nodes, [0, 1, 0]);
        assert_eq!(
            place_reducers(PlacementStrategy::Colocated, &topo(1, 2, 10), &mappers, 0),
            Err(PlacementError::NoReducers)
        );
    }

    #[test]
    fn eq1_products() {
        assert_eq!(eq1_cost(2, 3, 4), 24);
        assert_eq!(eq1_cost(7, 9, 0), 0);
        assert_eq!(eq1_cost(1, 1, 1), 1);
    }

    #[test]
    fn traffic_counts_only_cross_rack() {
        let t = topo(2, 2, 10);
        let log = ShuffleLog {
            transfers: vec![Transfer {
                source: NodeId::new(0, 0),
                dest: NodeId::new(1, 0),
                records: 5,
            }],
        };
        let tr = rack_traffic(&log, &t);
        assert_eq!(
            tr[0],
            RackTraffic {
                rack: 0,
                records_out: 5,
                records_in: 0
            }
        );
        assert_eq!(
            tr[1],
            RackTraffic {
                rack: 1,
                records_out: 0,
                records_in: 5
            }
        );

        let local = ShuffleLog {
            transfers: vec![Transfer {
                source: NodeId::new(0, 0),
                dest: NodeId::new(0, 0),
                records: 5,
            }],
        };
        assert!(rack_traffic(&local, &t)
            .iter()
            .all(|r| r.records_in == 0 && r.records_out == 0));
    }

    #[test]
    fn placement_json_shape() {
        let l = partition_rows(
            3,
            &topo(2, 1, 2),
            PartitionMode::InterRack,
            RoundingMode::Ceil,
        )
        .unwrap();
        let p = PlacementPlan::build(&l, PlacementStrategy::Colocated, 1).unwrap();
        assert_eq!(
            p.to_json(),
            r#"{"mappers":[{"id":0,"rack":0,"node":0,"rows":[0,1]},{"id":1,"rack":1,"node":0,"rows":[2]}],"reducers":[{"id":0,"rack":0,"node":0}]}"#
        );
    }
}
