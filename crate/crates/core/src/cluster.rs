//! Simulated racks and datanodes, and pre-partitioning of table rows onto them.
//!
//! Rows are placed first-come first-served in ingestion order, in blocks of
//! `capacity` rows per datanode. [`PartitionMode::IntraRack`] packs the blocks
//! onto consecutive nodes of rack 0; [`PartitionMode::InterRack`] deals them
//! out round-robin over the racks (block `b` goes to rack `b mod n`, on that
//! rack's next free node).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use genmr_sql::{Row, TableData};

pub use genmr_sql::{ingest_csv, IngestError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartitionMode {
    #[serde(rename = "intra")]
    IntraRack,
    #[serde(rename = "inter")]
    InterRack,
}

impl PartitionMode {
    pub const ALL: [PartitionMode; 2] = [PartitionMode::IntraRack, PartitionMode::InterRack];

    pub fn name(self) -> &'static str {
        match self {
            PartitionMode::IntraRack => "intra",
            PartitionMode::InterRack => "inter",
        }
    }
}

impl fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartitionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intra" => Ok(PartitionMode::IntraRack),
            "inter" => Ok(PartitionMode::InterRack),
            _ => Err(format!(
                "unknown partition mode '{s}' (expected intra or inter)"
            )),
        }
    }
}

/// How `rows / capacity` is turned into a datanode count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoundingMode {
    /// `ceil(z / q)`: every node holds at most `q` rows.
    #[serde(rename = "ceil")]
    Ceil,
    /// `floor(z / q)` (at least 1 when `z > 0`); the last node also takes the
    /// `z mod q` leftover rows.
    #[serde(rename = "floor-compat")]
    FloorCompat,
}

impl RoundingMode {
    pub fn name(self) -> &'static str {
        match self {
            RoundingMode::Ceil => "ceil",
            RoundingMode::FloorCompat => "floor-compat",
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RoundingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ceil" => Ok(RoundingMode::Ceil),
            "floor-compat" => Ok(RoundingMode::FloorCompat),
            _ => Err(format!(
                "unknown rounding mode '{s}' (expected ceil or floor-compat)"
            )),
        }
    }
}

/// `n` racks of `m` datanodes, each holding `q` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterTopology {
    racks: usize,
    nodes_per_rack: usize,
    capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("{0} must be at least 1")]
    Zero(&'static str),
}

impl ClusterTopology {
    pub fn new(
        racks: usize,
        nodes_per_rack: usize,
        capacity: usize,
    ) -> Result<Self, TopologyError> {
        if racks == 0 {
            return Err(TopologyError::Zero("rack count"));
        }
        if nodes_per_rack == 0 {
            return Err(TopologyError::Zero("nodes per rack"));
        }
        if capacity == 0 {
            return Err(TopologyError::Zero("datanode capacity"));
        }
        Ok(ClusterTopology {
            racks,
            nodes_per_rack,
            capacity,
        })
    }

    pub fn racks(&self) -> usize {
        self.racks
    }

    pub fn nodes_per_rack(&self) -> usize {
        self.nodes_per_rack
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.rack < self.racks && node.node < self.nodes_per_rack
    }

    /// All datanodes in (rack, node) order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.racks)
            .flat_map(move |rack| (0..self.nodes_per_rack).map(move |node| NodeId { rack, node }))
    }
}

/// A datanode address. Orders by rack, then node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub rack: usize,
    pub node: usize,
}

impl NodeId {
    pub fn new(rack: usize, node: usize) -> Self {
        NodeId { rack, node }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rack{}/node{}", self.rack, self.node)
    }
}

pub fn required_datanodes(rows: usize, capacity: usize, rounding: RoundingMode) -> usize {
    assert!(capacity >= 1, "datanode capacity must be at least 1");
    if rows == 0 {
        return 0;
    }
    match rounding {
        RoundingMode::Ceil => rows.div_ceil(capacity),
        RoundingMode::FloorCompat => (rows / capacity).max(1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error(
        "insufficient capacity for {mode} partitioning: {rows} rows need {needed_nodes} datanodes, \
         {available_nodes} available; {missing_rows} rows cannot be placed"
    )]
    InsufficientCapacity {
        mode: PartitionMode,
        rows: usize,
        needed_nodes: usize,
        available_nodes: usize,
        missing_rows: usize,
    },
    #[error("{node} is outside the {racks}x{nodes_per_rack} topology")]
    IndexOutOfRange {
        node: NodeId,
        racks: usize,
        nodes_per_rack: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub row: usize,
    pub rack: usize,
    pub node: usize,
}

/// The row → datanode assignment produced by [`partition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionLayout {
    mode: PartitionMode,
    rounding: RoundingMode,
    topology: ClusterTopology,
    assignment: Vec<Assignment>,
    nodes: BTreeMap<NodeId, Vec<usize>>,
}

impl PartitionLayout {
    pub fn mode(&self) -> PartitionMode {
        self.mode
    }

    pub fn rounding(&self) -> RoundingMode {
        self.rounding
    }

    pub fn topology(&self) -> &ClusterTopology {
        &self.topology
    }

    /// One entry per row, in row order.
    pub fn assignment(&self) -> &[Assignment] {
        &self.assignment
    }

    /// Number of rows placed.
    pub fn rows(&self) -> usize {
        self.assignment.len()
    }

    /// Occupied datanodes in (rack, node) order.
    pub fn occupied_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn occupied_count(&self) -> usize {
        self.nodes.len()
    }

    /// Row indices held by `node`, ascending. Empty for unoccupied nodes.
    pub fn rows_of(&self, node: NodeId) -> &[usize] {
        self.nodes.get(&node).map_or(&[], Vec::as_slice)
    }

    pub fn racks_used(&self) -> usize {
        let mut racks: Vec<usize> = self.nodes.keys().map(|n| n.rack).collect();
        racks.dedup();
        racks.len()
    }

    /// `{"mode": ..., "assignment": [[row, rack, node], ...]}`
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Export {
            mode: PartitionMode,
            assignment: Vec<[usize; 3]>,
        }
        let export = Export {
            mode: self.mode,
            assignment: self
                .assignment
                .iter()
                .map(|a| [a.row, a.rack, a.node])
                .collect(),
        };
        serde_json::to_string(&export).expect("layout serializes")
    }
}

pub fn partition(
    table: &TableData,
    topology: &ClusterTopology,
    mode: PartitionMode,
    rounding: RoundingMode,
) -> Result<PartitionLayout, PartitionError> {
    partition_rows(table.len(), topology, mode, rounding)
}

/// [`partition`] for a row count alone; the layout only depends on `z`.
pub fn partition_rows(
    rows: usize,
    topology: &ClusterTopology,
    mode: PartitionMode,
    rounding: RoundingMode,
) -> Result<PartitionLayout, PartitionError> {
    let q = topology.capacity;
    let needed = required_datanodes(rows, q, rounding);
    let available = match mode {
        PartitionMode::IntraRack => topology.nodes_per_rack,
        PartitionMode::InterRack => topology.racks * topology.nodes_per_rack,
    };
    if needed > available {
        let placeable = match rounding {
            RoundingMode::Ceil => available * q,
            RoundingMode::FloorCompat => available * q + q - 1,
        };
        return Err(PartitionError::InsufficientCapacity {
            mode,
            rows,
            needed_nodes: needed,
            available_nodes: available,
            missing_rows: rows - placeable,
        });
    }

    let mut assignment = Vec::with_capacity(rows);
    let mut nodes = BTreeMap::new();
    for block in 0..needed {
        let start = block * q;
        let end = if block + 1 == needed { rows } else { start + q };
        let node = match mode {
            PartitionMode::IntraRack => NodeId::new(0, block),
            PartitionMode::InterRack => NodeId::new(block % topology.racks, block / topology.racks),
        };
        for row in start..end {
            assignment.push(Assignment {
                row,
                rack: node.rack,
                node: node.node,
            });
        }
        nodes.insert(node, (start..end).collect());
    }

    Ok(PartitionLayout {
        mode,
        rounding,
        topology: *topology,
        assignment,
        nodes,
    })
}

pub fn rows_on_node<'t>(
    layout: &PartitionLayout,
    table: &'t TableData,
    rack: usize,
    node: usize,
) -> Result<Vec<&'t Row>, PartitionError> {
    let id = NodeId::new(rack, node);
    if !layout.topology.contains(id) {
        return Err(PartitionError::IndexOutOfRange {
            node: id,
            racks: layout.topology.racks,
            nodes_per_rack: layout.topology.nodes_per_rack,
        });
    }
    Ok(layout
        .rows_of(id)
        .iter()
        .map(|&i| &table.rows()[i])
        .collect())
}
