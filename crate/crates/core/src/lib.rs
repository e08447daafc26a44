//! Compiles parsed queries into single-round MapReduce plans and runs them
//! over a simulated cluster of racks and datanodes.
//!
//! The pipeline is:
//!
//! 1. [`compiler::compile`] turns a [`genmr_sql::QueryAst`] into a
//!    [`compiler::MapReducePlan`] (key column, map filter, value shape,
//!    reduce operator).
//! 2. [`cluster::partition`] spreads table rows over datanodes, either packed
//!    into one rack or round-robin across racks.
//! 3. [`placement`] pins one mapper to every occupied datanode and places
//!    reducers under one of three strategies.
//! 4. [`executor::execute`] runs map, shuffle and reduce, and charges every
//!    phase against a [`executor::CostModel`] in integer milli-units.

pub mod cluster;
pub mod compiler;
pub mod executor;
pub mod fixture;
pub mod placement;
pub mod report;

pub use cluster::{ClusterTopology, NodeId, PartitionLayout, PartitionMode, RoundingMode};
pub use compiler::{compile, describe_plan, MapReducePlan, ReduceOp, ValueSpec};
pub use executor::{execute, CostModel, ExecOptions};
pub use placement::{PlacementPlan, PlacementStrategy};
pub use report::ExecutionReport;
