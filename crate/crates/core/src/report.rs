//! The JSON report of one job. Field order is part of the format.

use std::collections::BTreeMap;

use serde::Serialize;

use genmr_sql::{Dialect, QueryAst, Row};

use crate::cluster::{PartitionLayout, PartitionMode, RoundingMode};
use crate::compiler::{classify, describe_plan, MapReducePlan, QueryForm};
use crate::executor::{CostModel, Execution};
use crate::placement::{
    rack_costs, rack_traffic, PlacementPlan, PlacementStrategy, RackCost, RackTraffic,
};

/// Bumped whenever a field is added, removed or changes meaning.
pub const REPORT_VERSION: u32 = 1;

/// What the phase timings cover.
pub const TIME_MODEL: &str =
    "simulated milli-units: map + shuffle + reduce under strict barriers, \
     each phase as long as its slowest task or channel, with a fixed startup charge per task; \
     parsing, planning and I/O are not charged";

/// The run configuration echoed back. Worker thread count is deliberately
/// absent so reports compare byte-for-byte across thread counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportConfig {
    pub query: String,
    pub dialect: Dialect,
    pub table: String,
    pub rows: usize,
    pub racks: usize,
    pub nodes_per_rack: usize,
    pub capacity: usize,
    pub mode: PartitionMode,
    pub strategy: PlacementStrategy,
    pub rounding: RoundingMode,
    pub reducers: usize,
    pub cost_model: CostModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionReport {
    pub version: u32,
    pub config: ReportConfig,
    pub plan: String,
    pub query_form: QueryForm,
    pub result_rows: Vec<Row>,
    /// Per-key counts behind a COUNT total.
    pub count_by_key: Option<BTreeMap<String, u64>>,
    pub distinct_count: Option<u64>,
    pub mapper_count: usize,
    pub reducer_count: usize,
    pub map_time: u64,
    pub shuffle_time: u64,
    pub reduce_time: u64,
    pub makespan: u64,
    pub time_model: &'static str,
    pub emitted_records: u64,
    pub cross_rack_records: u64,
    pub rack_traffic: Vec<RackTraffic>,
    pub eq1_costs: Vec<RackCost>,
    pub eq1_total: u64,
    pub notes: Vec<String>,
}

impl ExecutionReport {
    pub fn new(
        config: ReportConfig,
        ast: &QueryAst,
        plan: &MapReducePlan,
        layout: &PartitionLayout,
        placement: &PlacementPlan,
        exec: Execution,
    ) -> Self {
        let eq1_costs = rack_costs(placement, layout);
        let mut notes = Vec::new();
        if placement.empty_layout {
            notes.push("table is empty: no mappers were started".to_string());
        }
        if let Some(r) = &placement.relaxed {
            notes.push(format!("reducer placement relaxed: {r}"));
        }
        let form = classify(ast);
        if form.extension {
            notes.push(format!("query is outside the catalogued forms: {form}"));
        }
        if !config.cost_model.is_ordered() {
            notes.push(
                "cost model is not ordered (expected t_inter >= t_intra >= t_local)".to_string(),
            );
        }
        ExecutionReport {
            version: REPORT_VERSION,
            plan: describe_plan(plan),
            query_form: form,
            count_by_key: exec.count_by_key.clone().map(|c| c.into_iter().collect()),
            distinct_count: exec.distinct_count,
            mapper_count: placement.mappers.len(),
            reducer_count: placement.reducers.len(),
            map_time: exec.times.map_time,
            shuffle_time: exec.times.shuffle_time,
            reduce_time: exec.times.reduce_time,
            makespan: exec.times.makespan,
            time_model: TIME_MODEL,
            emitted_records: exec.emitted_total(),
            cross_rack_records: exec.cross_rack_records(),
            rack_traffic: rack_traffic(&exec.log, layout.topology()),
            eq1_total: eq1_costs.iter().map(|c| c.cost).sum(),
            eq1_costs,
            notes,
            result_rows: exec.rows,
            config,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
