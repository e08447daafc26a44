//! Map, shuffle and reduce over a placed layout, plus simulated timing.
//!
//! Mappers run concurrently on the current rayon pool, the shuffle is a
//! single-threaded barrier, and reducers run concurrently again. Nothing in
//! the output depends on how many worker threads did the work.

mod cost;
mod map;
mod reduce;
mod shuffle;

use rayon::prelude::*;

use genmr_sql::{Row, TableData};

use crate::cluster::PartitionLayout;
use crate::compiler::MapReducePlan;
use crate::placement::PlacementPlan;

pub use cost::{simulate_time, CostModel, PhaseTimes};
pub use map::{run_map, KeyValue, Value};
pub use reduce::{ascii_upper, run_reduce, substring, ReduceError, ReduceOutput};
pub use shuffle::{assign_reducer, fnv1a64, shuffle, ReducerInput, ShuffleLog, Transfer};

/// Test-only fault injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExecOptions {
    /// Loses the first emitted record before the shuffle, as if the network
    /// dropped it. Used to check that verification catches wrong results.
    pub drop_one_shuffle_record: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(
        "record conservation violated: emitted {emitted}, shuffled {shuffled}, reduced {reduced}"
    )]
    Conservation {
        emitted: u64,
        shuffled: u64,
        reduced: u64,
    },
}

/// Everything one job produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub rows: Vec<Row>,
    pub distinct_count: Option<u64>,
    pub count_by_key: Option<Vec<(String, u64)>>,
    pub log: ShuffleLog,
    pub times: PhaseTimes,
    /// Records emitted by each mapper, by task id.
    pub emitted: Vec<u64>,
    /// Records received by each reducer, by task id.
    pub reducer_inputs: Vec<u64>,
}

impl Execution {
    pub fn emitted_total(&self) -> u64 {
        self.emitted.iter().sum()
    }

    /// Records whose shuffle channel crosses racks.
    pub fn cross_rack_records(&self) -> u64 {
        self.log
            .transfers
            .iter()
            .filter(|t| t.source.rack != t.dest.rack)
            .map(|t| t.records)
            .sum()
    }
}

fn check_consistent(
    plan: &MapReducePlan,
    table: &TableData,
    layout: &PartitionLayout,
    placement: &PlacementPlan,
) -> Result<(), ExecError> {
    if plan.width() != table.schema().width() {
        return Err(ExecError::Inconsistent(format!(
            "plan expects {} columns, table has {}",
            plan.width(),
            table.schema().width()
        )));
    }
    if layout.rows() != table.len() {
        return Err(ExecError::Inconsistent(format!(
            "layout places {} rows, table has {}",
            layout.rows(),
            table.len()
        )));
    }
    let placed: Vec<_> = placement.mappers.iter().map(|m| m.node_id()).collect();
    let occupied: Vec<_> = layout.occupied_nodes().collect();
    if placed != occupied {
        return Err(ExecError::Inconsistent(
            "mapper placement does not match the layout's occupied datanodes".into(),
        ));
    }
    if placement.reducers.is_empty() {
        return Err(ExecError::Inconsistent("no reducers placed".into()));
    }
    Ok(())
}

pub fn execute(
    plan: &MapReducePlan,
    table: &TableData,
    layout: &PartitionLayout,
    placement: &PlacementPlan,
    cost: &CostModel,
    opts: ExecOptions,
) -> Result<Execution, ExecError> {
    check_consistent(plan, table, layout, placement)?;
    let rows = table.rows();

    let mut emissions: Vec<Vec<KeyValue>> = placement
        .mappers
        .par_iter()
        .map(|m| run_map(plan, m.rows.iter().map(|&i| (i, rows[i].as_slice()))))
        .collect();
    if opts.drop_one_shuffle_record {
        if let Some(e) = emissions.iter_mut().find(|e| !e.is_empty()) {
            e.remove(0);
        }
    }
    let emitted: Vec<u64> = emissions.iter().map(|e| e.len() as u64).collect();

    let (groups, log) = shuffle(&emissions, placement);
    let reducer_inputs: Vec<u64> = groups
        .iter()
        .map(|g| g.values().map(|v| v.len() as u64).sum())
        .collect();

    let (e, s, r) = (
        emitted.iter().sum(),
        log.total(),
        reducer_inputs.iter().sum(),
    );
    if e != s || s != r {
        return Err(ExecError::Conservation {
            emitted: e,
            shuffled: s,
            reduced: r,
        });
    }

    let out = run_reduce(plan, &groups)?;
    let times = simulate_time(placement, &log, cost, &reducer_inputs);
    Ok(Execution {
        rows: out.rows,
        distinct_count: out.distinct_count,
        count_by_key: out.count_by_key,
        log,
        times,
        emitted,
        reducer_inputs,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool builds")
        .install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{partition, ClusterTopology, PartitionMode, RoundingMode};
    use crate::compiler::compile;
    use crate::placement::PlacementStrategy;
    use genmr_sql::{parse, Dialect, Schema};

    fn table(z: usize) -> TableData {
        let schema = Schema::new("t", vec!["State".into(), "Kind".into()]).unwrap();
        let rows = (0..z)
            .map(|i| vec![["AP", "KL", "TN"][i % 3].to_string(), format!("k{i}")])
            .collect();
        TableData::new(schema, rows).unwrap()
    }

    fn run(q: &str, z: usize, strategy: PlacementStrategy, opts: ExecOptions) -> Execution {
        let t = table(z);
        let topo = ClusterTopology::new(3, 4, 2).unwrap();
        let layout = partition(&t, &topo, PartitionMode::InterRack, RoundingMode::Ceil).unwrap();
        let placement = PlacementPlan::build(&layout, strategy, 2).unwrap();
        let plan = compile(&parse(q, Dialect::Sql).unwrap(), t.schema()).unwrap();
        execute(&plan, &t, &layout, &placement, &CostModel::default(), opts).unwrap()
    }

    #[test]
    fn count_with_filter() {
        let ex = run(
            "SELECT COUNT(State) FROM t WHERE State='AP'",
            9,
            PlacementStrategy::Colocated,
            ExecOptions::default(),
        );
        assert_eq!(ex.rows, [["3"]]);
        assert_eq!(ex.emitted_total(), 3);
        assert_eq!(ex.log.total(), 3);
    }

    #[test]
    fn empty_table_costs_one_reducer_start() {
        let ex = run(
            "SELECT * FROM t",
            0,
            PlacementStrategy::Colocated,
            ExecOptions::default(),
        );
        assert!(ex.rows.is_empty());
        assert_eq!(ex.times.map_time, 0);
        assert_eq!(ex.times.shuffle_time, 0);
        assert_eq!(ex.times.makespan, CostModel::default().t_start);
    }

    #[test]
    fn dropped_record_changes_result() {
        let ex = run(
            "SELECT COUNT(State) FROM t",
            9,
            PlacementStrategy::InterRackReducer,
            ExecOptions {
                drop_one_shuffle_record: true,
            },
        );
        assert_eq!(ex.rows, [["8"]]);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let q = "SELECT * FROM t ORDER BY State DESC";
        let one = with_threads(1, || {
            run(
                q,
                23,
                PlacementStrategy::IntraRackReducer,
                ExecOptions::default(),
            )
        });
        let many = with_threads(8, || {
            run(
                q,
                23,
                PlacementStrategy::IntraRackReducer,
                ExecOptions::default(),
            )
        });
        assert_eq!(one, many);
    }

    #[test]
    fn mismatched_layout_is_rejected() {
        let t = table(5);
        let topo = ClusterTopology::new(1, 4, 2).unwrap();
        let layout = partition(
            &table(6),
            &topo,
            PartitionMode::IntraRack,
            RoundingMode::Ceil,
        )
        .unwrap();
        let placement = PlacementPlan::build(&layout, PlacementStrategy::Colocated, 1).unwrap();
        let plan = compile(&parse("SELECT * FROM t", Dialect::Sql).unwrap(), t.schema()).unwrap();
        let err = execute(
            &plan,
            &t,
            &layout,
            &placement,
            &CostModel::default(),
            ExecOptions::default(),
        );
        assert!(matches!(err, Err(ExecError::Inconsistent(_))));
    }
}
