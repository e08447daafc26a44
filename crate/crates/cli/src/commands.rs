use std::fs;
use std::io::Write;
use std::path::Path;

use genmr_core::cluster::{partition, ClusterTopology, PartitionError, TopologyError};
use genmr_core::compiler::{classify, CompileError};
use genmr_core::executor::{execute, with_threads, ExecError, ExecOptions, Execution};
use genmr_core::fixture;
use genmr_core::placement::PlacementError;
use genmr_core::report::{ExecutionReport, ReportConfig};
use genmr_core::{
    compile, describe_plan, CostModel, MapReducePlan, PartitionLayout, PartitionMode,
    PlacementPlan, PlacementStrategy,
};
use genmr_sql::{ingest_csv, parse, Dialect, QueryAst, Schema, TableData};

use crate::{
    ClusterArgs, CostArgs, ExplainArgs, Failure, FixtureArgs, OracleArgs, QueryArgs, QuerySource,
    COST_MODEL_ENV,
};

pub(crate) fn query_text(src: &QuerySource) -> Result<String, Failure> {
    match (&src.query, &src.query_file) {
        (Some(q), _) => Ok(q.clone()),
        (None, Some(path)) => fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Failure::new(Failure::IO, format!("cannot read {}: {e}", path.display()))),
        (None, None) => Err(Failure::new(Failure::QUERY, "no query given")),
    }
}

pub(crate) fn parse_query(text: &str, dialect: Dialect) -> Result<QueryAst, Failure> {
    parse(text, dialect).map_err(|e| Failure::new(Failure::QUERY, e))
}

pub(crate) fn load_table(path: &Path) -> Result<TableData, Failure> {
    ingest_csv(path).map_err(|e| Failure::new(Failure::IO, e))
}

pub(crate) fn compile_query(ast: &QueryAst, schema: &Schema) -> Result<MapReducePlan, Failure> {
    compile(ast, schema).map_err(|e: CompileError| Failure::new(Failure::QUERY, e))
}

/// Defaults, then the `GENMR_COST_MODEL` file, then flags.
pub(crate) fn cost_model(flags: &CostArgs) -> Result<CostModel, Failure> {
    let mut cost = match std::env::var_os(COST_MODEL_ENV) {
        Some(path) if !path.is_empty() => {
            let path = Path::new(&path);
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::new(
                    Failure::IO,
                    format!("cannot read cost model {}: {e}", path.display()),
                )
            })?;
            serde_json::from_str(&text).map_err(|e| {
                Failure::new(
                    Failure::IO,
                    format!("invalid cost model {}: {e}", path.display()),
                )
            })?
        }
        _ => CostModel::default(),
    };
    let overrides = [
        (flags.t_map, &mut cost.t_map),
        (flags.t_reduce, &mut cost.t_reduce),
        (flags.t_local, &mut cost.t_local),
        (flags.t_intra, &mut cost.t_intra),
        (flags.t_inter, &mut cost.t_inter),
        (flags.t_start, &mut cost.t_start),
    ];
    for (flag, field) in overrides {
        if let Some(v) = flag {
            *field = v;
        }
    }
    Ok(cost)
}

pub(crate) fn thread_count(cluster: &ClusterArgs) -> usize {
    match cluster.threads {
        Some(n) => n as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

pub(crate) fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let result = match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    };
    result.map_err(|e| Failure::new(Failure::IO, e))
}

fn topology_failure(e: TopologyError) -> Failure {
    Failure::new(Failure::INFEASIBLE, e)
}

fn partition_failure(e: PartitionError) -> Failure {
    Failure::new(Failure::INFEASIBLE, e)
}

fn placement_failure(e: PlacementError) -> Failure {
    Failure::new(Failure::INFEASIBLE, e)
}

fn exec_failure(e: ExecError) -> Failure {
    match e {
        ExecError::Reduce(_) => Failure::new(Failure::QUERY, e),
        _ => Failure::new(Failure::INFEASIBLE, e),
    }
}

/// One fully placed and executed job.
pub(crate) struct Job {
    pub plan: MapReducePlan,
    pub layout: PartitionLayout,
    pub placement: PlacementPlan,
    pub exec: Execution,
}

pub(crate) struct JobSpec<'a> {
    pub plan: &'a MapReducePlan,
    pub table: &'a TableData,
    pub racks: usize,
    pub nodes_per_rack: usize,
    pub capacity: usize,
    pub reducers: usize,
    pub rounding: genmr_core::RoundingMode,
    pub mode: PartitionMode,
    pub strategy: PlacementStrategy,
    pub cost: &'a CostModel,
    pub opts: ExecOptions,
}

pub(crate) fn run_job(spec: &JobSpec<'_>) -> Result<Job, Failure> {
    let topo = ClusterTopology::new(spec.racks, spec.nodes_per_rack, spec.capacity)
        .map_err(topology_failure)?;
    let layout =
        partition(spec.table, &topo, spec.mode, spec.rounding).map_err(partition_failure)?;
    let placement =
        PlacementPlan::build(&layout, spec.strategy, spec.reducers).map_err(placement_failure)?;
    let exec = execute(
        spec.plan, spec.table, &layout, &placement, spec.cost, spec.opts,
    )
    .map_err(exec_failure)?;
    Ok(Job {
        plan: spec.plan.clone(),
        layout,
        placement,
        exec,
    })
}

pub fn explain(args: &ExplainArgs) -> Result<(), Failure> {
    let text = query_text(&args.source)?;
    let ast = parse_query(&text, args.source.dialect)?;
    let schema = match &args.csv {
        Some(path) => load_table(path)?.schema().clone(),
        // Without a table, compile against exactly the columns the query names.
        None => Schema::new(
            ast.table.clone(),
            ast.referenced_columns()
                .into_iter()
                .map(String::from)
                .collect(),
        )
        .map_err(|e| Failure::new(Failure::QUERY, e))?,
    };
    let plan = compile_query(&ast, &schema)?;
    let out = format!("{}\n{}\n", describe_plan(&plan), classify(&ast));
    write_output(None, out.as_bytes())
}

struct Prepared {
    text: String,
    ast: QueryAst,
    table: TableData,
    plan: MapReducePlan,
    cost: CostModel,
}

fn prepare(args: &QueryArgs) -> Result<Prepared, Failure> {
    let text = query_text(&args.source)?;
    let ast = parse_query(&text, args.source.dialect)?;
    let table = load_table(&args.csv)?;
    let plan = compile_query(&ast, table.schema())?;
    let cost = cost_model(&args.cluster.cost)?;
    Ok(Prepared {
        text,
        ast,
        table,
        plan,
        cost,
    })
}

fn run_query_job(args: &QueryArgs, p: &Prepared) -> Result<Job, Failure> {
    let c = &args.cluster;
    let spec = JobSpec {
        plan: &p.plan,
        table: &p.table,
        racks: c.racks as usize,
        nodes_per_rack: c.nodes_per_rack as usize,
        capacity: c.capacity as usize,
        reducers: c.reducers as usize,
        rounding: c.rounding,
        mode: args.mode,
        strategy: args.strategy,
        cost: &p.cost,
        opts: ExecOptions {
            drop_one_shuffle_record: args.inject_drop_record,
        },
    };
    let job = with_threads(thread_count(c), || run_job(&spec))?;
    if let Some(path) = &args.layout_out {
        write_output(Some(path), job.layout.to_json().as_bytes())?;
    }
    if let Some(path) = &args.placement_out {
        write_output(Some(path), job.placement.to_json().as_bytes())?;
    }
    Ok(job)
}

pub fn query(args: &QueryArgs) -> Result<(), Failure> {
    let p = prepare(args)?;
    let job = run_query_job(args, &p)?;
    let c = &args.cluster;
    let config = ReportConfig {
        query: p.text.clone(),
        dialect: args.source.dialect,
        table: p.table.schema().table.clone(),
        rows: p.table.len(),
        racks: c.racks as usize,
        nodes_per_rack: c.nodes_per_rack as usize,
        capacity: c.capacity as usize,
        mode: args.mode,
        strategy: args.strategy,
        rounding: c.rounding,
        reducers: c.reducers as usize,
        cost_model: p.cost,
    };
    let report = ExecutionReport::new(
        config,
        &p.ast,
        &job.plan,
        &job.layout,
        &job.placement,
        job.exec,
    );
    write_output(args.out.as_deref(), report.to_json().as_bytes())
}

pub fn verify(args: &QueryArgs) -> Result<(), Failure> {
    let p = prepare(args)?;
    let job = run_query_job(args, &p)?;
    let expected =
        genmr_oracle::eval(&p.ast, &p.table).map_err(|e| Failure::new(Failure::QUERY, e))?;
    let ordered = expected.kind.ordered();
    let d = genmr_oracle::diff(&expected, &job.exec.rows, ordered);
    let comparison = if ordered { "sequence" } else { "multiset" };
    let mut out = if d.is_match() {
        format!("match: {} rows ({comparison})\n", expected.rows.len())
    } else {
        format!(
            "MISMATCH: expected {} rows, got {} ({comparison})\n",
            expected.rows.len(),
            job.exec.rows.len()
        )
    };
    if !d.is_match() {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    write_output(args.out.as_deref(), out.as_bytes())?;
    if d.is_match() {
        Ok(())
    } else {
        // A lost row is the most useful thing to name, even when an ordered
        // divergence was found first.
        let headline = d
            .mismatches
            .iter()
            .find(|m| matches!(m, genmr_oracle::Mismatch::Missing { .. }))
            .unwrap_or(&d.mismatches[0]);
        Err(Failure::new(
            Failure::MISMATCH,
            format!("result differs from the reference evaluator: {headline}"),
        ))
    }
}

pub fn oracle(args: &OracleArgs) -> Result<(), Failure> {
    let text = query_text(&args.source)?;
    let ast = parse_query(&text, args.source.dialect)?;
    let table = load_table(&args.csv)?;
    let result = genmr_oracle::eval(&ast, &table).map_err(|e| Failure::new(Failure::QUERY, e))?;
    let kind = format!("{:?}", result.kind).to_lowercase();
    let json = serde_json::json!({ "kind": kind, "rows": result.rows });
    let mut s = serde_json::to_string_pretty(&json).expect("oracle result serializes");
    s.push('\n');
    write_output(args.out.as_deref(), s.as_bytes())
}

pub fn fixture(args: &FixtureArgs) -> Result<(), Failure> {
    let mut buf = Vec::new();
    fixture::write_csv(&mut buf, args.seed, args.rows).map_err(|e| Failure::new(Failure::IO, e))?;
    write_output(args.out.as_deref(), &buf)
}
