use std::fmt::Write as _;
use std::fs;

use genmr_core::cluster::required_datanodes;
use genmr_core::executor::{with_threads, ExecOptions};
use genmr_core::{MapReducePlan, PartitionMode};
use genmr_sql::Dialect;

use crate::commands::{
    compile_query, cost_model, load_table, parse_query, run_job, thread_count, write_output,
    JobSpec,
};
use crate::{BenchArgs, Failure};

pub const BENCH_HEADER: &str =
    "query_id,capacity,mappers,mode,strategy,map_time,shuffle_time,reduce_time,makespan,cross_rack_records,eq1_total";

/// One line of a queries file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchQuery {
    /// 1-based position among the file's queries.
    pub id: usize,
    /// 1-based line number in the file.
    pub line: usize,
    pub dialect: Dialect,
    pub text: String,
}

/// Splits a queries file into queries. Blank lines and lines starting with
/// `#` are skipped; a leading `sql:`, `mysql:`, `oracle:` or `db2:` selects
/// the dialect for that line.
pub fn parse_queries_file(contents: &str, default: Dialect) -> Vec<BenchQuery> {
    let mut out = Vec::new();
    for (i, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (dialect, text) = match line.split_once(':') {
            Some((prefix, rest)) => match prefix.trim().to_ascii_lowercase().parse::<Dialect>() {
                Ok(d) => (d, rest.trim()),
                Err(_) => (default, line),
            },
            None => (default, line),
        };
        out.push(BenchQuery {
            id: out.len() + 1,
            line: i + 1,
            dialect,
            text: text.to_string(),
        });
    }
    out
}

pub fn bench(args: &BenchArgs) -> Result<(), Failure> {
    let contents = fs::read_to_string(&args.queries).map_err(|e| {
        Failure::new(
            Failure::IO,
            format!("cannot read {}: {e}", args.queries.display()),
        )
    })?;
    let queries = parse_queries_file(&contents, Dialect::Sql);
    if queries.is_empty() {
        return Err(Failure::new(
            Failure::QUERY,
            format!("{} holds no queries", args.queries.display()),
        ));
    }
    let table = load_table(&args.csv)?;
    let cost = cost_model(&args.cluster.cost)?;

    let mut plans: Vec<(usize, MapReducePlan)> = Vec::new();
    for q in &queries {
        let located = |f: Failure| {
            Failure::new(
                f.code,
                format!("{} line {}: {}", args.queries.display(), q.line, f.message),
            )
        };
        let ast = parse_query(&q.text, q.dialect).map_err(located)?;
        plans.push((q.id, compile_query(&ast, table.schema()).map_err(located)?));
    }

    let mut capacities = args.capacities.clone();
    capacities.sort_unstable();
    capacities.dedup();
    let mut strategies = args.strategies.clone();
    strategies.sort_unstable();
    strategies.dedup();

    let c = &args.cluster;
    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    let mut warnings = Vec::new();
    with_threads(thread_count(c), || {
        for (id, plan) in &plans {
            for &capacity in &capacities {
                for mode in PartitionMode::ALL {
                    for &strategy in &strategies {
                        let spec = JobSpec {
                            plan,
                            table: &table,
                            racks: c.racks as usize,
                            nodes_per_rack: c.nodes_per_rack as usize,
                            capacity: capacity as usize,
                            reducers: c.reducers as usize,
                            rounding: c.rounding,
                            mode,
                            strategy,
                            cost: &cost,
                            opts: ExecOptions::default(),
                        };
                        let _ = write!(csv, "{id},{capacity},");
                        match run_job(&spec) {
                            Ok(job) => {
                                let t = job.exec.times;
                                let eq1: u64 =
                                    genmr_core::placement::rack_costs(&job.placement, &job.layout)
                                        .iter()
                                        .map(|r| r.cost)
                                        .sum();
                                let _ = writeln!(
                                    csv,
                                    "{},{mode},{strategy},{},{},{},{},{},{eq1}",
                                    job.placement.mappers.len(),
                                    t.map_time,
                                    t.shuffle_time,
                                    t.reduce_time,
                                    t.makespan,
                                    job.exec.cross_rack_records(),
                                );
                            }
                            Err(f) if f.code == Failure::INFEASIBLE => {
                                let mappers =
                                    required_datanodes(table.len(), capacity as usize, c.rounding);
                                let _ = writeln!(csv, "{mappers},{mode},{strategy},,,,,,");
                                warnings.push(format!(
                                    "query {id}, capacity {capacity}, {mode}, {strategy}: {}",
                                    f.message
                                ));
                            }
                            Err(f) => return Err(f),
                        }
                    }
                }
            }
        }
        Ok(())
    })?;
    for w in &warnings {
        eprintln!("warning: skipped {w}");
    }
    write_output(args.out.as_deref(), csv.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_prefixes_and_ids() {
        let text = "# header\n\nSELECT COUNT(State) FROM t\noracle: SELECT SUBSTR(State,1,2) FROM t\n  # indented comment\nSELECT * FROM t WHERE a='x:y'\n";
        let qs = parse_queries_file(text, Dialect::Sql);
        assert_eq!(qs.len(), 3);
        assert_eq!((qs[0].id, qs[0].line, qs[0].dialect), (1, 3, Dialect::Sql));
        assert_eq!(
            (qs[1].id, qs[1].line, qs[1].dialect),
            (2, 4, Dialect::Oracle)
        );
        assert_eq!(qs[1].text, "SELECT SUBSTR(State,1,2) FROM t");
        assert_eq!(qs[2].text, "SELECT * FROM t WHERE a='x:y'");
    }
}
