use genmr_oracle::eval;
use genmr_sql::{Predicate, Projection, QueryAst, Schema, TableData, Term};
use proptest::prelude::*;

const VALUES: [&str; 4] = ["x", "y", "Xy", ""];

fn table(rows: Vec<Vec<&str>>) -> TableData {
    let schema = Schema::new("t", vec!["A".into(), "B".into()]).unwrap();
    TableData::new(
        schema,
        rows.into_iter()
            .map(|r| r.into_iter().map(String::from).collect())
            .collect(),
    )
    .unwrap()
}

fn queries() -> Vec<QueryAst> {
    let filter = Predicate::Or(Term::new("A", "x"), Term::new("B", "y"));
    let mut grouped = QueryAst::simple(Projection::GroupCount("A".into()), "t");
    grouped.group_by = Some("A".into());
    vec![
        QueryAst::simple(Projection::Count("A".into()), "t"),
        QueryAst::simple(Projection::Count("A".into()), "t").with_predicate(filter.clone()),
        QueryAst::simple(Projection::Distinct("B".into()), "t"),
        QueryAst::simple(Projection::Distinct("B".into()), "t").with_predicate(filter.clone()),
        grouped.clone(),
        grouped.with_predicate(filter),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn aggregates_ignore_row_order(
        (rows, shuffled) in prop::collection::vec(prop::collection::vec(prop::sample::select(&VALUES[..]), 2), 0..40)
            .prop_flat_map(|rows| (Just(rows.clone()), Just(rows).prop_shuffle()))
    ) {
        let (a, b) = (table(rows), table(shuffled));
        for q in queries() {
            prop_assert_eq!(eval(&q, &a).unwrap(), eval(&q, &b).unwrap());
        }
    }
}
