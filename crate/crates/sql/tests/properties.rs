use genmr_sql::token::is_keyword;
use genmr_sql::{
    parse, render_canonical, Dialect, Direction, Predicate, Projection, QueryAst, Term,
};
use proptest::prelude::*;

fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,10}".prop_filter("keyword", |s| !is_keyword(s))
}

fn literal() -> impl Strategy<Value = String> {
    "[^']{0,16}"
}

fn term() -> impl Strategy<Value = Term> {
    (ident(), literal()).prop_map(|(c, l)| Term::new(c, l))
}

fn predicate() -> impl Strategy<Value = Predicate> {
    prop_oneof![
        term().prop_map(Predicate::Single),
        (term(), term()).prop_map(|(a, b)| Predicate::And(a, b)),
        (term(), term()).prop_map(|(a, b)| Predicate::Or(a, b)),
    ]
}

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Asc), Just(Direction::Desc)]
}

/// ASTs satisfying the type invariants.
fn ast() -> impl Strategy<Value = QueryAst> {
    let func = prop_oneof![
        ident().prop_map(Projection::Count),
        ident().prop_map(Projection::Distinct),
        ident().prop_map(Projection::Upper),
        (ident(), 1u32..100, proptest::option::of(1u32..100))
            .prop_map(|(column, start, len)| Projection::Substring { column, start, len }),
    ];
    prop_oneof![
        (
            ident(),
            proptest::option::of(predicate()),
            proptest::option::of((ident(), direction()))
        )
            .prop_map(|(table, pred, order)| {
                let mut ast = QueryAst::simple(Projection::Star, table);
                ast.predicate = pred;
                if let Some((c, d)) = order {
                    ast = ast.with_order_by(c, d);
                }
                ast
            }),
        (func, ident(), proptest::option::of(predicate())).prop_map(|(p, table, pred)| {
            let mut ast = QueryAst::simple(p, table);
            ast.predicate = pred;
            ast
        }),
        (ident(), ident(), proptest::option::of(predicate())).prop_map(|(col, table, pred)| {
            let mut ast = QueryAst::simple(Projection::GroupCount(col.clone()), table);
            ast.predicate = pred;
            ast.group_by = Some(col);
            ast
        }),
    ]
}

fn dialect() -> impl Strategy<Value = Dialect> {
    prop_oneof![
        Just(Dialect::Sql),
        Just(Dialect::MySql),
        Just(Dialect::Oracle),
        Just(Dialect::Db2)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn render_then_parse_is_identity(ast in ast()) {
        prop_assert!(ast.validate().is_ok());
        let text = render_canonical(&ast);
        prop_assert_eq!(parse(&text, Dialect::Sql).unwrap(), ast);
    }

    /// Canonical text uses only spellings every dialect shares.
    #[test]
    fn canonical_text_parses_identically_in_all_dialects(ast in ast()) {
        let text = render_canonical(&ast);
        for d in Dialect::ALL {
            prop_assert_eq!(&parse(&text, d).unwrap(), &ast);
        }
    }

    #[test]
    fn keyword_case_does_not_matter(ast in ast(), d in dialect(), mask in any::<u64>()) {
        let text = render_canonical(&ast);
        // Flip the case of keyword tokens only, driven by the mask bits.
        let toks = genmr_sql::tokenize(&text).unwrap();
        let mut shuffled = text.clone();
        for (i, t) in toks.iter().enumerate() {
            if t.kind == genmr_sql::TokenKind::Keyword && mask >> (i % 64) & 1 == 1 {
                let end = t.position + t.text.len();
                shuffled.replace_range(t.position..end, &t.text.to_ascii_lowercase());
            }
        }
        prop_assert_eq!(parse(&shuffled, d).unwrap(), parse(&text, d).unwrap());
    }

    #[test]
    fn parse_never_panics_on_strings(text in ".{0,80}", d in dialect()) {
        let _ = parse(&text, d);
    }

    #[test]
    fn parse_never_panics_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..80), d in dialect()) {
        let _ = parse(&String::from_utf8_lossy(&bytes), d);
    }

    #[test]
    fn parse_never_panics_on_token_soup(
        words in proptest::collection::vec(
            prop_oneof![
                Just("SELECT"), Just("FROM"), Just("WHERE"), Just("AND"), Just("OR"),
                Just("COUNT"), Just("("), Just(")"), Just(","), Just("*"), Just("="),
                Just("'x'"), Just("1"), Just("t"), Just("ORDER"), Just("GROUP"), Just("BY"),
                Just("SUBSTR"), Just("UCASE"), Just(";"), Just("DISTINCT"),
            ],
            0..16,
        ),
        d in dialect(),
    ) {
        let _ = parse(&words.join(" "), d);
    }
}

#[test]
fn lower_case_count_query_matches_upper_in_every_dialect() {
    for d in Dialect::ALL {
        assert_eq!(
            parse("select count(State) from teachers", d).unwrap(),
            parse("SELECT COUNT(State) FROM teachers", d).unwrap()
        );
    }
}
