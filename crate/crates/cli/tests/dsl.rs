use proptest::prelude::*;

use wsbn_cli::dsl::{load_model, parse_model, parse_model_bytes, DiagnosticKind, Process, ProcessDecl, QuerySemantics};

const RELAY: &str = include_str!("../models/relay.wsbn");

#[test]
fn relay_transcription() {
    let m = parse_model(RELAY).unwrap();
    assert_eq!(m.process, ProcessDecl::Vass { dim: 1 });
    assert_eq!(m.transitions.len(), 8);
    assert_eq!(m.inits.len(), 2);
    assert!(m.inits.iter().all(|i| i.vector.as_deref() == Some(&[1][..])));
    assert_eq!(m.complete_receives.as_deref(), Some("qdead"));
    assert_eq!(m.queries[0].semantics, QuerySemantics::Rbn);
    assert_eq!(m.queries[2].semantics, QuerySemantics::PathBounded(2));
    let compiled = m.compile().unwrap();
    let Process::Vass(p) = &compiled.process else { panic!("VASS expected") };
    assert!(wsbn::WellStructured::is_receive_complete(p));
    assert!(p.state_id("qdead").is_some());
}

#[test]
fn empty_file_is_a_syntax_error_on_line_1() {
    for text in ["", "\n\n", "# only a comment\n"] {
        let d = parse_model(text).unwrap_err();
        assert_eq!(d.kind, DiagnosticKind::Syntax);
        assert_eq!(d.line, 1);
    }
}

#[test]
fn missing_or_wrong_header() {
    let d = parse_model("process finite\n").unwrap_err();
    assert_eq!((d.kind, d.line, d.column), (DiagnosticKind::Syntax, 1, 1));
    let d = parse_model("wsbn 2\n").unwrap_err();
    assert!(d.message.contains("version"));
}

#[test]
fn delta_arity_names_the_transition() {
    let text = "wsbn 1\nprocess vass dim=2\ninit q\ntrans q -> r on !!a delta=(1)\nquery cover state=r semantics=rbn\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!(d.kind, DiagnosticKind::DimensionMismatch);
    assert_eq!(d.line, 4);
    assert!(d.message.contains("q -> r on !!a"), "{}", d.message);
}

#[test]
fn missing_delta_is_a_dimension_mismatch() {
    let text = "wsbn 1\nprocess vass dim=1\ninit q\ntrans q -> r on !!a\nquery cover state=r semantics=rbn\n";
    assert_eq!(parse_model(text).unwrap_err().kind, DiagnosticKind::DimensionMismatch);
}

#[test]
fn vector_arity_is_checked() {
    let text = "wsbn 1\nprocess vass dim=1\ninit q vector=(1,1)\nquery cover state=q semantics=rbn\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!((d.kind, d.line), (DiagnosticKind::DimensionMismatch, 3));
    let text = "wsbn 1\nprocess vass dim=1\ninit q\nquery cover state=q vector=() semantics=rbn\n";
    assert_eq!(parse_model(text).unwrap_err().kind, DiagnosticKind::DimensionMismatch);
}

#[test]
fn undeclared_query_state() {
    let text = "wsbn 1\nprocess finite\ninit q\ntrans q -> r on !!a\nquery cover state=s semantics=clique\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!((d.kind, d.line, d.column), (DiagnosticKind::UndeclaredIdentifier, 5, 19));
}

#[test]
fn undeclared_stack_symbol() {
    let text = "wsbn 1\nprocess pushdown stack=A\ninit p\ntrans p -> p on !!a push=A.B\nquery cover state=p semantics=rbn\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!((d.kind, d.line), (DiagnosticKind::UndeclaredIdentifier, 4));
}

#[test]
fn pushdown_model_compiles() {
    let text = "\
wsbn 1
process pushdown stack=A,B
init p0
init r0
trans p0 -> p1 on !!req push=A.B
trans p1 -> p2 on !!ack pre=A
trans r0 -> r1 on ??ack pre=eps push=eps
query cover state=r1 semantics=rbn
query cover state=p1 stack=A.B.bot semantics=rbn
";
    let model = load_model(text).unwrap();
    let Process::Pushdown(p) = &model.process else { panic!("pushdown expected") };
    assert_eq!(p.rules().len(), 3);
    assert_eq!(model.queries[1].target_text, "p1,A.B.bot");
}

#[test]
fn pushdown_rejects_static_semantics_and_bottom_pushes() {
    let base = "wsbn 1\nprocess pushdown stack=A\ninit p\n";
    let d = parse_model(&format!("{base}query cover state=p semantics=clique\n")).unwrap_err();
    assert!(d.remedy.contains("rbn"));
    let d = parse_model(&format!("{base}trans p -> p on !!a push=bot\nquery cover state=p semantics=rbn\n")).unwrap_err();
    assert_eq!(d.line, 4);
    let d = parse_model(&format!("{base}trans p -> p on !!a delta=(1)\nquery cover state=p semantics=rbn\n")).unwrap_err();
    assert_eq!(d.kind, DiagnosticKind::Syntax);
}

#[test]
fn semantics_clauses() {
    for (text, expected) in [
        ("rbn", QuerySemantics::Rbn),
        ("clique", QuerySemantics::Clique),
        ("path-bounded:3", QuerySemantics::PathBounded(3)),
        ("diam-deg:2,3,6", QuerySemantics::DiamDeg { k: 2, d: 3, n_max: 6 }),
    ] {
        let parsed: QuerySemantics = text.parse().unwrap();
        assert_eq!(parsed, expected);
        assert_eq!(parsed.to_string(), text);
    }
    for bad in ["", "static", "path-bounded:0", "path-bounded:x", "diam-deg:2,3", "diam-deg:2,3,9"] {
        assert!(bad.parse::<QuerySemantics>().is_err(), "{bad}");
    }
}

#[test]
fn diagnostics_point_at_the_offending_token() {
    let text = "wsbn 1\nprocess finite\ninit q\ntrans q => r on !!a\nquery cover state=q semantics=rbn\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!((d.line, d.column), (4, 9));
    let text = "wsbn 1\nprocess finite\ninit q\nquery cover state=q semantics=ring\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!((d.line, d.column), (4, 31));
    let text = "wsbn 1\nprocess finite\ninit q vector=(1\nquery cover state=q semantics=rbn\n";
    let d = parse_model(text).unwrap_err();
    assert_eq!((d.line, d.column), (3, 15));
}

#[test]
fn directives_before_process_are_rejected() {
    let d = parse_model("wsbn 1\ninit q\nprocess finite\n").unwrap_err();
    assert_eq!(d.line, 2);
    let d = parse_model("wsbn 1\nprocess finite\nprocess finite\n").unwrap_err();
    assert_eq!(d.line, 3);
}

#[test]
fn invalid_utf8_is_positioned() {
    let d = parse_model_bytes(b"wsbn 1\nprocess fin\xffite\n").unwrap_err();
    assert_eq!((d.line, d.column), (2, 12));
}

const WORDS: &[&str] = &[
    "wsbn", "1", "process", "vass", "finite", "pushdown", "dim=1", "dim=0", "stack=A,B", "init", "q", "r", "vector=(1)",
    "vector=(", ")", "trans", "->", "on", "!!a", "??a", "delta=(-1)", "pre=A", "push=A.B", "option",
    "complete-receives", "dead=d", "query", "cover", "state=q", "state=r", "semantics=rbn", "semantics=clique",
    "semantics=path-bounded:2", "semantics=diam-deg:1,1,2", "max-basis=5", "#", "=", "stack=A.bot",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parser_is_total_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_model_bytes(&bytes);
    }

    #[test]
    fn parser_is_total_on_token_soup(
        lines in prop::collection::vec(prop::collection::vec(prop::sample::select(WORDS), 0..8), 0..10)
    ) {
        let body: Vec<String> = lines.iter().map(|l| l.join(" ")).collect();
        let text = format!("wsbn 1\n{}", body.join("\n"));
        match parse_model(&text) {
            Ok(m) => {
                // validated models always compile
                prop_assert!(m.compile().is_ok(), "{text}");
            }
            Err(d) => {
                prop_assert!(d.line >= 1 && d.column >= 1);
                prop_assert!(d.line <= text.lines().count().max(1));
                prop_assert!(!d.remedy.is_empty());
            }
        }
    }
}
