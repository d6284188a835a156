mod common;

use common::{corpus, load, sym};
use hodp::dp::extract_dps;
use hodp::order::{
    check_constraints, horpo_gt, pair_ge, search_precedence, Clause, Precedence, SearchLimits,
};
use hodp::report::Timing;
use hodp::{
    parse_system, parse_term, render_report, run_pipeline, AnalysisReport, Format, Options, Stage,
    Verdict,
};

fn run(name: &str) -> AnalysisReport {
    run_pipeline(&load(name), &Options::default()).unwrap()
}

#[test]
fn map_system_is_yes() {
    let r = run("map");
    assert_eq!(r.verdict, Verdict::Yes);
    assert_eq!(r.dps.len(), 1);
    assert_eq!(r.dps[0].lhs, "map F (cons X L)");
    assert_eq!(r.dps[0].rhs, "map F L");
    let c = r.certificate.as_ref().unwrap();
    assert_eq!(c.edges, ["map>cons"]);
    assert_eq!(c.witnesses.len(), 3);
    assert!(r.failures.is_empty());
}

#[test]
fn lim_system_reports_both_diagnostics() {
    let r = run("lim");
    assert_eq!(r.verdict, Verdict::Maybe);
    assert_eq!(r.stage, Some(Stage::Admissibility));
    assert!(r.failed_stages.contains(&Stage::StarCondition));
    let dp = r.dps.iter().find(|d| !d.star.passed).unwrap();
    assert_eq!(dp.position.to_string(), "2.1");
    assert_eq!(dp.star.free_bound, ["n"]);
    let rule = &r.rules[2];
    assert!(!rule.admissible);
    let f = rule.variables.iter().find(|v| v.name == "F").unwrap();
    assert!(f.trace.is_none());
    let text = render_report(&r, Format::Text { trace: false });
    assert!(text.starts_with("MAYBE\n"));
    assert!(text.contains("variable F is not in the pattern computability closure"));
    assert!(text.contains("FreeBoundVariable{n}"));
}

#[test]
fn loop_is_no_only_with_disprove() {
    let sys = load("loop");
    let r = run_pipeline(&sys, &Options::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Maybe);
    assert!(r.witness.is_none());
    let opts = Options {
        disprove: true,
        ..Options::default()
    };
    let r = run_pipeline(&sys, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::No);
    let w = r.witness.unwrap();
    assert_eq!(w.len(), 1);
    assert_eq!(w[0].from, w[0].to);
}

#[test]
fn disprove_does_not_turn_maybe_into_no_without_a_cycle() {
    let opts = Options {
        disprove: true,
        ..Options::default()
    };
    let r = run_pipeline(&load("lim"), &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Maybe);
    assert!(r.witness.is_none());
}

#[test]
fn empty_system_is_yes_beta_only() {
    let sys = parse_system("").unwrap();
    let r = run_pipeline(&sys, &Options::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert!(r.notes.iter().any(|n| n.starts_with("beta-only")));
}

#[test]
fn fault_injection_flips_yes_to_maybe() {
    let sys = load("map");
    for stage in [Stage::Admissibility, Stage::StarCondition, Stage::ReductionPair] {
        let opts = Options {
            inject_failure: Some(stage),
            ..Options::default()
        };
        let r = run_pipeline(&sys, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Maybe, "{stage}");
        assert_eq!(r.stage, Some(stage));
    }
}

#[test]
fn manual_precedence() {
    let sys = load("map");
    let opts = Options {
        precedence: Some(Precedence::parse("map>cons,map>nil").unwrap()),
        ..Options::default()
    };
    assert_eq!(run_pipeline(&sys, &opts).unwrap().verdict, Verdict::Yes);
    let opts = Options {
        precedence: Some(Precedence::parse("cons>map").unwrap()),
        ..Options::default()
    };
    let r = run_pipeline(&sys, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Maybe);
    assert_eq!(r.stage, Some(Stage::ReductionPair));
    assert!(r.failures.iter().any(|f| f.contains("rule[1]")));
}

#[test]
fn search_space_limit() {
    let opts = Options {
        max_symbols: 2,
        ..Options::default()
    };
    let err = run_pipeline(&load("map"), &opts).unwrap_err();
    assert!(matches!(err, hodp::Error::SearchSpaceExceeded { .. }));
    assert!(!err.is_input_error());
}

#[test]
fn json_round_trip_and_determinism() {
    for (name, text) in corpus() {
        let sys = parse_system(&text).unwrap();
        let mut a = run_pipeline(&sys, &Options::default()).unwrap();
        let json = render_report(&a, Format::Json);
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a, "{name}");
        let mut b = run_pipeline(&sys, &Options::default()).unwrap();
        a.timing = Timing { millis: 0 };
        b.timing = Timing { millis: 0 };
        assert_eq!(
            render_report(&a, Format::Json),
            render_report(&b, Format::Json),
            "{name}"
        );
    }
}

#[test]
fn json_has_fixed_top_level_fields() {
    let r = run("map");
    let v: serde_json::Value = serde_json::from_str(&render_report(&r, Format::Json)).unwrap();
    for field in ["verdict", "rules", "dps", "certificate", "witness", "timing"] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
    assert_eq!(v["verdict"], "YES");
    let cert = &v["certificate"];
    for field in ["edges", "statuses", "witnesses"] {
        assert!(cert.get(field).is_some(), "missing certificate.{field}");
    }
}

#[test]
fn yes_answers_on_corpus() {
    let expected = [
        ("append", Verdict::Yes),
        ("apply_beta", Verdict::Maybe),
        ("empty", Verdict::Yes),
        ("fold", Verdict::Maybe),
        ("lim", Verdict::Maybe),
        ("loop", Verdict::Maybe),
        ("map", Verdict::Yes),
        ("minus_div", Verdict::Maybe),
        ("rec", Verdict::Yes),
        ("tree", Verdict::Yes),
        ("twice", Verdict::Yes),
    ];
    for (name, v) in expected {
        assert_eq!(run(name).verdict, v, "{name}");
    }
}

#[test]
fn horpo_examples() {
    let sys = load("map");
    let sig = &sys.signature;
    let t = |s: &str| parse_term(s, sig).unwrap();
    let empty = Precedence::new();
    let p = horpo_gt(&t("map F (cons X L)"), &t("map F L"), &empty).unwrap();
    assert!(matches!(p.clause, Clause::SameSymbol { .. }));

    let map_nil = Precedence::parse("map>nil").unwrap();
    let lhs = t("map F nil");
    let nil = sym(sig, "nil");
    assert!(horpo_gt(&lhs, &nil, &map_nil).is_some());

    let x = hodp::Term::var("X", hodp::Type::base("N"));
    let y = hodp::Term::var("Y", hodp::Type::base("N"));
    assert!(horpo_gt(&x, &y, &empty).is_none());
    let lhs = t("map F (cons X L)");
    assert!(horpo_gt(&lhs, &lhs, &map_nil).is_none());
}

#[test]
fn pair_ge_examples() {
    let sys = load("map");
    let t = |s: &str| parse_term(s, &sys.signature).unwrap();
    let empty = Precedence::new();
    let u = t("map F (cons X L)");
    assert!(pair_ge(&u, &u, &empty, 8).is_some());
    assert!(pair_ge(&t("(\\x. s x) 0"), &t("s 0"), &empty, 8).is_some());
    let p = Precedence::parse("map>cons").unwrap();
    assert!(pair_ge(&u, &t("cons (F X) (map F L)"), &p, 8).is_some());
    assert!(pair_ge(&u, &t("cons (F X) (map F L)"), &empty, 8).is_none());
}

#[test]
fn check_constraints_examples() {
    let sys = load("map");
    let dps = extract_dps(&sys).unwrap();
    let p = Precedence::parse("map>cons>nil").unwrap();
    let cert = check_constraints(&sys.rules, &dps, &p, 8).unwrap();
    cert.replay(&sys.rules, &dps).unwrap();

    // without a precedence only the recursive rule is out of reach: the
    // first rule is oriented by the subterm clause
    let failed = check_constraints(&sys.rules, &dps, &Precedence::new(), 8).unwrap_err();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].index, 1);

    assert!(check_constraints(&[], &[], &Precedence::new(), 8).is_ok());
}

#[test]
fn search_examples() {
    let sys = load("map");
    let dps = extract_dps(&sys).unwrap();
    let cert = search_precedence(
        &sys.rules,
        &dps,
        sys.signature.defined(),
        &Precedence::new(),
        SearchLimits::default(),
    )
    .unwrap()
    .unwrap();
    assert!(cert.precedence.gt("map", "cons"));
    assert_eq!(cert.precedence.status("map"), hodp::order::Status::Mul);
    cert.replay(&sys.rules, &dps).unwrap();

    let a = parse_system("sort N\na : N\nrule a -> a\n").unwrap();
    let dps = extract_dps(&a).unwrap();
    let none = search_precedence(
        &a.rules,
        &dps,
        a.signature.defined(),
        &Precedence::new(),
        SearchLimits::default(),
    )
    .unwrap();
    assert!(none.is_none());

    let c = parse_system("sort N\n0 : N\n").unwrap();
    let vac = search_precedence(&c.rules, &[], c.signature.defined(), &Precedence::new(), SearchLimits::default())
        .unwrap()
        .unwrap();
    assert!(vac.precedence.edges().is_empty());
}

#[test]
fn precedence_hints_are_respected() {
    let sys = parse_system(
        "sort N L\n0 : N\nnil : L\ncons : N -> L -> L\nmap : (N -> N) -> L -> L\n\
         rule map F nil -> nil\nrule map F (cons X L) -> cons (F X) (map F L)\nprec map > nil\n",
    )
    .unwrap();
    let r = run_pipeline(&sys, &Options::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
}

#[test]
fn ackermann_needs_lexicographic_status() {
    let sys = parse_system(
        "sort N\n0 : N\ns : N -> N\nack : N -> N -> N\n\
         rule ack 0 Y -> s Y\n\
         rule ack (s X) 0 -> ack X (s 0)\n\
         rule ack (s X) (s Y) -> ack X (ack (s X) Y)\n",
    )
    .unwrap();
    let r = run_pipeline(&sys, &Options::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    let c = r.certificate.unwrap();
    assert_eq!(c.statuses["ack"], hodp::order::Status::Lex);
    assert_eq!(r.dps.len(), 3);
}
