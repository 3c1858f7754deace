use std::path::PathBuf;
use std::process::Command;

use fingram::grammar::parse_grammar;
use fingram::Derivation;
use fingram_cli::{Block, Report, EXIT_ERROR, EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("fingram-cli-{}-{}", std::process::id(), name))
}

/// Runs the binary; returns the exit code, the parsed report and the raw text.
fn run(args: &[&str]) -> (i32, Report, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fingram")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8 report");
    let report = Report::parse(&text).unwrap_or_else(|e| panic!("unparsable report ({}):\n{}", e, text));
    (out.status.code().expect("exit code"), report, text)
}

fn head(r: &Report) -> &Block {
    &r.blocks[0]
}

#[test]
fn enumerate_bounded_example() {
    let g = fixture("sec5.ig");
    let (code, r, text) = run(&["enumerate", &g, "--max-len", "14", "--max-stack", "3", "--exact-caps"]);
    assert_eq!(code, EXIT_OK, "{}", text);
    let b = head(&r);
    assert_eq!(b.get("verdict"), Some("ok"));
    assert_eq!(b.all("word").collect::<Vec<_>>(), vec!["$", "abc$abc", "aabbcc$aabbcc"]);
    assert_eq!(b.get("budget_exhausted"), Some("false"));
    assert!(b.get("input").unwrap().contains("sha256:"));
    // Without a stack cap the listing is the same but not conclusive.
    let (code, r, _) = run(&["enumerate", &g, "--max-len", "14"]);
    assert_eq!(code, EXIT_UNKNOWN);
    assert_eq!(head(&r).all("word").count(), 3);
}

#[test]
fn reports_parse_back_losslessly() {
    let (_, r, text) = run(&["check-uncontrolled", &fixture("ex1.ig"), "--k", "3", "--no-timing"]);
    assert_eq!(r.render(), text);
}

#[test]
fn example_grammar_is_not_uncontrolled_for_three() {
    let path = fixture("ex1.ig");
    let (code, r, _) = run(&["check-uncontrolled", &path, "--k", "3"]);
    assert_eq!(code, EXIT_REFUTED);
    let b = head(&r);
    assert_eq!(b.get("uncontrolled"), Some("refuted"));
    let g = parse_grammar(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let d = Derivation::from_trace(&g, b.get("witness").unwrap()).expect("witness replays");
    assert!(d.index() > 3);
    assert_eq!(d.yield_word().map(|w| w.to_string()).as_deref(), b.get("witness_word"));

    let (code, r, _) = run(&["min-index", &path, "abaa", "--max-stack", "3", "--exact-caps"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).get("min_index"), Some("3"));
}

#[test]
fn missing_k_is_an_error() {
    let (code, r, _) = run(&["check-uncontrolled", &fixture("ex1.ig")]);
    assert_eq!(code, EXIT_ERROR);
    assert_eq!(head(&r).get("verdict"), Some("error"));
}

#[test]
fn membership_statuses() {
    let g = fixture("anbn.ig");
    assert_eq!(run(&["member", &g, "aabb"]).0, EXIT_OK);
    let (code, r, _) = run(&["member", &g, "aab"]);
    assert_eq!(code, EXIT_REFUTED);
    assert_eq!(head(&r).get("member"), Some("refuted"));
    assert_eq!(run(&["member", &g, "aaaabbbb", "--max-steps", "2"]).0, EXIT_UNKNOWN);
    assert_eq!(run(&["min-index", &g, "aab"]).0, EXIT_REFUTED);
}

#[test]
fn unreadable_input_is_an_error() {
    let (code, r, _) = run(&["enumerate", "/nonexistent/x.ig"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(head(&r).get("error").unwrap().contains("cannot read"));
}

#[test]
fn validate_reports_violations() {
    let bad = scratch("bad.ig");
    std::fs::write(&bad, "grammar bad\nvariables: S\nterminals: a\nstart: S\nprod: S -> a T\n").unwrap();
    let (code, r, _) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_REFUTED);
    assert_eq!(head(&r).get("valid"), Some("false"));
    assert!(head(&r).all("violation").count() >= 1);
    for f in ["sec5.ig", "even_a.dfa", "double.morph", "recolor.fst", "diag.sls", "anbn.etol", "anbn.ncm"] {
        let (code, r, text) = run(&["validate", &fixture(f)]);
        assert_eq!(code, EXIT_OK, "{}: {}", f, text);
        assert_eq!(head(&r).get("valid"), Some("true"));
    }
}

#[test]
fn transforms_produce_valid_grammars() {
    let anbn = fixture("anbn.ig");
    let out = scratch("union.ig");
    let (code, r, _) = run(&["transform", "union", &anbn, &fixture("dyck.ig"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).get("output"), Some(out.to_str().unwrap()));
    parse_grammar(&std::fs::read_to_string(&out).unwrap()).expect("written grammar parses");

    let cases: Vec<Vec<String>> = vec![
        vec!["morph".into(), anbn.clone(), fixture("double.morph")],
        vec!["inv-morph".into(), anbn.clone(), fixture("pair.morph")],
        vec!["normalize".into(), fixture("sec5.ig")],
        vec!["intersect-dfa".into(), anbn.clone(), fixture("even_a.dfa")],
        vec!["inv-proj".into(), anbn.clone(), "--letters".into(), "x,y".into()],
        vec!["transduce".into(), anbn.clone(), fixture("recolor.fst")],
    ];
    for case in cases {
        let mut args = vec!["transform"];
        args.extend(case.iter().map(String::as_str));
        let (code, r, text) = run(&args);
        assert_eq!(code, EXIT_OK, "{:?}: {}", case, text);
        let grammar: String = head(&r).all("text").map(|l| format!("{}\n", l)).collect();
        parse_grammar(&grammar).unwrap_or_else(|e| panic!("{:?}: {}", case, e));
    }
}

#[test]
fn intersection_output_enumerates_the_filtered_language() {
    let out = scratch("even.ig");
    let (code, _, _) =
        run(&["transform", "intersect-dfa", &fixture("anbn.ig"), &fixture("even_a.dfa"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (code, r, _) = run(&["enumerate", out.to_str().unwrap(), "--max-len", "8", "--max-stack", "1", "--exact-caps"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).all("word").collect::<Vec<_>>(), vec!["_", "aabb", "aaaabbbb"]);
}

#[test]
fn synthesis_from_sets() {
    let (code, r, _) = run(&["synth-linear", &fixture("sec5.sls")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).get("special_productions"), Some("1"));
    let out = scratch("two.ig");
    let (code, _, _) = run(&["synth-semilinear", &fixture("two_words.sls"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(run(&["validate", out.to_str().unwrap()]).0, EXIT_OK);
    assert_eq!(run(&["synth-linear", &fixture("sec5.sls"), "--component", "4"]).0, EXIT_ERROR);
}

#[test]
fn set_decisions() {
    let (diag, quad) = (fixture("diag.sls"), fixture("quadrant.sls"));
    let (code, r, _) = run(&["slset", "subset", &diag, &quad]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).get("subset"), Some("proven"));
    let (code, r, _) = run(&["slset", "subset", &quad, &diag]);
    assert_eq!(code, EXIT_REFUTED);
    assert!(head(&r).get("counterexample").is_some());
    assert_eq!(run(&["slset", "equal", &diag, &diag]).0, EXIT_OK);
    assert_eq!(run(&["slset", "member", &diag, "3,3"]).0, EXIT_OK);
    assert_eq!(run(&["slset", "member", &diag, "(3,2)"]).0, EXIT_REFUTED);
    let (code, r, _) = run(&["slset", "empty", &diag]);
    assert_eq!(code, EXIT_REFUTED);
    assert_eq!(head(&r).get("member"), Some("(0,0)"));
}

#[test]
fn bounded_languages() {
    let sec5 = fixture("sec5.sls");
    assert_eq!(run(&["bounded", "member", &sec5, "abc$abc"]).0, EXIT_OK);
    assert_eq!(run(&["bounded", "member", &sec5, "abc$ab"]).0, EXIT_REFUTED);
    let (code, r, _) = run(&["bounded", "subset", &sec5, &fixture("sec5_full.sls")]);
    assert_ne!(code, EXIT_ERROR);
    assert!(head(&r).get("subset").is_some());
    assert_eq!(run(&["bounded", "subset", &sec5, &sec5]).0, EXIT_OK);
}

#[test]
fn etol_commands() {
    let sys = fixture("anbn.etol");
    let (code, r, _) = run(&["etol", "enumerate", &sys, "--max-len", "6", "--max-steps", "10"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).all("word").collect::<Vec<_>>(), vec!["_", "ab", "aabb", "aaabbb"]);
    assert_eq!(run(&["etol", "check-anf", &sys]).0, EXIT_OK);
    let (code, r, _) = run(&["etol", "convert", &sys]);
    assert_eq!(code, EXIT_OK);
    let grammar: String = head(&r).all("text").map(|l| format!("{}\n", l)).collect();
    parse_grammar(&grammar).expect("converted grammar parses");
    let bad = scratch("bad.etol");
    std::fs::write(&bad, "axiom: S\nterminals: a\ntable t:\nrule: S -> a\nrule: a -> aa\n").unwrap();
    let (code, r, _) = run(&["etol", "convert", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_REFUTED);
    assert_eq!(head(&r).get("violation"), Some("terminal a is active"));
}

#[test]
fn counter_machine_commands() {
    let m = fixture("anbn.ncm");
    let (code, r, _) = run(&["ncm", "run", &m, "aabb"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).get("run"), Some("accepted"));
    assert_eq!(run(&["ncm", "run", &m, "aab"]).0, EXIT_REFUTED);
    let (code, r, _) = run(&["ncm", "one-reversal", &fixture("updown.ncm")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(head(&r).get("counters"), Some("2"));
    let (code, r, _) = run(&["ncm", "expand", &m]);
    assert_eq!(code, EXIT_OK);
    assert!(head(&r).all("text").count() > 0);
    let (code, r, text) = run(&["ncm", "parikh-intersect", &fixture("abstar.ig"), &m, "--radius", "6"]);
    assert_eq!(code, EXIT_OK, "{}", text);
    assert_eq!(head(&r).all("vector").collect::<Vec<_>>(), vec!["(0,0)", "(1,1)", "(2,2)", "(3,3)"]);
    assert_eq!(head(&r).get("agree"), Some("true"));
}

#[test]
fn replicate_paper_is_deterministic_and_passes() {
    let (code, r, first) = run(&["replicate-paper", "--no-timing"]);
    assert_eq!(code, EXIT_OK, "{}", first);
    assert_eq!(head(&r).get("failed"), Some("0"));
    assert!(r.blocks[1..].iter().all(|b| b.get("status") == Some("pass")));
    let (_, _, second) = run(&["replicate-paper", "--no-timing"]);
    assert_eq!(first, second);
}
