use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regmat_ef::decomp::{parse_tree_file, write_tree_files};
use regmat_ef::samples::corpus;
use regmat_ef::verify::certify_equality;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regmat-ef")).args(args).output().expect("run regmat-ef")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sample_file(dir: &Path, name: &str) -> PathBuf {
    let s = corpus().into_iter().find(|s| s.name == name).expect("sample");
    write_tree_files(dir, name, &s.tree).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = sample_file(dir.path(), "graphic-k3");
    let ok = run(&["certify", p(&k3)]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).ends_with("result: PASS\n"));
    assert_eq!(run(&["certify", p(&k3), "--inject-fault"]).status.code(), Some(1));
    let cap = run(&["certify", p(&k3), "--cap", "2"]);
    assert_eq!(cap.status.code(), Some(2));
    assert!(stderr(&cap).contains("cap"));
    assert_eq!(run(&["certify", "/nonexistent.tree"]).status.code(), Some(3));
    assert_eq!(run(&["certify"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("bad.tree");
    fs::write(&tree, "# header\nleaf a graphic a.graph\nsum s k=2 left=a right=a\nroot s\n").unwrap();
    let out = run(&["certify", p(&tree)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    fs::write(dir.path().join("a.graph"), "2 1\ne1 0 1\n").unwrap();
    let out = run(&["certify", p(&tree)]);
    assert!(stderr(&out).contains("line 2") && stderr(&out).contains("more than once"), "{}", stderr(&out));
    fs::write(&tree, "leaf a graphic a.graph\nroot b\n").unwrap();
    assert!(stderr(&run(&["build", p(&tree)])).contains("line 2"));
}

#[test]
fn generic_three_sum_fails_certification() {
    let dir = tempfile::tempdir().unwrap();
    let tree = sample_file(dir.path(), "sum3-small");
    let out = run(&["certify", p(&tree), "--trials", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("infeasible vertex"));
}

#[test]
fn build_summary_and_lp_file() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = sample_file(dir.path(), "graphic-k3");
    let lp = dir.path().join("k3.lp");
    let out = run(&["build", p(&k3), "--output", p(&lp)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("elements 3\n"), "{text}");
    assert!(text.contains("inequalities 27\n"), "{text}");
    let file = fs::read_to_string(&lp).unwrap();
    assert!(file.starts_with("Maximize\n") && file.trim_end().ends_with("End"));
    assert_eq!(stdout(&run(&["build", p(&k3), "--format", "lp"])), file);
}

#[test]
fn one_sum_build_size_is_sum_of_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let sum = sample_file(dir.path(), "sum1-k3-k3");
    let k3 = sample_file(dir.path(), "graphic-k3");
    let size = |path: &Path| -> serde_json::Value {
        serde_json::from_str(&stdout(&run(&["build", p(path), "--format", "json"]))).unwrap()
    };
    let (s, l) = (size(&sum), size(&k3));
    assert_eq!(s["inequalities"], l["inequalities"].as_u64().unwrap() * 2);
    assert_eq!(s["elements"], 6);
}

#[test]
fn certify_json_is_deterministic_and_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let tree = sample_file(dir.path(), "sum2-cographic-graphic");
    let args = ["certify", p(&tree), "--format", "json", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    assert_eq!(run(&seq_args).stdout, a.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert!(json["certification"].get("timings").is_none());

    let t = parse_tree_file(&tree).unwrap();
    let lib = certify_equality(&t.build_ef().unwrap(), &t.matroid().unwrap()).unwrap();
    assert_eq!(json["certification"], serde_json::to_value(&lib).unwrap());

    let timed: serde_json::Value =
        serde_json::from_slice(&run(&["certify", p(&tree), "--format", "json", "--timings", "--trials", "0"]).stdout).unwrap();
    assert!(timed["certification"]["timings"]["rank_ms"].is_number());
}

#[test]
fn small_commands() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = dir.path().join("k3.mat");
    fs::write(&k3, "2 1\n1\n1\n").unwrap();
    assert_eq!(stdout(&run(&["gbound", "7"])), "15\n");
    assert_eq!(stdout(&run(&["gbound", "8"])), "30\n");
    assert_eq!(run(&["gbound", "0"]).status.code(), Some(3));
    let rect = run(&["rectcover", p(&k3)]);
    assert_eq!(rect.status.code(), Some(0));
    assert!(stdout(&rect).contains("coverage 100%"));
    assert_eq!(stdout(&run(&["matroid", p(&k3), "rank"])), "2\n");
    assert_eq!(stdout(&run(&["matroid", p(&k3), "indep"])), "true\n");
    assert_eq!(stdout(&run(&["matroid", p(&k3), "indep", "e1", "e2", "e3"])), "false\n");
    assert!(stdout(&run(&["matroid", p(&k3), "enum"])).starts_with("7 independent sets\n"));
    assert_eq!(run(&["matroid", p(&k3), "rank", "e9"]).status.code(), Some(3));
    assert_eq!(run(&["matroid", p(&k3), "enum", "--cap", "2"]).status.code(), Some(2));

    let blocks = dir.path().join("blocks.mat");
    fs::write(&blocks, "2 2\n10\n01\n").unwrap();
    assert!(stdout(&run(&["find-1sums", p(&blocks)])).starts_with("2 blocks\n"));
}

#[test]
fn validate_reports_cases() {
    let dir = tempfile::tempdir().unwrap();
    let tree = sample_file(dir.path(), "sum3-small-a0-d0");
    let out = run(&["validate", p(&tree)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("(k=3,a=0,d=0)"), "{text}");
    assert!(text.contains("leaf total"));
}

#[test]
fn gen_corpus_writes_every_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen-corpus", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), corpus().len());
    for line in stdout(&out).lines() {
        assert!(parse_tree_file(Path::new(line)).is_ok(), "{line}");
    }
}
