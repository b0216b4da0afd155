//! Golden-file tests of the `ldg` binary. Run with `UPDATE_GOLDEN=1` to
//! rewrite the expected outputs after an intended change.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ldg(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ldg"))
        .args(args)
        .current_dir(fixtures())
        .env("LDG_COLOR", "0")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert_eq!(actual, expected, "output differs from {name}");
}

fn golden_run(name: &str, args: &[&str], code: i32) {
    let r = ldg(args);
    assert_eq!(r.code, code, "exit code of {args:?}; stderr: {}", r.stderr);
    golden(name, &r.stdout);
}

#[test]
fn apply_merge() {
    golden_run("apply_merge.json", &["apply", "merge.json", "mrg(i,j)"], 0);
    golden_run("apply_merge.dot", &["apply", "merge.json", "mrg(i,j)", "--dot"], 0);
}

#[test]
fn rewrite_servernet() {
    golden_run("rewrite_servernet.json", &["rewrite", "servernet.json", "servernet.ldr", "r0 + r1"], 0);
    golden_run("rewrite_servernet_all.json", &["rewrite", "servernet.json", "servernet.ldr", "r0 + r1", "--all"], 0);
    golden_run("rewrite_servernet_r0.json", &["rewrite", "servernet.json", "servernet.ldr", "r0"], 0);
}

#[test]
fn eliminate_with_trace() {
    golden_run("eliminate_dl.txt", &["eliminate", "(exists r . A)[mrg(i,j)]", "--trace"], 0);
    golden_run("eliminate_fol.txt", &["eliminate", "--logic", "fol", "(forall x . A(x))[del_N(i)]", "--full"], 0);
}

#[test]
fn wp_and_vc() {
    let clear = ["corpus.ldr", "one", "not C"];
    golden_run("wp_one.txt", &["wp", clear[0], clear[1], clear[2]], 0);
    golden_run("vc_closure.txt", &["vc", "corpus.ldr", "one* {inv: top}", "not C"], 0);
}

#[test]
fn verify_specs() {
    golden_run("verify_servernet.txt", &["verify", "servernet.ldv", "--bound-nodes", "4", "--trials", "20"], 0);
    golden_run("verify_merge_cycle.txt", &["verify", "specs/merge_cycle.ldv", "--trials", "0"], 1);
}

#[test]
fn verify_emits_formula() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = ldg(&["verify", "specs/clear.ldv", "--trials", "5", "--out", out, "--emit-formula", "formula.txt"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(dir.path().join("formula.txt")).unwrap();
    assert!(text.starts_with('('), "{text}");
    let r = ldg(&["verify", "specs/merge_cycle.ldv", "--trials", "0", "--out", out]);
    assert_eq!(r.code, 1);
    assert!(dir.path().join("counterexample.json").exists());
}

#[test]
fn bisim_commands() {
    golden_run("bisim_check.txt", &["bisim", "check", "bisim_i.json", "bisim_j.json", "bisim_z.json", "--features", "QUOSelf"], 0);
    golden_run("bisim_check_alc.txt", &["bisim", "check", "bisim_i.json", "bisim_j.json", "bisim_z.json", "--features", "ALC"], 0);
    golden_run("demo_nonclosure.txt", &["bisim", "demo-nonclosure"], 0);
}

#[test]
fn fuzz_is_reproducible() {
    let args = ["fuzz", "--seed", "3", "--cases", "30", "--depth", "3"];
    golden_run("fuzz_seed3.txt", &args, 0);
    assert_eq!(ldg(&args).stdout, ldg(&args).stdout);
    golden_run("fuzz_cl.txt", &["fuzz", "--seed", "1", "--cases", "40", "--kind", "cl", "--logic", "fol"], 0);
}

#[test]
fn sampling_is_reproducible() {
    let args = ["verify", "specs/star_join.ldv", "--trials", "30", "--seed", "9"];
    let a = ldg(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, ldg(&args).stdout);
}

#[test]
fn artifacts_go_to_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = ldg(&["apply", "merge.json", "mrg(i,j)", "--out", out]);
    assert_eq!(r.code, 0);
    let written = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
    assert_eq!(written, ldg(&["apply", "merge.json", "mrg(i,j)"]).stdout);
    let r = ldg(&["eliminate", "A[add_C(i,A)]", "--trace", "--out", out]);
    assert_eq!(r.code, 0);
    assert!(dir.path().join("trace.txt").exists());
}

#[test]
fn input_errors_exit_2() {
    let r = ldg(&["apply", "missing.json", "mrg(i,j)"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("missing.json"), "{}", r.stderr);
    let r = ldg(&["apply", "merge.json", "mrg(i,"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("1:"), "{}", r.stderr);
    let bad = golden_dir().join("bad.ldr");
    let r = ldg(&["rewrite", "merge.json", bad.to_str().unwrap(), "broken"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("3:"), "{}", r.stderr);
    let r = ldg(&["rewrite", "servernet.json", "servernet.ldr", "nope"]);
    assert_eq!(r.code, 2);
    let r = ldg(&["bisim", "check", "bisim_i.json", "bisim_j.json", "bisim_z.json", "--features", "XYZ"]);
    assert_eq!(r.code, 2);
    let r = ldg(&["rewrite", "merge.json", "servernet.ldr", "r0", "--all", "--dot"]);
    assert_eq!(r.code, 2);
}

#[test]
fn step_bound_exits_3() {
    let g = golden_dir().join("two_c.json");
    let g = g.to_str().unwrap();
    let r = ldg(&["rewrite", g, "corpus.ldr", "one* {inv: top}", "--max-steps", "1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let r = ldg(&["rewrite", g, "corpus.ldr", "one* {inv: top}", "--all", "--max-steps", "1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let r = ldg(&["rewrite", g, "corpus.ldr", "one* {inv: top}"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(!r.stdout.contains("\"C\"\n      ]"), "labels C removed");
}
