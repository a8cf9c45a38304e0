//! End-to-end tests of the binary itself: subcommand wiring, artifact
//! shapes, exit-code classes, and byte-stable output files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use hamswitch_core::analysis::enumerate_two_factors;
use hamswitch_core::families::build_staircase;
use hamswitch_core::graph::{Graph, HamCycle};
use hamswitch_core::io::{read_edge_set, read_graph, write_edge_set, write_graph};
use hamswitch_core::monotone::MonotoneGraph;
use hamswitch_core::switch::Trajectory;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "sample",
        "transform",
        "family",
        "monotone-embed",
        "js",
        "enumerate",
        "stategraph",
        "mix",
        "reproduce",
    ] {
        assert!(text.contains(sub), "help is missing `{sub}`");
    }
}

#[test]
fn family_writes_graph_and_sidecar_report() {
    let dir = tempfile::tempdir().unwrap();
    let gpath = dir.path().join("g.graph");
    let out = run(&["family", "gadget", "--l", "5", "--out", path_str(&gpath)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("wrote"));

    let g = read_graph(&gpath).unwrap();
    assert_eq!(g.n(), 16);
    assert_eq!(g.m(), 20);

    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.graph.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["properties"]["ham_paths"], 2);
    assert!(sidecar["version"].is_string());
    assert!(sidecar["config"].is_object());
}

#[test]
fn sample_artifact_is_replayable_and_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.graph");
    write_graph(&k5, &Graph::complete(5)).unwrap();
    let rpath = dir.path().join("run.json");
    let args = [
        "sample",
        "--graph",
        path_str(&k5),
        "--k",
        "2",
        "--class",
        "ham",
        "--steps",
        "120",
        "--seed",
        "7",
        "--lazy",
        "--out",
        path_str(&rpath),
    ];
    assert!(run(&args).status.success());
    let bytes = std::fs::read(&rpath).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(bytes, std::fs::read(&rpath).unwrap(), "reruns differ");

    let report: Value = serde_json::from_slice(&bytes).unwrap();
    let traj: Trajectory = serde_json::from_value(report["trajectory"].clone()).unwrap();
    assert_eq!(traj.proposals.len(), 120);
    let accepted = traj.proposals.iter().filter(|p| p.accepted).count() as u64;
    assert_eq!(report["accepted"], Value::from(accepted));
    let g = Graph::complete(5);
    assert_eq!(traj.replay(&g).unwrap(), traj.final_state);
}

#[test]
fn transform_trace_checks_out_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::complete(16);
    let gpath = dir.path().join("k16.graph");
    write_graph(&gpath, &g).unwrap();
    let ring1: Vec<u32> = (0..16).collect();
    let ring2: Vec<u32> = (0..16).map(|i| (2 * i) % 16 + u32::from(2 * i >= 16)).collect();
    let (f1, f2) = (dir.path().join("h1.edges"), dir.path().join("h2.edges"));
    write_edge_set(&f1, HamCycle::from_order(&g, &ring1).unwrap().edges(), &g).unwrap();
    write_edge_set(&f2, HamCycle::from_order(&g, &ring2).unwrap().edges(), &g).unwrap();

    let report = run_ok(&[
        "transform",
        "--graph",
        path_str(&gpath),
        "--from",
        path_str(&f1),
        "--to",
        path_str(&f2),
        "--class",
        "ham",
    ]);
    let checks = &report["checks"];
    for key in [
        "final_matches_target",
        "intermediates_in_class",
        "length_le_diff",
        "replayed",
    ] {
        assert_eq!(checks[key], Value::Bool(true), "check `{key}`");
    }
    assert!(checks["max_switch_size"].as_u64().unwrap() <= 10);
    assert!(checks["steps"].as_u64().unwrap() <= report["initial_diff"].as_u64().unwrap());
}

#[test]
fn monotone_embed_emits_a_hamilton_cycle() {
    let dir = tempfile::tempdir().unwrap();
    // Half-dense banded monotone graph: row i sees columns [i-3, i+3] ∩ [1,6].
    let mg = MonotoneGraph::from_intervals(&[(1, 4), (1, 5), (1, 6), (1, 6), (2, 6), (3, 6)])
        .unwrap();
    let gpath = dir.path().join("band.graph");
    write_graph(&gpath, mg.graph()).unwrap();
    let f0 = enumerate_two_factors(mg.graph(), 20_000).unwrap().swap_remove(0);
    let fpath = dir.path().join("band.f");
    write_edge_set(&fpath, &f0, mg.graph()).unwrap();
    let hpath = dir.path().join("band.ham");

    let report = run_ok(&[
        "monotone-embed",
        "--graph",
        path_str(&gpath),
        "--two-factor",
        path_str(&fpath),
        "--out",
        path_str(&hpath),
    ]);
    assert!(report["total_edit_count"].as_u64().is_some());
    let back = read_edge_set(&hpath, mg.graph()).unwrap();
    HamCycle::new(mg.graph(), back).expect("output is a Hamilton cycle of the input graph");

    // Below half density the joining stage is not defined: precondition error.
    let stair = build_staircase(8).unwrap();
    let spath = dir.path().join("stair.graph");
    write_graph(&spath, stair.graph()).unwrap();
    let sf = enumerate_two_factors(stair.graph(), 20_000).unwrap().swap_remove(0);
    let sfpath = dir.path().join("stair.f");
    write_edge_set(&sfpath, &sf, stair.graph()).unwrap();
    let out = run(&[
        "monotone-embed",
        "--graph",
        path_str(&spath),
        "--two-factor",
        path_str(&sfpath),
        "--out",
        path_str(&hpath),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

#[test]
fn exit_codes_mark_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.graph");
    write_graph(&k5, &Graph::complete(5)).unwrap();

    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "3 2\n0 1\nbogus\n").unwrap();
    let out = run(&["enumerate", "--graph", path_str(&bad), "--class", "ham"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error at line 3"));

    let out = run(&[
        "enumerate",
        "--graph",
        path_str(&k5),
        "--class",
        "2factor",
        "--cap",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap exceeded"));

    let out = run(&["reproduce", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("unknown claim") && err.contains("staircase-count"));

    let out = run(&["sample", "--graph", path_str(&dir.path().join("missing.graph"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn js_exact_reports_stability_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.graph");
    write_graph(&k5, &Graph::complete(5)).unwrap();
    let report = run_ok(&["js", "--graph", path_str(&k5), "--exact"]);
    assert_eq!(report["state_count"], 97);
    assert_eq!(report["two_factors"], 12);
    assert_eq!(report["symmetric"], Value::Bool(true));
    assert!(report["k_js"]["bounded"].as_u64().unwrap() <= 3);
    assert_eq!(report["p_stability"], "97/12");
}

#[test]
fn enumerate_lists_the_whole_class() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.graph");
    write_graph(&k5, &Graph::complete(5)).unwrap();
    let report = run_ok(&[
        "enumerate",
        "--graph",
        path_str(&k5),
        "--class",
        "2factor",
        "--list",
    ]);
    assert_eq!(report["count"], 12);
    assert_eq!(report["states"].as_array().unwrap().len(), 12);
}

#[test]
fn mix_writes_the_tv_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = dir.path().join("k4.graph");
    write_graph(&k4, &Graph::complete(4)).unwrap();
    let csv = dir.path().join("curve.csv");
    let report = run_ok(&[
        "mix",
        "--graph",
        path_str(&k4),
        "--k",
        "2",
        "--eps",
        "0.25",
        "--lazy",
        "--csv",
        path_str(&csv),
    ]);
    assert!(report["mix"].is_object());
    assert!(report["theta"].is_object());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,tv_exact"));
    assert!(text.lines().count() > 10);
}

#[test]
fn reproduce_emits_a_passing_claim_report() {
    let report = run_ok(&["reproduce", "staircase-count"]);
    assert_eq!(report["claim"], "staircase-count");
    assert_eq!(report["pass"], Value::Bool(true));
    assert!(report["details"].is_object());
    assert!(report["version"].is_string());
}
