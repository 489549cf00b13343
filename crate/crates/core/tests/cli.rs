use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recperf"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn rank_report_shape() {
    let out = run(&[
        "rank".as_ref(),
        fixture("reference.json").as_os_str(),
        "--format".as_ref(),
        "json".as_ref(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "rank");
    assert_eq!(v["model"], "elo:400");
    let ratings: Vec<f64> = v["players"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["rating"].as_f64().unwrap())
        .collect();
    assert!((ratings[0] - 127.232).abs() < 1e-3);
    assert!(ratings[1].abs() < 1e-9);
    assert_eq!(v["ranking"], serde_json::json!([["A"], ["B"], ["C"]]));
    assert!(stderr(&out).contains("initial ratings"));
}

#[test]
fn both_methods_agree_on_reference() {
    let out = run(&[
        "rank".as_ref(),
        fixture("reference.csv").as_os_str(),
        "--method".as_ref(),
        "both".as_ref(),
        "--format".as_ref(),
        "json".as_ref(),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["runs"].as_array().unwrap().len(), 2);
    assert!(v["max_method_difference"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["rankings_agree"], true);
}

#[test]
fn team_schedule_needs_direct_solve() {
    let path = fixture("team.json");
    let direct = run(&["rank".as_ref(), path.as_os_str()]);
    assert!(direct.status.success());
    let iterative = run(&[
        "rank".as_ref(),
        path.as_os_str(),
        "--method".as_ref(),
        "iterative".as_ref(),
    ]);
    assert_eq!(iterative.status.code(), Some(7));
    let msg = stderr(&iterative);
    assert!(msg.contains("P2 violated"), "{msg}");
    assert!(msg.contains("--method direct"), "{msg}");
}

#[test]
fn check_reports_structure_and_spectrum() {
    let out = run(&[
        "check".as_ref(),
        fixture("team.json").as_os_str(),
        "--spectral".as_ref(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("P1 satisfied"), "{text}");
    assert!(text.contains("P2 violated"), "{text}");
    assert!(text.contains("agree"), "{text}");

    let out = run(&[
        "check".as_ref(),
        fixture("disconnected.json").as_os_str(),
        "--format".as_ref(),
        "json".as_ref(),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["connected"], false);
    assert_eq!(v["components"], serde_json::json!([["A", "B"], ["C", "D"]]));
}

#[test]
fn error_messages_name_players() {
    let out = run(&["rank".as_ref(), fixture("disconnected.json").as_os_str()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("{A,B} | {C,D}"));

    let out = run(&["rank".as_ref(), fixture("boundary.json").as_os_str()]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).contains("\"C\""));
    assert!(stderr(&out).contains("--clamp-scores"));
}

#[test]
fn clamping_rescues_boundary_scores() {
    let out = run(&[
        "rank".as_ref(),
        fixture("boundary.json").as_os_str(),
        "--clamp-scores".as_ref(),
        "--format".as_ref(),
        "json".as_ref(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        json(&out)["ranking"],
        serde_json::json!([["A", "B"], ["C"]])
    );
}

#[test]
fn slow_iteration_reports_gap() {
    let out = run(&[
        "rank".as_ref(),
        fixture("near_bipartite.json").as_os_str(),
        "--method".as_ref(),
        "iterative".as_ref(),
        "--max-iter".as_ref(),
        "50".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(6));
    assert!(stderr(&out).contains("spectral gap"));
    let out = run(&[
        "rank".as_ref(),
        fixture("near_bipartite.json").as_os_str(),
        "--method".as_ref(),
        "iterative".as_ref(),
    ]);
    assert!(out.status.success());
}

#[test]
fn performance_command() {
    let out = run(&[
        "performance".as_ref(),
        fixture("near_bipartite.json").as_os_str(),
        "--recursive".as_ref(),
        "--format".as_ref(),
        "json".as_ref(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    let rows = v["players"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // every opponent is rated 1500, so performance is 1500 + F⁻¹(s)
    let b = &rows[1];
    assert!((b["performance"].as_f64().unwrap() - 1500.0).abs() < 1e-9);
    assert!(b["recursive"].is_number());
}

#[test]
fn bad_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\"players\": [\"A\", \"B\"],\n  \"matches\": [oops]}",
    )
    .unwrap();
    let out = run(&["rank".as_ref(), bad.as_os_str()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = run(&["rank", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    let out = run(&["rank".as_ref(), missing.as_os_str()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.json");
    std::fs::write(
        &config,
        r#"{"n": 6, "strengths": {"uniform": [1200, 2000]}, "schedule": {"random_pairings": {"games": 60}}, "seed": 3}"#,
    )
    .unwrap();
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate".as_ref(),
            config.as_os_str(),
            "--out".as_ref(),
            out.as_os_str(),
        ]);
        assert!(res.status.success(), "{}", stderr(&res));
    }
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
    let truth_a = std::fs::read(dir.path().join("a.truth.json")).unwrap();
    assert_eq!(
        truth_a,
        std::fs::read(dir.path().join("b.truth.json")).unwrap()
    );

    let out_c = dir.path().join("c.json");
    let res = run(&[
        "simulate".as_ref(),
        config.as_os_str(),
        "--out".as_ref(),
        out_c.as_os_str(),
        "--seed".as_ref(),
        "4".as_ref(),
    ]);
    assert!(res.status.success());
    assert_ne!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_c).unwrap()
    );

    // the generated file is a valid tournament
    let rank = run(&["check".as_ref(), out_a.as_os_str()]);
    assert!(rank.status.success(), "{}", stderr(&rank));
}
