mod common;

use std::process::Command;

use common::*;

fn kahler() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kahler"))
}

fn shipped() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(scenario_path("x").parent().unwrap())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn every_shipped_scenario_passes() {
    let names = shipped();
    assert!(names.len() >= 15);
    for name in names {
        let doc = run_scenario(&name, &default_opts());
        assert_eq!(doc["schema"], 1, "{name}");
        assert_eq!(doc["summary"]["failed"], 0, "{name}: {}", doc["summary"]);
        for c in doc["checks"].as_array().unwrap() {
            let advisory = c["advisory"] == true;
            assert!(advisory || c["passed"] == true, "{name}/{}: {}", c["label"], c["status"]);
        }
    }
}

#[test]
fn analytic_bound_reports_have_nonnegative_slack() {
    for name in shipped() {
        let doc = run_scenario(&name, &default_opts());
        for c in doc["checks"].as_array().unwrap() {
            if c["record"] != "bound" || c["advisory"] == true || c["status"] == "not_applicable" {
                continue;
            }
            let analytic = c["hypotheses"].as_array().unwrap().iter().all(|h| h["source"] == "analytic");
            if analytic {
                assert!(num(&c["slack"]) >= -1e-8, "{name}/{}: slack {}", c["label"], c["slack"]);
            }
        }
    }
}

#[test]
fn run_prints_report_and_exits_zero() {
    let out = kahler().args(["run"]).arg(scenario_path("boch1_flat_to_ball")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["scenario"], "boch1_flat_to_ball");
    assert_eq!(doc["summary"]["passed"], 3);
}

#[test]
fn output_flag_writes_file_and_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = kahler()
        .args(["run", "--points", "5", "--seed", "99", "--details", "--threads", "2", "--output"])
        .arg(&path)
        .arg(scenario_path("disk_to_ball"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["seed"], 99);
    let boch1 = entry(&doc, "boch1");
    assert_eq!(boch1["points_checked"], 5);
    assert_eq!(boch1["details"].as_array().unwrap().len(), 5);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"name":"too_tight","seed":1,
           "domain":{"catalog":"flat","dim":1},"target":{"catalog":"complex_hyperbolic_ball","dim":2},
           "map":["z1/2","z1^2/2"],"sampler":{"count":20,"radius":0.9},
           "constants":{"K":0.0,"kappa":2.0},"checks":[{"kind":"schwarz"}]}"#,
    )
    .unwrap();
    let out = kahler().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["failed"], 1);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"schema":1,"name":"x","seed":1,"target":{"catalog":"nope","dim":2},"checks":[{"kind":"sandwich"}]}"#)
        .unwrap();
    for args in [vec!["run".to_string(), path.display().to_string()], vec!["run".into(), "/no/such/file.json".into()]] {
        let out = kahler().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let out = kahler().args(["run", "--order", "1"]).arg(scenario_path("disk_to_ball")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = kahler().args(["run", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_for_fixed_seed_and_threads() {
    let run = || kahler().args(["run", "--threads", "3"]).arg(scenario_path("averaging_ball")).output().unwrap().stdout;
    let first = run();
    assert!(!first.is_empty());
    assert_eq!(first, run());
}

#[test]
fn mismatched_dimensions_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dims.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"name":"dims","seed":1,"domain":{"catalog":"flat","dim":1},
           "target":{"catalog":"complex_hyperbolic_ball","dim":2},"map":["z1","z1","z1"],
           "sampler":{"count":5,"radius":0.5},"checks":[{"kind":"boch1"}]}"#,
    )
    .unwrap();
    let out = kahler().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).trim().is_empty());
}

#[test]
fn curvature_subcommand_reports_charts() {
    let out = kahler().arg("curvature").arg(scenario_path("disk_to_ball")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let charts = doc["charts"].as_array().unwrap();
    assert_eq!(charts.len(), 2);
    let h = &charts[0]["holomorphic_sectional"];
    assert!((num(&h[0]) + 2.0).abs() < 1e-8 && (num(&h[1]) + 2.0).abs() < 1e-8);
}

#[test]
fn catalog_list_names_every_model() {
    let out = kahler().args(["catalog", "list"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in kahler::geometry::catalog_names() {
        assert!(text.contains(name));
    }
}
