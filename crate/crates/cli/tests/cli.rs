use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn paintplan(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paintplan"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn report_field(text: &str, key: &str) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    v["report"][key].clone()
}

#[test]
fn solve_writes_all_outputs_and_audit_reproduces_objective() {
    let dir = tempfile::tempdir().unwrap();
    let out = paintplan(
        &["solve", "--preset", "desk", "--pop", "40", "--gens", "15", "--seed", "3", "--out", "run", "--dump-seeds"],
        dir.path(),
    );
    let code = out.status.code().unwrap();
    assert!(code == 0 || code == 1, "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    for f in ["scenario.toml", "genotype.json", "trajectory.csv", "report.json", "trace.csv", "routes.svg", "seeds.json"] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    let report = fs::read_to_string(run.join("report.json")).unwrap();
    assert_eq!(code == 0, report_field(&report, "strong_feasible") == true);
    let trace = fs::read_to_string(run.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2 + 16);

    // The echoed scenario file loads back and scores the genotype the same.
    let audit = paintplan(&["audit", "run/scenario.toml", "--assignment", "run/genotype.json"], dir.path());
    assert!(matches!(audit.status.code(), Some(0 | 1)));
    let audited = String::from_utf8(audit.stdout).unwrap();
    assert_eq!(report_field(&audited, "objective"), report_field(&report, "objective"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (name, workers) in [("a", "1"), ("b", "2")] {
        paintplan(
            &["solve", "--preset", "desk", "--pop", "20", "--gens", "3", "--seed", "9", "--workers", workers, "--out", name],
            dir.path(),
        );
    }
    for f in ["genotype.json", "trajectory.csv", "report.json", "trace.csv", "routes.svg"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn no_generations_without_seeding_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = paintplan(
        &["solve", "--preset", "desk", "--pop", "10", "--gens", "0", "--method", "M1", "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["solve", "missing.toml"],
        &["solve", "--preset", "nope"],
        &["solve", "--preset", "desk", "--pop", "7"],
        &["solve", "--preset", "desk", "--method", "M9"],
        &["solve"],
    ];
    for args in cases {
        let out = paintplan(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn audit_rejects_unknown_segments_and_scores_empty_plans() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"arms": [[1, 5000], [], []]}"#).unwrap();
    let out = paintplan(&["audit", "--preset", "desk", "--assignment", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("5000"));

    fs::write(dir.path().join("empty.json"), r#"{"arms": [[], [], []]}"#).unwrap();
    let out = paintplan(&["audit", "--preset", "desk", "--assignment", "empty.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let objective = report_field(&text, "objective").as_f64().unwrap();
    assert!(objective >= 80.0 * 1.0e4);
}

#[test]
fn audit_flags_inverted_panel_order() {
    let dir = tempfile::tempdir().unwrap();
    let toml = String::from_utf8(paintplan(&["preset", "desk"], dir.path()).stdout).unwrap();
    fs::write(dir.path().join("desk.toml"), &toml).unwrap();
    let scenario = paintplan_core::scene::parse_scenario(&toml).unwrap();
    let panel = scenario
        .scene
        .panels
        .iter()
        .find(|p| p.kind == paintplan_core::scene::PanelKind::VerticalSide)
        .unwrap();
    let mut ids = panel.segments.clone();
    ids.sort_by_key(|&s| std::cmp::Reverse(scenario.scene.segment(s).height_index));
    let doc = serde_json::json!({ "arms": [ids, [], []] });
    fs::write(dir.path().join("inv.json"), doc.to_string()).unwrap();
    let out = paintplan(&["audit", "desk.toml", "--assignment", "inv.json"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let counts = report_field(&text, "order_violation_count");
    let on_panel = counts[panel.id.to_string()].as_u64().unwrap();
    assert!(on_panel >= 1, "{counts}");
}

#[test]
fn ablation_single_method_single_seed_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = paintplan(
        &["ablation", "--preset", "desk", "--pop", "10", "--gens", "2", "--seeds", "4", "--methods", "M2", "--out", "ab"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = fs::read_to_string(dir.path().join("ab/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 2);
    assert!(runs.lines().nth(1).unwrap().starts_with("M2,4,"));
    let curves = fs::read_to_string(dir.path().join("ab/curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + 3);
}
