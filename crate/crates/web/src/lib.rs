//! Browser bindings: draw a preset body, optimize it, or score a
//! hand-written assignment. Results come back as JSON strings.

use paintplan_core::ablation::method_by_name;
use paintplan_core::export::{config_hash, parse_assignment, routes_svg, Stamp};
use paintplan_core::ga::{self, GaConfig};
use paintplan_core::sim::Trajectory;
use paintplan_core::{presets, EvaluationReport, Evaluator, Layout, Scenario};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn preset(name: &str) -> Result<Scenario, String> {
    presets::by_name(name).ok_or_else(|| format!("unknown preset {name:?}"))
}

#[derive(Serialize)]
struct SceneInfo {
    name: String,
    segments: usize,
    arms_per_side: usize,
    cycle_time: f64,
    svg: String,
}

#[derive(Serialize)]
struct Solved {
    report: EvaluationReport,
    first_feasible: Option<usize>,
    trace: Vec<f64>,
    arms: Vec<Vec<u32>>,
    svg: String,
}

#[derive(Serialize)]
struct Audited {
    report: EvaluationReport,
    svg: String,
}

pub fn scene_json(name: &str) -> Result<String, String> {
    let s = preset(name)?;
    let empty = Trajectory {
        mu: s.config.mu,
        t_max: s.config.t_max,
        arms: Vec::new(),
    };
    let stamp = Stamp {
        config_hash: config_hash(&s, None),
        seed: None,
    };
    let info = SceneInfo {
        name: s.scene.name.clone(),
        segments: s.scene.n_segs(),
        arms_per_side: s.scene.n_arms_side(),
        cycle_time: s.config.t_p,
        svg: routes_svg(&s.scene, &empty, &stamp),
    };
    serde_json::to_string(&info).map_err(|e| e.to_string())
}

pub fn solve_json(name: &str, seed: u32, pop: u32, gens: u32, method: &str) -> Result<String, String> {
    let s = preset(name)?;
    let m = method_by_name(method).ok_or_else(|| format!("unknown method {method:?}"))?;
    let cfg = GaConfig {
        n_pop: pop as usize,
        n_gen: gens as usize,
        seed: u64::from(seed),
        methods: m.flags,
        ..GaConfig::default()
    };
    let result = ga::run(&s, &cfg, None).map_err(|e| e.to_string())?;
    let evaluator = Evaluator::new(&s);
    let eval = evaluator.evaluate_full(&result.best);
    let stamp = Stamp {
        config_hash: config_hash(&s, Some(&cfg)),
        seed: Some(cfg.seed),
    };
    let out = Solved {
        first_feasible: result.trace.first_feasible(),
        trace: result.trace.generations.iter().map(|g| g.best_objective).collect(),
        arms: eval.assignment.arms.clone(),
        svg: routes_svg(&s.scene, &eval.both.trajectory, &stamp),
        report: eval.report,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn audit_json(name: &str, assignment: &str) -> Result<String, String> {
    let s = preset(name)?;
    let layout = Layout::for_scene(&s.scene, &s.config);
    let assign = parse_assignment(assignment, &s.scene, &layout).map_err(|e| e.to_string())?;
    let eval = Evaluator::new(&s).audit(&assign);
    let stamp = Stamp {
        config_hash: config_hash(&s, None),
        seed: None,
    };
    let out = Audited {
        svg: routes_svg(&s.scene, &eval.both.trajectory, &stamp),
        report: eval.report,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Scene summary and an outline drawing of its strokes.
#[wasm_bindgen]
pub fn scene(name: &str) -> Result<String, JsError> {
    scene_json(name).map_err(|e| JsError::new(&e))
}

/// Runs the optimizer and returns the best plan's report, trace and drawing.
#[wasm_bindgen]
pub fn solve(name: &str, seed: u32, pop: u32, gens: u32, method: &str) -> Result<String, JsError> {
    solve_json(name, seed, pop, gens, method).map_err(|e| JsError::new(&e))
}

/// Scores an `{"arms": [[...]]}` or `{"genes": [...]}` assignment.
#[wasm_bindgen]
pub fn audit(name: &str, assignment: &str) -> Result<String, JsError> {
    audit_json(name, assignment).map_err(|e| JsError::new(&e))
}
