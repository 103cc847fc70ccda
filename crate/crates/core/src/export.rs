//! Output files: genotype, trajectory table, report, trace, route drawing,
//! and the assignment format read by `audit`.
//!
//! Every output carries the configuration hash and seed. Nothing depends on
//! wall-clock time, so identical runs produce identical bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::evaluation::{Evaluation, EvaluationReport};
use crate::ga::{GaConfig, RunTrace};
use crate::genotype::{decode, validate, ArmAssignment, Layout, UpperSolution};
use crate::scene::{Scenario, SegmentId, VehicleScene};
use crate::sim::{SimMetrics, Trajectory};

pub const OUTPUT_VERSION: u32 = 1;

/// Hex SHA-256 over the scenario file text and the GA settings. The
/// worker count is left out since it cannot change results.
pub fn config_hash(scenario: &Scenario, ga: Option<&GaConfig>) -> String {
    let mut h = Sha256::new();
    h.update(scenario.to_toml().as_bytes());
    if let Some(ga) = ga {
        let ga = GaConfig { workers: None, ..ga.clone() };
        h.update(serde_json::to_string(&ga).expect("plain data").as_bytes());
    }
    hex::encode(h.finalize())
}

/// Provenance stamped into every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub config_hash: String,
    pub seed: Option<u64>,
}

impl Stamp {
    fn header(&self) -> String {
        match self.seed {
            Some(s) => format!("# config_hash={} seed={}\n", self.config_hash, s),
            None => format!("# config_hash={}\n", self.config_hash),
        }
    }
}

#[derive(Serialize)]
struct GenotypeDoc<'a> {
    format_version: u32,
    #[serde(flatten)]
    stamp: &'a Stamp,
    genes: &'a UpperSolution,
    arms: &'a [Vec<SegmentId>],
}

pub fn genotype_json(x: &UpperSolution, layout: &Layout, stamp: &Stamp) -> String {
    let assign = decode(x, layout);
    let doc = GenotypeDoc {
        format_version: OUTPUT_VERSION,
        stamp,
        genes: x,
        arms: &assign.arms,
    };
    serde_json::to_string_pretty(&doc).expect("plain data") + "\n"
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    format_version: u32,
    #[serde(flatten)]
    stamp: &'a Stamp,
    report: &'a EvaluationReport,
    metrics: &'a SimMetrics,
}

pub fn report_json(eval: &Evaluation, stamp: &Stamp) -> String {
    let doc = ReportDoc {
        format_version: OUTPUT_VERSION,
        stamp,
        report: &eval.report,
        metrics: &eval.both.metrics,
    };
    serde_json::to_string_pretty(&doc).expect("plain data") + "\n"
}

/// One row per arm and stored tick, world-frame millimetres.
pub fn trajectory_csv(traj: &Trajectory, stamp: &Stamp) -> String {
    let mut out = stamp.header();
    out.push_str("arm,tick,t,x,y,z,action,segment\n");
    for arm in &traj.arms {
        for (i, (p, a)) in arm.positions.iter().zip(&arm.actions).enumerate() {
            let tick = i + 1;
            let seg = a.segment().map_or(String::new(), |s| s.to_string());
            let _ = writeln!(
                out,
                "{},{},{:.2},{:.3},{:.3},{:.3},{},{}",
                arm.arm_id,
                tick,
                tick as f64 * traj.mu,
                p.x,
                p.y,
                p.z,
                a.name(),
                seg
            );
        }
    }
    out
}

pub fn trace_csv(trace: &RunTrace, stamp: &Stamp) -> String {
    let mut out = stamp.header();
    out.push_str("generation,best_objective,mean_objective,best_feasible\n");
    for g in &trace.generations {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{}",
            g.generation, g.best_objective, g.mean_objective, g.best_feasible
        );
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

/// Top (x–z) and side (x–y) views of the painted strokes in the vehicle
/// frame, one color per arm row.
pub fn routes_svg(scene: &VehicleScene, traj: &Trajectory, stamp: &Stamp) -> String {
    let (w, h_view, margin) = (900.0, 300.0, 30.0);
    let pts = scene
        .segments
        .iter()
        .flat_map(|s| [s.endpoint_a, s.endpoint_b]);
    let (mut x0, mut x1, mut z_abs, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, f64::MAX, f64::MIN);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        z_abs = z_abs.max(p.z.abs());
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let z_abs = z_abs.max(1.0) * 1.1;
    let sx = (w - 2.0 * margin) / (x1 - x0).max(1.0);
    let sz = (h_view - 2.0 * margin) / (2.0 * z_abs);
    let sy = (h_view - 2.0 * margin) / (y1 - y0).max(1.0);
    // Front of the body on the left.
    let px = |x: f64| margin + (x1 - x) * sx;
    let top = |z: f64| margin + (z_abs - z) * sz;
    let side = |y: f64| h_view + margin + (y1 - y) * sy;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{}\" viewBox=\"0 0 {w} {}\">",
        2.0 * h_view,
        2.0 * h_view
    );
    let _ = writeln!(out, "<!-- config_hash={} seed={} -->", stamp.config_hash, stamp.seed.map_or("none".into(), |s| s.to_string()));
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(out, "<text x=\"{margin}\" y=\"18\" font-size=\"13\" font-family=\"sans-serif\">top view</text>");
    let _ = writeln!(out, "<text x=\"{margin}\" y=\"{}\" font-size=\"13\" font-family=\"sans-serif\">side view (planned side)</text>", h_view + 18.0);
    for row in 1..=scene.n_arms_side() {
        let _ = writeln!(
            out,
            "<text x=\"{:.0}\" y=\"18\" font-size=\"12\" font-family=\"sans-serif\" fill=\"{}\">arm {row}</text>",
            w - margin - 60.0 * (scene.n_arms_side() + 1 - row) as f64,
            PALETTE[(row - 1) % PALETTE.len()]
        );
    }
    for s in &scene.segments {
        let (a, b) = (s.endpoint_a, s.endpoint_b);
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#ddd\" stroke-width=\"1\"/>",
            px(a.x), top(a.z), px(b.x), top(b.z)
        );
    }
    for arm in &traj.arms {
        let row = scene.arm(arm.arm_id).map_or(1, |a| a.row) as usize;
        let color = PALETTE[(row - 1) % PALETTE.len()];
        let planned = scene.arm(arm.arm_id).is_some_and(|a| a.side == crate::scene::ArmSide::Left);
        let mut run: Vec<(f64, f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64, f64)>, out: &mut String| {
            if run.len() > 1 {
                let top_pts: Vec<String> = run.iter().map(|&(x, _, z)| format!("{:.1},{:.1}", px(x), top(z))).collect();
                let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>", top_pts.join(" "));
                if planned {
                    let side_pts: Vec<String> = run.iter().map(|&(x, y, _)| format!("{:.1},{:.1}", px(x), side(y))).collect();
                    let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>", side_pts.join(" "));
                }
            }
            run.clear();
        };
        let mut current = None;
        for (i, (p, a)) in arm.positions.iter().zip(&arm.actions).enumerate() {
            let seg = a.segment();
            if seg != current {
                flush(&mut run, &mut out);
                current = seg;
            }
            if seg.is_some() {
                let v = scene.line.to_vehicle(*p, i as u32 + 1, traj.mu);
                run.push((v.x, v.y, v.z));
            }
        }
        flush(&mut run, &mut out);
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("malformed assignment: {0}")]
    Parse(String),
    #[error("assignment lists {got} arms, scene has {want} per side")]
    ArmCount { got: usize, want: usize },
    #[error("unknown segment id {0}")]
    UnknownSegment(SegmentId),
    #[error("segment id {0} listed more than once")]
    Duplicate(SegmentId),
    #[error("invalid genotype: {0}")]
    Genotype(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AssignmentDoc {
    Arms { arms: Vec<Vec<SegmentId>> },
    Genes { genes: Vec<SegmentId> },
}

/// Reads `{"arms": [[...], ...]}` (planned-side arms in row order) or
/// `{"genes": [...]}` (a full genotype). Omitted segments are allowed in
/// the first form and score as unpainted.
pub fn parse_assignment(text: &str, scene: &VehicleScene, layout: &Layout) -> Result<ArmAssignment, AssignmentError> {
    let doc: AssignmentDoc = serde_json::from_str(text).map_err(|e| AssignmentError::Parse(e.to_string()))?;
    match doc {
        AssignmentDoc::Arms { arms } => {
            if arms.len() != layout.n_arms_side {
                return Err(AssignmentError::ArmCount {
                    got: arms.len(),
                    want: layout.n_arms_side,
                });
            }
            let mut seen = BTreeSet::new();
            for &s in arms.iter().flatten() {
                if s == 0 || s as usize > scene.n_segs() {
                    return Err(AssignmentError::UnknownSegment(s));
                }
                if !seen.insert(s) {
                    return Err(AssignmentError::Duplicate(s));
                }
            }
            Ok(ArmAssignment { arms })
        }
        AssignmentDoc::Genes { genes } => {
            let x = UpperSolution::new(genes);
            validate(&x, layout).map_err(|e| AssignmentError::Genotype(e.to_string()))?;
            Ok(decode(&x, layout))
        }
    }
}
