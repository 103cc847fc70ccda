//! Penalized objective and constraint audit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::genotype::{decode, ArmAssignment, Layout, UpperSolution};
use crate::scene::{PanelId, PanelKind, Scenario, ScenarioConfig, SegmentId, VehicleScene};
use crate::sim::{
    expand_to_both_sides, simulate_one_side, BothSidesResult, OneSideResult, PaintRun,
    SimContext, SimMetrics,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub objective: f64,
    pub work_time_max: f64,
    pub penalty_range: f64,
    pub penalty_collision: f64,
    pub penalty_order: f64,
    pub order_violation_count: BTreeMap<PanelId, u32>,
    pub strong_feasible: bool,
    /// One line per violated strong constraint.
    pub violations: Vec<String>,
    pub weak_notes: Vec<String>,
}

/// `Σ_a (ρ_out t_out(a) + ρ_unvisits n_unvisits(a))`.
pub fn range_penalty(metrics: &SimMetrics, cfg: &ScenarioConfig) -> f64 {
    metrics
        .t_out
        .iter()
        .zip(&metrics.n_unvisits)
        .map(|(&t, &n)| cfg.rho_out * t + cfg.rho_unvisits * f64::from(n))
        .sum()
}

pub fn collision_penalty(metrics: &SimMetrics, cfg: &ScenarioConfig) -> f64 {
    cfg.rho_col * metrics.t_col
}

/// Per panel, the number of adjacent height pairs not started strictly
/// bottom-to-top. A pair with an unpainted member counts as inverted.
pub fn order_violations(
    start_times: &BTreeMap<SegmentId, f64>,
    scene: &VehicleScene,
) -> BTreeMap<PanelId, u32> {
    scene
        .panels
        .iter()
        .map(|panel| {
            let mut segs = panel.segments.clone();
            segs.sort_by_key(|&s| scene.segment(s).height_index);
            let count = segs
                .windows(2)
                .filter(|w| match (start_times.get(&w[0]), start_times.get(&w[1])) {
                    (Some(lo), Some(hi)) => lo >= hi,
                    _ => true,
                })
                .count() as u32;
            (panel.id, count)
        })
        .collect()
}

/// Inversions beyond `ε` on vertically mounted panels.
pub fn order_excess(counts: &BTreeMap<PanelId, u32>, scene: &VehicleScene, epsilon: u32) -> u32 {
    counts
        .iter()
        .filter(|(&p, _)| scene.panel(p).kind.is_vertical())
        .map(|(_, &c)| c.saturating_sub(epsilon))
        .sum()
}

/// Panels on which a rear arm starts before the front-most arm painting it.
fn front_arm_violations(runs: &[Vec<PaintRun>], rows: &[u32], scene: &VehicleScene) -> Vec<PanelId> {
    let mut first: BTreeMap<PanelId, Vec<(u32, u32)>> = BTreeMap::new();
    for (arm_runs, &row) in runs.iter().zip(rows) {
        let mut seen: BTreeMap<PanelId, u32> = BTreeMap::new();
        for r in arm_runs {
            seen.entry(scene.segment(r.segment).panel_id)
                .or_insert(r.start_tick);
        }
        for (p, t) in seen {
            first.entry(p).or_default().push((row, t));
        }
    }
    first
        .into_iter()
        .filter(|(_, starts)| {
            let Some(&(_, front_start)) = starts.iter().min_by_key(|(row, _)| *row) else {
                return false;
            };
            starts.iter().any(|&(_, t)| t < front_start)
        })
        .map(|(p, _)| p)
        .collect()
}

/// Builds the report from a finished two-sided simulation.
pub fn report_from(
    metrics: &SimMetrics,
    assign: &ArmAssignment,
    both: &BothSidesResult,
    ctx: &SimContext<'_>,
) -> EvaluationReport {
    let scene = ctx.scene;
    let cfg = ctx.cfg;
    let work_time_max = metrics.t_a.iter().copied().fold(0.0, f64::max);
    let penalty_range =
        range_penalty(metrics, cfg) + cfg.rho_unvisits * f64::from(metrics.unassigned);
    let penalty_collision = collision_penalty(metrics, cfg);
    let excess = order_excess(&metrics.order_violations, scene, cfg.epsilon);
    let penalty_order = cfg.rho_unvisits * f64::from(excess);

    let mut violations = Vec::new();
    for (i, id) in metrics.arm_ids.iter().enumerate() {
        if metrics.t_out[i] > 0.0 {
            violations.push(format!("arm {id} outside its range for {:.2} s", metrics.t_out[i]));
        }
        if metrics.n_unvisits[i] > 0 {
            violations.push(format!("arm {id} left {} segments unpainted", metrics.n_unvisits[i]));
        }
    }
    if metrics.unassigned > 0 {
        violations.push(format!("{} segment copies unassigned", metrics.unassigned));
    }
    if metrics.t_col > 0.0 {
        violations.push(format!("heads closer than gamma_col for {:.2} s", metrics.t_col));
    }
    for (&p, &c) in &metrics.order_violations {
        if scene.panel(p).kind.is_vertical() && c > cfg.epsilon {
            violations.push(format!("panel {p} has {c} bottom-to-top inversions"));
        }
    }
    if cfg.back_door_rule {
        let last = scene.last_arm_slot();
        let n = assign.arms.get(last).map_or(0, |slot| {
            slot.iter()
                .filter(|&&s| scene.panel_of(s).kind == PanelKind::BackDoor)
                .count()
        });
        if n > 0 {
            violations.push(format!("last arm assigned {n} back-door segments"));
        }
    }
    let rows: Vec<u32> = metrics
        .arm_ids
        .iter()
        .map(|&id| scene.arm(id).map_or(0, |a| a.row))
        .collect();
    let n_side = ctx.n_slots();
    for (range, label) in [(0..n_side, "planned"), (n_side..rows.len(), "opposite")] {
        let runs = &both.runs[range.clone()];
        for p in front_arm_violations(runs, &rows[range], scene) {
            violations.push(format!("panel {p} ({label} side) not started by its front arm"));
        }
    }
    if work_time_max > cfg.t_p {
        violations.push(format!(
            "work time {work_time_max:.2} s exceeds t_p {:.2} s",
            cfg.t_p
        ));
    }

    let mut weak_notes = Vec::new();
    for panel in &scene.panels {
        let arms = assign
            .arms
            .iter()
            .filter(|slot| slot.iter().any(|&s| scene.segment(s).panel_id == panel.id))
            .count();
        if arms > 1 {
            weak_notes.push(format!("panel {} painted by {arms} arms", panel.id));
        }
    }

    EvaluationReport {
        objective: work_time_max + penalty_range + penalty_collision + penalty_order,
        work_time_max,
        penalty_range,
        penalty_collision,
        penalty_order,
        order_violation_count: metrics.order_violations.clone(),
        strong_feasible: violations.is_empty(),
        violations,
        weak_notes,
    }
}

/// Everything produced while scoring one assignment.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub assignment: ArmAssignment,
    pub one_side: OneSideResult,
    pub both: BothSidesResult,
    pub report: EvaluationReport,
}

/// Scores genotypes of one scenario, sharing the per-scenario setup.
#[derive(Debug)]
pub struct Evaluator<'a> {
    pub scenario: &'a Scenario,
    pub ctx: SimContext<'a>,
    pub layout: Layout,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            ctx: SimContext::new(&scenario.scene, &scenario.config),
            layout: Layout::for_scene(&scenario.scene, &scenario.config),
        }
    }

    pub fn evaluate(&self, x: &UpperSolution) -> EvaluationReport {
        self.evaluate_full(x).report
    }

    pub fn evaluate_full(&self, x: &UpperSolution) -> Evaluation {
        self.audit(&decode(x, &self.layout))
    }

    /// Scores an externally supplied assignment. Segments it omits count as
    /// unpainted on both sides.
    pub fn audit(&self, assign: &ArmAssignment) -> Evaluation {
        let one_side = simulate_one_side(assign, &self.ctx);
        let both = expand_to_both_sides(&one_side, &self.ctx);
        let report = report_from(&both.metrics, assign, &both, &self.ctx);
        Evaluation {
            assignment: assign.clone(),
            one_side,
            both,
            report,
        }
    }
}

pub fn evaluate(x: &UpperSolution, scenario: &Scenario) -> EvaluationReport {
    Evaluator::new(scenario).evaluate(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(t_out: &[f64], unvisits: &[u32], t_col: f64) -> SimMetrics {
        SimMetrics {
            t_out: t_out.to_vec(),
            n_unvisits: unvisits.to_vec(),
            t_col,
            ..SimMetrics::default()
        }
    }

    #[test]
    fn range_penalty_values() {
        let cfg = ScenarioConfig::default();
        assert_eq!(range_penalty(&metrics(&[0.0, 0.0], &[0, 0], 0.0), &cfg), 0.0);
        assert_eq!(range_penalty(&metrics(&[1.5], &[2], 0.0), &cfg), 20750.0);
        assert_eq!(range_penalty(&metrics(&[1.0, 1.0], &[0, 0], 0.0), &cfg), 1000.0);
    }

    #[test]
    fn collision_penalty_values() {
        let cfg = ScenarioConfig::default();
        assert_eq!(collision_penalty(&metrics(&[], &[], 0.0), &cfg), 0.0);
        assert!((collision_penalty(&metrics(&[], &[], 0.30), &cfg) - 300.0).abs() < 1e-9);
        assert_eq!(collision_penalty(&metrics(&[], &[], 1.0), &cfg), 1000.0);
    }

    fn three_high_panel() -> VehicleScene {
        use crate::geometry::Vec3;
        use crate::scene::*;
        let mut scene = VehicleScene {
            name: String::new(),
            line: LineKinematics {
                velocity: 100.0,
                direction: Vec3::UNIT_X,
                reference_position: 0.0,
            },
            arms: vec![
                ArmConfig {
                    id: 1,
                    center: Vec3::new(0.0, 0.0, 1000.0),
                    radius: 2800.0,
                    row: 1,
                    side: ArmSide::Left,
                    mirror_partner: 2,
                },
                ArmConfig {
                    id: 2,
                    center: Vec3::new(0.0, 0.0, -1000.0),
                    radius: 2800.0,
                    row: 1,
                    side: ArmSide::Right,
                    mirror_partner: 1,
                },
            ],
            panels: vec![Panel {
                id: 1,
                kind: PanelKind::VerticalSide,
                expansion_rule: ExpansionRule::Mirror,
                normal: Vec3::new(0.0, 0.0, 1.0),
                lateral_offset: 0.0,
                delay_ticks: None,
                segments: vec![],
            }],
            segments: (1..=3)
                .map(|h| PaintSegment {
                    id: h,
                    panel_id: 1,
                    endpoint_a: Vec3::new(0.0, 100.0 * f64::from(h), 500.0),
                    endpoint_b: Vec3::new(-500.0, 100.0 * f64::from(h), 500.0),
                    height_index: h,
                    side: Side::Left,
                })
                .collect(),
        };
        scene.validate().unwrap();
        scene
    }

    fn times(v: &[f64]) -> BTreeMap<SegmentId, f64> {
        v.iter()
            .enumerate()
            .map(|(i, &t)| (i as SegmentId + 1, t))
            .collect()
    }

    #[test]
    fn adjacent_pair_inversions() {
        let scene = three_high_panel();
        assert_eq!(order_violations(&times(&[1.0, 2.0, 3.0]), &scene)[&1], 0);
        assert_eq!(order_violations(&times(&[3.0, 1.0, 2.0]), &scene)[&1], 1);
        assert_eq!(order_violations(&times(&[3.0, 2.0, 1.0]), &scene)[&1], 2);
        assert_eq!(order_violations(&times(&[1.0, 1.0, 2.0]), &scene)[&1], 1);
    }

    #[test]
    fn unpainted_segment_breaks_both_pairs() {
        let scene = three_high_panel();
        let mut t = times(&[1.0, 2.0, 3.0]);
        t.remove(&2);
        assert_eq!(order_violations(&t, &scene)[&1], 2);
    }

    #[test]
    fn epsilon_threshold() {
        let scene = three_high_panel();
        let one = order_violations(&times(&[3.0, 1.0, 2.0]), &scene);
        let two = order_violations(&times(&[3.0, 2.0, 1.0]), &scene);
        assert_eq!(order_excess(&one, &scene, 1), 0);
        assert_eq!(order_excess(&two, &scene, 1), 1);
    }
}
