#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use paintplan_core::evaluation::Evaluation;
use paintplan_core::genotype::{ArmAssignment, Layout, UpperSolution};
use paintplan_core::geometry::Vec3;
use paintplan_core::presets;
use paintplan_core::scene::{
    generate_synthetic_scene, ExpansionRule, PanelKind, Scenario, ScenarioConfig, SegmentId, SyntheticSpec,
    VehicleScene,
};
use paintplan_core::seeding::Seeder;
use paintplan_core::sim::{Action, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A desk-sized body with randomized panel counts, jitter and arm layout.
pub fn random_desk_scene(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arms = rng.gen_range(2..=4);
    let spec = SyntheticSpec {
        seed,
        name: format!("random-{seed}"),
        arms_per_side: arms,
        side_panels: (0..5).map(|_| rng.gen_range(8..=14)).collect(),
        hood_segments: rng.gen_range(4..=8),
        roof_segments: rng.gen_range(0..=10),
        back_door_segments: rng.gen_range(4..=8),
        jitter: rng.gen_range(0.0..60.0),
        arm_first_x: rng.gen_range(-800.0..-200.0),
        arm_spacing: rng.gen_range(1200.0..1600.0),
        ..presets::desk_spec()
    };
    let scene = generate_synthetic_scene(&spec).unwrap();
    let mut cfg = presets::desk().config;
    cfg.n_d = ScenarioConfig::default_dummy_count(scene.segments.len(), arms);
    cfg.back_door_rule = rng.gen_bool(0.5);
    Scenario::new(scene, cfg).unwrap()
}

/// At most six strokes, one or two arms per side, with arm placement and
/// cycle time loose enough that both verdicts occur.
pub fn small_scene(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut side_panels = vec![rng.gen_range(1..=3)];
    if rng.gen_bool(0.5) {
        side_panels.push(rng.gen_range(1..=2));
    }
    let used: usize = side_panels.iter().sum();
    let mut extra = [0usize; 3];
    for _ in used..6 {
        if rng.gen_bool(0.4) {
            extra[rng.gen_range(0..3)] += 1;
        }
    }
    let spec = SyntheticSpec {
        seed,
        name: format!("small-{seed}"),
        arms_per_side: rng.gen_range(1..=2),
        side_panels,
        hood_segments: extra[0],
        roof_segments: extra[1],
        back_door_segments: extra[2],
        body_length: 2400.0,
        hood_length: 700.0,
        roof_front: 900.0,
        roof_rear: 1700.0,
        arm_radius: rng.gen_range(1800.0..3200.0),
        arm_first_x: rng.gen_range(-1200.0..200.0),
        arm_spacing: rng.gen_range(200.0..1500.0),
        ..SyntheticSpec::default()
    };
    let scene = generate_synthetic_scene(&spec).unwrap();
    let mut cfg = presets::desk().config;
    cfg.t_p = rng.gen_range(4.0..16.0);
    cfg.t_max = paintplan_core::scene::ticks_for(1.5 * cfg.t_p, cfg.mu);
    cfg.epsilon = rng.gen_range(0..=1);
    cfg.back_door_rule = rng.gen_bool(0.5);
    cfg.n_d = ScenarioConfig::default_dummy_count(scene.segments.len(), spec.arms_per_side);
    Scenario::new(scene, cfg).unwrap()
}

/// A seeded individual (shifted boundaries) or a uniformly random one.
pub fn some_genotype(scenario: &Scenario, rng: &mut ChaCha8Rng) -> UpperSolution {
    let layout = Layout::for_scene(&scenario.scene, &scenario.config);
    if rng.gen_bool(0.5) {
        let seeder = Seeder::new(&scenario.scene, &scenario.config).unwrap();
        let pop = seeder.seeded(scenario.config.delta, 20);
        pop[rng.gen_range(0..pop.len())].clone()
    } else {
        UpperSolution::random(&layout, rng)
    }
}

const EPS: f64 = 1e-6;

/// Head displacement per tick never exceeds the moving speed, and never
/// exceeds the painting speed while painting.
pub fn check_speed(traj: &Trajectory, cfg: &ScenarioConfig) -> Result<(), String> {
    let move_step = cfg.v_mv.max(cfg.v_sp) * cfg.mu;
    let paint_step = cfg.v_sp * cfg.mu;
    for arm in &traj.arms {
        for t in 1..=traj.len() {
            let d = arm.position(t).distance(arm.position(t - 1));
            let limit = if matches!(arm.action(t), Action::Paint(_)) { paint_step } else { move_step };
            if d > limit * (1.0 + 1e-9) + EPS {
                return Err(format!("arm {} tick {t}: moved {d:.6} mm, limit {limit:.6}", arm.arm_id));
            }
        }
    }
    Ok(())
}

fn distance_to_line(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let s = (p - a).dot(ab) / ab.norm_sq();
    p.distance(a + ab * s.clamp(0.0, 1.0))
}

/// Side-specific endpoints of a stroke.
pub fn side_endpoints(scene: &VehicleScene, seg: SegmentId, right: bool) -> (Vec3, Vec3) {
    let s = scene.segment(seg);
    if !right {
        return (s.endpoint_a, s.endpoint_b);
    }
    let panel = scene.panel(s.panel_id);
    let shift = |p: Vec3| match panel.expansion_rule {
        ExpansionRule::Mirror => Vec3::new(p.x, p.y, -p.z),
        _ => Vec3::new(p.x, p.y, p.z - panel.lateral_offset),
    };
    (shift(s.endpoint_a), shift(s.endpoint_b))
}

/// Each stroke is painted in one unbroken block of ticks, by at most one
/// arm per side, along the stroke, ending on an endpoint when complete.
pub fn check_atomicity(eval: &Evaluation, scene: &VehicleScene) -> Result<(), String> {
    let traj = &eval.both.trajectory;
    let n_side = traj.arms.len() / 2;
    let mut painter: BTreeMap<(bool, SegmentId), u32> = BTreeMap::new();
    for (i, arm) in traj.arms.iter().enumerate() {
        let right = i >= n_side;
        let mut blocks: Vec<(SegmentId, u32, u32)> = Vec::new();
        for t in 1..=traj.len() {
            if let Action::Paint(s) = arm.action(t) {
                match blocks.last_mut() {
                    Some(b) if b.0 == s && b.2 + 1 == t => b.2 = t,
                    _ => blocks.push((s, t, t)),
                }
            }
        }
        let mut seen = BTreeSet::new();
        for &(s, t0, t1) in &blocks {
            if !seen.insert(s) {
                return Err(format!("arm {} paints segment {s} in two pieces", arm.arm_id));
            }
            if let Some(other) = painter.insert((right, s), arm.arm_id) {
                return Err(format!("segment {s} painted by arms {other} and {}", arm.arm_id));
            }
            let (a, b) = side_endpoints(scene, s, right);
            let len = a.distance(b);
            for t in t0..=t1 {
                let v = scene.line.to_vehicle(arm.position(t), t, traj.mu);
                if distance_to_line(v, a, b) > EPS * len.max(1.0) {
                    return Err(format!("arm {} tick {t} off segment {s}", arm.arm_id));
                }
            }
            let completed = eval.both.runs[i].iter().find(|r| r.segment == s);
            if let Some(run) = completed {
                if (run.start_tick, run.end_tick) != (t0, t1) {
                    return Err(format!("segment {s}: run ticks disagree with the table"));
                }
                let end = scene.line.to_vehicle(arm.position(t1), t1, traj.mu);
                let far = if run.from_a { b } else { a };
                if end.distance(far) > EPS * len.max(1.0) {
                    return Err(format!("segment {s} does not end on its far endpoint"));
                }
            } else if t1 < traj.len() {
                return Err(format!("segment {s} painted partially before the horizon"));
            }
        }
    }
    Ok(())
}

/// Arms that stop before the horizon end at their center, and once idle
/// at home they stay there.
pub fn check_return_home(traj: &Trajectory) -> Result<(), String> {
    for arm in &traj.arms {
        if let Some(i) = arm.actions.iter().position(|&a| a == Action::Home) {
            if arm.actions[i..].iter().any(|&a| a != Action::Home) {
                return Err(format!("arm {} leaves home after returning", arm.arm_id));
            }
            if arm.positions[i..].iter().any(|&p| p != arm.home) {
                return Err(format!("arm {} is not at its center while home", arm.arm_id));
            }
        }
        if traj.len() < traj.t_max && arm.position(traj.len()) != arm.home {
            return Err(format!("arm {} stops away from home", arm.arm_id));
        }
    }
    Ok(())
}

/// On mirror panels the opposite-side stroke is the planned stroke with z
/// negated; when both sides paint it from the same tick, the heads are
/// exact mirror images throughout.
pub fn check_mirror(eval: &Evaluation, scene: &VehicleScene) -> Result<usize, String> {
    let traj = &eval.both.trajectory;
    let n_side = traj.arms.len() / 2;
    let mut compared = 0;
    for slot in 0..n_side {
        let (left, right) = (&traj.arms[slot], &traj.arms[slot + n_side]);
        if left.home.mirror_z() != right.home {
            return Err(format!("arm {} home is not mirrored", right.arm_id));
        }
        for lr in &eval.both.runs[slot] {
            if scene.panel_of(lr.segment).expansion_rule != ExpansionRule::Mirror {
                continue;
            }
            let Some(rr) = eval.both.runs[slot + n_side].iter().find(|r| r.segment == lr.segment) else {
                continue;
            };
            if rr.from_a != lr.from_a {
                return Err(format!("segment {} painted in opposite directions", lr.segment));
            }
            if rr.start_tick != lr.start_tick {
                continue;
            }
            for t in lr.start_tick..=lr.end_tick {
                let (l, r) = (left.position(t), right.position(t));
                if r.z != -l.z || r.x != l.x || r.y != l.y {
                    return Err(format!("segment {} tick {t}: {r:?} is not the mirror of {l:?}", lr.segment));
                }
            }
            compared += 1;
        }
    }
    Ok(compared)
}

/// Recomputes the strong-feasibility verdict from the trajectory table,
/// the scene and the assignment alone.
pub fn oracle_feasible(
    traj: &Trajectory,
    scene: &VehicleScene,
    cfg: &ScenarioConfig,
    assign: &ArmAssignment,
) -> bool {
    let mu = traj.mu;
    let n_side = traj.arms.len() / 2;
    let len = traj.len();

    let assigned: BTreeSet<SegmentId> = assign.arms.iter().flatten().copied().collect();
    if assigned.len() != scene.segments.len() {
        return false;
    }
    for (i, arm) in traj.arms.iter().enumerate() {
        let cfg_arm = scene.arms.iter().find(|a| a.id == arm.arm_id).unwrap();
        if arm.positions.iter().any(|p| p.distance_sq(cfg_arm.center) > cfg_arm.radius * cfg_arm.radius) {
            return false;
        }
        let right = i >= n_side;
        for &s in &assign.arms[i % n_side] {
            let ticks: Vec<u32> = (1..=len).filter(|&t| arm.action(t) == Action::Paint(s)).collect();
            let Some(&last) = ticks.last() else { return false };
            let (a, b) = side_endpoints(scene, s, right);
            let end = scene.line.to_vehicle(arm.position(last), last, mu);
            if end.distance(a).min(end.distance(b)) > 1e-6 * a.distance(b).max(1.0) {
                return false;
            }
        }
        let last_active = arm.actions.iter().rposition(|&a| a != Action::Home).map_or(0, |i| i + 1);
        if last_active as f64 * mu > cfg.t_p {
            return false;
        }
    }
    for t in 1..=traj.t_max {
        for i in 0..traj.arms.len() {
            for j in i + 1..traj.arms.len() {
                if traj.arms[i].position(t).distance(traj.arms[j].position(t)) < cfg.gamma_col {
                    return false;
                }
            }
        }
    }
    for side in [0..n_side, n_side..2 * n_side] {
        let mut start: BTreeMap<SegmentId, (u32, u32)> = BTreeMap::new();
        for i in side {
            let row = scene.arms.iter().find(|a| a.id == traj.arms[i].arm_id).unwrap().row;
            for t in 1..=len {
                if let Action::Paint(s) = traj.arms[i].action(t) {
                    start.entry(s).or_insert((t, row));
                }
            }
        }
        for panel in &scene.panels {
            let mut segs = panel.segments.clone();
            segs.sort_by_key(|&s| scene.segment(s).height_index);
            if panel.kind.is_vertical() {
                let inversions = segs
                    .windows(2)
                    .filter(|w| match (start.get(&w[0]), start.get(&w[1])) {
                        (Some(lo), Some(hi)) => lo.0 >= hi.0,
                        _ => true,
                    })
                    .count();
                if inversions > cfg.epsilon as usize {
                    return false;
                }
            }
            let starts: Vec<(u32, u32)> = segs.iter().filter_map(|s| start.get(s).copied()).collect();
            if let Some(&(front_t, _)) = starts.iter().min_by_key(|(t, row)| (*row, *t)) {
                if starts.iter().any(|&(t, _)| t < front_t) {
                    return false;
                }
            }
        }
    }
    if cfg.back_door_rule {
        let last_row = scene.arms.iter().map(|a| a.row).max().unwrap();
        let slot = scene.arms.iter().filter(|a| a.side == paintplan_core::scene::ArmSide::Left && a.row < last_row).count();
        if assign.arms[slot].iter().any(|&s| scene.panel_of(s).kind == PanelKind::BackDoor) {
            return false;
        }
    }
    true
}
