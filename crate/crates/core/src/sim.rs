//! Lower-layer greedy route builder.
//!
//! Each arm walks its assigned segments in order, one tick at a time. Per
//! tick the branch order is: finished arms head home; a painting arm keeps
//! painting; an arm crossing to a panel with a different surface normal
//! waits for the head to turn; an arm whose next segment lies wholly inside
//! its sphere moves to (or starts painting from) the nearer endpoint;
//! otherwise it waits. A segment whose reach window has passed is skipped
//! and counted as unvisited.
//!
//! All arm speeds are world-frame speeds. While painting, the head follows
//! the moving segment at the constant vehicle-relative rate that makes its
//! world speed exactly `v_sp`.
//!
//! The opposite side is produced by replaying the planned-side visit order
//! on the opposite arms (mirror or lateral-shift copies of each segment)
//! in lockstep with the planned side. Paired arms are held at their start
//! points until both are ready, once per panel block on mirror panels and
//! once per stroke on parallel panels; under `parallel_with_delay` the
//! opposite arm starts the block a fixed number of ticks later.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{step_toward, Vec3};
use crate::genotype::ArmAssignment;
use crate::scene::{
    reach_window, ArmConfig, ArmId, ArmSide, ExpansionRule, PanelId, ScenarioConfig, SegmentId,
    Tick, VehicleScene,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Wait,
    Move,
    Paint(SegmentId),
    Reorient,
    Home,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Wait => "wait",
            Action::Move => "move",
            Action::Paint(_) => "paint",
            Action::Reorient => "reorient",
            Action::Home => "home",
        }
    }

    pub fn segment(self) -> Option<SegmentId> {
        match self {
            Action::Paint(s) => Some(s),
            _ => None,
        }
    }
}

/// Timed head path of one arm. Entry `i` is tick `i + 1`; ticks past the
/// stored range are implicitly `Home` at the arm center.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmTrack {
    pub arm_id: ArmId,
    pub side: ArmSide,
    pub home: Vec3,
    pub positions: Vec<Vec3>,
    pub actions: Vec<Action>,
}

impl ArmTrack {
    fn new(arm: &ArmConfig) -> Self {
        Self {
            arm_id: arm.id,
            side: arm.side,
            home: arm.center,
            positions: Vec::new(),
            actions: Vec::new(),
        }
    }

    /// Head position at tick `t`; tick 0 is the home position.
    pub fn position(&self, t: Tick) -> Vec3 {
        if t == 0 {
            return self.home;
        }
        self.positions
            .get(t as usize - 1)
            .copied()
            .unwrap_or(self.home)
    }

    pub fn action(&self, t: Tick) -> Action {
        if t == 0 {
            return Action::Home;
        }
        self.actions
            .get(t as usize - 1)
            .copied()
            .unwrap_or(Action::Home)
    }

    /// Last tick not spent idle at home, or 0.
    pub fn last_active_tick(&self) -> Tick {
        self.actions
            .iter()
            .rposition(|&a| a != Action::Home)
            .map_or(0, |i| i as Tick + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mu: f64,
    pub t_max: Tick,
    pub arms: Vec<ArmTrack>,
}

impl Trajectory {
    /// Number of stored ticks (the same for every arm).
    pub fn len(&self) -> Tick {
        self.arms
            .iter()
            .map(|a| a.positions.len() as Tick)
            .max()
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arm_index(&self, id: ArmId) -> Option<usize> {
        self.arms.iter().position(|a| a.arm_id == id)
    }
}

/// One completed paint pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaintRun {
    pub segment: SegmentId,
    /// First tick with a `Paint` action.
    pub start_tick: Tick,
    pub end_tick: Tick,
    /// Painted from endpoint `a` toward `b`.
    pub from_a: bool,
}

/// Audit quantities collected while building routes. Per-arm vectors are
/// indexed like `Trajectory::arms`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimMetrics {
    pub arm_ids: Vec<ArmId>,
    pub t_a: Vec<f64>,
    pub t_out: Vec<f64>,
    pub n_unvisits: Vec<u32>,
    pub t_col: f64,
    /// Planned-side segment id to painting start time, seconds.
    pub paint_start_times: BTreeMap<SegmentId, f64>,
    /// Same for the opposite-side copies (empty for one-side runs).
    pub opposite_start_times: BTreeMap<SegmentId, f64>,
    /// Bottom-to-top inversions per panel, worst of both sides.
    pub order_violations: BTreeMap<PanelId, u32>,
    /// Segments absent from the assignment, counted once per side.
    pub unassigned: u32,
}

/// Per-scenario data shared by every simulation: task geometry, relative
/// paint rates and reach windows for both sides.
#[derive(Debug)]
pub struct SimContext<'a> {
    pub scene: &'a VehicleScene,
    pub cfg: &'a ScenarioConfig,
    pub left_arms: Vec<&'a ArmConfig>,
    pub right_arms: Vec<&'a ArmConfig>,
    segs: Vec<SegGeom>,
    /// `[slot][segment id - 1]`
    reach_left: Vec<Vec<Option<(Tick, Tick)>>>,
    reach_right: Vec<Vec<Option<(Tick, Tick)>>>,
    head_turn: Tick,
}

#[derive(Debug, Clone)]
struct SegGeom {
    left: (Vec3, Vec3),
    right: (Vec3, Vec3),
    len: f64,
    /// Relative rates painting a to b and b to a.
    speed: (f64, f64),
    panel: PanelId,
    group: usize,
    rule: ExpansionRule,
    delay: Tick,
}

/// Vehicle-relative paint rate along unit direction `d` such that the
/// world-frame head speed equals `v_sp` on a line moving along `+x`.
pub fn relative_paint_speed(d: Vec3, line_velocity: f64, v_sp: f64) -> f64 {
    let v = line_velocity;
    let dx = d.x;
    -v * dx + (v * v * dx * dx - v * v + v_sp * v_sp).sqrt()
}

impl<'a> SimContext<'a> {
    pub fn new(scene: &'a VehicleScene, cfg: &'a ScenarioConfig) -> Self {
        let left_arms = scene.side_arms(ArmSide::Left);
        let right_arms: Vec<&ArmConfig> = left_arms
            .iter()
            .map(|a| scene.arm(a.mirror_partner).expect("partner validated"))
            .collect();
        let mut normals: Vec<Vec3> = Vec::new();
        let segs: Vec<SegGeom> = scene
            .segments
            .iter()
            .map(|s| {
                let panel = scene.panel(s.panel_id);
                let group = match normals.iter().position(|&n| n == panel.normal) {
                    Some(g) => g,
                    None => {
                        normals.push(panel.normal);
                        normals.len() - 1
                    }
                };
                let len = s.length();
                let d = (s.endpoint_b - s.endpoint_a) * (1.0 / len);
                SegGeom {
                    left: (s.endpoint_a, s.endpoint_b),
                    right: scene.counterpart(s),
                    len,
                    speed: (
                        relative_paint_speed(d, scene.line.velocity, cfg.v_sp),
                        relative_paint_speed(-d, scene.line.velocity, cfg.v_sp),
                    ),
                    panel: s.panel_id,
                    group,
                    rule: panel.expansion_rule,
                    delay: scene.panel_delay_ticks(panel, cfg),
                }
            })
            .collect();
        let windows = |arms: &[&ArmConfig], right: bool| -> Vec<Vec<Option<(Tick, Tick)>>> {
            arms.iter()
                .map(|arm| {
                    segs.iter()
                        .map(|g| {
                            let (a, b) = if right { g.right } else { g.left };
                            reach_window(arm, a, b, &scene.line, cfg.mu, cfg.t_max)
                        })
                        .collect()
                })
                .collect()
        };
        let reach_left = windows(&left_arms, false);
        let reach_right = windows(&right_arms, true);
        Self {
            scene,
            cfg,
            left_arms,
            right_arms,
            segs,
            reach_left,
            reach_right,
            head_turn: cfg.head_turn_ticks(),
        }
    }

    pub fn n_slots(&self) -> usize {
        self.left_arms.len()
    }

    /// Reach window of a planned-side arm slot for a segment.
    pub fn window(&self, slot: usize, seg: SegmentId) -> Option<(Tick, Tick)> {
        self.reach_left[slot][(seg - 1) as usize]
    }

    /// True when the planned-side arm can never hold both endpoints of the
    /// segment inside its sphere within the horizon.
    pub fn never_reachable(&self, slot: usize, seg: SegmentId) -> bool {
        self.window(slot, seg).is_none()
    }

    fn tasks(&self, slot: usize, list: &[SegmentId], right: bool, plan: Option<&[Option<bool>]>) -> Vec<Task> {
        let mut unit = 0usize;
        let mut prev_panel = None;
        list.iter()
            .enumerate()
            .map(|(i, &seg)| {
                let g = &self.segs[(seg - 1) as usize];
                // A new sync unit starts at every panel change, and at every
                // stroke of a parallel panel.
                if i > 0 && (prev_panel != Some(g.panel) || g.rule == ExpansionRule::Parallel) {
                    unit += 1;
                }
                prev_panel = Some(g.panel);
                let (a, b) = if right { g.right } else { g.left };
                let window = if right {
                    self.reach_right[slot][(seg - 1) as usize]
                } else {
                    self.reach_left[slot][(seg - 1) as usize]
                };
                Task {
                    seg,
                    a,
                    b,
                    len: g.len,
                    speed: g.speed,
                    window,
                    group: g.group,
                    unit,
                    delay: if right { g.delay } else { 0 },
                    forced: plan.and_then(|p| p[i]),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Task {
    seg: SegmentId,
    a: Vec3,
    b: Vec3,
    len: f64,
    speed: (f64, f64),
    window: Option<(Tick, Tick)>,
    group: usize,
    unit: usize,
    delay: Tick,
    forced: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Idle,
    Moving { k: usize, from_a: bool },
    AtStart { k: usize, from_a: bool, hold_until: Option<Tick> },
    Painting { k: usize, from_a: bool, progress: f64, start: Tick },
    Reorient { left: Tick },
    Returning,
    Home,
}

struct Agent<'c> {
    arm: &'c ArmConfig,
    tasks: Vec<Task>,
    k: usize,
    phase: Phase,
    pos: Vec3,
    started_unit: Option<usize>,
    unvisited: u32,
    runs: Vec<PaintRun>,
    track: ArmTrack,
}

/// What an agent's partner looked like at the start of the tick.
#[derive(Debug, Clone, Copy)]
struct PartnerView {
    ready_unit: Option<usize>,
    started_unit: Option<usize>,
    current_unit: usize,
}

impl PartnerView {
    fn releases(&self, unit: usize) -> (bool, bool) {
        if self.ready_unit == Some(unit) {
            (true, true)
        } else {
            let passed = self.started_unit.is_some_and(|u| u >= unit) || self.current_unit > unit;
            (passed, false)
        }
    }
}

impl<'c> Agent<'c> {
    fn new(arm: &'c ArmConfig, tasks: Vec<Task>) -> Self {
        Self {
            arm,
            tasks,
            k: 0,
            phase: Phase::Idle,
            pos: arm.center,
            started_unit: None,
            unvisited: 0,
            runs: Vec::new(),
            track: ArmTrack::new(arm),
        }
    }

    fn view(&self) -> PartnerView {
        let ready_unit = match self.phase {
            Phase::AtStart { k, .. } if self.started_unit != Some(self.tasks[k].unit) => {
                Some(self.tasks[k].unit)
            }
            _ => None,
        };
        PartnerView {
            ready_unit,
            started_unit: self.started_unit,
            current_unit: self.tasks.get(self.k).map_or(usize::MAX, |t| t.unit),
        }
    }

    fn endpoints(&self, k: usize, from_a: bool) -> (Vec3, Vec3) {
        let task = &self.tasks[k];
        if from_a {
            (task.a, task.b)
        } else {
            (task.b, task.a)
        }
    }

    fn in_window(&self, k: usize, t: Tick) -> Option<bool> {
        // Some(true): inside, Some(false): not yet, None: passed or never.
        match self.tasks[k].window {
            Some((lo, hi)) if t <= hi => Some(t >= lo),
            _ => None,
        }
    }

    fn skip(&mut self) {
        self.unvisited += 1;
        self.k += 1;
        self.phase = Phase::Idle;
    }

    fn step(&mut self, t: Tick, ctx: &SimContext<'_>, partner: Option<PartnerView>) -> Action {
        let cfg = ctx.cfg;
        let line = &ctx.scene.line;
        let world = |p: Vec3| line.to_world(p, t, cfg.mu);
        loop {
            match self.phase {
                Phase::Home => {
                    self.pos = self.arm.center;
                    return Action::Home;
                }
                Phase::Returning => {
                    if self.pos == self.arm.center {
                        self.phase = Phase::Home;
                        continue;
                    }
                    let (p, reached) = step_toward(self.pos, self.arm.center, cfg.v_mv * cfg.mu);
                    self.pos = p;
                    if reached {
                        self.phase = Phase::Home;
                    }
                    return Action::Move;
                }
                Phase::Painting {
                    k,
                    from_a,
                    progress,
                    start,
                } => {
                    let task = &self.tasks[k];
                    let rate = if from_a { task.speed.0 } else { task.speed.1 };
                    let mut progress = progress + rate * cfg.mu;
                    let done = progress >= task.len - 1e-9;
                    if done {
                        progress = task.len;
                    }
                    let (s, e) = self.endpoints(k, from_a);
                    let seg = task.seg;
                    self.pos = world(s.lerp(e, progress / task.len));
                    if done {
                        self.runs.push(PaintRun {
                            segment: seg,
                            start_tick: start,
                            end_tick: t,
                            from_a,
                        });
                        self.k += 1;
                        let turn = self
                            .tasks
                            .get(self.k)
                            .is_some_and(|next| next.group != self.tasks[k].group);
                        self.phase = if turn && ctx.head_turn > 0 {
                            Phase::Reorient {
                                left: ctx.head_turn,
                            }
                        } else {
                            Phase::Idle
                        };
                    } else {
                        self.phase = Phase::Painting {
                            k,
                            from_a,
                            progress,
                            start,
                        };
                    }
                    return Action::Paint(seg);
                }
                Phase::Reorient { left } => {
                    self.phase = if left <= 1 {
                        Phase::Idle
                    } else {
                        Phase::Reorient { left: left - 1 }
                    };
                    return Action::Reorient;
                }
                Phase::Idle => {
                    let k = self.k;
                    if k >= self.tasks.len() {
                        self.phase = Phase::Returning;
                        continue;
                    }
                    match self.in_window(k, t) {
                        None => {
                            self.skip();
                            continue;
                        }
                        Some(false) => return Action::Wait,
                        Some(true) => {
                            let task = &self.tasks[k];
                            let from_a = task.forced.unwrap_or_else(|| {
                                let da = self.pos.distance_sq(world(task.a));
                                let db = self.pos.distance_sq(world(task.b));
                                da <= db
                            });
                            self.phase = Phase::Moving { k, from_a };
                            continue;
                        }
                    }
                }
                Phase::Moving { k, from_a } => {
                    if self.in_window(k, t) != Some(true) {
                        self.skip();
                        continue;
                    }
                    let target = world(self.endpoints(k, from_a).0);
                    let (p, reached) = step_toward(self.pos, target, cfg.v_mv * cfg.mu);
                    self.pos = p;
                    if reached {
                        self.phase = Phase::AtStart {
                            k,
                            from_a,
                            hold_until: None,
                        };
                    }
                    return Action::Move;
                }
                Phase::AtStart {
                    k,
                    from_a,
                    hold_until,
                } => {
                    let unit = self.tasks[k].unit;
                    let start_now = match hold_until {
                        Some(until) => t >= until,
                        None => match partner {
                            None => true,
                            Some(view) if self.started_unit == Some(unit) => {
                                let _ = view;
                                true
                            }
                            Some(view) => {
                                if self.in_window(k, t).is_none() {
                                    self.skip();
                                    continue;
                                }
                                let (release, together) = view.releases(unit);
                                if release {
                                    self.started_unit = Some(unit);
                                    let delay = self.tasks[k].delay;
                                    if together && delay > 0 {
                                        self.phase = Phase::AtStart {
                                            k,
                                            from_a,
                                            hold_until: Some(t + delay),
                                        };
                                        false
                                    } else {
                                        true
                                    }
                                } else {
                                    false
                                }
                            }
                        },
                    };
                    if start_now {
                        self.started_unit = Some(unit);
                        self.phase = Phase::Painting {
                            k,
                            from_a,
                            progress: 0.0,
                            start: t,
                        };
                        continue;
                    }
                    // Hold on the start point as it travels with the body.
                    self.pos = world(self.endpoints(k, from_a).0);
                    return Action::Wait;
                }
            }
        }
    }

    fn record(&mut self, action: Action) {
        self.track.positions.push(self.pos);
        self.track.actions.push(action);
    }

    /// Counts everything left undone at the end of the horizon.
    fn close(&mut self) {
        let remaining = self.tasks.len().saturating_sub(self.k) as u32;
        self.unvisited += remaining;
        self.k = self.tasks.len();
    }
}

/// Planned-side result: the routes plus the endpoint choices needed to
/// replay them on the opposite side.
#[derive(Debug, Clone)]
pub struct OneSideResult {
    pub assignment: ArmAssignment,
    pub trajectory: Trajectory,
    pub metrics: SimMetrics,
    pub runs: Vec<Vec<PaintRun>>,
}

fn run_agents(agents: &mut [Agent<'_>], pairs: Option<usize>, ctx: &SimContext<'_>) {
    let t_max = ctx.cfg.t_max;
    let mut views: Vec<PartnerView> = Vec::with_capacity(agents.len());
    for t in 1..=t_max {
        if let Some(n) = pairs {
            views.clear();
            views.extend(agents.iter().map(Agent::view));
            for (i, agent) in agents.iter_mut().enumerate() {
                let partner = if i < n { views[i + n] } else { views[i - n] };
                let action = agent.step(t, ctx, Some(partner));
                agent.record(action);
            }
        } else {
            for agent in agents.iter_mut() {
                let action = agent.step(t, ctx, None);
                agent.record(action);
            }
        }
        if agents.iter().all(|a| a.phase == Phase::Home) {
            break;
        }
    }
    for agent in agents.iter_mut() {
        agent.close();
    }
}

/// Builds planned-side routes for an assignment.
pub fn simulate_one_side(assign: &ArmAssignment, ctx: &SimContext<'_>) -> OneSideResult {
    let mut agents: Vec<Agent<'_>> = ctx
        .left_arms
        .iter()
        .enumerate()
        .map(|(slot, arm)| {
            let list = assign.arms.get(slot).map_or(&[][..], Vec::as_slice);
            Agent::new(arm, ctx.tasks(slot, list, false, None))
        })
        .collect();
    run_agents(&mut agents, None, ctx);
    let runs: Vec<Vec<PaintRun>> = agents.iter().map(|a| a.runs.clone()).collect();
    let unvisited: Vec<u32> = agents.iter().map(|a| a.unvisited).collect();
    let trajectory = Trajectory {
        mu: ctx.cfg.mu,
        t_max: ctx.cfg.t_max,
        arms: agents.into_iter().map(|a| a.track).collect(),
    };
    let metrics = measure(&trajectory, &unvisited, &runs, &[], assign, ctx);
    OneSideResult {
        assignment: assign.clone(),
        trajectory,
        metrics,
        runs,
    }
}

/// Both-side result. Arms are ordered planned side first, rows ascending,
/// then the opposite side in the same row order.
#[derive(Debug, Clone)]
pub struct BothSidesResult {
    pub trajectory: Trajectory,
    pub metrics: SimMetrics,
    pub runs: Vec<Vec<PaintRun>>,
}

/// Replays the planned-side order on both sides with pair synchronization.
pub fn expand_to_both_sides(one_side: &OneSideResult, ctx: &SimContext<'_>) -> BothSidesResult {
    let n = ctx.n_slots();
    let plans: Vec<Vec<Option<bool>>> = (0..n)
        .map(|slot| {
            let list = one_side.assignment.arms.get(slot).map_or(&[][..], Vec::as_slice);
            let chosen: BTreeMap<SegmentId, bool> = one_side.runs[slot]
                .iter()
                .map(|r| (r.segment, r.from_a))
                .collect();
            list.iter().map(|s| chosen.get(s).copied()).collect()
        })
        .collect();
    let mut agents: Vec<Agent<'_>> = Vec::with_capacity(2 * n);
    for (right, arms) in [(false, &ctx.left_arms), (true, &ctx.right_arms)] {
        for (slot, arm) in arms.iter().enumerate() {
            let list = one_side.assignment.arms.get(slot).map_or(&[][..], Vec::as_slice);
            agents.push(Agent::new(
                arm,
                ctx.tasks(slot, list, right, Some(&plans[slot])),
            ));
        }
    }
    run_agents(&mut agents, Some(n), ctx);
    let runs: Vec<Vec<PaintRun>> = agents.iter().map(|a| a.runs.clone()).collect();
    let unvisited: Vec<u32> = agents.iter().map(|a| a.unvisited).collect();
    let trajectory = Trajectory {
        mu: ctx.cfg.mu,
        t_max: ctx.cfg.t_max,
        arms: agents.into_iter().map(|a| a.track).collect(),
    };
    let (left_runs, right_runs) = runs.split_at(n);
    let metrics = measure(
        &trajectory,
        &unvisited,
        left_runs,
        right_runs,
        &one_side.assignment,
        ctx,
    );
    BothSidesResult {
        trajectory,
        metrics,
        runs,
    }
}

/// Total time any two heads are closer than `gamma_col`. Ticks after the
/// stored range count only if two home positions are themselves too close.
pub fn collision_time(traj: &Trajectory, gamma_col: f64) -> f64 {
    let n = traj.arms.len();
    if n < 2 {
        return 0.0;
    }
    let limit = gamma_col * gamma_col;
    let len = traj.len();
    let mut ticks = 0u64;
    for t in 1..=len {
        'tick: for i in 0..n {
            let p = traj.arms[i].position(t);
            for j in i + 1..n {
                if p.distance_sq(traj.arms[j].position(t)) < limit {
                    ticks += 1;
                    break 'tick;
                }
            }
        }
    }
    let homes_clash = (0..n).any(|i| {
        (i + 1..n).any(|j| traj.arms[i].home.distance_sq(traj.arms[j].home) < limit)
    });
    if homes_clash && traj.t_max > len {
        ticks += u64::from(traj.t_max - len);
    }
    ticks as f64 * traj.mu
}

fn measure(
    traj: &Trajectory,
    unvisited: &[u32],
    left_runs: &[Vec<PaintRun>],
    right_runs: &[Vec<PaintRun>],
    assign: &ArmAssignment,
    ctx: &SimContext<'_>,
) -> SimMetrics {
    let mu = traj.mu;
    let mut m = SimMetrics {
        arm_ids: traj.arms.iter().map(|a| a.arm_id).collect(),
        ..SimMetrics::default()
    };
    for track in &traj.arms {
        m.t_a.push(f64::from(track.last_active_tick()) * mu);
        let arm = ctx.scene.arm(track.arm_id).expect("arm from scene");
        let outside = track.positions.iter().filter(|p| !arm.contains(**p)).count();
        m.t_out.push(outside as f64 * mu);
    }
    m.n_unvisits = unvisited.to_vec();
    m.t_col = collision_time(traj, ctx.cfg.gamma_col);
    let starts = |runs: &[Vec<PaintRun>]| -> BTreeMap<SegmentId, f64> {
        runs.iter()
            .flatten()
            .map(|r| (r.segment, f64::from(r.start_tick) * mu))
            .collect()
    };
    m.paint_start_times = starts(left_runs);
    m.opposite_start_times = starts(right_runs);
    let mut order = crate::evaluation::order_violations(&m.paint_start_times, ctx.scene);
    if !right_runs.is_empty() {
        let other = crate::evaluation::order_violations(&m.opposite_start_times, ctx.scene);
        for (panel, c) in other {
            let e = order.entry(panel).or_insert(0);
            *e = (*e).max(c);
        }
    }
    m.order_violations = order;
    let assigned = assign.total().min(ctx.scene.n_segs());
    let sides = if right_runs.is_empty() { 1 } else { 2 };
    m.unassigned = ((ctx.scene.n_segs() - assigned) * sides) as u32;
    m
}
