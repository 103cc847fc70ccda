//! Problem instance: vehicle panels and paint segments, arm placement,
//! line kinematics and scenario parameters.
//!
//! Geometry is stored in the vehicle frame (front of the body at `x = 0`,
//! body extending toward negative `x`). The world frame keeps the arms
//! fixed while the body translates along `+x` at the line velocity; tick
//! `t` corresponds to `t * mu` seconds after the body front crossed
//! `reference_position`.

mod format;
pub mod synthetic;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;

pub use format::{load_scenario, parse_scenario, ScenarioError, FORMAT_VERSION};
pub use synthetic::{generate_synthetic_scene, SyntheticSpec};

pub type SegmentId = u32;
pub type PanelId = u32;
pub type ArmId = u32;
pub type Tick = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelKind {
    VerticalSide,
    Hood,
    Roof,
    BackDoor,
}

impl PanelKind {
    /// Vertically mounted panels carry the strong bottom-to-top rule.
    pub fn is_vertical(self) -> bool {
        matches!(self, PanelKind::VerticalSide | PanelKind::BackDoor)
    }

    /// Hood, roof and back door straddle the body center line.
    pub fn is_center(self) -> bool {
        !matches!(self, PanelKind::VerticalSide)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionRule {
    Mirror,
    Parallel,
    ParallelWithDelay,
}

/// An oriented straight stroke painted in one pass at fixed gun direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaintSegment {
    pub id: SegmentId,
    #[serde(rename = "panel")]
    pub panel_id: PanelId,
    #[serde(rename = "a")]
    pub endpoint_a: Vec3,
    #[serde(rename = "b")]
    pub endpoint_b: Vec3,
    /// Bottom-to-top position within the panel, starting at 1.
    #[serde(rename = "height")]
    pub height_index: u32,
    pub side: Side,
}

impl PaintSegment {
    pub fn length(&self) -> f64 {
        self.endpoint_a.distance(self.endpoint_b)
    }

    pub fn midpoint(&self) -> Vec3 {
        self.endpoint_a.lerp(self.endpoint_b, 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub id: PanelId,
    pub kind: PanelKind,
    pub expansion_rule: ExpansionRule,
    /// Outward surface normal; the gun faces the panel along it.
    pub normal: Vec3,
    /// Lateral shift from a planned-side stroke to its opposite-side copy
    /// under the parallel rules (`z_opposite = z - lateral_offset`).
    #[serde(default)]
    pub lateral_offset: f64,
    /// Start delay of the opposite side under `parallel_with_delay`.
    /// Defaults to one back-and-forth stroke at paint speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_ticks: Option<Tick>,
    /// Segment ids ordered bottom-to-top. Derived from the segments.
    #[serde(skip)]
    pub segments: Vec<SegmentId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmConfig {
    pub id: ArmId,
    /// Center of the spherical operating range, world frame. Also the
    /// head's start and return position.
    pub center: Vec3,
    pub radius: f64,
    /// Front-to-back order along the line, 1 = the arm the body meets first.
    pub row: u32,
    pub side: ArmSide,
    pub mirror_partner: ArmId,
}

impl ArmConfig {
    pub fn contains(&self, p: Vec3) -> bool {
        p.distance_sq(self.center) <= self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineKinematics {
    /// mm/s
    pub velocity: f64,
    #[serde(default = "default_direction")]
    pub direction: Vec3,
    /// World-frame x of the body front at t = 0.
    pub reference_position: f64,
}

fn default_direction() -> Vec3 {
    Vec3::UNIT_X
}

impl LineKinematics {
    /// World-frame translation applied to vehicle-frame points at tick `t`.
    pub fn offset_at(&self, t: Tick, mu: f64) -> Vec3 {
        self.direction * (self.reference_position + self.velocity * (f64::from(t) * mu))
    }

    pub fn to_world(&self, p: Vec3, t: Tick, mu: f64) -> Vec3 {
        p + self.offset_at(t, mu)
    }

    pub fn to_vehicle(&self, p: Vec3, t: Tick, mu: f64) -> Vec3 {
        p - self.offset_at(t, mu)
    }
}

/// Scenario-level parameters. Units: mm, mm/s, s; `t_max` in ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub v_sp: f64,
    pub v_mv: f64,
    pub gamma_col: f64,
    pub t_p: f64,
    pub epsilon: u32,
    pub delta: u32,
    pub n_d: u32,
    pub mu: f64,
    pub t_max: Tick,
    #[serde(default = "default_head_turn_wait")]
    pub head_turn_wait: f64,
    pub rho_out: f64,
    pub rho_unvisits: f64,
    pub rho_col: f64,
    /// Forbid the rearmost arm from painting the back door.
    #[serde(default = "default_true")]
    pub back_door_rule: bool,
}

fn default_head_turn_wait() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            v_sp: 1250.0,
            v_mv: 1250.0,
            gamma_col: 300.0,
            t_p: 47.5,
            epsilon: 1,
            delta: 3,
            n_d: 0,
            mu: 0.01,
            t_max: 10_000,
            head_turn_wait: 0.5,
            rho_out: 5.0e2,
            rho_unvisits: 1.0e4,
            rho_col: 1.0e3,
            back_door_rule: true,
        }
    }
}

impl ScenarioConfig {
    pub fn head_turn_ticks(&self) -> Tick {
        ticks_for(self.head_turn_wait, self.mu)
    }
}

/// Number of whole ticks needed to cover `seconds`.
pub fn ticks_for(seconds: f64, mu: f64) -> Tick {
    let raw = seconds / mu;
    (raw - 1e-9).ceil().max(0.0) as Tick
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleScene {
    #[serde(default)]
    pub name: String,
    pub line: LineKinematics,
    pub arms: Vec<ArmConfig>,
    pub panels: Vec<Panel>,
    pub segments: Vec<PaintSegment>,
}

/// A validated scene together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scene: VehicleScene,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("scene has no panels")]
    NoPanels,
    #[error("scene has no arms")]
    NoArms,
    #[error("duplicate segment id {0}")]
    DuplicateSegment(SegmentId),
    #[error("segment ids must be 1..={expected}; id {found} is out of range")]
    SegmentIdRange { found: SegmentId, expected: u32 },
    #[error("segment {0} has zero length")]
    ZeroLengthSegment(SegmentId),
    #[error("segment {0} has non-finite coordinates")]
    NonFiniteSegment(SegmentId),
    #[error("segment {segment} references unknown panel {panel}")]
    UnknownPanel { segment: SegmentId, panel: PanelId },
    #[error("duplicate panel id {0}")]
    DuplicatePanel(PanelId),
    #[error("panel {0} has no segments")]
    EmptyPanel(PanelId),
    #[error("panel {panel}: height indices must be exactly 1..={count} without duplicates")]
    HeightIndices { panel: PanelId, count: usize },
    #[error("panel {panel} of kind {kind:?} cannot use expansion rule {rule:?}")]
    RuleMismatch {
        panel: PanelId,
        kind: PanelKind,
        rule: ExpansionRule,
    },
    #[error("panel {panel}: parallel lateral offset {offset} mm is below the collision distance")]
    LateralOffset { panel: PanelId, offset: f64 },
    #[error("segment {segment} has side {side:?}, panel {panel} requires {expected:?}")]
    SegmentSide {
        segment: SegmentId,
        panel: PanelId,
        side: Side,
        expected: Side,
    },
    #[error("duplicate arm id {0}")]
    DuplicateArm(ArmId),
    #[error("arm {0} must have a positive radius")]
    ArmRadius(ArmId),
    #[error("arms must split evenly between left and right ({left} left, {right} right)")]
    ArmSides { left: usize, right: usize },
    #[error("arm {0}: rows on one side must be distinct")]
    DuplicateRow(ArmId),
    #[error("arm {0}: mirror partner must be an opposite-side arm of equal row pointing back")]
    MirrorPartner(ArmId),
    #[error("line velocity must be positive")]
    LineVelocity,
    #[error("line direction must be the +x unit vector")]
    LineDirection,
    #[error("invalid config: {0}")]
    Config(String),
}

impl VehicleScene {
    /// Fills derived fields and checks every invariant.
    pub fn validate(&mut self) -> Result<(), ValidationError> {
        if self.panels.is_empty() {
            return Err(ValidationError::NoPanels);
        }
        if self.arms.is_empty() {
            return Err(ValidationError::NoArms);
        }
        self.validate_segments()?;
        self.validate_panels()?;
        self.validate_arms()?;
        if !(self.line.velocity > 0.0) || !self.line.velocity.is_finite() {
            return Err(ValidationError::LineVelocity);
        }
        if self.line.direction != Vec3::UNIT_X {
            return Err(ValidationError::LineDirection);
        }
        Ok(())
    }

    fn validate_segments(&mut self) -> Result<(), ValidationError> {
        let n = self.segments.len() as u32;
        let mut seen = BTreeSet::new();
        for seg in &self.segments {
            if !seen.insert(seg.id) {
                return Err(ValidationError::DuplicateSegment(seg.id));
            }
        }
        for seg in &self.segments {
            if seg.id == 0 || seg.id > n {
                return Err(ValidationError::SegmentIdRange {
                    found: seg.id,
                    expected: n,
                });
            }
            if !seg.endpoint_a.is_finite() || !seg.endpoint_b.is_finite() {
                return Err(ValidationError::NonFiniteSegment(seg.id));
            }
            if seg.endpoint_a == seg.endpoint_b {
                return Err(ValidationError::ZeroLengthSegment(seg.id));
            }
        }
        self.segments.sort_by_key(|s| s.id);
        Ok(())
    }

    fn validate_panels(&mut self) -> Result<(), ValidationError> {
        let mut ids = BTreeSet::new();
        for p in &self.panels {
            if !ids.insert(p.id) {
                return Err(ValidationError::DuplicatePanel(p.id));
            }
            let ok = match p.kind {
                PanelKind::VerticalSide => p.expansion_rule == ExpansionRule::Mirror,
                _ => p.expansion_rule != ExpansionRule::Mirror,
            };
            if !ok {
                return Err(ValidationError::RuleMismatch {
                    panel: p.id,
                    kind: p.kind,
                    rule: p.expansion_rule,
                });
            }
        }
        let mut members: BTreeMap<PanelId, Vec<(u32, SegmentId)>> = BTreeMap::new();
        for seg in &self.segments {
            let Some(panel) = self.panels.iter().find(|p| p.id == seg.panel_id) else {
                return Err(ValidationError::UnknownPanel {
                    segment: seg.id,
                    panel: seg.panel_id,
                });
            };
            let expected = if panel.kind.is_center() {
                Side::Center
            } else {
                Side::Left
            };
            if seg.side != expected {
                return Err(ValidationError::SegmentSide {
                    segment: seg.id,
                    panel: panel.id,
                    side: seg.side,
                    expected,
                });
            }
            members
                .entry(seg.panel_id)
                .or_default()
                .push((seg.height_index, seg.id));
        }
        for panel in &mut self.panels {
            let mut list = members.remove(&panel.id).unwrap_or_default();
            if list.is_empty() {
                return Err(ValidationError::EmptyPanel(panel.id));
            }
            list.sort();
            let contiguous = list
                .iter()
                .enumerate()
                .all(|(i, &(h, _))| h as usize == i + 1);
            if !contiguous {
                return Err(ValidationError::HeightIndices {
                    panel: panel.id,
                    count: list.len(),
                });
            }
            panel.segments = list.into_iter().map(|(_, id)| id).collect();
        }
        Ok(())
    }

    fn validate_arms(&self) -> Result<(), ValidationError> {
        let mut ids = BTreeSet::new();
        for arm in &self.arms {
            if !ids.insert(arm.id) {
                return Err(ValidationError::DuplicateArm(arm.id));
            }
            if !(arm.radius > 0.0) {
                return Err(ValidationError::ArmRadius(arm.id));
            }
        }
        let left = self.arms.iter().filter(|a| a.side == ArmSide::Left).count();
        let right = self.arms.len() - left;
        if left != right {
            return Err(ValidationError::ArmSides { left, right });
        }
        for side in [ArmSide::Left, ArmSide::Right] {
            let mut rows = BTreeSet::new();
            for arm in self.arms.iter().filter(|a| a.side == side) {
                if !rows.insert(arm.row) {
                    return Err(ValidationError::DuplicateRow(arm.id));
                }
            }
        }
        for arm in &self.arms {
            let partner = self.arm(arm.mirror_partner);
            let ok = partner.is_some_and(|p| {
                p.side != arm.side && p.row == arm.row && p.mirror_partner == arm.id
            });
            if !ok {
                return Err(ValidationError::MirrorPartner(arm.id));
            }
        }
        Ok(())
    }

    pub fn n_segs(&self) -> usize {
        self.segments.len()
    }

    pub fn segment(&self, id: SegmentId) -> &PaintSegment {
        &self.segments[(id - 1) as usize]
    }

    pub fn panel(&self, id: PanelId) -> &Panel {
        self.panels
            .iter()
            .find(|p| p.id == id)
            .expect("panel id validated at load")
    }

    pub fn panel_of(&self, seg: SegmentId) -> &Panel {
        self.panel(self.segment(seg).panel_id)
    }

    pub fn arm(&self, id: ArmId) -> Option<&ArmConfig> {
        self.arms.iter().find(|a| a.id == id)
    }

    /// Arms of one side ordered front row first.
    pub fn side_arms(&self, side: ArmSide) -> Vec<&ArmConfig> {
        let mut arms: Vec<_> = self.arms.iter().filter(|a| a.side == side).collect();
        arms.sort_by_key(|a| a.row);
        arms
    }

    pub fn n_arms_side(&self) -> usize {
        self.arms.len() / 2
    }

    /// Endpoints of the opposite-side copy of a planned-side segment.
    pub fn counterpart(&self, seg: &PaintSegment) -> (Vec3, Vec3) {
        let panel = self.panel(seg.panel_id);
        let map = |p: Vec3| match panel.expansion_rule {
            ExpansionRule::Mirror => p.mirror_z(),
            ExpansionRule::Parallel | ExpansionRule::ParallelWithDelay => {
                Vec3::new(p.x, p.y, p.z - panel.lateral_offset)
            }
        };
        (map(seg.endpoint_a), map(seg.endpoint_b))
    }

    /// Opposite-side start delay for a panel, in ticks.
    pub fn panel_delay_ticks(&self, panel: &Panel, cfg: &ScenarioConfig) -> Tick {
        match panel.expansion_rule {
            ExpansionRule::ParallelWithDelay => panel.delay_ticks.unwrap_or_else(|| {
                let n = panel.segments.len().max(1) as f64;
                let mean_len: f64 = panel
                    .segments
                    .iter()
                    .map(|&s| self.segment(s).length())
                    .sum::<f64>()
                    / n;
                ticks_for(2.0 * mean_len / cfg.v_sp, cfg.mu)
            }),
            _ => 0,
        }
    }

    /// The highest-row planned-side arm.
    pub fn last_arm_slot(&self) -> usize {
        self.n_arms_side() - 1
    }
}

impl ScenarioConfig {
    pub fn validate(&self, scene: &VehicleScene) -> Result<(), ValidationError> {
        let bad = |m: &str| Err(ValidationError::Config(m.to_string()));
        let positive = [
            ("mu", self.mu),
            ("v_sp", self.v_sp),
            ("v_mv", self.v_mv),
            ("t_p", self.t_p),
            ("rho_out", self.rho_out),
            ("rho_unvisits", self.rho_unvisits),
            ("rho_col", self.rho_col),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(self.gamma_col >= 0.0) {
            return bad("gamma_col must be non-negative");
        }
        if !(self.head_turn_wait >= 0.0) {
            return bad("head_turn_wait must be non-negative");
        }
        if self.t_max == 0 {
            return bad("t_max must be at least one tick");
        }
        if self.v_sp <= scene.line.velocity || self.v_mv <= scene.line.velocity {
            return bad("arm speeds must exceed the line velocity");
        }
        let n_side = scene.n_arms_side();
        let n_dim = scene.n_segs() + self.n_d as usize;
        if n_side == 0 || !n_dim.is_multiple_of(n_side) {
            return bad(&format!(
                "n_segs + n_d = {n_dim} is not divisible by {n_side} arms per side"
            ));
        }
        for p in &scene.panels {
            if p.expansion_rule != ExpansionRule::Mirror && p.lateral_offset.abs() < self.gamma_col
            {
                return Err(ValidationError::LateralOffset {
                    panel: p.id,
                    offset: p.lateral_offset,
                });
            }
        }
        Ok(())
    }

    /// Smallest dummy count near a quarter of the segment count that makes
    /// the genotype split evenly across the arms of one side.
    pub fn default_dummy_count(n_segs: usize, n_arms_side: usize) -> u32 {
        let mut n_d = n_segs.div_ceil(4);
        while !(n_segs + n_d).is_multiple_of(n_arms_side.max(1)) {
            n_d += 1;
        }
        n_d as u32
    }
}

impl Scenario {
    pub fn new(mut scene: VehicleScene, config: ScenarioConfig) -> Result<Self, ValidationError> {
        scene.validate()?;
        config.validate(&scene)?;
        Ok(Self { scene, config })
    }
}

/// World-frame endpoints of a segment at tick `t`.
pub fn segment_world_position(
    seg: &PaintSegment,
    t: Tick,
    line: &LineKinematics,
    mu: f64,
) -> (Vec3, Vec3) {
    let off = line.offset_at(t, mu);
    (seg.endpoint_a + off, seg.endpoint_b + off)
}

/// Closed tick interval `[first, last]` within `1..=t_max` during which
/// both vehicle-frame endpoints lie inside the arm's sphere, or `None`.
///
/// The in-range set of a point in uniform linear motion through a sphere is
/// an interval, so the intersection for two endpoints is one as well. The
/// analytic bounds are snapped to the direct per-tick test.
pub fn reach_window(
    arm: &ArmConfig,
    a: Vec3,
    b: Vec3,
    line: &LineKinematics,
    mu: f64,
    t_max: Tick,
) -> Option<(Tick, Tick)> {
    let both_in = |t: Tick| {
        arm.contains(line.to_world(a, t, mu)) && arm.contains(line.to_world(b, t, mu))
    };
    let step = line.velocity * mu;
    let mut lo = 1.0_f64;
    let mut hi = f64::from(t_max);
    for p in [a, b] {
        let q = p + line.direction * line.reference_position - arm.center;
        let r_sq = arm.radius * arm.radius - q.y * q.y - q.z * q.z;
        if r_sq < 0.0 {
            return None;
        }
        let r = r_sq.sqrt();
        lo = lo.max((-r - q.x) / step);
        hi = hi.min((r - q.x) / step);
    }
    if lo > hi + 2.0 {
        return None;
    }
    if lo > hi + 2.0 || hi < 0.0 || lo > f64::from(t_max) + 1.0 {
        return None;
    }
    let clamp = |v: f64| v.clamp(1.0, f64::from(t_max)) as Tick;
    let mid = clamp(((lo + hi) * 0.5).round());
    let (lo_t, hi_t) = (clamp(lo.ceil()), clamp(hi.floor()));
    let seed = [mid, lo_t, hi_t, mid.saturating_sub(1).max(1), (mid + 1).min(t_max)]
        .into_iter()
        .find(|&t| both_in(t))?;
    // Snap the analytic bounds to the exact per-tick predicate.
    let mut first = lo_t.min(seed);
    while !both_in(first) {
        first += 1;
    }
    while first > 1 && both_in(first - 1) {
        first -= 1;
    }
    let mut last = hi_t.max(seed);
    while !both_in(last) {
        last -= 1;
    }
    while last < t_max && both_in(last + 1) {
        last += 1;
    }
    Some((first, last))
}
