//! Seeded generator for box-like vehicle bodies.
//!
//! The body has a hood at the front, a row of vertical side panels
//! (fender, doors, rear fender, ...), an optional roof and a back door.
//! Side panels carry horizontal strokes stacked bottom-to-top; hood and roof
//! carry strokes along the line stacked from the outer edge toward the
//! center line; the back door carries lateral strokes stacked bottom-to-top.
//! Only the planned (left, `z > 0`) half is generated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    ArmConfig, ArmSide, ExpansionRule, LineKinematics, PaintSegment, Panel, PanelKind, Side,
    ValidationError, VehicleScene,
};
use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub name: String,
    pub arms_per_side: usize,
    /// Segment counts of the side panels, front to back.
    pub side_panels: Vec<usize>,
    pub hood_segments: usize,
    /// Zero omits the roof.
    pub roof_segments: usize,
    pub back_door_segments: usize,
    pub body_length: f64,
    pub body_width: f64,
    pub side_bottom: f64,
    pub side_top: f64,
    pub hood_length: f64,
    pub hood_height: f64,
    pub roof_front: f64,
    pub roof_rear: f64,
    pub roof_height: f64,
    pub back_door_bottom: f64,
    pub back_door_top: f64,
    /// Maximum random displacement of stroke ends along the stroke, mm.
    pub jitter: f64,
    pub line_velocity: f64,
    pub reference_position: f64,
    pub arm_radius: f64,
    /// World x of the front-row arm.
    pub arm_first_x: f64,
    pub arm_spacing: f64,
    pub arm_height: f64,
    /// Lateral distance from the side plane to the arm centers.
    pub arm_standoff: f64,
    pub roof_delay_ticks: Option<u32>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            name: "synthetic".into(),
            arms_per_side: 3,
            side_panels: vec![12; 5],
            hood_segments: 6,
            roof_segments: 8,
            back_door_segments: 6,
            body_length: 4500.0,
            body_width: 1800.0,
            side_bottom: 350.0,
            side_top: 1050.0,
            hood_length: 1000.0,
            hood_height: 950.0,
            roof_front: 1700.0,
            roof_rear: 3600.0,
            roof_height: 1450.0,
            back_door_bottom: 450.0,
            back_door_top: 1300.0,
            jitter: 30.0,
            line_velocity: 98.0,
            reference_position: 0.0,
            arm_radius: 2800.0,
            arm_first_x: 500.0,
            arm_spacing: 1600.0,
            arm_height: 1150.0,
            arm_standoff: 1200.0,
            roof_delay_ticks: None,
        }
    }
}

struct Builder {
    rng: ChaCha8Rng,
    jitter: f64,
    panels: Vec<Panel>,
    segments: Vec<PaintSegment>,
}

impl Builder {
    fn panel(
        &mut self,
        kind: PanelKind,
        rule: ExpansionRule,
        normal: Vec3,
        lateral_offset: f64,
    ) -> u32 {
        let id = self.panels.len() as u32 + 1;
        self.panels.push(Panel {
            id,
            kind,
            expansion_rule: rule,
            normal,
            lateral_offset,
            delay_ticks: None,
            segments: Vec::new(),
        });
        id
    }

    /// Pushes one stroke from `a` to `b`, jittering both ends along it.
    fn stroke(&mut self, panel: u32, height: u32, a: Vec3, b: Vec3, side: Side) {
        let dir = b - a;
        let len = dir.norm();
        let j = self.jitter.min(len * 0.2);
        let ja = self.rng.gen_range(-1.0..=1.0) * j;
        let jb = self.rng.gen_range(-1.0..=1.0) * j;
        let unit = dir * (1.0 / len);
        let id = self.segments.len() as u32 + 1;
        self.segments.push(PaintSegment {
            id,
            panel_id: panel,
            endpoint_a: a + unit * ja,
            endpoint_b: b + unit * jb,
            height_index: height,
            side,
        });
    }
}

/// Level of the `l`-th of `n` strokes evenly spread over `[lo, hi]`.
fn level(lo: f64, hi: f64, l: usize, n: usize) -> f64 {
    lo + (hi - lo) * (l as f64 + 0.5) / n as f64
}

pub fn generate_synthetic_scene(spec: &SyntheticSpec) -> Result<VehicleScene, ValidationError> {
    let n_panels = spec.side_panels.len()
        + usize::from(spec.hood_segments > 0)
        + usize::from(spec.roof_segments > 0)
        + usize::from(spec.back_door_segments > 0);
    if n_panels == 0 {
        return Err(ValidationError::NoPanels);
    }
    if spec.arms_per_side == 0 {
        return Err(ValidationError::NoArms);
    }
    let half = spec.body_width / 2.0;
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        jitter: spec.jitter,
        panels: Vec::new(),
        segments: Vec::new(),
    };

    if spec.hood_segments > 0 {
        let p = b.panel(
            PanelKind::Hood,
            ExpansionRule::Parallel,
            Vec3::new(0.0, 1.0, 0.0),
            half,
        );
        let n = spec.hood_segments;
        for l in 0..n {
            let z = half - level(0.0, half, l, n);
            b.stroke(
                p,
                l as u32 + 1,
                Vec3::new(-60.0, spec.hood_height, z),
                Vec3::new(-spec.hood_length, spec.hood_height, z),
                Side::Center,
            );
        }
    }

    // Side panels tile the body length behind the front bumper.
    let front = -60.0;
    let rear = -spec.body_length + 60.0;
    let width = (front - rear) / spec.side_panels.len().max(1) as f64;
    for (i, &n) in spec.side_panels.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let p = b.panel(
            PanelKind::VerticalSide,
            ExpansionRule::Mirror,
            Vec3::new(0.0, 0.0, 1.0),
            0.0,
        );
        let x0 = front - width * i as f64 - 15.0;
        let x1 = front - width * (i + 1) as f64 + 15.0;
        for l in 0..n {
            let y = level(spec.side_bottom, spec.side_top, l, n);
            b.stroke(
                p,
                l as u32 + 1,
                Vec3::new(x0, y, half),
                Vec3::new(x1, y, half),
                Side::Left,
            );
        }
    }

    if spec.roof_segments > 0 {
        let p = b.panel(
            PanelKind::Roof,
            ExpansionRule::ParallelWithDelay,
            Vec3::new(0.0, 1.0, 0.0),
            half,
        );
        b.panels[p as usize - 1].delay_ticks = spec.roof_delay_ticks;
        let n = spec.roof_segments;
        for l in 0..n {
            let z = half - level(0.0, half, l, n);
            b.stroke(
                p,
                l as u32 + 1,
                Vec3::new(-spec.roof_front, spec.roof_height, z),
                Vec3::new(-spec.roof_rear, spec.roof_height, z),
                Side::Center,
            );
        }
    }

    if spec.back_door_segments > 0 {
        let p = b.panel(
            PanelKind::BackDoor,
            ExpansionRule::Parallel,
            Vec3::new(-1.0, 0.0, 0.0),
            half,
        );
        let n = spec.back_door_segments;
        let x = -spec.body_length;
        for l in 0..n {
            let y = level(spec.back_door_bottom, spec.back_door_top, l, n);
            b.stroke(
                p,
                l as u32 + 1,
                Vec3::new(x, y, half * 0.92),
                Vec3::new(x, y, half * 0.06),
                Side::Center,
            );
        }
    }

    let n_side = spec.arms_per_side as u32;
    let mut arms = Vec::with_capacity(2 * spec.arms_per_side);
    for side in [ArmSide::Left, ArmSide::Right] {
        for r in 0..n_side {
            let z = half + spec.arm_standoff;
            let (id, partner, z) = match side {
                ArmSide::Left => (r + 1, r + 1 + n_side, z),
                ArmSide::Right => (r + 1 + n_side, r + 1, -z),
            };
            arms.push(ArmConfig {
                id,
                center: Vec3::new(
                    spec.arm_first_x + spec.arm_spacing * f64::from(r),
                    spec.arm_height,
                    z,
                ),
                radius: spec.arm_radius,
                row: r + 1,
                side,
                mirror_partner: partner,
            });
        }
    }

    let mut scene = VehicleScene {
        name: spec.name.clone(),
        line: LineKinematics {
            velocity: spec.line_velocity,
            direction: Vec3::UNIT_X,
            reference_position: spec.reference_position,
        },
        arms,
        panels: b.panels,
        segments: b.segments,
    };
    scene.validate()?;
    Ok(scene)
}
