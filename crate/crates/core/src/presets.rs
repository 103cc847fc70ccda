//! Shipped scenarios.
//!
//! `v1`, `v2` and `v3` carry the production parameters of the three
//! evaluated vehicle models on synthetic bodies with the same segment
//! counts. `desk` is a small body with the `v3` parameters that solves in
//! seconds.

use crate::scene::{generate_synthetic_scene, Scenario, ScenarioConfig, SyntheticSpec, ticks_for};

pub const PRESET_NAMES: [&str; 4] = ["desk", "v1", "v2", "v3"];

fn config(v_sp: f64, v_mv: f64, t_p: f64, n_d: u32, epsilon: u32, delta: u32, back_door_rule: bool) -> ScenarioConfig {
    let mu = 0.01;
    ScenarioConfig {
        v_sp,
        v_mv,
        gamma_col: 300.0,
        t_p,
        epsilon,
        delta,
        n_d,
        mu,
        t_max: ticks_for(1.5 * t_p, mu),
        head_turn_wait: 0.5,
        rho_out: 5.0e2,
        rho_unvisits: 1.0e4,
        rho_col: 1.0e3,
        back_door_rule,
    }
}

fn build(spec: SyntheticSpec, cfg: ScenarioConfig) -> Scenario {
    let scene = generate_synthetic_scene(&spec).expect("preset geometry is valid");
    Scenario::new(scene, cfg).expect("preset parameters are valid")
}

pub fn desk_spec() -> SyntheticSpec {
    SyntheticSpec {
        seed: 7,
        name: "desk".into(),
        side_top: 1000.0,
        hood_height: 1080.0,
        roof_rear: 3000.0,
        arm_first_x: -600.0,
        arm_spacing: 1400.0,
        ..SyntheticSpec::default()
    }
}

/// 60 side strokes per side on five panels, hood, roof and back door,
/// three arms per side.
pub fn desk() -> Scenario {
    let spec = desk_spec();
    let n = 5 * 12 + 6 + 8 + 6;
    let n_d = ScenarioConfig::default_dummy_count(n, spec.arms_per_side);
    build(spec, config(900.0, 900.0, 66.0, n_d, 0, 5, false))
}

fn sedan(seed: u64, name: &str, per_panel: usize, hood: usize, back_door: usize) -> SyntheticSpec {
    SyntheticSpec {
        seed,
        name: name.into(),
        arms_per_side: 4,
        side_panels: vec![per_panel; 4],
        hood_segments: hood,
        roof_segments: 0,
        back_door_segments: back_door,
        body_length: 4700.0,
        side_bottom: 300.0,
        side_top: 1000.0,
        hood_length: 1100.0,
        line_velocity: 147.0,
        arm_first_x: 500.0,
        arm_spacing: 1400.0,
        ..SyntheticSpec::default()
    }
}

/// 268 segments, four arms per side.
pub fn v1() -> Scenario {
    build(
        sedan(101, "v1", 55, 24, 24),
        config(1250.0, 1250.0, 47.5, 68, 1, 3, true),
    )
}

/// 260 segments, four arms per side.
pub fn v2() -> Scenario {
    build(
        sedan(102, "v2", 54, 22, 22),
        config(1250.0, 1250.0, 47.5, 68, 1, 3, true),
    )
}

/// 218 segments with a roof, three arms per side, back-door rule off.
pub fn v3() -> Scenario {
    let spec = SyntheticSpec {
        seed: 103,
        name: "v3".into(),
        arms_per_side: 3,
        side_panels: vec![40; 4],
        hood_segments: 18,
        roof_segments: 24,
        back_door_segments: 16,
        ..SyntheticSpec::default()
    };
    build(spec, config(900.0, 900.0, 66.0, 58, 0, 5, false))
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "desk" => Some(desk()),
        "v1" => Some(v1()),
        "v2" => Some(v2()),
        "v3" => Some(v3()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_counts() {
        assert_eq!(v1().scene.n_segs(), 268);
        assert_eq!(v2().scene.n_segs(), 260);
        assert_eq!(v3().scene.n_segs(), 218);
        assert_eq!(desk().scene.n_segs(), 80);
    }

    #[test]
    fn table_parameters() {
        let c = v1().config;
        assert_eq!((c.v_sp, c.v_mv, c.t_p, c.n_d, c.epsilon, c.delta), (1250.0, 1250.0, 47.5, 68, 1, 3));
        assert!(c.back_door_rule);
        let c = v3().config;
        assert_eq!((c.v_sp, c.v_mv, c.t_p, c.n_d, c.epsilon, c.delta), (900.0, 900.0, 66.0, 58, 0, 5));
        assert!(!c.back_door_rule);
        assert_eq!(v1().scene.line.velocity, 147.0);
        assert_eq!(v3().scene.line.velocity, 98.0);
        assert_eq!(v1().scene.n_arms_side(), 4);
        assert_eq!(v3().scene.n_arms_side(), 3);
    }

    #[test]
    fn unknown_name() {
        assert!(by_name("v9").is_none());
        for n in PRESET_NAMES {
            assert!(by_name(n).is_some());
        }
    }
}
