//! Scenario file reading and writing.
//!
//! The on-disk format is TOML with a top-level `format_version`, a `name`,
//! `[line]` and `[config]` tables and `[[arms]]`, `[[panels]]` and
//! `[[segments]]` arrays. See `docs/scenario-format.md` for the schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    ArmConfig, LineKinematics, PaintSegment, Panel, Scenario, ScenarioConfig, ValidationError,
    VehicleScene,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ValidationError),
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    format_version: u32,
    #[serde(default)]
    name: String,
    line: LineKinematics,
    config: ScenarioConfig,
    arms: Vec<ArmConfig>,
    panels: Vec<Panel>,
    segments: Vec<PaintSegment>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(text)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(ScenarioError::Version(doc.format_version));
    }
    let scene = VehicleScene {
        name: doc.name,
        line: doc.line,
        arms: doc.arms,
        panels: doc.panels,
        segments: doc.segments,
    };
    Ok(Scenario::new(scene, doc.config)?)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

impl Scenario {
    pub fn to_toml(&self) -> String {
        let doc = ScenarioDoc {
            format_version: FORMAT_VERSION,
            name: self.scene.name.clone(),
            line: self.scene.line.clone(),
            config: self.config.clone(),
            arms: self.scene.arms.clone(),
            panels: self.scene.panels.clone(),
            segments: self.scene.segments.clone(),
        };
        toml::to_string(&doc).expect("scenario documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PANELS: &str = r#"
format_version = 1
name = "two-panel"

[line]
velocity = 147.0
reference_position = 0.0

[config]
v_sp = 1250.0
v_mv = 1250.0
gamma_col = 300.0
t_p = 47.5
epsilon = 1
delta = 3
n_d = 2
mu = 0.01
t_max = 6000
rho_out = 500.0
rho_unvisits = 10000.0
rho_col = 1000.0

[[arms]]
id = 1
center = [500.0, 1000.0, 2200.0]
radius = 2800.0
row = 1
side = "left"
mirror_partner = 2

[[arms]]
id = 2
center = [500.0, 1000.0, -2200.0]
radius = 2800.0
row = 1
side = "right"
mirror_partner = 1

[[panels]]
id = 1
kind = "vertical_side"
expansion_rule = "mirror"
normal = [0.0, 0.0, 1.0]

[[panels]]
id = 2
kind = "hood"
expansion_rule = "parallel"
normal = [0.0, 1.0, 0.0]
lateral_offset = 900.0

[[segments]]
id = 1
panel = 1
a = [-1000.0, 400.0, 900.0]
b = [-1800.0, 400.0, 900.0]
height = 1
side = "left"

[[segments]]
id = 2
panel = 1
a = [-1000.0, 500.0, 900.0]
b = [-1800.0, 500.0, 900.0]
height = 2
side = "left"

[[segments]]
id = 3
panel = 2
a = [-100.0, 900.0, 800.0]
b = [-900.0, 900.0, 800.0]
height = 1
side = "center"

[[segments]]
id = 4
panel = 2
a = [-100.0, 900.0, 400.0]
b = [-900.0, 900.0, 400.0]
height = 2
side = "center"
"#;

    #[test]
    fn loads_two_panel_scene() {
        let s = parse_scenario(TWO_PANELS).unwrap();
        assert_eq!(s.scene.panels.len(), 2);
        assert_eq!(s.scene.panel(1).segments, vec![1, 2]);
        assert_eq!(s.scene.panel(2).segments, vec![3, 4]);
        assert_eq!(s.scene.n_arms_side(), 1);
    }

    #[test]
    fn serialize_then_reload_is_identical() {
        let s = parse_scenario(TWO_PANELS).unwrap();
        let text = s.to_toml();
        let again = parse_scenario(&text).unwrap();
        assert_eq!(s, again);
        assert_eq!(text, again.to_toml());
    }

    #[test]
    fn duplicate_segment_id_is_named() {
        let text = TWO_PANELS.replacen("id = 2\npanel = 1", "id = 1\npanel = 1", 1);
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Invalid(ValidationError::DuplicateSegment(1))
        ));
        assert!(err.to_string().contains("duplicate segment id 1"));
    }

    #[test]
    fn vertical_side_with_parallel_rule_rejected() {
        let text = TWO_PANELS.replacen(
            "kind = \"vertical_side\"\nexpansion_rule = \"mirror\"",
            "kind = \"vertical_side\"\nexpansion_rule = \"parallel\"",
            1,
        );
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Invalid(ValidationError::RuleMismatch { panel: 1, .. })
        ));
    }

    #[test]
    fn zero_length_segment_rejected() {
        let text = TWO_PANELS.replacen(
            "b = [-1800.0, 400.0, 900.0]",
            "b = [-1000.0, 400.0, 900.0]",
            1,
        );
        assert!(matches!(
            parse_scenario(&text).unwrap_err(),
            ScenarioError::Invalid(ValidationError::ZeroLengthSegment(1))
        ));
    }

    #[test]
    fn height_gap_rejected() {
        let text = TWO_PANELS.replacen("height = 2\nside = \"left\"", "height = 3\nside = \"left\"", 1);
        assert!(matches!(
            parse_scenario(&text).unwrap_err(),
            ScenarioError::Invalid(ValidationError::HeightIndices { panel: 1, .. })
        ));
    }

    #[test]
    fn malformed_text_is_parse_error() {
        assert!(matches!(
            parse_scenario("format_version = [").unwrap_err(),
            ScenarioError::Parse(_)
        ));
    }

    #[test]
    fn wrong_version_rejected() {
        let text = TWO_PANELS.replacen("format_version = 1", "format_version = 7", 1);
        assert!(matches!(
            parse_scenario(&text).unwrap_err(),
            ScenarioError::Version(7)
        ));
    }

    #[test]
    fn unpaired_mirror_partner_rejected() {
        let text = TWO_PANELS.replacen("mirror_partner = 1", "mirror_partner = 2", 1);
        assert!(matches!(
            parse_scenario(&text).unwrap_err(),
            ScenarioError::Invalid(ValidationError::MirrorPartner(_))
        ));
    }
}
