//! Two-layer route planner for multi-arm painting of vehicle bodies on a
//! moving line.
//!
//! The upper layer searches over segment-to-arm assignments and visit
//! orders with a genetic algorithm; the lower layer turns each assignment
//! into timed head trajectories for every arm and audits them.

pub mod ablation;
pub mod evaluation;
pub mod export;
pub mod ga;
pub mod genotype;
pub mod geometry;
pub mod presets;
pub mod repair;
pub mod scene;
pub mod seeding;
pub mod sim;

pub use evaluation::{evaluate, EvaluationReport, Evaluator};
pub use genotype::{decode, ArmAssignment, Layout, UpperSolution};
pub use scene::{Scenario, ScenarioConfig, VehicleScene};
