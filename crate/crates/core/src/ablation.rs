//! Ablation over seeding and the two optional repairs.
//!
//! Eight methods cover every on/off combination of the three factors.
//! Each method runs once per seed on the same scenario and GA settings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ga::{run, GaConfig, GaError, MethodFlags};
use crate::scene::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub name: &'static str,
    pub flags: MethodFlags,
}

const fn method(name: &'static str, seeding: bool, bottom_up: bool, few_arms: bool) -> Method {
    Method {
        name,
        flags: MethodFlags {
            seeding,
            bottom_up,
            few_arms,
        },
    }
}

pub const METHODS: [Method; 8] = [
    method("M1", false, false, false),
    method("M2", true, false, false),
    method("M3", false, true, false),
    method("M4", false, false, true),
    method("M5", true, true, false),
    method("M6", true, false, true),
    method("M7", false, true, true),
    method("M8", true, true, true),
];

pub fn method_by_name(name: &str) -> Option<Method> {
    METHODS.iter().copied().find(|m| m.name.eq_ignore_ascii_case(name))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRun {
    pub method: &'static str,
    pub seed: u64,
    pub first_feasible: Option<usize>,
    pub final_objective: f64,
    pub final_feasible: bool,
    pub work_time_max: f64,
    /// Best objective per generation, entry 0 the initial population.
    pub curve: Vec<f64>,
}

impl AblationRun {
    /// First feasible generation, with never-feasible runs scored as
    /// `n_gen + 1`.
    pub fn first_feasible_or(&self, n_gen: usize) -> usize {
        self.first_feasible.unwrap_or(n_gen + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: &'static str,
    pub runs: usize,
    pub feasible_rate: f64,
    pub mean_first_feasible: f64,
    pub mean_final_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationResult {
    pub n_gen: usize,
    pub runs: Vec<AblationRun>,
}

impl AblationResult {
    pub fn runs_of<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a AblationRun> + 'a {
        self.runs.iter().filter(move |r| r.method == method)
    }

    pub fn summary(&self) -> Vec<MethodSummary> {
        let mut names: Vec<&'static str> = Vec::new();
        for r in &self.runs {
            if !names.contains(&r.method) {
                names.push(r.method);
            }
        }
        names
            .into_iter()
            .map(|m| {
                let runs: Vec<&AblationRun> = self.runs_of(m).collect();
                let n = runs.len() as f64;
                MethodSummary {
                    method: m,
                    runs: runs.len(),
                    feasible_rate: runs.iter().filter(|r| r.final_feasible).count() as f64 / n,
                    mean_first_feasible: runs.iter().map(|r| r.first_feasible_or(self.n_gen) as f64).sum::<f64>() / n,
                    mean_final_objective: runs.iter().map(|r| r.final_objective).sum::<f64>() / n,
                }
            })
            .collect()
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("method,seed,first_feasible,final_objective,final_feasible,work_time_max\n");
        for r in &self.runs {
            let ff = r.first_feasible.map_or(String::new(), |g| g.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{},{:.2}",
                r.method, r.seed, ff, r.final_objective, r.final_feasible, r.work_time_max
            );
        }
        out
    }

    /// Mean best objective per generation for each method.
    pub fn curves_csv(&self) -> String {
        let summary = self.summary();
        let mut out = String::from("generation");
        for s in &summary {
            out.push(',');
            out.push_str(s.method);
        }
        out.push('\n');
        let len = self.runs.iter().map(|r| r.curve.len()).max().unwrap_or(0);
        for g in 0..len {
            let _ = write!(out, "{g}");
            for s in &summary {
                let vals: Vec<f64> = self.runs_of(s.method).filter_map(|r| r.curve.get(g).copied()).collect();
                let mean = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
                let _ = write!(out, ",{mean:.6}");
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("method,runs,feasible_rate,mean_first_feasible,mean_final_objective\n");
        for s in self.summary() {
            let _ = writeln!(
                out,
                "{},{},{:.3},{:.2},{:.6}",
                s.method, s.runs, s.feasible_rate, s.mean_first_feasible, s.mean_final_objective
            );
        }
        out
    }
}

/// Runs every method for every seed. `base.seed` and `base.methods` are
/// overridden per run.
pub fn run_ablation(
    scenario: &Scenario,
    base: &GaConfig,
    methods: &[Method],
    seeds: &[u64],
) -> Result<AblationResult, GaError> {
    let mut runs = Vec::with_capacity(methods.len() * seeds.len());
    for m in methods {
        for &seed in seeds {
            let ga = GaConfig {
                seed,
                methods: m.flags,
                ..base.clone()
            };
            let res = run(scenario, &ga, None)?;
            runs.push(AblationRun {
                method: m.name,
                seed,
                first_feasible: res.trace.first_feasible(),
                final_objective: res.report.objective,
                final_feasible: res.report.strong_feasible,
                work_time_max: res.report.work_time_max,
                curve: res.trace.generations.iter().map(|g| g.best_objective).collect(),
            });
        }
    }
    Ok(AblationResult {
        n_gen: base.n_gen,
        runs,
    })
}
