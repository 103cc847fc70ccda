//! Upper-layer genetic algorithm.
//!
//! Generational loop with elitism: tournament selection, order crossover,
//! swap mutation, repair, evaluation. Variation draws from one seeded
//! ChaCha stream in a fixed order; evaluation is a pure function of each
//! genotype and may run on several threads without changing results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::{EvaluationReport, Evaluator};
use crate::genotype::{validate, UpperSolution};
use crate::repair::{apply_repairs, Reachability, RepairFlags, RepairStats};
use crate::scene::Scenario;
use crate::seeding::{build_seed_population, SeedingError};

/// The three ablation factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodFlags {
    pub seeding: bool,
    pub bottom_up: bool,
    pub few_arms: bool,
}

impl Default for MethodFlags {
    fn default() -> Self {
        Self {
            seeding: true,
            bottom_up: true,
            few_arms: true,
        }
    }
}

impl MethodFlags {
    pub fn repairs(self) -> RepairFlags {
        RepairFlags {
            bottom_up: self.bottom_up,
            few_arms: self.few_arms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub n_pop: usize,
    pub n_gen: usize,
    pub n_t: usize,
    pub mutation_rate: f64,
    pub seed: u64,
    pub elitism: usize,
    /// Evaluation threads; `None` uses the global pool.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub methods: MethodFlags,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            n_pop: 400,
            n_gen: 150,
            n_t: 3,
            mutation_rate: 0.02,
            seed: 0,
            elitism: 2,
            workers: None,
            methods: MethodFlags::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("population size must be even and positive, got {0}")]
    Population(usize),
    #[error("tournament size must be at least 2, got {0}")]
    Tournament(usize),
    #[error("mutation rate must lie in [0, 1], got {0}")]
    MutationRate(f64),
    #[error("elitism {0} exceeds the population size")]
    Elitism(usize),
    #[error("workers must be at least 1")]
    Workers,
    #[error("seed population has {got} individuals, expected {want}")]
    SeedCount { got: usize, want: usize },
    #[error("seed individual {index} is not a valid genotype: {reason}")]
    SeedInvalid { index: usize, reason: String },
    #[error(transparent)]
    Seeding(#[from] SeedingError),
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.n_pop == 0 || !self.n_pop.is_multiple_of(2) {
            return Err(GaError::Population(self.n_pop));
        }
        if self.n_t < 2 {
            return Err(GaError::Tournament(self.n_t));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(GaError::MutationRate(self.mutation_rate));
        }
        if self.elitism > self.n_pop {
            return Err(GaError::Elitism(self.elitism));
        }
        if self.workers == Some(0) {
            return Err(GaError::Workers);
        }
        Ok(())
    }
}

/// Draws `n_t` indices with replacement; the lowest objective wins, the
/// earliest draw on ties.
pub fn tournament_select<R: Rng + ?Sized>(objectives: &[f64], n_t: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..objectives.len());
    for _ in 1..n_t {
        let i = rng.gen_range(0..objectives.len());
        if objectives[i] < objectives[best] {
            best = i;
        }
    }
    best
}

/// Order crossover with the window `k_s..=k_e` (0-based, inclusive).
/// Each child keeps its first parent's window and takes the other genes
/// in the second parent's order.
pub fn order_crossover(
    p1: &UpperSolution,
    p2: &UpperSolution,
    k_s: usize,
    k_e: usize,
) -> (UpperSolution, UpperSolution) {
    fn child(a: &[u32], b: &[u32], k_s: usize, k_e: usize) -> Vec<u32> {
        let mut kept = vec![false; a.len() + 1];
        for &g in &a[k_s..=k_e] {
            kept[g as usize] = true;
        }
        let mut rest = b.iter().copied().filter(|&g| !kept[g as usize]);
        (0..a.len())
            .map(|k| {
                if (k_s..=k_e).contains(&k) {
                    a[k]
                } else {
                    rest.next().expect("same gene set")
                }
            })
            .collect()
    }
    let (a, b) = (p1.genes(), p2.genes());
    (
        UpperSolution::new(child(a, b, k_s, k_e)),
        UpperSolution::new(child(b, a, k_s, k_e)),
    )
}

/// With probability `rate`, swaps two distinct random positions.
pub fn inversion_mutation<R: Rng + ?Sized>(x: &mut UpperSolution, rate: f64, rng: &mut R) -> bool {
    if x.len() < 2 || !rng.gen_bool(rate) {
        return false;
    }
    let i = rng.gen_range(0..x.len());
    let mut j = rng.gen_range(0..x.len() - 1);
    if j >= i {
        j += 1;
    }
    x.swap(i, j);
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_objective: f64,
    pub mean_objective: f64,
    pub best_feasible: bool,
    pub best: UpperSolution,
    pub repairs: RepairStats,
}

/// One record per generation; entry 0 is the initial population.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunTrace {
    pub generations: Vec<GenerationRecord>,
}

impl RunTrace {
    /// First generation whose best individual is strongly feasible.
    pub fn first_feasible(&self) -> Option<usize> {
        self.generations
            .iter()
            .find(|g| g.best_feasible)
            .map(|g| g.generation)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: UpperSolution,
    pub report: EvaluationReport,
    pub trace: RunTrace,
}

/// Evaluation workers, built once per run.
struct Pool {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Pool {
    fn new(workers: Option<usize>) -> Self {
        #[cfg(feature = "parallel")]
        {
            let pool = workers.and_then(|n| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .ok()
            });
            Self { pool }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Self {}
        }
    }

    fn evaluate(&self, evaluator: &Evaluator<'_>, pop: &[UpperSolution]) -> Vec<EvaluationReport> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let job = || pop.par_iter().map(|x| evaluator.evaluate(x)).collect();
            match &self.pool {
                Some(pool) => pool.install(job),
                None => job(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            pop.iter().map(|x| evaluator.evaluate(x)).collect()
        }
    }
}

/// Index order from best to worst; ties keep population order.
fn ranking(reports: &[EvaluationReport]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..reports.len()).collect();
    idx.sort_by(|&a, &b| reports[a].objective.total_cmp(&reports[b].objective));
    idx
}

/// Initial population for a run: boundary-aligned seeds when enabled,
/// otherwise random permutations.
pub fn initial_population(scenario: &Scenario, ga: &GaConfig) -> Result<Vec<UpperSolution>, GaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed ^ 0x5eed);
    if ga.methods.seeding {
        Ok(build_seed_population(
            &scenario.scene,
            &scenario.config,
            ga.n_pop,
            &mut rng,
        )?)
    } else {
        let layout = crate::genotype::Layout::for_scene(&scenario.scene, &scenario.config);
        Ok((0..ga.n_pop)
            .map(|_| UpperSolution::random(&layout, &mut rng))
            .collect())
    }
}

/// Runs the GA. `seed_population` replaces the default initial population
/// when given.
pub fn run(
    scenario: &Scenario,
    ga: &GaConfig,
    seed_population: Option<Vec<UpperSolution>>,
) -> Result<RunResult, GaError> {
    ga.validate()?;
    let evaluator = Evaluator::new(scenario);
    let layout = evaluator.layout;
    let reach = Reachability::from_context(&evaluator.ctx);
    let scene = &scenario.scene;
    let back_door_rule = scenario.config.back_door_rule;
    let flags = ga.methods.repairs();

    let mut pop = match seed_population {
        Some(p) => p,
        None => initial_population(scenario, ga)?,
    };
    if pop.len() != ga.n_pop {
        return Err(GaError::SeedCount {
            got: pop.len(),
            want: ga.n_pop,
        });
    }
    for (index, x) in pop.iter().enumerate() {
        validate(x, &layout).map_err(|e| GaError::SeedInvalid {
            index,
            reason: e.to_string(),
        })?;
    }
    let mut stats = RepairStats::default();
    for x in &mut pop {
        stats += apply_repairs(x, &layout, scene, &reach, back_door_rule, flags);
    }
    let pool = Pool::new(ga.workers);
    let mut reports = pool.evaluate(&evaluator, &pop);
    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed);
    let mut trace = RunTrace::default();

    let record = |generation: usize,
                  pop: &[UpperSolution],
                  reports: &[EvaluationReport],
                  repairs: RepairStats| {
        let order = ranking(reports);
        let best = order[0];
        GenerationRecord {
            generation,
            best_objective: reports[best].objective,
            mean_objective: reports.iter().map(|r| r.objective).sum::<f64>() / reports.len() as f64,
            best_feasible: reports[best].strong_feasible,
            best: pop[best].clone(),
            repairs,
        }
    };
    trace.generations.push(record(0, &pop, &reports, stats));
    let first = ranking(&reports)[0];
    let mut best = (pop[first].clone(), reports[first].clone());

    for generation in 1..=ga.n_gen {
        let objectives: Vec<f64> = reports.iter().map(|r| r.objective).collect();
        let order = ranking(&reports);
        let mut next: Vec<UpperSolution> = order[..ga.elitism].iter().map(|&i| pop[i].clone()).collect();
        let mut next_reports: Vec<EvaluationReport> =
            order[..ga.elitism].iter().map(|&i| reports[i].clone()).collect();
        let mut children = Vec::with_capacity(ga.n_pop - ga.elitism);
        let mut stats = RepairStats::default();
        while next.len() + children.len() < ga.n_pop {
            let p1 = tournament_select(&objectives, ga.n_t, &mut rng);
            let p2 = tournament_select(&objectives, ga.n_t, &mut rng);
            let mut cut = [rng.gen_range(0..layout.n_dim), rng.gen_range(0..layout.n_dim)];
            cut.sort_unstable();
            let (c1, c2) = order_crossover(&pop[p1], &pop[p2], cut[0], cut[1]);
            for mut c in [c1, c2] {
                if next.len() + children.len() >= ga.n_pop {
                    break;
                }
                inversion_mutation(&mut c, ga.mutation_rate, &mut rng);
                stats += apply_repairs(&mut c, &layout, scene, &reach, back_door_rule, flags);
                children.push(c);
            }
        }
        let child_reports = pool.evaluate(&evaluator, &children);
        next.extend(children);
        next_reports.extend(child_reports);
        pop = next;
        reports = next_reports;
        let rec = record(generation, &pop, &reports, stats);
        if rec.best_objective < best.1.objective {
            let i = ranking(&reports)[0];
            best = (pop[i].clone(), reports[i].clone());
        }
        trace.generations.push(rec);
    }
    Ok(RunResult {
        best: best.0,
        report: best.1,
        trace,
    })
}
