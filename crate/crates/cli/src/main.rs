use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paintplan_core::ablation::{method_by_name, run_ablation, Method, METHODS};
use paintplan_core::export::{
    config_hash, genotype_json, parse_assignment, report_json, routes_svg, trace_csv, trajectory_csv, Stamp,
};
use paintplan_core::ga::{self, GaConfig};
use paintplan_core::scene::load_scenario;
use paintplan_core::{presets, Evaluator, Layout, Scenario};

#[derive(Parser)]
#[command(name = "paintplan", version, about = "Multi-arm painting route optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a scenario and write the best plan.
    Solve(SolveArgs),
    /// Simulate and score a given assignment.
    Audit(AuditArgs),
    /// Run the M1..M8 ablation over several seeds.
    Ablation(AblationArgs),
    /// Print a preset scenario as TOML.
    Preset { name: String },
}

#[derive(Args)]
struct Source {
    /// Scenario TOML file.
    scenario: Option<PathBuf>,
    /// Built-in scenario instead of a file: desk, v1, v2, v3.
    #[arg(long, conflicts_with = "scenario")]
    preset: Option<String>,
}

#[derive(Args)]
struct GaArgs {
    #[arg(long, default_value_t = 400)]
    pop: usize,
    #[arg(long, default_value_t = 150)]
    gens: usize,
    /// Tournament size.
    #[arg(long, default_value_t = 3)]
    tournament: usize,
    #[arg(long, default_value_t = 0.02)]
    mutation: f64,
    /// Evaluation threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Method from the ablation table (M8 is the full method).
    #[arg(long, default_value = "M8")]
    method: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write the initial population to seeds.json.
    #[arg(long)]
    dump_seeds: bool,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    source: Source,
    /// Assignment JSON: {"arms": [[ids], ...]} or {"genes": [...]}.
    #[arg(long)]
    assignment: PathBuf,
    /// Also write trajectory.csv, report.json and routes.svg here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AblationArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    ga: GaArgs,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Comma-separated method names; all eight by default.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, default_value = "ablation")]
    out: PathBuf,
}

struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

fn load(source: &Source) -> Result<Scenario, ConfigError> {
    match (&source.scenario, &source.preset) {
        (Some(path), None) => Ok(load_scenario(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?),
        (None, Some(name)) => presets::by_name(name).ok_or_else(|| {
            ConfigError(format!("unknown preset {name:?}; expected one of {}", presets::PRESET_NAMES.join(", ")))
        }),
        _ => Err(ConfigError("give a scenario file or --preset".into())),
    }
}

fn ga_config(args: &GaArgs, seed: u64, method: Method) -> Result<GaConfig, ConfigError> {
    let ga = GaConfig {
        n_pop: args.pop,
        n_gen: args.gens,
        n_t: args.tournament,
        mutation_rate: args.mutation,
        seed,
        workers: args.workers,
        methods: method.flags,
        ..GaConfig::default()
    };
    ga.validate()?;
    Ok(ga)
}

fn method(name: &str) -> Result<Method, ConfigError> {
    method_by_name(name).ok_or_else(|| ConfigError(format!("unknown method {name:?}; expected M1..M8")))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), ConfigError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn solve(args: &SolveArgs) -> Result<bool, ConfigError> {
    let scenario = load(&args.source)?;
    let ga = ga_config(&args.ga, args.seed, method(&args.method)?)?;
    let stamp = Stamp {
        config_hash: config_hash(&scenario, Some(&ga)),
        seed: Some(ga.seed),
    };
    fs::create_dir_all(&args.out).map_err(|e| ConfigError(format!("{}: {e}", args.out.display())))?;
    let initial = ga::initial_population(&scenario, &ga)?;
    if args.dump_seeds {
        let genes: Vec<&[u32]> = initial.iter().map(|x| x.genes()).collect();
        let doc = serde_json::json!({
            "format_version": paintplan_core::export::OUTPUT_VERSION,
            "config_hash": stamp.config_hash,
            "seed": ga.seed,
            "population": genes,
        });
        write(&args.out, "seeds.json", &(serde_json::to_string(&doc)? + "\n"))?;
    }
    let result = ga::run(&scenario, &ga, Some(initial))?;
    let evaluator = Evaluator::new(&scenario);
    let eval = evaluator.evaluate_full(&result.best);
    write(&args.out, "scenario.toml", &scenario.to_toml())?;
    write(&args.out, "genotype.json", &genotype_json(&result.best, &evaluator.layout, &stamp))?;
    write(&args.out, "trajectory.csv", &trajectory_csv(&eval.both.trajectory, &stamp))?;
    write(&args.out, "report.json", &report_json(&eval, &stamp))?;
    write(&args.out, "trace.csv", &trace_csv(&result.trace, &stamp))?;
    write(&args.out, "routes.svg", &routes_svg(&scenario.scene, &eval.both.trajectory, &stamp))?;

    let r = &eval.report;
    println!("objective      {:.6}", r.objective);
    println!("work time max  {:.2} s (cycle {:.2} s)", r.work_time_max, scenario.config.t_p);
    println!("strong feasible {}", r.strong_feasible);
    match result.trace.first_feasible() {
        Some(g) => println!("first feasible generation {g}"),
        None => println!("no feasible generation"),
    }
    for v in &r.violations {
        println!("  violation: {v}");
    }
    println!("outputs in {}", args.out.display());
    Ok(r.strong_feasible)
}

fn audit(args: &AuditArgs) -> Result<bool, ConfigError> {
    let scenario = load(&args.source)?;
    let layout = Layout::for_scene(&scenario.scene, &scenario.config);
    let path = &args.assignment;
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let assign = parse_assignment(&text, &scenario.scene, &layout)?;
    let evaluator = Evaluator::new(&scenario);
    let eval = evaluator.audit(&assign);
    let stamp = Stamp {
        config_hash: config_hash(&scenario, None),
        seed: None,
    };
    let report = report_json(&eval, &stamp);
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| ConfigError(format!("{}: {e}", dir.display())))?;
        write(dir, "report.json", &report)?;
        write(dir, "trajectory.csv", &trajectory_csv(&eval.both.trajectory, &stamp))?;
        write(dir, "routes.svg", &routes_svg(&scenario.scene, &eval.both.trajectory, &stamp))?;
    }
    print!("{report}");
    Ok(eval.report.strong_feasible)
}

fn ablation(args: &AblationArgs) -> Result<bool, ConfigError> {
    let scenario = load(&args.source)?;
    let methods: Vec<Method> = if args.methods.is_empty() {
        METHODS.to_vec()
    } else {
        args.methods.iter().map(|m| method(m)).collect::<Result<_, _>>()?
    };
    if args.seeds.is_empty() {
        return Err(ConfigError("no seeds given".into()));
    }
    let base = ga_config(&args.ga, 0, METHODS[7])?;
    let result = run_ablation(&scenario, &base, &methods, &args.seeds)?;
    fs::create_dir_all(&args.out).map_err(|e| ConfigError(format!("{}: {e}", args.out.display())))?;
    write(&args.out, "runs.csv", &result.runs_csv())?;
    write(&args.out, "summary.csv", &result.summary_csv())?;
    write(&args.out, "curves.csv", &result.curves_csv())?;
    print!("{}", result.summary_csv());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Audit(a) => audit(a),
        Command::Ablation(a) => ablation(a),
        Command::Preset { name } => presets::by_name(name)
            .map(|s| {
                print!("{}", s.to_toml());
                true
            })
            .ok_or_else(|| ConfigError(format!("unknown preset {name:?}"))),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
