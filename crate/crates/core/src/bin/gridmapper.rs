use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridmapper::mission::eval::eval_csv;
use gridmapper::worldgen::save_with_sidecar;
use gridmapper::{
    evaluate_predictor, generate_floorplan, run_benchmark, run_mission, BenchSuite, Dataset, Error, EvalConfig,
    GeneratorConfig, KeyValues, MissionConfig, OccupancyGrid, PlannerKind, PredictorChoice, Result, SensorRig,
    ThresholdConfig,
};

#[derive(Parser)]
#[command(name = "gridmapper", version, about = "Prediction-aided grid exploration simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate floorplans as .grid files with .meta sidecars
    Gen(GenArgs),
    /// Run one mission and print its record as JSON lines
    Run(RunArgs),
    /// Run a planner x predictor suite over directories of maps
    Bench(BenchArgs),
    /// F1 of observations and predictions as observations accumulate
    EvalPredictor(EvalArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    /// key=value generator settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
}

#[derive(Args)]
struct MissionArgs {
    /// key=value mission settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    beams: Option<usize>,
    #[arg(long)]
    beam_range: Option<f64>,
    #[arg(long)]
    delta_free: Option<f64>,
    #[arg(long)]
    delta_obstacle: Option<f64>,
    #[arg(long)]
    coverage_goal: Option<f64>,
    #[arg(long)]
    step_cap: Option<usize>,
    #[arg(long)]
    no_failsafe: bool,
}

impl MissionArgs {
    fn config(&self) -> Result<MissionConfig> {
        let mut cfg = MissionConfig::default();
        if let Some(path) = &self.config {
            cfg = cfg.apply_key_values(&read_kv(path)?)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.beams.is_some() || self.beam_range.is_some() {
            cfg.rig = SensorRig::new(
                self.beams.unwrap_or(cfg.rig.beam_count),
                self.beam_range.unwrap_or(cfg.rig.range),
            );
        }
        cfg.thresholds = ThresholdConfig::new(
            self.delta_free.unwrap_or(cfg.thresholds.delta_free),
            self.delta_obstacle.unwrap_or(cfg.thresholds.delta_obstacle),
        );
        if let Some(v) = self.coverage_goal {
            cfg.coverage_goal = v;
        }
        if let Some(v) = self.step_cap {
            cfg.step_cap = Some(v);
        }
        if self.no_failsafe {
            cfg.failsafe = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Ground-truth .grid file
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    planner: Option<PlannerKind>,
    /// off, null, oracle or learned:PATH
    #[arg(long)]
    predictor: Option<String>,
    #[command(flatten)]
    mission: MissionArgs,
    /// Write the record here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .grid files; repeat for several datasets
    #[arg(long = "data", required = true)]
    data: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values = ["random", "nearest", "cost-utility"])]
    planners: Vec<PlannerKind>,
    #[arg(long, value_delimiter = ',', default_values = ["null", "oracle"])]
    predictors: Vec<String>,
    #[arg(long, default_value_t = 10)]
    random_runs: usize,
    #[command(flatten)]
    mission: MissionArgs,
    /// Per-run CSV; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per planner x predictor CSV
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "null")]
    predictor: String,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16, 32])]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    delta_free: Option<f64>,
    #[arg(long)]
    delta_obstacle: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_kv(path: &Path) -> Result<KeyValues> {
    KeyValues::parse(&std::fs::read_to_string(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dataset_name(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

fn gen(args: GenArgs) -> Result<()> {
    let mut cfg = GeneratorConfig::default();
    if let Some(path) = &args.config {
        cfg = cfg.apply_key_values(&read_kv(path)?)?;
    }
    cfg.height = args.height.unwrap_or(cfg.height);
    cfg.width = args.width.unwrap_or(cfg.width);
    if args.count == 0 {
        return Err(Error::Config("count must be positive".into()));
    }
    std::fs::create_dir_all(&args.out)?;
    for k in 0..args.count as u64 {
        let map_cfg = GeneratorConfig {
            seed: args.seed + k,
            ..cfg.clone()
        };
        let grid = generate_floorplan(&map_cfg)?;
        let path = save_with_sidecar(&args.out, &map_cfg, &grid)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let truth = OccupancyGrid::load(&args.map)?;
    let mut cfg = args.mission.config()?;
    if let Some(p) = args.planner {
        cfg.planner = p;
    }
    if let Some(p) = &args.predictor {
        cfg.predictor = PredictorChoice::parse(p)?;
    }
    let record = run_mission(&truth, &cfg)?;
    emit(args.out.as_deref(), &record.to_json_lines())
}

fn bench(args: BenchArgs) -> Result<()> {
    let datasets = args
        .data
        .iter()
        .map(|dir| Dataset::load_dir(dataset_name(dir), dir))
        .collect::<Result<Vec<_>>>()?;
    let mut suite = BenchSuite::new(datasets);
    suite.planners = args.planners;
    suite.predictors = args
        .predictors
        .iter()
        .map(|p| PredictorChoice::parse(p))
        .collect::<Result<_>>()?;
    suite.random_runs = args.random_runs;
    suite.base = args.mission.config()?;
    let report = run_benchmark(&suite)?;
    emit(args.out.as_deref(), &report.runs_csv())?;
    if let Some(path) = &args.summary {
        std::fs::write(path, report.summary_csv())?;
    }
    Ok(())
}

fn eval_predictor(args: EvalArgs) -> Result<()> {
    let maps = Dataset::load_dir(dataset_name(&args.data), &args.data)?.maps;
    if maps.is_empty() {
        return Err(Error::Config(format!("no .grid files in {}", args.data.display())));
    }
    let defaults = ThresholdConfig::default();
    let cfg = EvalConfig {
        observation_counts: args.counts,
        thresholds: ThresholdConfig::new(
            args.delta_free.unwrap_or(defaults.delta_free),
            args.delta_obstacle.unwrap_or(defaults.delta_obstacle),
        ),
        seed: args.seed,
        ..EvalConfig::default()
    };
    let rows = evaluate_predictor(&maps, &PredictorChoice::parse(&args.predictor)?, &cfg)?;
    emit(args.out.as_deref(), &eval_csv(&rows))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
        Command::EvalPredictor(a) => eval_predictor(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
