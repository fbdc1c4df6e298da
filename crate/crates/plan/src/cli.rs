//! Argument parsing and command execution.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use miab_core::experiments::{run_campaign, VariantId};
use miab_core::optimizer::OracleError;
use miab_core::{evaluate, solve_ga, solve_oracle};

use crate::files::{load_json, AssignmentFile, CampaignFile, GaDto, InputError, ScenarioFile, SolverDto};
use crate::manifest::{RunManifest, RunSpec};
use crate::output::{self, CampaignOutput, EvaluateOutput, EvaluationDoc, SolveOutput};

pub const SEED_ENV: &str = "MIAB_PLAN_SEED";

#[derive(Debug, Parser)]
#[command(name = "miab-plan", version, about = "Plan mobile IAB node placement around obstacles")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a fixed assignment; exit 3 when it is infeasible.
    Evaluate(EvaluateArgs),
    /// Search placements and associations with the genetic algorithm.
    Solve(SolveArgs),
    /// Exhaustive search over a placement grid and all associations.
    Oracle(OracleArgs),
    /// Run the V0..V5 campaign and write records.csv, cdf_*.csv and campaign.json.
    Campaign(CampaignArgs),
    /// Print the JSON schema of an input document.
    Schema(SchemaArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(required_unless_present = "manifest")]
    pub scenario: Option<PathBuf>,
    #[arg(required_unless_present = "manifest")]
    pub assignment: Option<PathBuf>,
    /// Re-run from a manifest or an output document that embeds one.
    #[arg(long, conflicts_with_all = ["scenario", "assignment"])]
    pub manifest: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GaFlags {
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population_size: Option<usize>,
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    #[arg(long)]
    pub crossover_rate: Option<f64>,
    #[arg(long)]
    pub elite_count: Option<usize>,
    #[arg(long)]
    pub penalty_weight: Option<f64>,
}

impl GaFlags {
    fn apply(&self, ga: &mut GaDto) {
        if let Some(v) = self.generations {
            ga.generations = v;
        }
        if let Some(v) = self.population_size {
            ga.population_size = v;
        }
        if let Some(v) = self.mutation_rate {
            ga.mutation_rate = v;
        }
        if let Some(v) = self.crossover_rate {
            ga.crossover_rate = v;
        }
        if let Some(v) = self.elite_count {
            ga.elite_count = v;
        }
        if self.penalty_weight.is_some() {
            ga.penalty_weight = self.penalty_weight;
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(required_unless_present = "manifest")]
    pub scenario: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["scenario", "config"])]
    pub manifest: Option<PathBuf>,
    /// GA settings file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Search seed (falls back to MIAB_PLAN_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub ga: GaFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-generation trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(required_unless_present = "manifest")]
    pub scenario: Option<PathBuf>,
    #[arg(long, conflicts_with = "scenario")]
    pub manifest: Option<PathBuf>,
    /// Spacing of the placement grid in metres.
    #[arg(long, default_value_t = 20.0)]
    pub grid_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// Campaign file; omitted fields and a missing file use the built-in defaults.
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "config")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Master seed (overrides the file, falls back to MIAB_PLAN_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub scenarios_per_area: Option<usize>,
    #[arg(long)]
    pub v1_with_miab: bool,
    /// Use the grid oracle with this step instead of the GA.
    #[arg(long)]
    pub oracle_grid_step: Option<f64>,
    #[command(flatten)]
    pub ga: GaFlags,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemaKind {
    Scenario,
    Assignment,
    Campaign,
    Ga,
    Manifest,
}

#[derive(Debug, Args)]
pub struct SchemaArgs {
    #[arg(value_enum, default_value = "scenario")]
    pub document: SchemaKind,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Infeasible,
    SearchFailed,
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("exhaustive search needs {required} evaluations, above the budget of {limit}")]
    Budget { required: u128, limit: u128 },
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl PlanError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Budget { .. } => 5,
            Self::Output { .. } => 1,
        }
    }
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Ok => 0,
            Self::Infeasible => 3,
            Self::SearchFailed => 4,
        }
    }
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> PlanError {
    PlanError::Output { path: path.display().to_string(), message: e.to_string() }
}

fn env_seed() -> Result<Option<u64>, PlanError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| InputError::new(SEED_ENV, format!("`{v}` is not an unsigned 64-bit integer")).into()),
        Err(_) => Ok(None),
    }
}

fn emit<T: serde::Serialize>(out: Option<&Path>, stdout: &mut dyn Write, value: &T) -> Result<(), PlanError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| output_err(path, e))?;
            output::write_json(BufWriter::new(file), value).map_err(|e| output_err(path, e))
        }
        None => output::write_json(stdout, value).map_err(|e| output_err(Path::new("<stdout>"), e)),
    }
}

fn load_manifest(path: &Path, expected: &str) -> Result<RunManifest, PlanError> {
    let m = RunManifest::load(path)?;
    if m.run.command() != expected {
        return Err(InputError::new(
            path.display().to_string(),
            format!("manifest records a `{}` run, not `{expected}`", m.run.command()),
        )
        .into());
    }
    Ok(m)
}

fn scenario_name(path: &Option<PathBuf>, manifest: &Option<PathBuf>) -> String {
    manifest.as_ref().or(path.as_ref()).map(|p| p.display().to_string()).unwrap_or_default()
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Status, PlanError> {
    if let Some(n) = cli.workers {
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match cli.command {
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Oracle(a) => cmd_oracle(a, stdout),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Schema(a) => cmd_schema(a, stdout),
    }
}

fn cmd_evaluate(args: EvaluateArgs, stdout: &mut dyn Write) -> Result<Status, PlanError> {
    let manifest = match &args.manifest {
        Some(p) => load_manifest(p, "evaluate")?,
        None => {
            let scenario: ScenarioFile = load_json(args.scenario.as_deref().expect("required by clap"))?;
            let assignment: AssignmentFile = load_json(args.assignment.as_deref().expect("required by clap"))?;
            RunManifest::new(0, RunSpec::Evaluate { scenario, assignment })
        }
    };
    let RunSpec::Evaluate { scenario, assignment } = &manifest.run else { unreachable!() };
    let scenario = scenario.to_scenario(&scenario_name(&args.scenario, &args.manifest))?;
    let assignment_name = args.manifest.as_ref().or(args.assignment.as_ref()).map(|p| p.display().to_string());
    let evaluation = evaluate(&scenario, &assignment.to_assignment())
        .map_err(|e| InputError::new(assignment_name.unwrap_or_default(), e.to_string()))?;
    let doc = EvaluateOutput { manifest: &manifest, evaluation: EvaluationDoc::from(&evaluation) };
    emit(args.out.as_deref(), stdout, &doc)?;
    Ok(if evaluation.feasible { Status::Ok } else { Status::Infeasible })
}

fn cmd_solve(args: SolveArgs, stdout: &mut dyn Write) -> Result<Status, PlanError> {
    let manifest = match &args.manifest {
        Some(p) => load_manifest(p, "solve")?,
        None => {
            let scenario: ScenarioFile = load_json(args.scenario.as_deref().expect("required by clap"))?;
            let mut ga: GaDto = match &args.config {
                Some(p) => load_json(p)?,
                None => GaDto::default(),
            };
            args.ga.apply(&mut ga);
            let seed = match args.seed {
                Some(s) => s,
                None => env_seed()?.unwrap_or(0),
            };
            RunManifest::new(seed, RunSpec::Solve { scenario, ga, seed })
        }
    };
    let RunSpec::Solve { scenario, ga, seed } = &manifest.run else { unreachable!() };
    let name = scenario_name(&args.scenario, &args.manifest);
    let scenario = scenario.to_scenario(&name)?;
    let result = solve_ga(&scenario, &ga.to_config(*seed)).map_err(|e| InputError::new(&name, e.to_string()))?;
    if let Some(path) = &args.trace {
        let file = File::create(path).map_err(|e| output_err(path, e))?;
        output::write_trace(BufWriter::new(file), &result).map_err(|e| output_err(path, e))?;
    }
    emit(args.out.as_deref(), stdout, &SolveOutput::new(&manifest, "ga", &result))?;
    Ok(if result.best_evaluation.feasible { Status::Ok } else { Status::SearchFailed })
}

fn cmd_oracle(args: OracleArgs, stdout: &mut dyn Write) -> Result<Status, PlanError> {
    let manifest = match &args.manifest {
        Some(p) => load_manifest(p, "oracle")?,
        None => {
            let scenario: ScenarioFile = load_json(args.scenario.as_deref().expect("required by clap"))?;
            RunManifest::new(0, RunSpec::Oracle { scenario, grid_step_m: args.grid_step })
        }
    };
    let RunSpec::Oracle { scenario, grid_step_m } = &manifest.run else { unreachable!() };
    let name = scenario_name(&args.scenario, &args.manifest);
    let scenario = scenario.to_scenario(&name)?;
    let result = solve_oracle(&scenario, *grid_step_m).map_err(|e| match e {
        OracleError::BudgetExceeded { required, limit } => PlanError::Budget { required, limit },
        other => InputError::new(&name, other.to_string()).into(),
    })?;
    emit(args.out.as_deref(), stdout, &SolveOutput::new(&manifest, "oracle", &result))?;
    Ok(if result.best_evaluation.feasible { Status::Ok } else { Status::SearchFailed })
}

fn cmd_campaign(args: CampaignArgs) -> Result<Status, PlanError> {
    let (manifest, name) = match &args.manifest {
        Some(p) => (load_manifest(p, "campaign")?, p.display().to_string()),
        None => {
            let (mut file, name) = match &args.config {
                Some(p) => (load_json::<CampaignFile>(p)?, p.display().to_string()),
                None => (CampaignFile::default(), "<defaults>".to_owned()),
            };
            let seed = match (args.seed, file.seed) {
                (Some(s), _) | (None, Some(s)) => s,
                (None, None) => env_seed()?.unwrap_or(0),
            };
            file.seed = Some(seed);
            if let Some(n) = args.scenarios_per_area {
                file.scenarios_per_area = n;
            }
            if args.v1_with_miab {
                file.v1_with_miab = true;
            }
            if let Some(step) = args.oracle_grid_step {
                file.solver = SolverDto::Oracle { grid_step_m: step };
            }
            args.ga.apply(&mut file.ga);
            (RunManifest::new(seed, RunSpec::Campaign { config: file }), name)
        }
    };
    let RunSpec::Campaign { config } = &manifest.run else { unreachable!() };
    let core_config = config.to_config(&name)?;
    let (records, report) = run_campaign(&core_config).map_err(|e| InputError::new(&name, e.to_string()))?;

    let dir = &args.out_dir;
    fs::create_dir_all(dir).map_err(|e| output_err(dir, e))?;
    let path = dir.join("records.csv");
    let file = File::create(&path).map_err(|e| output_err(&path, e))?;
    output::write_records(BufWriter::new(file), &records).map_err(|e| output_err(&path, e))?;
    for variant in VariantId::ALL {
        let path = dir.join(output::cdf_file_name(variant));
        let file = File::create(&path).map_err(|e| output_err(&path, e))?;
        output::write_cdf(BufWriter::new(file), &report.summary(variant).cdf).map_err(|e| output_err(&path, e))?;
    }
    let path = dir.join("campaign.json");
    let file = File::create(&path).map_err(|e| output_err(&path, e))?;
    output::write_json(BufWriter::new(file), &CampaignOutput::new(&manifest, records.len(), &report))
        .map_err(|e| output_err(&path, e))?;

    Ok(if !records.is_empty() && report.failed_runs == records.len() { Status::SearchFailed } else { Status::Ok })
}

fn cmd_schema(args: SchemaArgs, stdout: &mut dyn Write) -> Result<Status, PlanError> {
    let schema = match args.document {
        SchemaKind::Scenario => schemars::schema_for!(ScenarioFile),
        SchemaKind::Assignment => schemars::schema_for!(AssignmentFile),
        SchemaKind::Campaign => schemars::schema_for!(CampaignFile),
        SchemaKind::Ga => schemars::schema_for!(GaDto),
        SchemaKind::Manifest => schemars::schema_for!(RunManifest),
    };
    output::write_json(stdout, &schema).map_err(|e| output_err(Path::new("<stdout>"), e))?;
    Ok(Status::Ok)
}

/// Parses arguments, runs, reports errors on standard error and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
