//! `agility` — compute cyber-agility metrics from effectiveness matrices
//! and generation timelines.
//!
//! Exit codes: 0 success, 1 validation or data errors (every violation is
//! printed), 2 usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use agility_core::oracle::{oracle_metrics, OracleError};
use agility_core::report::{
    compute_report, report_diff, write_plot_data, MetricSelection, RunParams,
};
use agility_core::scenario::{generate_scenario, EffectivenessModel, ScenarioConfig};
use agility_core::{
    infer_attack_generations, ingest, AgiSignMode, CandidateUniverse, EeVariant,
    GenerationTimeline, InferenceParams, LbtMode, Party, TieBreak, Time,
};

#[derive(Parser)]
#[command(
    name = "agility",
    version,
    about = "Cyber-agility metrics from attack/defense generation timelines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the metric suite from a matrix file and write the report
    Compute(ComputeArgs),
    /// Convert an alert log into a matrix file
    Ingest(IngestArgs),
    /// Flag probable attack generations from a matrix
    Infer(InferArgs),
    /// Generate synthetic scenario fixtures
    Simulate(SimulateArgs),
    /// Cross-check the metric suite against the naive reference (desk-scale)
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LbtModeArg {
    Strict,
    Averaged,
}

#[derive(Clone, Copy, ValueEnum)]
enum EeVariantArg {
    FullHorizon,
    FromGeneration,
}

#[derive(Clone, Copy, ValueEnum)]
enum AgiSignArg {
    Signed,
    Absolute,
}

#[derive(Clone, Copy, ValueEnum)]
enum CandidatesArg {
    EveryUnit,
    Provided,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    StepResponse,
    Drift,
    Stalemate,
}

#[derive(Args)]
struct MetricParams {
    /// LBT acceptability threshold in [0, 1]
    #[arg(long, default_value_t = 0.12)]
    epsilon: f64,
    /// Inference disruption threshold in (0, 1)
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    #[arg(long, value_enum, default_value = "strict")]
    lbt_mode: LbtModeArg,
    #[arg(long, value_enum, default_value = "full-horizon")]
    ee_variant: EeVariantArg,
    #[arg(long, value_enum, default_value = "signed")]
    agi_sign: AgiSignArg,
    /// Metrics to compute: `all` or a comma list like `gt,egt,lbt`
    #[arg(long, default_value = "all")]
    metrics: String,
}

impl MetricParams {
    fn to_run_params(&self) -> Result<RunParams, CliError> {
        let params = RunParams {
            epsilon: self.epsilon,
            tau: self.tau,
            lbt_mode: match self.lbt_mode {
                LbtModeArg::Strict => LbtMode::Strict,
                LbtModeArg::Averaged => LbtMode::Averaged,
            },
            ee_variant: match self.ee_variant {
                EeVariantArg::FullHorizon => EeVariant::FullHorizon,
                EeVariantArg::FromGeneration => EeVariant::FromGeneration,
            },
            agi_sign: match self.agi_sign {
                AgiSignArg::Signed => AgiSignMode::Signed,
                AgiSignArg::Absolute => AgiSignMode::Absolute,
            },
            metrics: MetricSelection::parse(&self.metrics).map_err(CliError::from)?,
            egt_tolerance: 0.0,
            tt_tie_break: TieBreak::MostRecent,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// Matrix file to analyze
    #[arg(long)]
    matrix: PathBuf,
    /// Directory for the report and plot data
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    params: MetricParams,
}

#[derive(Args)]
struct IngestArgs {
    /// Alert log to convert
    #[arg(long)]
    alerts: PathBuf,
    /// Matrix file to write
    #[arg(long)]
    out: PathBuf,
    /// Name recorded for the static metric
    #[arg(long, default_value = "true-positive rate")]
    metric_name: String,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Disruption threshold in (0, 1)
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    #[arg(long, value_enum, default_value = "every-unit")]
    candidates: CandidatesArg,
    /// Candidate times (comma-separated) when --candidates provided
    #[arg(long)]
    list: Option<String>,
    /// Write the probable timeline here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Final time T of the horizon [0, T]
    #[arg(long)]
    horizon: Option<Time>,
    /// Mean gap between defense generations
    #[arg(long)]
    defense_rate: Option<f64>,
    /// Mean gap between attack generations
    #[arg(long)]
    attack_rate: Option<f64>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Step size / slope scale in [0, 1]
    #[arg(long)]
    magnitude: Option<f64>,
    /// Fraction of cells masked missing, in [0, 1)
    #[arg(long)]
    missing: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of scenarios (seeds seed, seed+1, ...)
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    params: MetricParams,
}

/// Anything that should terminate the run with exit code 1.
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(error: E) -> Self {
        let mut message = error.to_string();
        let mut source = error.source();
        while let Some(cause) = source {
            let text = cause.to_string();
            if !message.contains(&text) {
                message.push_str(&format!("\n  caused by: {text}"));
            }
            source = cause.source();
        }
        CliError(message)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => run_compute(args),
        Command::Ingest(args) => run_ingest(args),
        Command::Infer(args) => run_infer(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run_compute(args: ComputeArgs) -> Result<(), CliError> {
    let params = args.params.to_run_params()?;
    let parsed = ingest::parse_matrix_file(&args.matrix)?;
    let report = compute_report(
        &parsed.matrix,
        &parsed.defense,
        &parsed.attack,
        &params,
        args.matrix.display().to_string(),
    )?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError(format!("{}: {e}", args.out_dir.display())))?;
    let report_path = args.out_dir.join("report.json");
    report.write_json(&report_path)?;
    println!("wrote {}", report_path.display());

    if params.metrics.is_all() {
        for name in write_plot_data(&args.out_dir, &report, &parsed.matrix)? {
            println!("wrote {}", args.out_dir.join(name).display());
        }
    }

    print_headline(&report);
    Ok(())
}

fn print_headline(report: &agility_core::report::AgilityReport) {
    let mean = |series: &Option<agility_core::report::ReportSeries<agility_core::MetricValue>>| {
        series
            .as_ref()
            .and_then(|s| s.summary.mean)
            .map(|m| format!("{m:.2}"))
            .unwrap_or_else(|| "n/a".to_string())
    };
    println!(
        "GT mean (defender/attacker): {} / {}",
        mean(&report.gt_defender),
        mean(&report.gt_attacker)
    );
    println!(
        "EGT mean (defender/attacker): {} / {}",
        mean(&report.egt_defender),
        mean(&report.egt_attacker)
    );
    if let (Some(d), Some(a)) = (&report.lbt_defender, &report.lbt_attacker) {
        println!("LBT (defender/attacker): {} / {}", d.value, a.value);
    }
    if let Some(agi) = &report.agi_defender {
        match agi.agi {
            Some(v) => println!("AGI (defender): {v:+.6}"),
            None => println!("AGI (defender): indeterminate"),
        }
    }
}

fn run_ingest(args: IngestArgs) -> Result<(), CliError> {
    let records = ingest::parse_alert_log(&args.alerts)?;
    let (matrix, defense) = ingest::build_matrix_from_alert_log(&records, &args.metric_name)?;
    // alert logs carry no observed attack generations; the base generation
    // stands until `infer` adds probable ones
    let attack = GenerationTimeline::new(Party::Attacker, vec![matrix.horizon().start()]);
    ingest::write_matrix_file(&args.out, &matrix, &defense, &attack)?;
    println!(
        "wrote {} ({} defense generations, horizon [{}, {}], offset {})",
        args.out.display(),
        defense.len(),
        matrix.horizon().start(),
        matrix.horizon().end(),
        matrix.horizon().offset
    );
    Ok(())
}

fn run_infer(args: InferArgs) -> Result<(), CliError> {
    let parsed = ingest::parse_matrix_file(&args.matrix)?;
    let candidates = match args.candidates {
        CandidatesArg::EveryUnit => CandidateUniverse::EveryTimeUnit,
        CandidatesArg::Provided => {
            let list = args.list.as_deref().ok_or_else(|| {
                CliError("--candidates provided requires --list".to_string())
            })?;
            let times = list
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<Time>().map_err(|_| {
                        CliError(format!("bad candidate time {cell:?} in --list"))
                    })
                })
                .collect::<Result<Vec<Time>, CliError>>()?;
            CandidateUniverse::Provided(times)
        }
    };
    let params = InferenceParams::new(args.tau, candidates)?;
    let matrix = parsed.matrix.normalize_orientation()?;
    let timeline = infer_attack_generations(&matrix, &params)?;
    let mut json = serde_json::to_string_pretty(&timeline).expect("timeline serializes");
    json.push('\n');
    match &args.out {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            println!("wrote {} ({} probable generations)", path.display(), timeline.len());
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_key_values(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(horizon) = args.horizon {
        config.horizon_length = horizon;
    }
    if let Some(rate) = args.defense_rate {
        config.defense_gen_rate = rate;
    }
    if let Some(rate) = args.attack_rate {
        config.attack_gen_rate = rate;
    }
    if let Some(model) = args.model {
        config.effectiveness_model = match model {
            ModelArg::StepResponse => EffectivenessModel::StepResponse,
            ModelArg::Drift => EffectivenessModel::Drift,
            ModelArg::Stalemate => EffectivenessModel::Stalemate,
        };
    }
    if let Some(magnitude) = args.magnitude {
        config.gen_effect_magnitude = magnitude;
    }
    if let Some(missing) = args.missing {
        config.missing_fraction = missing;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError(format!("{}: {e}", args.out_dir.display())))?;
    for index in 0..args.count {
        let scenario = generate_scenario(&config.for_batch_index(index))?;
        let path = args.out_dir.join(format!("scenario_{index:03}.csv"));
        ingest::write_matrix_file(&path, &scenario.matrix, &scenario.defense, &scenario.attack)?;
        println!(
            "wrote {} (defense gens {}, attack gens {}, seed {})",
            path.display(),
            scenario.defense.len(),
            scenario.attack.len(),
            config.seed.wrapping_add(index)
        );
    }
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<(), CliError> {
    let params = args.params.to_run_params()?;
    let parsed = ingest::parse_matrix_file(&args.matrix)?;
    let source = args.matrix.display().to_string();
    let main = compute_report(
        &parsed.matrix,
        &parsed.defense,
        &parsed.attack,
        &params,
        source.clone(),
    )?;
    let oracle = match oracle_metrics(&parsed.matrix, &parsed.defense, &parsed.attack, &params, source)
    {
        Ok(report) => report,
        Err(OracleError::HorizonTooLarge { span, max }) => {
            return Err(CliError(format!(
                "oracle refuses horizons longer than {max}: span is {span}"
            )))
        }
        Err(OracleError::Report(e)) => return Err(e.into()),
    };
    let diffs = report_diff(&main, &oracle, 1e-12);
    if diffs.is_empty() {
        println!("oracle agreement: main path matches the naive reference on every field");
        Ok(())
    } else {
        for diff in &diffs {
            eprintln!("mismatch: {diff}");
        }
        Err(CliError(format!("{} field(s) differ from the oracle", diffs.len())))
    }
}
