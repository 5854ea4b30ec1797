//! Command line front end.
//!
//! Four subcommands: `fit` estimates or plugs in model parameters from a
//! statistics file, `score` computes per-row fdr/Fdr under fixed
//! parameters, `curve` emits model curves on an even grid, and `simulate`
//! runs the scenario study against the truth oracle. Exit codes: 0 on
//! success, 2 on input or usage errors, 3 when a fit did not converge
//! (results are still written).

mod input;
mod output;

pub use input::{parse_statistics, read_statistics};

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::evaluate::{run_study, MethodSpec};
use crate::fitting::{mle_fit, plugin_fit, FitOptions};
use crate::models::{ModelKind, StatisticScale, ThresholdModel};
use crate::simulate::SimulationScenario;
use crate::{Error, Result};

/// Parse the process arguments, run, and return the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version render on stdout and exit cleanly
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fdrthresh",
    version,
    about = "Local and tail-area false discovery rate estimation with parametric threshold curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a threshold model to a statistics file
    Fit(FitArgs),
    /// Score a statistics file under fixed model parameters
    Score(ScoreArgs),
    /// Emit fdr/Fdr/density curves on an even grid
    Curve(CurveArgs),
    /// Run a simulation study against the exact truth
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KindArg {
    Bum,
    Hnd,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> ModelKind {
        match k {
            KindArg::Bum => ModelKind::Bum,
            KindArg::Hnd => ModelKind::Hnd,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ScaleArg {
    Z,
    P,
}

impl From<ScaleArg> for StatisticScale {
    fn from(s: ScaleArg) -> StatisticScale {
        match s {
            ScaleArg::Z => StatisticScale::ZScore,
            ScaleArg::P => StatisticScale::PValue,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CurveScaleArg {
    Z,
    P,
    Y,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Mle,
    Plugin,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PresetArg {
    Separated,
    Overlapping,
}

#[derive(Args)]
struct FitArgs {
    /// Statistics file (tab or comma delimited, with header)
    #[arg(long)]
    input: PathBuf,
    /// Scale of the statistic column
    #[arg(long, value_enum, default_value = "z")]
    scale: ScaleArg,
    /// Statistic column name; default: first numeric column
    #[arg(long)]
    column: Option<String>,
    /// Model family
    #[arg(long, value_enum)]
    kind: KindArg,
    /// mle estimates (s, sigma); plugin takes them from --eta0/--sigma
    #[arg(long, value_enum, default_value = "mle")]
    mode: ModeArg,
    /// Null proportion (plugin mode)
    #[arg(long)]
    eta0: Option<f64>,
    /// Null scale: z-scores are divided by it (plugin mode)
    #[arg(long)]
    sigma: Option<f64>,
    /// Output path; default: stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Args)]
struct ScoreArgs {
    /// Statistics file (tab or comma delimited, with header)
    #[arg(long)]
    input: PathBuf,
    /// Scale of the statistic column
    #[arg(long, value_enum, default_value = "z")]
    scale: ScaleArg,
    /// Statistic column name; default: first numeric column
    #[arg(long)]
    column: Option<String>,
    /// Model family
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Null proportion
    #[arg(long)]
    eta0: f64,
    /// Null scale: z-scores are divided by it
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Output path; default: stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct CurveArgs {
    /// Model family
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Null proportion
    #[arg(long)]
    eta0: f64,
    /// Null scale of the z grid
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Grid scale: z covers [0, 6], p and y cover [0, 1)
    #[arg(long, value_enum, default_value = "z")]
    scale: CurveScaleArg,
    /// Number of grid points
    #[arg(long, default_value_t = 601)]
    grid: usize,
    /// Output path; default: stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scenario
    #[arg(long, value_enum, conflicts_with = "scenario")]
    preset: Option<PresetArg>,
    /// Scenario file (key = value lines)
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Methods to compare, comma separated: bum-native, hnd-native,
    /// bum-plugin, hnd-plugin, truth
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "bum-native,hnd-native,bum-plugin,hnd-plugin,truth"
    )]
    methods: Vec<String>,
    /// Override the scenario's repetition count
    #[arg(long = "B")]
    reps: Option<usize>,
    /// Override the scenario's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; default: stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// json: full summary; csv: flat per-repetition table
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Score(args) => cmd_score(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let batch = read_statistics(&args.input, args.column.as_deref(), args.scale.into())?;
    let kind: ModelKind = args.kind.into();
    let (fit, _) = match args.mode {
        ModeArg::Plugin => {
            let eta0 = args
                .eta0
                .ok_or_else(|| Error::Input("plugin mode needs --eta0".into()))?;
            let sigma = args
                .sigma
                .ok_or_else(|| Error::Input("plugin mode needs --sigma".into()))?;
            plugin_fit(kind, eta0, sigma, &batch)?
        }
        ModeArg::Mle => mle_fit(kind, &batch, &FitOptions::default())?,
    };
    let text = match args.format {
        FormatArg::Json => output::to_json(&fit),
        FormatArg::Csv => output::fit_csv(&fit),
    };
    output::write_output(args.out.as_deref(), &text)?;
    Ok(if fit.converged { 0 } else { 3 })
}

fn cmd_score(args: ScoreArgs) -> Result<i32> {
    let batch = read_statistics(&args.input, args.column.as_deref(), args.scale.into())?;
    let model = ThresholdModel::from_eta0(args.kind.into(), args.eta0, args.sigma)?;
    let table = model.score_batch(&batch)?;
    let text = match args.format {
        FormatArg::Json => output::to_json(&table),
        FormatArg::Csv => output::score_csv(&table),
    };
    output::write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_curve(args: CurveArgs) -> Result<i32> {
    if args.grid < 2 {
        return Err(Error::Input(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    let model = ThresholdModel::from_eta0(args.kind.into(), args.eta0, args.sigma)?;
    let n = args.grid;
    let (scale, xs): (StatisticScale, Vec<f64>) = match args.scale {
        // closed z interval; half-open unit interval keeps BUM densities
        // finite at every emitted point except the y -> 1 spike itself
        CurveScaleArg::Z => (
            StatisticScale::ZScore,
            (0..n).map(|i| 6.0 * i as f64 / (n - 1) as f64).collect(),
        ),
        CurveScaleArg::P => (
            StatisticScale::PValue,
            (0..n).map(|i| i as f64 / n as f64).collect(),
        ),
        CurveScaleArg::Y => (
            StatisticScale::NativeY,
            (0..n).map(|i| i as f64 / n as f64).collect(),
        ),
    };
    let points = xs
        .into_iter()
        .map(|x| model.curve_point(x, scale))
        .collect::<Result<Vec<_>>>()?;
    let text = match args.format {
        FormatArg::Json => output::to_json(&points),
        FormatArg::Csv => output::curve_csv(&points),
    };
    output::write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let mut scenario = match (args.preset, &args.scenario) {
        (Some(PresetArg::Separated), None) => SimulationScenario::separated(),
        (Some(PresetArg::Overlapping), None) => SimulationScenario::overlapping(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
            SimulationScenario::parse(&text)?
        }
        (None, None) => {
            return Err(Error::Input("simulate needs --preset or --scenario".into()));
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if let Some(reps) = args.reps {
        if reps < 1 {
            return Err(Error::Input("--B must be at least 1".into()));
        }
        scenario.reps = reps;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let methods = args
        .methods
        .iter()
        .map(|name| MethodSpec::parse(name.trim(), &scenario))
        .collect::<Result<Vec<_>>>()?;
    let summary = run_study(&scenario, &methods)?;
    let text = match args.format {
        FormatArg::Json => output::to_json(&summary),
        FormatArg::Csv => output::study_table_csv(&summary),
    };
    output::write_output(args.out.as_deref(), &text)?;
    Ok(0)
}
