//! `nvreadout` command-line tool.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on internal failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use nvreadout::cavity::{self, SpinState};
use nvreadout::montecarlo::{self, FlipMode};
use nvreadout::presets::{self, Preset};
use nvreadout::readout;
use nvreadout::scenario::{load_scenario, ScenarioFile};
use nvreadout::sweep::{self, Scale, SweepSpec, SweepVariable};
use nvreadout::table::{num, Table};
use nvreadout::ModelError;

#[derive(Debug, Parser)]
#[command(name = "nvreadout", version, about = "Cavity-enhanced NV spin readout toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON file; absent keys take default values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Monte Carlo master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo trials per spin branch (overrides the config).
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Sweep variable.
    #[arg(long, global = true)]
    var: Option<String>,

    /// Lower bound of the sweep or spectrum range.
    #[arg(long, global = true, allow_negative_numbers = true)]
    min: Option<f64>,

    /// Upper bound of the sweep or spectrum range.
    #[arg(long, global = true, allow_negative_numbers = true)]
    max: Option<f64>,

    /// Number of grid points.
    #[arg(long, global = true)]
    points: Option<usize>,

    /// Logarithmic sweep spacing.
    #[arg(long, global = true)]
    log: bool,

    /// Spin state for `spectrum` (m0, m_plus1, m_minus1).
    #[arg(long, global = true)]
    spin: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflection spectrum against probe detuning.
    Spectrum,
    /// One-dimensional parameter sweep (--var, --min, --max, --points, --log).
    Sweep,
    /// Spin contrast, Q factors, Purcell factor and coupling regime.
    Contrast,
    /// Analytic readout-error budget.
    ErrorBudget,
    /// Seeded Monte Carlo of the readout experiment.
    Simulate,
    /// Figure data: fig3a, fig3b, fig3c, fig3d, fig4, fig5.
    Preset { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Either many rows, or one record rendered as a JSON object.
enum Report {
    Rows(Table),
    Record(Table),
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(path) => load_scenario(path)?,
        None => ScenarioFile::default(),
    };
    let (report, default_format) = match &cli.command {
        Command::Spectrum => (spectrum(cli, &config)?, Format::Csv),
        Command::Sweep => (sweep(cli, &config)?, Format::Csv),
        Command::Contrast => (contrast(&config)?, Format::Json),
        Command::ErrorBudget => (error_budget(&config)?, Format::Json),
        Command::Simulate => (simulate(cli, &config)?, Format::Json),
        Command::Preset { name } => {
            let preset: Preset = name.parse()?;
            (Report::Rows(presets::run_preset(preset)?), Format::Csv)
        }
    };
    let text = render(&report, cli.format.unwrap_or(default_format))?;
    emit(cli.out.as_ref(), &text)
}

fn render(report: &Report, format: Format) -> Result<String, Failure> {
    let table = match report {
        Report::Rows(t) | Report::Record(t) => t,
    };
    match format {
        Format::Csv => Ok(table.to_csv_string()),
        Format::Json => {
            let value = match report {
                Report::Rows(t) => t.to_json(),
                Report::Record(t) => t.row_object(&t.rows[0]),
            };
            serde_json::to_string_pretty(&value)
                .map(|s| s + "\n")
                .map_err(|e| Failure::Internal(e.to_string()))
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Internal(format!("writing {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Internal(format!("writing stdout: {e}"))),
    }
}

fn spectrum(cli: &Cli, config: &ScenarioFile) -> Result<Report, Failure> {
    let spin: SpinState = cli.spin.as_deref().unwrap_or("m0").parse()?;
    let s = config.scenario();
    let spec = cavity::spectrum(
        &s.cavity,
        &s.emitter,
        spin,
        cli.min.unwrap_or(-presets::FIG3_SPAN_UEV),
        cli.max.unwrap_or(presets::FIG3_SPAN_UEV),
        cli.points.unwrap_or(presets::FIG3_POINTS),
    )?;
    Ok(Report::Rows(presets::spectrum_table(&spec)))
}

fn sweep(cli: &Cli, config: &ScenarioFile) -> Result<Report, Failure> {
    let missing = |flag: &str| Failure::Input(format!("sweep requires --{flag}"));
    let variable: SweepVariable = cli.var.as_deref().ok_or_else(|| missing("var"))?.parse()?;
    let spec = SweepSpec {
        variable,
        min: cli.min.ok_or_else(|| missing("min"))?,
        max: cli.max.ok_or_else(|| missing("max"))?,
        n_points: cli.points.unwrap_or(101),
        scale: if cli.log { Scale::Logarithmic } else { Scale::Linear },
    };
    let rows = sweep::run_sweep(&config.scenario(), &spec)?;
    Ok(Report::Rows(sweep::sweep_table(variable, &rows)))
}

fn contrast(config: &ScenarioFile) -> Result<Report, Failure> {
    let s = config.scenario();
    let (c, e) = (&s.cavity, &s.emitter);
    let q = cavity::q_factors(c)?;
    let mut t = Table::new([
        "reflectance_m0",
        "reflectance_m_plus1",
        "reflectance_m_minus1",
        "contrast_m_plus1",
        "contrast_m_minus1",
        "q_total",
        "q_cavity",
        "purcell_factor",
        "crossover_eta_ueV",
        "regime",
    ]);
    t.push(vec![
        num(cavity::reflectance(c, e, SpinState::M0, 0.0)?),
        num(cavity::reflectance(c, e, SpinState::MPlus1, 0.0)?),
        num(cavity::reflectance(c, e, SpinState::MMinus1, 0.0)?),
        num(cavity::contrast(c, e, SpinState::MPlus1)?),
        num(cavity::contrast(c, e, SpinState::MMinus1)?),
        num(q.q_total),
        q.q_cavity.map_or(Value::Null, num),
        num(cavity::purcell_factor(c, e)?),
        num(cavity::crossover_eta(e.g, e.gamma)?),
        Value::from(cavity::classify_regime(c, e)?.label()),
    ]);
    Ok(Report::Record(t))
}

fn error_budget(config: &ScenarioFile) -> Result<Report, Failure> {
    let s = config.scenario();
    let b = readout::error_budget(&s.cavity, &s.emitter, &s.setup)?;
    let optimal = readout::optimal_threshold(b.lambda_dark, b.lambda_bright)
        .map_or(Value::Null, Value::from);
    let mut t = Table::new([
        "lambda_dark",
        "lambda_bright",
        "threshold",
        "optimal_threshold",
        "counting_error",
        "measurement_time_us",
        "decoherence_error",
        "singlet_error",
        "total_error",
    ]);
    t.push(vec![
        num(b.lambda_dark),
        num(b.lambda_bright),
        Value::from(s.setup.threshold),
        optimal,
        num(b.counting_error),
        num(b.measurement_time),
        num(b.decoherence_error),
        num(b.singlet_error),
        num(b.total_error),
    ]);
    Ok(Report::Record(t))
}

fn simulate(cli: &Cli, config: &ScenarioFile) -> Result<Report, Failure> {
    let mut mc = config.mc_config();
    if let Some(seed) = cli.seed {
        mc.master_seed = seed;
    }
    if let Some(trials) = cli.trials {
        mc.n_trials = trials;
    }
    let summary = montecarlo::run_campaign(&mc)?;
    let s = &mc.scenario;
    let budget = readout::error_budget(&s.cavity, &s.emitter, &s.setup).ok();
    let mut t = Table::new([
        "n_trials",
        "master_seed",
        "flip_mode",
        "empirical_dark_error",
        "empirical_bright_error",
        "empirical_total",
        "dark_standard_error",
        "bright_standard_error",
        "total_standard_error",
        "analytic_counting_error",
        "analytic_total_error",
    ]);
    t.push(vec![
        Value::from(summary.n_trials),
        Value::from(summary.master_seed),
        Value::from(match mc.flip_mode {
            FlipMode::MidMeasurement => "mid_measurement",
            FlipMode::PaperStrict => "paper_strict",
        }),
        num(summary.empirical_dark_error),
        num(summary.empirical_bright_error),
        num(summary.empirical_total),
        num(summary.dark_standard_error),
        num(summary.bright_standard_error),
        num(summary.total_standard_error),
        budget.map_or(Value::Null, |b| num(b.counting_error)),
        budget.map_or(Value::Null, |b| num(b.total_error)),
    ]);
    Ok(Report::Record(t))
}
