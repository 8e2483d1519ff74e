//! `evans-ep`: command-line driver for solitary-wave profiles, Evans
//! functions and stability integrals.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 when a numerical
//! diagnostic is raised.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ep_stability::export::{Cell, Table};
use ep_stability::EpError;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "evans-ep", version, about = "Euler-Poisson solitary waves, Evans functions and stability criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Worker threads; defaults to the available hardware parallelism.
    #[arg(long, env = "EVANS_EP_JOBS")]
    pub jobs: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solitary-wave profile on [-X, X].
    #[command(args_override_self = true)]
    Wave(commands::WaveArgs),
    /// Peak values (n_s, n*, u*, phi*) for a list of amplitudes.
    #[command(args_override_self = true)]
    Peaks(commands::PeaksArgs),
    /// Evans function D(lambda) on a grid, or D*(Lambda) with --scaled.
    #[command(args_override_self = true)]
    Evans(commands::EvansArgs),
    /// KdV Evans function on a grid.
    #[command(name = "evans-kdv", args_override_self = true)]
    EvansKdv(commands::EvansKdvArgs),
    /// sup |D* - D_KdV| on the |Lambda| = 5 arc for a list of amplitudes.
    #[command(args_override_self = true)]
    Converge(commands::ConvergeArgs),
    /// Count zeros of D inside a circle or half annulus.
    #[command(args_override_self = true)]
    Zeros(commands::ZerosArgs),
    /// Q(c) and dQ/dc over an amplitude sweep.
    #[command(args_override_self = true)]
    Criterion(commands::CriterionArgs),
    /// Cold-ion Q_0(c) and its speed derivative under a quadrature policy.
    #[command(name = "criterion-k0", args_override_self = true)]
    CriterionK0(commands::CriterionK0Args),
    /// Weighted essential-spectrum curves d_+(ik - beta), d_-(ik - beta).
    #[command(args_override_self = true)]
    Spectrum(commands::SpectrumArgs),
    /// Steepest normalised velocity gradient of the cold-ion wave.
    #[command(args_override_self = true)]
    Threshold(commands::ThresholdArgs),
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<EpError> for Failure {
    fn from(e: EpError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

/// What a command produced.
pub enum Output {
    Table(Table),
    Json(Value),
}

pub struct Report {
    pub output: Output,
    /// Numerical diagnostics for points that could not be computed.
    pub diagnostics: Vec<String>,
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

fn render(report: &Report, format: Format) -> String {
    match (&report.output, format) {
        (Output::Table(t), Format::Csv) => t.to_csv(),
        (Output::Table(t), Format::Json) => {
            let rows: Vec<Value> = t.rows.iter().map(|r| Value::Array(r.iter().map(cell_json).collect())).collect();
            let v = json!({ "meta": t.meta, "columns": t.columns, "rows": rows, "diagnostics": report.diagnostics });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap_or_default())
        }
        (Output::Json(v), _) => {
            let mut v = v.clone();
            if let Value::Object(m) = &mut v {
                m.insert("diagnostics".into(), json!(report.diagnostics));
            }
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap_or_default())
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<Vec<String>, Failure> {
    let (common, default_format) = match &cli.command {
        Command::Zeros(a) => (a.common.clone(), Format::Json),
        Command::Wave(a) => (a.common.clone(), Format::Csv),
        Command::Peaks(a) => (a.common.clone(), Format::Csv),
        Command::Evans(a) => (a.common.clone(), Format::Csv),
        Command::EvansKdv(a) => (a.common.clone(), Format::Csv),
        Command::Converge(a) => (a.common.clone(), Format::Csv),
        Command::Criterion(a) => (a.common.clone(), Format::Csv),
        Command::CriterionK0(a) => (a.common.clone(), Format::Csv),
        Command::Spectrum(a) => (a.common.clone(), Format::Csv),
        Command::Threshold(a) => (a.common.clone(), Format::Csv),
    };
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let report = match &cli.command {
        Command::Wave(a) => commands::wave(a)?,
        Command::Peaks(a) => commands::peaks(a)?,
        Command::Evans(a) => commands::evans(a)?,
        Command::EvansKdv(a) => commands::evans_kdv(a)?,
        Command::Converge(a) => commands::converge(a)?,
        Command::Zeros(a) => commands::zeros(a)?,
        Command::Criterion(a) => commands::criterion(a)?,
        Command::CriterionK0(a) => commands::criterion_k0(a)?,
        Command::Spectrum(a) => commands::spectrum(a)?,
        Command::Threshold(a) => commands::threshold(a)?,
    };
    emit(&render(&report, common.format.unwrap_or(default_format)), &common.out)?;
    Ok(report.diagnostics)
}

fn diagnostics_json(status: &str, diagnostics: &[String]) -> String {
    json!({ "status": status, "diagnostics": diagnostics }).to_string()
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(d) if d.is_empty() => ExitCode::SUCCESS,
        Ok(d) => {
            eprintln!("{}", diagnostics_json("numerical", &d));
            ExitCode::from(2)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("{}", diagnostics_json("numerical", &[m]));
            ExitCode::from(2)
        }
    }
}
