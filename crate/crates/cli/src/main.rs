//! `wgqed`: runs emission scenarios and writes CSV curves plus a JSON manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use wgqed::scenario::{self, load_scenario, Mode, Scenario, Solver};
use wgqed::{Error, Result};

#[derive(Parser)]
#[command(name = "wgqed", version, about = "Collective emission of emitters beside a tight-binding waveguide")]
struct Cli {
    /// Output directory.
    #[arg(long, short, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact lattice evolution only.
    Evolve { scenario: PathBuf },
    /// Lattice evolution plus the Laplace-space amplitude.
    Laplace { scenario: PathBuf },
    /// Single-photon reflection spectrum of the scatterer ensemble.
    Spectrum { scenario: PathBuf },
    /// Runs a scenario with the solvers and sweep it lists.
    Sweep { scenario: PathBuf },
    /// Runs a built-in figure preset and writes its scenario file next to the output.
    Figure {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(scenario::PRESET_NAMES))]
        name: String,
    },
    /// Fits exponential rates before and after the round trip time of a curve CSV.
    Fit {
        curve: PathBuf,
        /// Round trip time in units of 1/(2J); without it a single rate is fitted.
        #[arg(long)]
        t0: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", &e.render().to_string()),
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({"error": {"kind": kind, "message": message.trim_end()}}));
    ExitCode::FAILURE
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Evolve { scenario } => {
            let mut s = load_scenario(scenario)?;
            s.mode = Mode::Dynamics;
            s.solvers = vec![Solver::Oracle];
            run_and_write(&s, &cli.out)
        }
        Command::Laplace { scenario } => {
            let mut s = load_scenario(scenario)?;
            s.solvers = vec![Solver::Oracle, Solver::Resolvent];
            run_and_write(&s, &cli.out)
        }
        Command::Spectrum { scenario } => {
            let mut s = load_scenario(scenario)?;
            s.mode = Mode::Spectrum;
            run_and_write(&s, &cli.out)
        }
        Command::Sweep { scenario } => run_and_write(&load_scenario(scenario)?, &cli.out),
        Command::Figure { name } => {
            let text = scenario::preset_json(name)?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(format!("{name}.json"));
            std::fs::write(&path, &text)?;
            run_and_write(&Scenario::from_json_str(&text)?, &cli.out)
        }
        Command::Fit { curve, t0 } => fit(curve, *t0),
    }
}

fn run_and_write(s: &Scenario, out: &Path) -> Result<()> {
    if s.mode == Mode::Dynamics && s.t_max <= 0.0 {
        return Err(Error::Config { field: "t_max".into(), reason: "required in dynamics mode".into() });
    }
    let bundle = scenario::run(s)?;
    let paths = bundle.write_to(out)?;
    let mut text = bundle.summary();
    for p in paths {
        text.push_str(&format!("wrote {}\n", p.display()));
    }
    emit(&text)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn fit(path: &Path, t0: Option<f64>) -> Result<()> {
    let file = std::fs::File::open(path).map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    let curve = scenario::parse_curve_csv(file)?;
    let doc = match t0 {
        Some(t0) => serde_json::to_value(scenario::fit_rates(&curve.times, &curve.values, t0)?)?,
        None => {
            let end = *curve.times.last().unwrap_or(&0.0);
            serde_json::to_value(scenario::fit_exponential(&curve.times, &curve.values, (0.1 * end, 0.9 * end))?)?
        }
    };
    emit(&(serde_json::to_string_pretty(&doc)? + "\n"))
}
