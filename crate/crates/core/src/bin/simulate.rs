use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use eig_sim::atomic::{CoefficientSource, SignConvention, VortexSquare};
use eig_sim::runner::{load_config_with, run_scenario, write_outputs, Overrides, RunnerError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Coefficients {
    Rederived,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sign {
    Physical,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Square {
    Hermitian,
    Analytic,
}

/// Diffraction orders of a vortex-driven electromagnetically induced grating.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Cli {
    /// TOML configuration file.
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenario name (fig2..fig8, custom); overrides the file.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, value_enum)]
    coefficients: Option<Coefficients>,
    #[arg(long, value_enum)]
    sign: Option<Sign>,
    #[arg(long = "vortex-square", value_enum)]
    vortex_square: Option<Square>,
    /// Worker threads for the map computations.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<(), RunnerError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(RunnerError::Validation("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunnerError::Validation(format!("--threads: {e}")))?;
    }
    let overrides = Overrides {
        scenario: cli.scenario,
        coefficients: cli.coefficients.map(|c| match c {
            Coefficients::Rederived => CoefficientSource::Rederived,
            Coefficients::AsPrinted => CoefficientSource::AsPrinted,
        }),
        sign: cli.sign.map(|s| match s {
            Sign::Physical => SignConvention::Physical,
            Sign::AsPrinted => SignConvention::AsPrinted,
        }),
        vortex_square: cli.vortex_square.map(|v| match v {
            Square::Hermitian => VortexSquare::Hermitian,
            Square::Analytic => VortexSquare::Analytic,
        }),
    };
    let mut scenario = load_config_with(&cli.config, &overrides)?;
    if let Some(out) = cli.out {
        scenario.output_dir = out;
    }
    if let Some(w) = scenario.drive.weak_probe_warning(&scenario.atom) {
        eprintln!("warning: {w}");
    }
    let tables = run_scenario(&scenario)?;
    let written = write_outputs(&scenario, &tables, &scenario.output_dir)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
