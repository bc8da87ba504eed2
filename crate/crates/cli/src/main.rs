use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fluctlab::{execute, ExperimentKind, Overrides};

#[derive(Parser, Debug)]
#[command(name = "fluctlab", version, about = "Run a fluctuation experiment from a JSON config")]
struct Cli {
    #[arg(value_enum)]
    experiment: ExperimentKind,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.csv and summary.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    budget_seconds: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides { seed: cli.seed, out: cli.out, budget_seconds: cli.budget_seconds };
    let code = match execute(cli.experiment, cli.config.as_deref(), &overrides) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fluctlab {}: {e}", cli.experiment.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
