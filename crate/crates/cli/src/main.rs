use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cnls_cli::commands::{self, Command, Options, EXIT_FAILED, EXIT_MALFORMED};
use cnls_cli::config::RunConfig;

#[derive(Parser)]
#[command(name = "cnls", version, about = "Blow-up construction experiments for NLS with complex coefficient")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Configuration file.
    #[arg(long, global = true, default_value = "cnls.toml")]
    config: PathBuf,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Halve the time step (doubling temporal resolution).
    #[arg(long, global = true)]
    dt_refine: bool,
    /// Worker threads for parallel jobs.
    #[arg(long, global = true, env = "CNLS_WORKERS")]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Check the theorem's assumptions; exit 0 if they hold, 1 if not.
    CheckParams,
    /// Profile norm scaling tables.
    ProfileNorms,
    /// Integrate from the configured initial data.
    Evolve,
    /// Full blow-up study with graded checks.
    BlowupStudy,
    /// Rate fits only.
    FitRates,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(EXIT_FAILED as u8);
        }
    }
    let cmd = match cli.command {
        Cmd::CheckParams => Command::CheckParams,
        Cmd::ProfileNorms => Command::ProfileNorms,
        Cmd::Evolve => Command::Evolve,
        Cmd::BlowupStudy => Command::BlowupStudy,
        Cmd::FitRates => Command::FitRates,
    };
    let cfg = match RunConfig::load(&cli.config) {
        Ok((cfg, _)) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_MALFORMED as u8);
        }
    };
    let opts = Options {
        out: &cli.out,
        dt_refine: cli.dt_refine,
    };
    match commands::run(cmd, &cfg, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
