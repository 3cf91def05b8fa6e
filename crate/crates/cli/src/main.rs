//! `workint`: work-statistics datasets and oracle verification from a JSON
//! run config.

mod commands;
mod config;
mod dataset;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};
use dataset::Dataset;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "workint",
    version,
    about = "Interferometric work statistics of a driven qubit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Work distribution P(W) per grid point.
    Workdist(Common),
    /// Average dissipated work and its visibility bounds per grid point.
    Bounds(Common),
    /// |P_N(0) - P_continuous(0)| per grid point.
    Convergence(Common),
    /// Run the oracle audits on the grid; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Output file (default: config `output`, else standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: config `format`, else csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = match threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))
}

fn emit(data: &Dataset, common: &Common, cfg: &RunConfig) -> Result<(), CliError> {
    let format = common.format.or(cfg.format).unwrap_or(Format::Csv);
    let bytes = data.render(format)?;
    match common.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, corrupt) = match &cli.command {
        Command::Workdist(c) | Command::Bounds(c) | Command::Convergence(c) => (c, false),
        Command::Verify {
            common,
            inject_corruption,
        } => (common, *inject_corruption),
    };
    let cfg = RunConfig::load(&common.config)?;
    let pool = thread_pool(common.threads)?;
    pool.install(|| match &cli.command {
        Command::Workdist(_) => emit(&commands::workdist(&cfg)?, common, &cfg),
        Command::Bounds(_) => emit(&commands::bounds(&cfg)?, common, &cfg),
        Command::Convergence(_) => emit(&commands::convergence(&cfg)?, common, &cfg),
        Command::Verify { .. } => {
            let (data, failed) = commands::verify(&cfg, corrupt)?;
            emit(&data, common, &cfg)?;
            let total = data.rows.len();
            eprintln!("workint: {} of {total} checks passed", total - failed);
            if failed > 0 {
                return Err(CliError::Verification { failed, total });
            }
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("workint: {e}");
            e.exit_code()
        }
    }
}
