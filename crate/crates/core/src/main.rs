use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slabwalk::cli::{self, CliError};
use slabwalk::config::RunConfig;

/// Slab-lattice graphs and exact lazy-walk heat kernels.
#[derive(Debug, Parser)]
#[command(name = "slabwalk", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Induct the scale schedule and record the constants of each round.
    Schedule,
    /// Enumerate the target graph and dump it.
    Build,
    /// Diagonal heat kernel of the target graph.
    Kernel,
    /// Glue the two halves and tabulate the return-probability ratio.
    Experiment,
    /// Run the configured checks and write the report.
    Verify,
    /// Split the glued return probability by visits to x.
    Decompose,
}

fn run(args: &Args) -> Result<(), CliError> {
    let path = args.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg: RunConfig = cli::load_config(path)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    let out = cfg.output_dir.clone();
    let written = match args.command {
        Command::Schedule => cli::cmd_schedule(&cfg, &out)?,
        Command::Build => cli::cmd_build(&cfg, &out)?,
        Command::Kernel => cli::cmd_kernel(&cfg, &out)?,
        Command::Experiment => cli::cmd_experiment(&cfg, &out)?,
        Command::Verify => cli::cmd_verify(&cfg, &out)?,
        Command::Decompose => cli::cmd_decompose(&cfg, &out)?,
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
