use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use epdm_cli::{load_config, run_bench, run_simulate, run_validate, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "epdm", version, about = "Exact stochastic simulation with on-the-fly species and reactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and write it as CSV, with a `.meta` sidecar.
    Simulate(Common),
    /// Time reactions over a sweep of species counts.
    Bench(Common),
    /// Compare EPDM against the direct-method oracle.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file in `key = value` form.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = load_config(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn out_or(cfg: &RunConfig, default: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| Path::new(default).to_path_buf())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.load()?;
            let out = out_or(&cfg, "trajectory.csv");
            let s = run_simulate(&cfg, &out)?;
            eprintln!(
                "{}: {} reactions, t = {}, stop = {}, {:.3}s",
                out.display(),
                s.reactions,
                s.final_time,
                s.stop.name(),
                s.wall_seconds
            );
        }
        Command::Bench(args) => {
            let cfg = args.load()?;
            let out = out_or(&cfg, "bench.csv");
            let report = run_bench(&cfg, &out)?;
            eprint!("{}", report.slopes_text());
        }
        Command::Validate(args) => {
            let cfg = args.load()?;
            let result = run_validate(&cfg, cfg.out.as_deref());
            match &result {
                Ok(report) if cfg.out.is_none() => print!("{}", report.to_text()),
                _ => {}
            }
            result?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("epdm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
