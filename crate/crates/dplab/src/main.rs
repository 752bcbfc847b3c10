use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dplab::config::{self, VerifyConfig};
use dplab::report::{Artifacts, OutputDir};
use dplab::{commands, verify, CliError};

#[derive(Debug, Parser)]
#[command(name = "dplab", version, about = "Spectral experiments for delta-prime interactions on planar curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// JSON config selecting criteria; all eight by default.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Accepted for symmetry; verify draws nothing.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Non-negativity threshold of a curve.
    Threshold(Common),
    /// Negative spectrum of the loop model.
    Loop1d(Common),
    /// Transport of a strength through a Moebius map.
    Lft(Common),
    /// Lowest eigenvalues on a truncated box.
    Solve2d(Common),
    /// Bracket of the critical strength of a segment.
    Critical(Common),
    /// Acceptance suite.
    Verify(VerifyArgs),
}

fn run(cmd: Command) -> Result<(), CliError> {
    let seed = config::seed_from_env()?;
    // configs are validated before the output directory is touched
    let (out, job): (PathBuf, Box<dyn FnOnce() -> Result<Artifacts, CliError>>) = match cmd {
        Command::Threshold(c) => {
            let cfg = config::load(&c.config, seed)?;
            (c.out, Box::new(move || commands::threshold(&cfg)))
        }
        Command::Loop1d(c) => {
            let cfg = config::load(&c.config, seed)?;
            (c.out, Box::new(move || commands::loop1d(&cfg, c.svg)))
        }
        Command::Lft(c) => {
            let cfg = config::load(&c.config, seed)?;
            (c.out, Box::new(move || commands::lft(&cfg)))
        }
        Command::Solve2d(c) => {
            let cfg = config::load(&c.config, seed)?;
            (c.out, Box::new(move || commands::solve2d(&cfg, c.svg)))
        }
        Command::Critical(c) => {
            let cfg = config::load(&c.config, seed)?;
            (c.out, Box::new(move || commands::critical(&cfg)))
        }
        Command::Verify(v) => {
            let mut cfg: VerifyConfig = match &v.config {
                Some(p) => config::load(p, seed)?,
                None => VerifyConfig::default(),
            };
            if let (None, Some(s)) = (&v.config, seed) {
                cfg.seed = s;
            }
            let mutation = verify::mutation_from_env()?;
            (v.out, Box::new(move || Ok(verify::verify(&cfg, mutation, |line| println!("{line}")))))
        }
    };
    let dir = OutputDir::prepare(Path::new(&out))?;
    let start = Instant::now();
    let artifacts = job()?;
    dir.write_artifacts(&artifacts, start.elapsed().as_secs_f64())?;
    if artifacts.command != "verify" {
        print!("{}", artifacts.table);
    } else if let Some(last) = artifacts.table.lines().last() {
        println!("{last}");
    }
    match artifacts.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
