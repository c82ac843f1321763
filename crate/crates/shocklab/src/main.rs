use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shocklab::config::ExperimentConfig;
use shocklab::io::output_root;
use shocklab::{commands, criteria, report, Error};

/// Stability experiments for viscous shock and pulse profiles.
#[derive(Parser)]
#[command(name = "shocklab", version)]
struct Cli {
    /// Output root; overrides SHOCKLAB_OUT and the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog models with hypothesis checks.
    Models {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve for the profile and fit its tail decay.
    Profile { config: PathBuf },
    /// Unstable eigenvalues, eigenfunctions and the zero mode.
    Spectrum { config: PathBuf },
    /// Evans function on the configured contours.
    Evans { config: PathBuf },
    /// Center-stable manifold certificates.
    Manifold { config: PathBuf },
    /// Nonlinear evolution with phase tracking and monitors.
    Evolve { config: PathBuf },
    /// Run the acceptance suite; a rerun into the same directory checks
    /// that every CSV is reproduced bit for bit.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Aggregate the summaries under a directory into one table.
    Report {
        /// Defaults to the output root.
        dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    let load = |p: &Path| ExperimentConfig::load(p);
    let root = |cfg: Option<&ExperimentConfig>| output_root(cli.out.as_deref(), cfg);
    let done = |dir: PathBuf| println!("wrote {}", dir.display());
    match &cli.command {
        Command::Models { config } => {
            let cfg = config.as_deref().map(load).transpose()?;
            done(commands::models(cfg.as_ref(), &root(cfg.as_ref()))?);
        }
        Command::Profile { config } => {
            let cfg = load(config)?;
            done(commands::profile(&cfg, &root(Some(&cfg)))?);
        }
        Command::Spectrum { config } => {
            let cfg = load(config)?;
            done(commands::spectrum(&cfg, &root(Some(&cfg)))?);
        }
        Command::Evans { config } => {
            let cfg = load(config)?;
            done(commands::evans(&cfg, &root(Some(&cfg)))?);
        }
        Command::Manifold { config } => {
            let cfg = load(config)?;
            done(commands::manifold(&cfg, &root(Some(&cfg)))?);
        }
        Command::Evolve { config } => {
            let cfg = load(config)?;
            done(commands::evolve(&cfg, &root(Some(&cfg)))?);
        }
        Command::Verify { config, only } => {
            let cfg = config.as_deref().map(load).transpose()?;
            let dir = root(cfg.as_ref()).join("verify");
            let report = criteria::verify(&dir, cfg.as_ref().map_or(0, |c| c.seed), only)?;
            print!("{}", report.table());
            println!("wrote {}", dir.display());
            if report.any_failed() {
                return Err(Error::Failed("some acceptance criteria failed".into()));
            }
        }
        Command::Report { dir } => {
            let dir = dir.clone().unwrap_or_else(|| root(None));
            let (path, table) = report::report(&dir)?;
            print!("{table}");
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = if e.exit_code() == 2 { "usage error" } else { "error" };
            eprintln!("{kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
