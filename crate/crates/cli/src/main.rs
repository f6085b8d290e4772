use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqdyn_cli::{execute, output, Command, Invocation, Overrides};

#[derive(Parser)]
#[command(name = "sqdyn", version, about = "Open-system dynamics for superconducting qubits")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    rest: Shared,
}

#[derive(clap::Args)]
struct Shared {
    /// Output directory (defaults to paths in the config, then the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ensemble runs.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Time evolution of an experiment config; writes timeseries.csv and summary.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Solver kind; a different kind replaces the solver block.
        #[arg(long, value_parser = ["lindblad", "redfield", "mcwf", "floquet", "pmme", "sse", "sme"])]
        solver: Option<String>,
        #[arg(long)]
        trajectories: Option<usize>,
        #[arg(long)]
        paths: Option<usize>,
        /// Measurement strength for sse/sme.
        #[arg(long)]
        k: Option<f64>,
        /// Memory kernel, `exp:gamma=X` or `nexp:gamma=X`.
        #[arg(long)]
        kernel: Option<String>,
    },
    /// Circuit spectrum and optional dispersive parameters.
    Circuit {
        #[command(flatten)]
        common: Common,
    },
    /// Noise sensitivities and golden-rule rates.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Floquet quasienergies and rates for a periodically driven system.
    Floquet {
        #[command(flatten)]
        common: Common,
    },
    /// Dispersive readout reflection sweep.
    Readout {
        /// JSON configuration file; the flags below can replace it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        rest: Shared,
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        /// Bare resonator frequency (0 when neither flag nor config sets it).
        #[arg(long, allow_hyphen_values = true)]
        omega_r: Option<f64>,
        /// Drive sweep `start:stop:points`.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let none = Overrides::default;
    let (command, config, shared, overrides) = match cli.command {
        Sub::Simulate { common, seed, solver, trajectories, paths, k, kernel } => {
            let o = Overrides { seed, solver, trajectories, paths, k, kernel, ..none() };
            (Command::Simulate, Some(common.config), common.rest, o)
        }
        Sub::Circuit { common } => (Command::Circuit, Some(common.config), common.rest, none()),
        Sub::Rates { common } => (Command::Rates, Some(common.config), common.rest, none()),
        Sub::Floquet { common } => (Command::Floquet, Some(common.config), common.rest, none()),
        Sub::Readout { config, rest, chi, kappa, omega_r, sweep } => {
            (Command::Readout, config, rest, Overrides { chi, kappa, omega_r, sweep, ..none() })
        }
    };
    if let Some(n) = shared.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    let inv = Invocation { command, config, out: shared.out, overrides };
    match execute(&inv) {
        Ok(outcome) => {
            print!("{}", output::pretty(&outcome.summary));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
