use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use pinchbeam::harness::{run_sweep, write_outputs, Algorithm, ExperimentConfig, Profile, RunOptions, BUILTIN_SCENARIOS};
use pinchbeam::{Activation, PowerModel};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "pinchbeam", version, about = "Pinching-antenna beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write `<out>` plus `<out stem>.trace.csv`.
    Run(RunArgs),
    /// Parse and check a config without running it.
    ValidateConfig {
        #[arg(long, default_value = "paper_defaults")]
        config: String,
    },
    /// List the built-in scenario names.
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file or built-in scenario name.
    #[arg(long, default_value = "paper_defaults")]
    config: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drops: Option<usize>,
    /// Comma-separated list: penalty, zf, conventional, massive.
    #[arg(long, value_delimiter = ',')]
    algo: Option<Vec<Algorithm>>,
    #[arg(long)]
    activation: Option<Activation>,
    #[arg(long)]
    power_model: Option<PowerModel>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// desk (20 drops, 1e5 grid) or paper (100 drops, 1e6 grid); explicit flags win.
    #[arg(long)]
    profile: Option<Profile>,
    /// Exit with status 3 if any solver run fails.
    #[arg(long)]
    strict: bool,
    /// Record wall-clock runtimes in the CSV.
    #[arg(long)]
    timing: bool,
}

fn build_config(args: &RunArgs) -> pinchbeam::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(p) = args.profile {
        cfg.apply_profile(p);
    }
    if let Some(s) = args.seed {
        cfg.run.seed = s;
    }
    if let Some(d) = args.drops {
        cfg.run.n_drops = d;
    }
    if let Some(a) = &args.algo {
        cfg.run.algorithms = a.clone();
    }
    if let Some(a) = args.activation {
        cfg.antennas.activation = a;
    }
    if let Some(m) = args.power_model {
        cfg.antennas.power_model = m;
    }
    if let Some(g) = args.grid_points {
        cfg.solver.grid_points = g;
    }
    if let Some(o) = &args.out {
        cfg.run.output = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> ExitCode {
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let output = match run_sweep(&cfg, &RunOptions { timing: args.timing }) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = write_outputs(&cfg.run.output, &output) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if args.strict && output.failures > 0 {
        eprintln!("{} solver runs failed", output.failures);
        return ExitCode::from(EXIT_SOLVER);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => run(args),
        Command::ValidateConfig { config } => match ExperimentConfig::load(&config) {
            Ok(_) => {
                println!("{config}: ok");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::ListScenarios => {
            for (name, about) in BUILTIN_SCENARIOS {
                println!("{name:<24}{about}");
            }
            ExitCode::SUCCESS
        }
    }
}
