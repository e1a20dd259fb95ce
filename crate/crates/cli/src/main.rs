use std::path::PathBuf;
use std::process::ExitCode;

use afsec::channel::build_network;
use afsec::experiments::{
    oracle_check, run_experiment, write_outputs, ExperimentConfig, ExperimentId,
};
use afsec::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "afsec",
    version,
    about = "Secrecy-rate resource allocation for AF relay multi-carrier downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV.
    Run(RunArgs),
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare closed-form subproblem maximizers with the numeric oracle.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
    },
    /// Dump the channel gains of one network realization as CSV.
    Channels {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        subcarriers: usize,
        #[arg(long, default_value_t = 4)]
        relays: usize,
        #[arg(long, default_value_t = 12)]
        users: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig3, fig4, fig5, fig6, fig7, table3 or custom.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if any solver run did not converge.
    #[arg(long)]
    strict: bool,
}

enum Failure {
    Config(String),
    NotConverged(usize),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Io(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml_str(
            &std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        )?,
        None => ExperimentConfig::default(),
    };
    if let Some(id) = &args.experiment {
        cfg.experiment = id.parse::<ExperimentId>()?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.trials.is_some() {
        cfg.trials = args.trials;
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    if args.config.is_none() && args.experiment.is_none() {
        return Err(Failure::Config("run needs --config or --experiment".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config(&args)?;
    let out = run_experiment(&cfg)?;
    let path = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.experiment.name())));
    let files = write_outputs(&cfg, &out, &path)?;
    let stalled = out.rows.iter().filter(|r| !r.converged).count();
    println!(
        "wrote {} rows to {}",
        out.rows.len(),
        files.results.display()
    );
    for extra in [Some(files.config), files.averages, files.traces]
        .into_iter()
        .flatten()
    {
        println!("wrote {}", extra.display());
    }
    if stalled > 0 {
        eprintln!("{stalled} solver runs stopped at max_iters");
        if args.strict {
            return Err(Failure::NotConverged(stalled));
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
            let cfg = ExperimentConfig::from_toml_str(&text)?;
            println!(
                "{}: ok ({}, {} trials)",
                config.display(),
                cfg.experiment.name(),
                cfg.trials()
            );
            Ok(())
        }
        Command::OracleCheck { samples, seed } => {
            let check = oracle_check(samples, seed);
            println!(
                "pass: {}  fail: {}  fallbacks: {}  worst relative error: {:.3e}",
                check.agreed,
                check.failures(),
                check.fallbacks,
                check.worst_relative_error
            );
            if check.failures() > 0 {
                return Err(Failure::NotConverged(check.failures()));
            }
            Ok(())
        }
        Command::Channels {
            seed,
            subcarriers,
            relays,
            users,
            out,
        } => {
            let net = build_network(seed, subcarriers, relays, users, &Default::default())?;
            match out {
                Some(path) => net.write_csv(std::fs::File::create(path).map_err(Error::from)?)?,
                None => net.write_csv(std::io::stdout().lock())?,
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged(count)) => {
            eprintln!("error: {count} failures");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
