use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pym_entropy::cli::{
    converge_csv, exit_code, parse_input, parse_list, run_converge, run_estimate, run_sample, ConvergeOptions,
    EstimateOptions, Estimator, InputFormat, Units,
};
use pym_entropy::{Error, GammaPrior, PymConfig, Result};

/// Bayesian entropy estimation for undersampled discrete data.
#[derive(Parser)]
#[command(name = "pym-entropy", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate entropy from a data file and print a JSON report.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        /// plugin, mima, nsb, ansb, dpm or pym
        #[arg(long, default_value = "pym")]
        estimator: String,
        /// Alphabet size (required for nsb).
        #[arg(long)]
        alphabet_size: Option<u64>,
        #[command(flatten)]
        pym: PymArgs,
        /// Recorded in the report.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw entropy samples from the PYM posterior and print them as a JSON array.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        pym: PymArgs,
    },
    /// Run estimators on synthetic data of increasing size and print CSV.
    Converge {
        /// uniform:S, powerlaw:a:S, py:d:alpha or poisson:lambda
        #[arg(long)]
        dist: String,
        /// Comma-separated sample sizes.
        #[arg(long, default_value = "100,1000,10000")]
        sizes: String,
        /// Comma-separated estimator names.
        #[arg(long, default_value = "plugin,pym")]
        estimators: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Alphabet size for nsb (defaults to the distribution's support).
        #[arg(long)]
        alphabet_size: Option<u64>,
        #[command(flatten)]
        pym: PymArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Input file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
    /// samples, counts or multiplicities
    #[arg(long, default_value = "counts")]
    format: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PymArgs {
    /// nats or bits
    #[arg(long, default_value = "nats")]
    units: String,
    #[arg(long, default_value_t = 30)]
    grid_size: usize,
    #[arg(long, default_value_t = 6.0)]
    std_span: f64,
    /// default, flat or dirichlet
    #[arg(long, default_value = "default")]
    gamma_prior: String,
}

impl PymArgs {
    fn config(&self) -> Result<(PymConfig, Units)> {
        let cfg = PymConfig {
            gamma_prior: self.gamma_prior.parse::<GammaPrior>()?,
            grid_size: self.grid_size,
            std_span: self.std_span,
            ..PymConfig::default()
        };
        cfg.validate()?;
        Ok((cfg, self.units.parse()?))
    }
}

fn read_input(a: &InputArgs) -> Result<pym_entropy::CountData> {
    let text = if a.input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(&a.input).map_err(|e| Error::Io(format!("{}: {e}", a.input)))?
    };
    parse_input(&text, a.format.parse::<InputFormat>()?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Estimate { input, estimator, alphabet_size, pym, seed } => {
            let (cfg, units) = pym.config()?;
            let counts = read_input(&input)?;
            let opts = EstimateOptions { estimator: estimator.parse()?, alphabet_size, units, pym: cfg, seed };
            let report = run_estimate(&counts, &opts)?;
            for w in &report.diagnostics.warnings {
                eprintln!("warning: {w}");
            }
            let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            emit(&input.output, &(json + "\n"))
        }
        Cmd::Sample { input, draws, seed, pym } => {
            let (cfg, units) = pym.config()?;
            let counts = read_input(&input)?;
            let xs = run_sample(&counts, &cfg, draws, seed, units)?;
            let json = serde_json::to_string(&xs).map_err(|e| Error::Io(e.to_string()))?;
            emit(&input.output, &(json + "\n"))
        }
        Cmd::Converge { dist, sizes, estimators, trials, seed, alphabet_size, pym, output } => {
            let (cfg, _) = pym.config()?;
            let opts = ConvergeOptions {
                dist: dist.parse()?,
                sizes: parse_list(&sizes)?,
                estimators: parse_list::<Estimator>(&estimators)?,
                trials,
                seed,
                alphabet_size,
                pym: cfg,
            };
            let rows = run_converge(&opts)?;
            emit(&output, &converge_csv(&rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::NoCoincidences { required, .. } = e {
                eprintln!("a finite estimate needs at least {required} repeated observations (N - K >= {required})");
            }
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
