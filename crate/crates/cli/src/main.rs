#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod analyze;
mod config;
mod error;
mod output;
mod paradox;
mod principles_cmd;
mod scales;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rbel::principles::UniverseCaps;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::paradox::{JlArgs, MixtureArgs, Table, WordArgs};

/// Relative belief evidence analysis and the classical inference paradoxes.
#[derive(Debug, Parser)]
#[command(name = "rbel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a configured analysis and write report.json, CSV tables and a plot.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the Monte Carlo seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reproduce one of the classical pathologies as a CSV table.
    Paradox {
        #[command(subcommand)]
        name: Paradox,
        /// Also write `<name>.csv` into this directory.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Sufficiency, conditionality and likelihood relations on finite bases.
    Principles {
        #[command(subcommand)]
        action: Principles,
    },
}

#[derive(Debug, Subcommand)]
enum Paradox {
    /// Bayes factor, strength, p-value and bias as the prior gets diffuse.
    JeffreysLindley {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,25,100,400,10000,1000000")]
        sigma2: Vec<f64>,
        #[arg(long, default_value_t = 1.96, allow_negative_numbers = true)]
        zbar: f64,
        /// Grid cells per sampling sd near 0 and the data.
        #[arg(long, default_value_t = 400)]
        per_sd: usize,
        /// Adds Monte Carlo bias columns with this many repetitions.
        #[arg(long, requires = "seed")]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Grid resolution for the Monte Carlo columns.
        #[arg(long, default_value_t = 20)]
        mc_per_sd: usize,
    },
    /// Likelihood regions against the probability that the truncated data
    /// recover θ, in the word model.
    LikelihoodWord {
        #[arg(long, default_value_t = 100)]
        k: u32,
        #[arg(long = "M", visible_alias = "max-len", default_value_t = 2)]
        max_len: u32,
        #[arg(long, default_value = "0.01")]
        delta: String,
        #[arg(long, value_delimiter = ',', default_value = "0.85")]
        gamma: Vec<String>,
        /// Observed word, for example `a3a7`.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = rbel::word::DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Inverted tests in a two-component normal mixture.
    ConfidenceMixture {
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        shift: f64,
        #[arg(long, default_value_t = 101)]
        thetas: usize,
        #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 0.25)]
        x_step: f64,
    },
    /// Size of a z-test that takes a second look at the data.
    OptionalStopping {
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 50)]
        n1: usize,
        #[arg(long, default_value_t = 50)]
        n2: usize,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// MAP of θ against MAP of θ².
    MapInvariance {
        #[arg(long, default_value_t = 1000)]
        cells: usize,
    },
    /// Exhaustive S, C and L check over a universe of small bases.
    Birnbaum {
        #[command(flatten)]
        caps: CapArgs,
    },
}

#[derive(Debug, Subcommand)]
enum Principles {
    /// Print every base within the caps.
    Enumerate {
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relations between the bases in a file, or the universe report.
    Check {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Allow C to match conditioned bases up to a relabeling of points.
        #[arg(long)]
        relabel: bool,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
struct CapArgs {
    #[arg(long, default_value_t = 3)]
    max_samples: usize,
    #[arg(long, default_value_t = 2)]
    thetas: usize,
    #[arg(long, default_value_t = 4)]
    max_denominator: i64,
}

impl From<CapArgs> for UniverseCaps {
    fn from(c: CapArgs) -> Self {
        UniverseCaps { max_samples: c.max_samples, n_thetas: c.thetas, max_denominator: c.max_denominator }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("RBEL_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::config("RBEL_THREADS", format!("`{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Other(e.into()))
}

fn emit(text: &str, out: Option<&Path>, file: &str) -> CliResult<()> {
    print!("{text}");
    if let Some(dir) = out {
        write_atomic(&dir.join(file), text.as_bytes())?;
    }
    Ok(())
}

fn paradox(name: Paradox) -> CliResult<(Table, &'static str)> {
    Ok(match name {
        Paradox::JeffreysLindley { n, sigma2, zbar, per_sd, reps, seed, mc_per_sd } => {
            let mc = reps.zip(seed).map(|(r, s)| (r, s, mc_per_sd));
            (paradox::jeffreys_lindley(&JlArgs { n, sigma2, zbar, per_sd, mc })?, "jeffreys-lindley.csv")
        }
        Paradox::LikelihoodWord { k, max_len, delta, gamma, x, state_cap } => {
            let a = WordArgs { k, max_len, delta, gamma, x, state_cap };
            (paradox::likelihood_word(&a)?, "likelihood-word.csv")
        }
        Paradox::ConfidenceMixture { alpha, shift, thetas, x_min, x_max, x_step } => {
            let a = MixtureArgs { alpha, shift, thetas, x_min, x_max, x_step };
            (paradox::confidence_mixture(&a)?, "confidence-mixture.csv")
        }
        Paradox::OptionalStopping { alpha, n1, n2, reps, seed } => {
            (paradox::optional_stopping(alpha, n1, n2, reps, seed)?, "optional-stopping.csv")
        }
        Paradox::MapInvariance { cells } => (paradox::map_invariance(cells)?, "map-invariance.csv"),
        Paradox::Birnbaum { caps } => (paradox::birnbaum(caps.into())?, "birnbaum.csv"),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Analyze { config, out, seed } => {
            let (cfg, base) = config::AnalysisConfig::load(&config, seed)?;
            analyze::run(cfg, &base)?.write(&out)
        }
        Command::Paradox { name, out } => {
            let (table, file) = paradox(name)?;
            emit(&table.render()?, out.as_deref(), file)
        }
        Command::Principles { action: Principles::Enumerate { caps, out } } => {
            let text = principles_cmd::enumerate(caps.into())?;
            match out {
                Some(p) => Ok(write_atomic(&p, text.as_bytes())?),
                None => emit(&text, None, ""),
            }
        }
        Command::Principles { action: Principles::Check { input, relabel, caps, out } } => {
            let text = principles_cmd::check(input.as_deref(), relabel, caps.into())?;
            match out {
                Some(p) => Ok(write_atomic(&p, text.as_bytes())?),
                None => emit(&text, None, ""),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
