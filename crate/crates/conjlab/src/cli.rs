//! Argument parsing and dispatch for the `conjlab` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use conjlab_core::rational::parse_rational;
use conjlab_core::{PLUnimodalMap, Rational};

use crate::commands::{self, CommandResult, Limits};
use crate::error::{CliError, ExitStatus};
use crate::maps::load_map;
use crate::report::{Format, DEFAULT_DIGITS};

/// Largest accepted `--digits`.
pub const MAX_DIGITS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "conjlab", version, about = "Exact analysis of conjugacies between piecewise-linear unimodal maps")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Decimal digits printed next to each exact rational.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS, value_parser = parse_digits)]
    pub digits: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct MapArg {
    /// Map file (JSON vertex list) or a built-in: `tent`, `thm5`, `skew:<v>`.
    #[arg(long)]
    pub map: String,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Source map g1 (file or built-in name).
    #[arg(long)]
    pub map: String,
    /// Target map g2 (file or built-in name).
    #[arg(long)]
    pub map2: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Points of the level-n preimage lattice.
    Lattice {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
    /// Carcass check: the level holding every kink.
    Carcass {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
    /// Leading expansion bits of x and the path of cells containing it.
    Expand {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, value_parser = parse_rat)]
        x: Rational,
        #[arg(long, default_value_t = 16, value_parser = parse_depth)]
        depth: usize,
    },
    /// One-sided slopes of the piecewise-linear approximations at x.
    Slopes {
        #[command(flatten)]
        maps: PairArgs,
        #[arg(long, value_parser = parse_rat)]
        x: Rational,
        #[arg(long, default_value_t = 60, value_parser = parse_depth)]
        depth: usize,
    },
    /// Certified enclosure of h(x).
    ConjEval {
        #[command(flatten)]
        maps: PairArgs,
        #[arg(long, value_parser = parse_rat)]
        x: Rational,
        #[arg(long, default_value = "1/1099511627776", value_parser = parse_tol)]
        tol: Rational,
    },
    /// Enclosed difference quotients (h(s) - h(x)) / (s - x).
    Quotients {
        #[command(flatten)]
        maps: PairArgs,
        #[arg(long, value_parser = parse_rat)]
        x: Rational,
        /// Comma-separated sample points; defaults to lattice points closing in on x.
        #[arg(long, value_delimiter = ',', value_parser = parse_rat)]
        samples: Option<Vec<Rational>>,
        #[arg(long, default_value_t = 12, value_parser = parse_depth)]
        depth: usize,
        #[arg(long, default_value = "1/1099511627776", value_parser = parse_tol)]
        tol: Rational,
    },
    /// Run the property suite on one map, or on a pair.
    Verify {
        #[command(flatten)]
        map: MapArg,
        #[arg(long)]
        map2: Option<String>,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(3..))]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Built-in demonstration: unit slopes at x* = 2/3 without a derivative.
    Thm5Demo,
}

fn parse_rat(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn parse_tol(text: &str) -> Result<Rational, String> {
    let tol = parse_rat(text)?;
    if tol <= Rational::from_integer(0.into()) {
        return Err("tolerance must be positive".into());
    }
    Ok(tol)
}

fn parse_depth(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(d) if d >= 1 => Ok(d),
        _ => Err(format!("{text:?} is not a positive integer")),
    }
}

fn parse_digits(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(d) if d <= MAX_DIGITS => Ok(d),
        _ => Err(format!("{text:?} is not an integer in 0..={MAX_DIGITS}")),
    }
}

fn pair(limits: &Limits, maps: &PairArgs) -> Result<conjlab_core::ConjugacyPair, CliError> {
    limits.pair(load_map(&maps.map)?, load_map(&maps.map2)?)
}

fn one(spec: &MapArg) -> Result<PLUnimodalMap, CliError> {
    load_map(&spec.map)
}

/// Runs a parsed command.
pub fn execute(command: &Command, limits: &Limits) -> CommandResult {
    match command {
        Command::Lattice { map, depth } => commands::lattice(&one(map)?, *depth, limits),
        Command::Carcass { map, depth } => {
            let map = one(map)?;
            match commands::carcass(&map, *depth, limits) {
                Err(CliError::Core(err @ conjlab_core::Error::NotCarcassWithin(n))) => {
                    let mut report = crate::report::Report::new("carcass");
                    report.note("carcass", false).note("n_max", n).note("error", err.to_string());
                    Ok((report, ExitStatus::Negative))
                }
                other => other,
            }
        }
        Command::Expand { map, x, depth } => commands::expand(&one(map)?, x, *depth, limits),
        Command::Slopes { maps, x, depth } => commands::slopes(&pair(limits, maps)?, x, *depth, limits),
        Command::ConjEval { maps, x, tol } => commands::conj_eval_report(&pair(limits, maps)?, x, tol),
        Command::Quotients { maps, x, samples, depth, tol } => {
            commands::quotients(&pair(limits, maps)?, x, samples.as_deref(), *depth, tol, limits)
        }
        Command::Verify { map, map2, depth, seed } => {
            let g1 = one(map)?;
            let g2 = map2.as_deref().map(load_map).transpose()?;
            commands::verify(&g1, g2.as_ref(), *depth, *seed, limits)
        }
        Command::Thm5Demo => commands::thm5_demo(limits),
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// Full run: environment, command, rendering, output. Returns the exit code.
pub fn run(cli: Cli) -> ExitStatus {
    let outcome = Limits::from_env_value(std::env::var("CONJLAB_DEPTH_CAP").ok().as_deref())
        .and_then(|limits| execute(&cli.command, &limits))
        .and_then(|(report, status)| {
            write_output(&cli, &report.render(cli.format, cli.digits))?;
            Ok(status)
        });
    match outcome {
        Ok(status) => status,
        Err(err) => {
            eprintln!("conjlab: {err}");
            err.exit_status()
        }
    }
}
