use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CliError, Outcome};
use hyptile_core::ratlin::{parse_rational, RatVec, Rational};

/// Exact construction and verification of the two-size unilateral lattice
/// cube tiling.
#[derive(Parser, Debug)]
#[command(name = "hyptile", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the lattice basis A, its determinant and the reduction basis.
    Basis(Common),
    /// Find the tile containing a point.
    Locate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_vec)]
        point: RatVec,
    },
    /// Test whether a vector lies in the lattice A Z^n (exit 1 if not).
    Member {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_vec)]
        vector: RatVec,
    },
    /// Run the property suite for one parameter set.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budgets: Budgets,
        /// Cross-check the stabilizer against all of B'_n.
        #[arg(long)]
        brute_force: bool,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// List the symmetries of the tiling among signed permutations.
    Symmetries {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        brute_force: bool,
    },
    /// Least period of the tiling along the coordinate axes (integer p, q).
    Period(Common),
    /// Build and check the tiling of the discrete torus (Z/m)^n.
    Torus {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Scan every index-m sublattice of Z^n for tilings by the fixed domain.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Write SVG figures (n = 2 tiling, n = 3 slices, or a torus map).
    Render {
        #[command(flatten)]
        common: Common,
        /// Window as `lo..hi`, e.g. `0,0..10,10`.
        #[arg(long = "box", value_parser = parse_box)]
        window: Option<(RatVec, RatVec)>,
        /// Pixels per unit.
        #[arg(long, default_value = "20", value_parser = parse_rat)]
        scale: Rational,
        /// Slice heights for n = 3, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_rat)]
        z: Vec<Rational>,
        /// Draw the cell map of the torus tiling instead (n = 2, integer p, q).
        #[arg(long)]
        torus: bool,
        /// Also write a Wavefront OBJ mesh of the tiles in the window (n = 3).
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = parse_rat)]
    pub p: Rational,
    #[arg(long, value_parser = parse_rat)]
    pub q: Rational,
    /// Write the report (or figure) here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct Budgets {
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub cell_budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_vec(s: &str) -> Result<RatVec, String> {
    RatVec::parse(s).map_err(|e| e.to_string())
}

fn parse_box(s: &str) -> Result<(RatVec, RatVec), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    Ok((parse_vec(lo)?, parse_vec(hi)?))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Basis(c) => commands::basis(&c),
        Command::Locate { common, point } => commands::locate(&common, &point),
        Command::Member { common, vector } => commands::member(&common, &vector),
        Command::Verify {
            common,
            budgets,
            brute_force,
            seed,
        } => commands::verify(&common, &budgets, brute_force, seed),
        Command::Symmetries { common, brute_force } => commands::symmetries(&common, brute_force),
        Command::Period(c) => commands::period(&c),
        Command::Torus { common, budgets } => commands::torus(&common, &budgets),
        Command::Scan { common, budgets } => commands::scan(&common, &budgets),
        Command::Render {
            common,
            window,
            scale,
            z,
            torus,
            mesh,
        } => commands::render(&common, window, scale, &z, torus, mesh.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
