//! `repzeta`: exact representation zeta functions from the command line.
//!
//! Exit status: 0 when every check passes, 1 on a mathematical mismatch or
//! rejected input, 2 on a usage error.

mod commands;
mod family;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use repzeta::lattice::LatticeError;

use family::FamilyArgs;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Math(String),
}

impl Failure {
    pub fn math(e: impl Display) -> Self {
        Failure::Math(e.to_string())
    }

    /// Lattice errors carry the variant name, e.g. `RelativeFAbViolation`.
    pub fn lattice(e: LatticeError) -> Self {
        let debug = format!("{e:?}");
        let name = debug.split([' ', '(']).next().unwrap_or_default().to_string();
        Failure::Math(format!("{name}: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Worker threads (default: all cores); output does not depend on it
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Lift the enumeration budget
    #[arg(long, global = true)]
    pub allow_large: bool,
}

#[derive(Parser, Debug)]
#[command(name = "repzeta", version, about = "Exact representation zeta functions of induced representations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub p: u64,
    /// Truncation level of the dual grid
    #[arg(long = "L")]
    pub level: u32,
}

#[derive(Subcommand, Debug)]
enum ZetaCommand {
    /// Dirichlet coefficients by exhaustive enumeration
    Oracle(GridArgs),
    /// The closed form, optionally expanded at q
    Closed {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 6)]
        e_max: u32,
    },
    /// Oracle against the closed form on the certified exponents
    Compare(GridArgs),
}

#[derive(Subcommand, Debug)]
enum XiCommand {
    /// Coefficients by direct enumeration
    Truncate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k_max: i64,
        #[arg(long)]
        e_max: i64,
    },
    /// Rational form
    Rational {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Inversion identity between N = 1 and N = 0
    Inversion {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Rational form against the truncation on a square window
    Compare {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = -6, allow_negative_numbers = true)]
        k_lo: i64,
        #[arg(long, default_value_t = 12)]
        width: i64,
    },
}

#[derive(Subcommand, Debug)]
enum TreeCommand {
    /// Constituent dimensions of the layer representation
    Zeta {
        #[arg(long, value_delimiter = ',')]
        branching: Vec<u64>,
    },
    /// Stabiliser orbit counts, certified by witnesses
    Orbits {
        #[arg(long, value_delimiter = ',')]
        branching: Vec<u64>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Layer sizes of the projective tree over the division algebra
    Layers(ProjectiveArgs),
    /// Element of the stabiliser of (1:0:…:0) mapping x to y
    Witness {
        #[command(flatten)]
        tree: ProjectiveArgs,
        /// JSON list of coordinates; each an integer or d² slice coefficients
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Boundary representation of a tree with constant tail branching
    Boundary {
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<u64>,
        #[arg(long)]
        tail: u64,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ProjectiveArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub inv: usize,
    #[arg(long)]
    pub depth: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Representation zeta functions of the lattice families
    #[command(subcommand)]
    Zeta(ZetaCommand),
    /// Functional equation Z(1/q, 1/t) = q^E Z(q, t)
    Feq {
        #[command(flatten)]
        family: FamilyArgs,
        /// Defaults to (m + 1)(1 − 2r)
        #[arg(long, allow_negative_numbers = true)]
        exponent: Option<i32>,
    },
    /// Value at s = −1
    Vanish {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Abscissa of convergence
    Abscissa {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// The two-variable cone series Ξ
    #[command(subcommand)]
    Xi(XiCommand),
    /// Rooted trees, projective trees and boundary representations
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Coadjoint orbits on the level-L dual
    Orbits(GridArgs),
    /// Multiplicity of the orbit of omega in the induction of eta
    Mult {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        omega: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        eta: Vec<u64>,
    },
}

/// A report and whether its checks passed.
pub struct Outcome {
    pub json: String,
    pub csv: Option<String>,
    pub pass: bool,
}

impl Outcome {
    pub fn pass(json: String) -> Self {
        Self { json, csv: None, pass: true }
    }
}

fn dispatch(cmd: Command, g: &Global) -> Result<Outcome, Failure> {
    use commands::*;
    match cmd {
        Command::Zeta(ZetaCommand::Oracle(a)) => zeta_oracle(&a, g),
        Command::Zeta(ZetaCommand::Closed { family, q, e_max }) => zeta_closed(&family, q, e_max),
        Command::Zeta(ZetaCommand::Compare(a)) => zeta_compare(&a, g),
        Command::Feq { family, exponent } => feq(&family, exponent),
        Command::Vanish { family, q, p } => vanish(&family, q.or(p)),
        Command::Abscissa { family } => abscissa(&family),
        Command::Xi(XiCommand::Truncate { spec, k_max, e_max }) => xi_truncate(&spec, k_max, e_max),
        Command::Xi(XiCommand::Rational { spec }) => xi_rational(&spec),
        Command::Xi(XiCommand::Inversion { spec }) => xi_inversion(&spec),
        Command::Xi(XiCommand::Compare { spec, k_lo, width }) => xi_compare(&spec, k_lo, width),
        Command::Tree(TreeCommand::Zeta { branching }) => tree_zeta(branching),
        Command::Tree(TreeCommand::Orbits { branching, level }) => tree_orbits(branching, level),
        Command::Tree(TreeCommand::Layers(t)) => tree_layers(&t, g),
        Command::Tree(TreeCommand::Witness { tree, x, y }) => tree_witness(&tree, &x, &y),
        Command::Tree(TreeCommand::Boundary { prefix, tail, count }) => tree_boundary(prefix, tail, count),
        Command::Orbits(a) => orbits(&a, g),
        Command::Mult { grid, omega, eta } => mult(&grid, &omega, &eta, g),
    }
}

fn emit(out: &Outcome, g: &Global) -> Result<(), Failure> {
    let text = match g.format {
        Format::Json => format!("{}\n", out.json),
        Format::Csv => out
            .csv
            .clone()
            .ok_or_else(|| Failure::Usage("this command has no CSV output".into()))?,
    };
    match &g.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let g = cli.global;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.workers.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let outcome = pool.install(|| dispatch(cli.command, &g))?;
    emit(&outcome, &g)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_failures_are_named() {
        let Failure::Math(msg) = Failure::lattice(LatticeError::RelativeFAbViolation { rank: 1, n: 2 }) else {
            panic!()
        };
        assert!(msg.starts_with("RelativeFAbViolation: "), "{msg}");
        let Failure::Math(msg) = Failure::lattice(LatticeError::Format("x".into())) else { panic!() };
        assert!(msg.starts_with("Format: "));
    }
}
