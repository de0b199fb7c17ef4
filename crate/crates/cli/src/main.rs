mod commands;
mod config;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Config;

#[derive(Parser)]
#[command(name = "fibcat", version, about = "Exact tensors, identities and intertwiner spaces of bilabelled graph categories")]
struct Cli {
    /// JSON file with bounds and defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomly generated verification cases.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Arbitrary-precision tensor entries.
    #[arg(long, global = true)]
    bigint: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print T^G_D (mode hom) or T̂^G_D (mode inj) as JSON.
    Tensor {
        /// Graph as JSON or a graph6 string.
        graph: PathBuf,
        diagram: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Hom)]
        mode: Mode,
    },
    /// Check an identity on every case of a fixture file.
    Verify {
        #[arg(value_enum)]
        law: Law,
        fixtures: PathBuf,
        /// Extra random cases per fixture graph, drawn from --seed.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Dimension and basis orbits of Mor(k,l) for the semidirect product
    /// of a permutation group with Z₂^{*n}/A.
    Dim {
        group: PathBuf,
        closure: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// List the fibres of a fibration with their generator words.
    Closure { fibration: PathBuf },
    /// Orbits of a permutation group on pairs of tuples.
    Orbits {
        group: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Hom,
    Inj,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Law {
    Functor,
    That,
    Moebius,
    Thpart,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Core(fibcat::Error),
}

impl From<fibcat::Error> for CliError {
    fn from(e: fibcat::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use fibcat::Error::*;
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(e) => match e {
                Capacity { .. } | Overflow(_) => 3,
                Indeterminate(_) => 4,
                Invariant(_) => 1,
                Validation(_) | Arity(_) | Shape(_) | Precondition(_) | Invariance(_) | AbsentFibre(_) => 2,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

/// JSON to print, and whether every check in it passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub ok: bool,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn from_value<T: serde::de::DeserializeOwned>(v: serde_json::Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut config: Config = match &cli.config {
        Some(path) => from_value(read_json(path)?, "config")?,
        None => Config::default(),
    };
    config.validate().map_err(CliError::Parse)?;
    config.bigint |= cli.bigint;
    Ok(config)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let config = load_config(cli)?;
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Parse(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Tensor { graph, diagram, mode } => commands::tensor(&config, graph, diagram, *mode),
        Command::Verify { law, fixtures, random } => {
            verify::verify(&config, *law, fixtures, *random, cli.seed)
        }
        Command::Dim { group, closure, k, l } => commands::dim(&config, group, closure, *k, *l),
        Command::Closure { fibration } => commands::closure(&config, fibration),
        Command::Orbits { group, k, l } => commands::orbits(&config, group, *k, *l),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut text = serde_json::to_string_pretty(&outcome.json).expect("serializable");
            text.push('\n');
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
