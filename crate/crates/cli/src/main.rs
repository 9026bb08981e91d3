mod pipeline;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Render;

#[derive(Parser)]
#[command(name = "sepkit", version, about = "Separability, distillability and identical-particle correlation analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a bipartite state file.
    Analyze { file: PathBuf },
    /// Slater decomposition and concurrence of a two-particle file.
    Fermion { file: PathBuf },
    /// Write a state file for one of the named families.
    Generate(GenerateArgs),
    /// K-copy distillability search over the symmetric/antisymmetric family.
    Scan(ScanArgs),
}

#[derive(Args, Clone, Debug)]
pub struct GenerateArgs {
    /// maximally_entangled, werner_2x2, sym_antisym, random or random_separable.
    pub family: String,
    /// Local dimension for the symmetric families.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Werner singlet weight.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Antisymmetric weight of the sym_antisym family.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Rank of a random state; number of product terms for random_separable.
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
}

#[derive(Args, Clone, Debug)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0.5)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Number of copies.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

/// Flags shared by all subcommands; each can also be set through `SEPKIT_*`.
#[derive(Args, Clone, Debug)]
pub struct Settings {
    /// Eigenvalue tolerance for positivity and rank decisions.
    #[arg(long, global = true, env = "SEPKIT_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Greedy step budget of the separable approximation and witness searches.
    #[arg(long, global = true, env = "SEPKIT_BUDGET", default_value_t = 64)]
    pub budget: usize,
    /// Random restarts of every multi-start search.
    #[arg(long, global = true, env = "SEPKIT_RESTARTS", default_value_t = 24)]
    pub restarts: usize,
    #[arg(long, global = true, env = "SEPKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Largest number of copies tried by the distillability search.
    #[arg(long, global = true, env = "SEPKIT_KMAX", default_value_t = 2)]
    pub kmax: usize,
    #[arg(long, global = true, env = "SEPKIT_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, env = "SEPKIT_OUT")]
    pub out: Option<PathBuf>,
}

fn emit(settings: &Settings, body: &str) -> Result<()> {
    match &settings.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn render<R: Render>(settings: &Settings, r: &R) -> String {
    match settings.format {
        Format::Text => r.text(),
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(r).expect("report serialises");
            s.push('\n');
            s
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

/// Returns whether the run ended inconclusively because of a search budget.
fn run(cli: &Cli) -> Result<bool> {
    let s = &cli.settings;
    match &cli.command {
        Command::Analyze { file } => {
            let r = pipeline::analyze(file, &read(file)?, s)?;
            emit(s, &render(s, &r))?;
            Ok(r.inconclusive())
        }
        Command::Fermion { file } => {
            let r = pipeline::fermion(file, &read(file)?, s)?;
            emit(s, &render(s, &r))?;
            Ok(false)
        }
        Command::Generate(args) => {
            emit(s, &pipeline::generate(args, s)?)?;
            Ok(false)
        }
        Command::Scan(args) => {
            let r = pipeline::scan(args, s)?;
            emit(s, &render(s, &r))?;
            Ok(false)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<sepkit::Error>() {
        Some(sepkit::Error::Parse { .. }) => 3,
        Some(sepkit::Error::UnknownFamily(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
