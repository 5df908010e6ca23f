//! Command-line frontend: argument types, the command implementations and the
//! run manifest. The binary only parses arguments, calls [`execute`] and
//! persists the [`Outcome`].

mod commands;
mod error;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pctlwb::geometry::lemmas::DEFAULT_SEED;
use pctlwb::machines::Label;
use pctlwb::reduction::{Fragment, Variant, ZeroMode};
use pctlwb::witness::{RMode, DEFAULT_STATE_CAP};

pub use commands::{geometry_with, run_geometry};
pub use error::CliError;
pub use manifest::{digest, manifest_path, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "pctlwb", version, about = "Exact-arithmetic PCTL workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a formula on a chain and print per-state verdicts.
    Check(CheckArgs),
    /// Compile a two-counter machine into a formula file.
    Reduce(ReduceArgs),
    /// Build the witness chain of a bounded deterministic machine.
    Witness(WitnessArgs),
    /// Reduce, build the witness and check the formula at its initial state.
    Verify(VerifyArgs),
    /// Run the exact Inc/Dec property suites and emit a points file.
    Geometry(GeometryArgs),
    /// Translate a Minsky program into the counter-machine format.
    MinskyCompile(MinskyArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub chain: PathBuf,
    #[arg(long)]
    pub formula: PathBuf,
    /// Report only this state (by its id in the chain file).
    #[arg(long)]
    pub state: Option<String>,
    /// Print exact probabilities of the top-level `P` operators.
    #[arg(long)]
    pub probs: bool,
    /// Write the report here and the manifest beside it.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FragmentArg {
    /// General Until.
    U,
    /// Only F and G.
    Fg,
}

impl From<FragmentArg> for Fragment {
    fn from(f: FragmentArg) -> Fragment {
        match f {
            FragmentArg::U => Fragment::WithUntil,
            FragmentArg::Fg => Fragment::FGOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Recurrent,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroModeArg {
    Rescaled,
    Printed,
}

impl From<ZeroModeArg> for ZeroMode {
    fn from(z: ZeroModeArg) -> ZeroMode {
        match z {
            ZeroModeArg::Rescaled => ZeroMode::Rescaled,
            ZeroModeArg::Printed => ZeroMode::AsPrinted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RModeArg {
    Solved,
    Printed,
}

impl From<RModeArg> for RMode {
    fn from(r: RModeArg) -> RMode {
        match r {
            RModeArg::Solved => RMode::Solved,
            RModeArg::Printed => RMode::AsPrinted,
        }
    }
}

/// Formula-side options shared by `reduce` and `verify`.
#[derive(Debug, Clone, Args)]
pub struct FormulaOpts {
    #[arg(long, value_enum, default_value = "u")]
    pub fragment: FragmentArg,
    #[arg(long, value_enum, default_value = "finite")]
    pub variant: VariantArg,
    /// Recurrence labels, comma separated; required for `--variant recurrent`.
    #[arg(long, value_delimiter = ',')]
    pub tau: Vec<Label>,
    #[arg(long, value_enum, default_value = "rescaled")]
    pub zero_mode: ZeroModeArg,
}

impl FormulaOpts {
    pub fn variant(&self) -> Result<Variant, CliError> {
        match self.variant {
            VariantArg::Finite => Ok(Variant::FiniteSat),
            VariantArg::Recurrent if self.tau.is_empty() => {
                Err(CliError::Input("--variant recurrent needs --tau".into()))
            }
            VariantArg::Recurrent => Ok(Variant::Recurrent(self.tau.iter().copied().collect())),
        }
    }
}

/// Chain-side options shared by `witness` and `verify`.
#[derive(Debug, Clone, Args)]
pub struct WitnessOpts {
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    #[arg(long, value_enum, default_value = "solved")]
    pub r_mode: RModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantOpts {
    /// Override λ; the interval endpoints are derived from it.
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub machine: PathBuf,
    #[command(flatten)]
    pub formula: FormulaOpts,
    #[command(flatten)]
    pub constants: ConstantOpts,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub machine: PathBuf,
    #[command(flatten)]
    pub witness: WitnessOpts,
    #[command(flatten)]
    pub constants: ConstantOpts,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub machine: PathBuf,
    #[command(flatten)]
    pub formula: FormulaOpts,
    #[command(flatten)]
    pub witness: WitnessOpts,
    #[command(flatten)]
    pub constants: ConstantOpts,
    /// Check on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub emit_points: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct MinskyArgs {
    #[arg(long)]
    pub program: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
}

/// What a command produced. Nothing is written until [`Outcome::persist`].
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Human-readable report for stdout.
    pub report: String,
    /// Files to write, with their contents.
    pub files: Vec<(PathBuf, String)>,
    pub manifest: RunManifest,
    /// Where the manifest goes; `None` sends it to stderr.
    pub manifest_path: Option<PathBuf>,
    /// 0 on success, 4 when the command ran but a check failed.
    pub code: u8,
}

impl Outcome {
    fn new(report: String, manifest: RunManifest) -> Outcome {
        Outcome { report, files: Vec::new(), manifest, manifest_path: None, code: 0 }
    }

    /// Queues `text` for `path` and records its digest.
    fn emit(&mut self, path: &Path, text: String) {
        self.manifest.output(path, text.as_bytes());
        self.files.push((path.to_path_buf(), text));
    }

    pub fn persist(&self) -> std::io::Result<()> {
        for (path, text) in &self.files {
            fs::write(path, text)?;
        }
        if let Some(p) = &self.manifest_path {
            fs::write(p, self.manifest.to_json() + "\n")?;
        }
        Ok(())
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Check(a) => commands::check(a),
        Command::Reduce(a) => commands::reduce(a),
        Command::Witness(a) => commands::witness(a),
        Command::Verify(a) => commands::verify(a),
        Command::Geometry(a) => commands::run_geometry(a),
        Command::MinskyCompile(a) => commands::minsky_compile(a),
    }
}

/// Reads an input file and records its digest.
fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    manifest.input(path, &bytes);
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))
}
