//! Failure classes and their exit codes.

use pctlwb::checker::CheckError;
use pctlwb::formula::FormulaError;
use pctlwb::geometry::GeometryError;
use pctlwb::machines::MachineError;
use pctlwb::markov::ChainError;
use pctlwb::reduction::ReductionError;
use pctlwb::witness::WitnessError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 1.
    #[error("internal error: {0}")]
    Internal(String),
    /// Exit 2: unreadable or invalid input, bad flags or constants.
    #[error("{0}")]
    Input(String),
    /// Exit 3: a step or state budget ran out.
    #[error("{0}")]
    Budget(String),
    /// Exit 4: a construction produced something that fails its own checks.
    #[error("{0}")]
    Diagnostic(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Diagnostic(_) => 4,
        }
    }
}

impl From<FormulaError> for CliError {
    fn from(e: FormulaError) -> Self {
        CliError::Input(format!("formula: {e}"))
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        CliError::Input(format!("chain: {e}"))
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Input(format!("constants: {e}"))
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        CliError::Internal(format!("checker: {e}"))
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::Unbounded { .. } => CliError::Budget(format!("machine: {e}")),
            _ => CliError::Input(format!("machine: {e}")),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Machine(m) => m.into(),
            ReductionError::Geometry(g) => g.into(),
            ReductionError::CounterCount(_) | ReductionError::EmptyTau | ReductionError::TauLabel(_) => {
                CliError::Input(format!("reduction: {e}"))
            }
            _ => CliError::Internal(format!("reduction: {e}")),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::StateCap(_) => CliError::Budget(format!("witness: {e}")),
            WitnessError::Machine(m) => m.into(),
            WitnessError::Geometry(g) => g.into(),
            WitnessError::Reduction(r) => r.into(),
            WitnessError::Check(c) => c.into(),
            WitnessError::NonPositive(ref bad) => {
                let rules: Vec<String> = bad.iter().map(|b| b.to_string()).collect();
                CliError::Diagnostic(format!("witness: {e}\n  {}", rules.join("\n  ")))
            }
            _ => CliError::Diagnostic(format!("witness: {e}")),
        }
    }
}
