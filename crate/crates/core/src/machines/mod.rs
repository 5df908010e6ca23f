//! Counter machines, Minsky machines, simulation and lasso detection.

mod counter;
mod dsl;
mod minsky;

use thiserror::Error;

pub use counter::{
    run_deterministic, successors, Configuration, CounterMachine, Instruction, Label, LassoComputation, Update,
};
pub use dsl::{parse_machine, parse_minsky, print_machine, print_minsky};
pub use minsky::{minsky_successors, minsky_to_counter, minsky_trace, recurrence_labels, MinskyInstr, MinskyMachine};

/// Default simulation budget for lasso detection.
pub const DEFAULT_MAX_STEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("instruction {label}: unknown target label {target}")]
    UnknownLabel { label: Label, target: Label },
    #[error("instruction {0}: empty target set")]
    EmptyTargets(Label),
    #[error("instruction {label}: counter {counter} does not exist")]
    BadCounter { label: Label, counter: usize },
    #[error("instruction {label}: expected {expected} updates, found {found}")]
    UpdateCount { label: Label, expected: usize, found: usize },
    #[error("the machine is not deterministic")]
    NotDeterministic,
    #[error("no repeated configuration within {steps} steps")]
    Unbounded { steps: usize },
    #[error("expected a two-counter machine, got {0} counters")]
    CounterCount(usize),
}
