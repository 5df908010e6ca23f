//! Compilation of two-counter machines into PCTL.
//!
//! Each counter is simulated by its own copy of the gadget propositions
//! (copy 1 and copy 2). [`CopyBuilder`] emits the per-copy formulae; the
//! two-counter assembly in [`compile`] adds the cross-copy conjuncts.

mod builder;
mod counter;
mod stats;
mod step;
mod structure;
mod two_counter;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::FormulaError;
use crate::geometry::{GadgetConstants, GeometryError};
use crate::machines::{Label, MachineError};

pub use builder::{phase_succ, CopyBuilder, Over, Universe};
pub use stats::{audit_provenance, stats, FormulaStats};
pub use two_counter::{build_recurrent, build_sync, compile, compile_parts, universe, Compiled};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("the reduction needs a two-counter machine, got {0} counters")]
    CounterCount(usize),
    #[error("the recurrent variant needs a nonempty label set")]
    EmptyTau,
    #[error("recurrence label {0} is not an instruction label")]
    TauLabel(Label),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Which temporal operators the output may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// `U_{=1}` propagation in Succ and Step.
    WithUntil,
    /// Only `F` and `G`: every Until has `true` on the left.
    FGOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variant {
    /// `ψ¹ ∧ ψ² ∧ Sync ∧ Recurrent` for the given label set.
    Recurrent(BTreeSet<Label>),
    /// `ψ¹ ∧ ψ² ∧ Sync`, satisfiable by a finite chain iff the machine is bounded.
    FiniteSat,
}

/// How a decrement step treats a zero counter.
///
/// The literal encoding asks for `G_{=z₁}` over a set whose probability at a
/// valid successor is `z₁·z₁`, so it is unsatisfiable by any chain that
/// represents the counter correctly. `Rescaled` uses the bounds the successor
/// actually attains (`z₁²`, `z₁·z₂`) and pins the branch with the Copy balances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ZeroMode {
    AsPrinted,
    #[default]
    Rescaled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionConfig {
    pub constants: GadgetConstants,
    pub fragment: Fragment,
    pub variant: Variant,
    pub zero_mode: ZeroMode,
}

impl ReductionConfig {
    pub fn new(fragment: Fragment, variant: Variant) -> ReductionConfig {
        ReductionConfig { constants: GadgetConstants::default(), fragment, variant, zero_mode: ZeroMode::default() }
    }

    pub fn validate(&self, m: usize) -> Result<(), ReductionError> {
        self.constants.validate()?;
        if let Variant::Recurrent(tau) = &self.variant {
            if tau.is_empty() {
                return Err(ReductionError::EmptyTau);
            }
            if let Some(l) = tau.iter().find(|l| **l == 0 || **l as usize > m) {
                return Err(ReductionError::TauLabel(*l));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
