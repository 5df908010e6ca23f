//! Finite witness chains for bounded deterministic two-counter machines.
//!
//! States are tuples `[j, props, n1, n2]`: an index into the lasso, the set of
//! propositions that hold, and the counter values the two copies represent.
//! The chain is the least set of tuples closed under the successor rules in
//! [`rules`], explored breadth-first from `[0, {r¹_{0,1}, r²_{0,1}}, 0, 0]`.

mod build;
mod lint;
mod rules;
mod vectors;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::checker::CheckError;
use crate::formula::Proposition;
use crate::geometry::{GadgetConstants, Geometry, GeometryError, Vec2};
use crate::machines::MachineError;
use crate::markov::{MarkovChain, StateId};
use crate::reduction::ReductionError;

pub use build::build_witness;
pub use lint::{lint_witness, LintItem};
pub use vectors::{characteristic_vector, characteristic_vectors, relevant_atom};

/// Default bound on the number of closure states.
pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WitnessState {
    pub index: usize,
    pub props: BTreeSet<Proposition>,
    pub n1: u64,
    pub n2: u64,
}

impl fmt::Display for WitnessState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let props: Vec<String> = self.props.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}, {{{}}}, {}, {}]", self.index, props.join(","), self.n1, self.n2)
    }
}

/// How the ā-split weight `r` of an increment is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RMode {
    /// `r = ϱ − ⟨c+1⟩₂ (1 − ⟨c⟩₁)`.
    AsPrinted,
    /// The value making the second increment constraint hold exactly on the built chain.
    #[default]
    Solved,
}

#[derive(Debug, Clone)]
pub struct WitnessConfig {
    pub constants: GadgetConstants,
    pub r_mode: RMode,
    pub state_cap: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { constants: GadgetConstants::default(), r_mode: RMode::default(), state_cap: DEFAULT_STATE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: String,
    pub state: String,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.rule, self.state, self.detail)
    }
}

/// A transition whose weight is not in `(0,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadWeight {
    pub rule: String,
    pub from: String,
    pub to: String,
    pub weight: String,
}

impl fmt::Display for BadWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {} -> {} has weight {}", self.rule, self.from, self.to, self.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("more than {0} states in the closure")]
    StateCap(usize),
    #[error("{} transition(s) with weight outside (0,1]; first: {}", .0.len(), .0[0])]
    NonPositive(Vec<BadWeight>),
    #[error("the lasso does not describe a computation of the machine: {0}")]
    BadLasso(String),
    #[error("no closure rule applies to {0}")]
    NoRule(String),
    #[error("state {0} does not carry an r or R atom of copy {1}")]
    NotRelevant(StateId, u8),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub chain: MarkovChain,
    /// `states[id]` is the tuple of chain state `id`.
    pub states: Vec<WitnessState>,
    pub init: StateId,
    pub constants: GadgetConstants,
    pub diagnostics: Vec<Diagnostic>,
}

impl WitnessReport {
    pub fn id_of(&self, s: &WitnessState) -> Option<StateId> {
        self.states.iter().position(|t| t == s)
    }
}

/// `⟨n⟩ = Inc^n(z)`, the vector a counter value `n` is represented by.
pub fn counter_vec(g: &Geometry, n: u64) -> Result<Vec2, GeometryError> {
    g.inc_iter(n as usize)
}
