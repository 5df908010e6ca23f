//! Finite labelled Markov chains with exact rational transition rows.

mod format;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use num_traits::{One, Zero};
use thiserror::Error;

pub use format::{parse_chain, print_chain};

use crate::formula::Proposition;
use crate::rational::{fmt_fraction, Rat};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("chain is not a valid Markov chain: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyRow,
    NonPositive { target: StateId, prob: Rat },
    AboveOne { target: StateId, prob: Rat },
    DanglingTarget(StateId),
    DuplicateTarget(StateId),
    RowSum(Rat),
    DanglingInit(StateId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub state: StateId,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.state;
        match &self.kind {
            ViolationKind::EmptyRow => write!(f, "state {s}: no outgoing transitions"),
            ViolationKind::NonPositive { target, prob } => {
                write!(f, "state {s}: non-positive probability {} to {target}", fmt_fraction(prob))
            }
            ViolationKind::AboveOne { target, prob } => {
                write!(f, "state {s}: probability {} to {target} exceeds 1", fmt_fraction(prob))
            }
            ViolationKind::DanglingTarget(t) => write!(f, "state {s}: dangling target {t}"),
            ViolationKind::DuplicateTarget(t) => write!(f, "state {s}: target {t} listed twice"),
            ViolationKind::RowSum(sum) => {
                write!(f, "state {s}: row-sum {} != 1", fmt_fraction(sum))
            }
            ViolationKind::DanglingInit(t) => write!(f, "init refers to missing state {t}"),
        }
    }
}

/// A finite chain. States are dense indices; `names` keeps the external ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MarkovChain {
    pub name: String,
    pub names: Vec<String>,
    pub labels: Vec<BTreeSet<Proposition>>,
    pub rows: Vec<Vec<(StateId, Rat)>>,
    pub init: Option<StateId>,
}

impl MarkovChain {
    pub fn new(name: impl Into<String>) -> MarkovChain {
        MarkovChain { name: name.into(), ..MarkovChain::default() }
    }

    /// Appends a state with no transitions yet and returns its id.
    pub fn add_state(&mut self, name: impl Into<String>, labels: BTreeSet<Proposition>) -> StateId {
        self.names.push(name.into());
        self.labels.push(labels);
        self.rows.push(Vec::new());
        self.names.len() - 1
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn transitions(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn id_of(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn holds(&self, s: StateId, p: &Proposition) -> bool {
        self.labels[s].contains(p)
    }

    /// Predecessor lists over positive transitions.
    pub fn predecessors(&self) -> Vec<Vec<StateId>> {
        let mut pre = vec![Vec::new(); self.len()];
        for (s, row) in self.rows.iter().enumerate() {
            for (t, _) in row {
                pre[*t].push(s);
            }
        }
        pre
    }

    pub fn validate_or_err(&self) -> Result<(), ChainError> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(ChainError::Invalid(v))
        }
    }
}

/// Checks every structural invariant and reports all violations found.
pub fn validate(chain: &MarkovChain) -> Vec<Violation> {
    let n = chain.len();
    let mut out = Vec::new();
    for (s, row) in chain.rows.iter().enumerate() {
        if row.is_empty() {
            out.push(Violation { state: s, kind: ViolationKind::EmptyRow });
            continue;
        }
        let mut seen = HashMap::new();
        let mut sum = Rat::zero();
        for (t, p) in row {
            if *t >= n {
                out.push(Violation { state: s, kind: ViolationKind::DanglingTarget(*t) });
            } else if seen.insert(*t, ()).is_some() {
                out.push(Violation { state: s, kind: ViolationKind::DuplicateTarget(*t) });
            }
            if p <= &Rat::zero() {
                out.push(Violation { state: s, kind: ViolationKind::NonPositive { target: *t, prob: p.clone() } });
            } else if p > &Rat::one() {
                out.push(Violation { state: s, kind: ViolationKind::AboveOne { target: *t, prob: p.clone() } });
            }
            sum += p;
        }
        if !sum.is_one() {
            out.push(Violation { state: s, kind: ViolationKind::RowSum(sum) });
        }
    }
    if let Some(i) = chain.init {
        if i >= n {
            out.push(Violation { state: i, kind: ViolationKind::DanglingInit(i) });
        }
    }
    out
}

/// Forward closure from `s` over positive transitions, including `s`.
pub fn reachable(chain: &MarkovChain, s: StateId) -> Result<FixedBitSet, ChainError> {
    if s >= chain.len() {
        return Err(ChainError::UnknownState(s.to_string()));
    }
    let mut seen = FixedBitSet::with_capacity(chain.len());
    let mut stack = vec![s];
    seen.insert(s);
    while let Some(u) = stack.pop() {
        for (t, _) in &chain.rows[u] {
            if *t < chain.len() && !seen.put(*t) {
                stack.push(*t);
            }
        }
    }
    Ok(seen)
}
