//! Exact PCTL model checking over finite chains.
//!
//! [`Checker`] keeps satisfaction sets per state-formula id and probability
//! vectors per path-formula id, so a formula with heavy sharing is evaluated
//! once per distinct node. Subformulae are processed bottom-up by nesting level;
//! with `parallel` set, the probability vectors of one level are computed on the
//! rayon pool. Every level only reads lower levels, so the outcome does not depend
//! on scheduling.

mod explain;
mod oracle;
mod solve;

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

pub use explain::{explain, Explanation, Finding};
pub use oracle::brute_force_bounded;
pub use solve::{
    gauss, prob_bounded_until, prob_next, prob_positive, prob_until, tarjan, until_residual_ok, ProbVector,
};

use crate::formula::{subformulae, PathFormula, PathKind, StateFormula, StateKind};
use crate::markov::{MarkovChain, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("internal error: singular after prob-0 elimination")]
    Singular,
    #[error("state {0} is not in the chain")]
    UnknownState(StateId),
}

/// Satisfaction sets keyed by state-formula id.
#[derive(Debug, Clone, Default)]
pub struct SatMap {
    pub sets: HashMap<u32, FixedBitSet>,
}

impl SatMap {
    pub fn get(&self, phi: &StateFormula) -> Option<&FixedBitSet> {
        self.sets.get(&phi.id())
    }

    pub fn holds(&self, phi: &StateFormula, s: StateId) -> Option<bool> {
        self.get(phi).map(|set| set.contains(s))
    }
}

/// Memoizing checker bound to one chain.
pub struct Checker<'a> {
    chain: &'a MarkovChain,
    preds: Vec<Vec<StateId>>,
    sat: SatMap,
    probs: HashMap<u32, Arc<ProbVector>>,
    parallel: bool,
}

impl<'a> Checker<'a> {
    pub fn new(chain: &'a MarkovChain) -> Checker<'a> {
        Checker { chain, preds: chain.predecessors(), sat: SatMap::default(), probs: HashMap::new(), parallel: false }
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn chain(&self) -> &MarkovChain {
        self.chain
    }

    pub fn sat_map(&self) -> &SatMap {
        &self.sat
    }

    /// Number of distinct path formulae evaluated so far.
    pub fn solved_paths(&self) -> usize {
        self.probs.len()
    }

    /// Satisfaction set of `phi`, evaluating whatever is not memoized yet.
    pub fn sat(&mut self, phi: &StateFormula) -> Result<&FixedBitSet, CheckError> {
        if !self.sat.sets.contains_key(&phi.id()) {
            self.evaluate(phi)?;
        }
        Ok(&self.sat.sets[&phi.id()])
    }

    pub fn holds(&mut self, phi: &StateFormula, s: StateId) -> Result<bool, CheckError> {
        if s >= self.chain.len() {
            return Err(CheckError::UnknownState(s));
        }
        Ok(self.sat(phi)?.contains(s))
    }

    /// Exact probability vector of a path formula.
    pub fn path_probs(&mut self, path: &PathFormula) -> Result<Arc<ProbVector>, CheckError> {
        if let Some(v) = self.probs.get(&path.id()) {
            return Ok(v.clone());
        }
        for op in path.operands() {
            self.sat(&op)?;
        }
        let v = Arc::new(compute_path(self.chain, &self.preds, &self.sat, path)?);
        self.probs.insert(path.id(), v.clone());
        Ok(v)
    }

    fn evaluate(&mut self, phi: &StateFormula) -> Result<(), CheckError> {
        let order: Vec<StateFormula> =
            subformulae(phi).into_iter().filter(|f| !self.sat.sets.contains_key(&f.id())).collect();
        if !self.parallel {
            for f in &order {
                if let StateKind::Prob(path, _, _) = f.kind() {
                    if !self.probs.contains_key(&path.id()) {
                        let v = compute_path(self.chain, &self.preds, &self.sat, path)?;
                        self.probs.insert(path.id(), Arc::new(v));
                    }
                }
                let set = self.local(f);
                self.sat.sets.insert(f.id(), set);
            }
            return Ok(());
        }
        let mut level: HashMap<u32, usize> = HashMap::new();
        let mut by_level: Vec<Vec<StateFormula>> = Vec::new();
        for f in order {
            let l = f.children().iter().map(|c| level.get(&c.id()).map_or(0, |l| l + 1)).max().unwrap_or(0);
            level.insert(f.id(), l);
            if by_level.len() <= l {
                by_level.resize(l + 1, Vec::new());
            }
            by_level[l].push(f);
        }
        for group in by_level {
            let mut pending: Vec<PathFormula> = Vec::new();
            for f in &group {
                if let StateKind::Prob(path, _, _) = f.kind() {
                    if !self.probs.contains_key(&path.id()) && !pending.iter().any(|p| p.id() == path.id()) {
                        pending.push(path.clone());
                    }
                }
            }
            let (chain, preds, sat) = (self.chain, &self.preds, &self.sat);
            let solved: Vec<(u32, ProbVector)> = pending
                .par_iter()
                .map(|p| compute_path(chain, preds, sat, p).map(|v| (p.id(), v)))
                .collect::<Result<_, _>>()?;
            for (id, v) in solved {
                self.probs.insert(id, Arc::new(v));
            }
            for f in &group {
                let set = self.local(f);
                self.sat.sets.insert(f.id(), set);
            }
        }
        Ok(())
    }

    /// Satisfaction set of one node whose children are already evaluated.
    fn local(&self, f: &StateFormula) -> FixedBitSet {
        let n = self.chain.len();
        let get = |g: &StateFormula| &self.sat.sets[&g.id()];
        match f.kind() {
            StateKind::True => {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert_range(..);
                s
            }
            StateKind::Atom(p) => {
                let mut s = FixedBitSet::with_capacity(n);
                for (i, labels) in self.chain.labels.iter().enumerate() {
                    if labels.contains(p) {
                        s.insert(i);
                    }
                }
                s
            }
            StateKind::Not(a) => {
                let mut s = get(a).clone();
                s.toggle_range(..);
                s
            }
            StateKind::And(a, b) => {
                let mut s = get(a).clone();
                s.intersect_with(get(b));
                s
            }
            StateKind::Prob(path, cmp, bound) => {
                let v = &self.probs[&path.id()];
                let mut s = FixedBitSet::with_capacity(n);
                for (i, p) in v.iter().enumerate() {
                    if cmp.holds(p, bound) {
                        s.insert(i);
                    }
                }
                s
            }
        }
    }
}

fn compute_path(
    chain: &MarkovChain,
    preds: &[Vec<StateId>],
    sat: &SatMap,
    path: &PathFormula,
) -> Result<ProbVector, CheckError> {
    let get = |g: &StateFormula| &sat.sets[&g.id()];
    match path.kind() {
        PathKind::Next(a) => Ok(prob_next(chain, get(a))),
        PathKind::Until(a, b) => prob_until(chain, preds, get(a), get(b)),
        PathKind::BoundedUntil(a, b, k) => Ok(prob_bounded_until(chain, get(a), get(b), *k)),
    }
}

/// One-shot satisfaction map for every subformula of `phi`.
pub fn sat(chain: &MarkovChain, phi: &StateFormula) -> Result<SatMap, CheckError> {
    let mut c = Checker::new(chain);
    c.sat(phi)?;
    Ok(c.sat)
}
