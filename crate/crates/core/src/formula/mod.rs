//! PCTL syntax: propositions, hash-consed formulae, sugar, parser and printer.

mod ast;
mod parse;
mod prop;

use std::collections::BTreeSet;

use num_traits::One;
use thiserror::Error;

pub use ast::{check_bound, print_formula, subformulae, Cmp, PathFormula, PathKind, StateFormula, StateKind};
pub use parse::parse_formula;
pub use prop::{Family, Gadget, Proposition};

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("probability bound {0} outside [0,1]")]
    BoundOutOfRange(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
}

/// `F_{⋈r} φ`, i.e. `P⋈r[true U φ]`.
pub fn mk_f(cmp: Cmp, bound: Rat, phi: &StateFormula) -> Result<StateFormula, FormulaError> {
    StateFormula::prob(PathFormula::until(&StateFormula::tt(), phi), cmp, bound)
}

/// `F^k_{⋈r} φ`, i.e. `P⋈r[true U<=k φ]`.
pub fn mk_f_bounded(cmp: Cmp, bound: Rat, k: u64, phi: &StateFormula) -> Result<StateFormula, FormulaError> {
    StateFormula::prob(PathFormula::bounded_until(&StateFormula::tt(), phi, k), cmp, bound)
}

/// `G_{⋈r} φ`: the probability of staying in `φ` forever compares with `r`.
///
/// Expressed as `P⋈'(1-r)[true U !φ]` where `⋈'` is the mirrored comparison,
/// since `P(G φ) = 1 - P(F !φ)`.
pub fn mk_g(cmp: Cmp, bound: Rat, phi: &StateFormula) -> Result<StateFormula, FormulaError> {
    check_bound(&bound)?;
    mk_f(cmp.mirror(), Rat::one() - bound, &phi.not())
}

/// Conjunction of a list; `true` when empty. Built as a balanced tree so the
/// nesting depth stays logarithmic.
pub fn and_all(items: &[StateFormula]) -> StateFormula {
    match items.len() {
        0 => StateFormula::tt(),
        1 => items[0].clone(),
        n => and_all(&items[..n / 2]).and(&and_all(&items[n / 2..])),
    }
}

/// Disjunction of a list; `false` when empty.
pub fn or_any(items: &[StateFormula]) -> StateFormula {
    match items.len() {
        0 => StateFormula::ff(),
        1 => items[0].clone(),
        n => or_any(&items[..n / 2]).or(&or_any(&items[n / 2..])),
    }
}

/// `⟨L⟩_O`: every atom of `L` holds and every atom of `O ∖ L` fails, in canonical order.
pub fn mk_exclusive(l: &BTreeSet<Proposition>, o: &BTreeSet<Proposition>) -> Result<StateFormula, FormulaError> {
    if let Some(p) = l.iter().find(|p| !o.contains(*p)) {
        return Err(FormulaError::InvalidArgument(format!("`{p}` is not in the universe of the exclusive set")));
    }
    let literals: Vec<StateFormula> = o
        .iter()
        .map(|p| {
            let a = StateFormula::atom(p.clone());
            if l.contains(p) {
                a
            } else {
                a.not()
            }
        })
        .collect();
    Ok(and_all(&literals))
}

/// Atoms occurring in a formula.
pub fn atoms(phi: &StateFormula) -> BTreeSet<Proposition> {
    subformulae(phi)
        .into_iter()
        .filter_map(|f| match f.kind() {
            StateKind::Atom(p) => Some(p.clone()),
            _ => None,
        })
        .collect()
}

/// All path formulae reachable from `phi`, deduplicated, in subformula order.
pub fn path_subformulae(phi: &StateFormula) -> Vec<PathFormula> {
    let mut seen = std::collections::HashSet::new();
    subformulae(phi)
        .into_iter()
        .filter_map(|f| match f.kind() {
            StateKind::Prob(p, _, _) => seen.insert(p.id()).then(|| p.clone()),
            _ => None,
        })
        .collect()
}

/// Size of the formula as a tree (shared nodes counted at every occurrence).
pub fn tree_size(phi: &StateFormula) -> u128 {
    let mut memo: std::collections::HashMap<u32, u128> = std::collections::HashMap::new();
    for f in subformulae(phi) {
        let own = match f.kind() {
            StateKind::Prob(..) => 2,
            _ => 1,
        };
        let size = f.children().iter().fold(own, |acc: u128, c| acc.saturating_add(memo[&c.id()]));
        memo.insert(f.id(), size);
    }
    memo[&phi.id()]
}

/// Nesting depth in state-formula levels.
pub fn depth(phi: &StateFormula) -> usize {
    let mut memo: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for f in subformulae(phi) {
        let d = 1 + f.children().iter().map(|c| memo[&c.id()]).max().unwrap_or(0);
        memo.insert(f.id(), d);
    }
    memo[&phi.id()]
}
