//! Characteristic vectors `γ^k[s]`, computed exactly on the witness chain.

use std::collections::BTreeSet;

use num_traits::One;

use super::{WitnessError, WitnessReport};
use crate::checker::Checker;
use crate::formula::{or_any, Family, PathFormula, Proposition, StateFormula};
use crate::geometry::Vec2;
use crate::markov::StateId;
use crate::rational::Rat;

/// The `r^k_{i,ℓ}` or `R^k_i` atom of a state, if it has exactly one.
pub fn relevant_atom(props: &BTreeSet<Proposition>, k: u8) -> Option<Proposition> {
    let mut it = props.iter().filter(|p| p.copy() == Some(k) && matches!(p.family(), Some(Family::R | Family::CapR)));
    let first = it.next()?.clone();
    it.next().is_none().then_some(first)
}

/// `(x ∨ a ∨ ā, x ∨ b)` for a lower-case atom, `(x ∨ A, x ∨ B)` for an upper-case one.
fn bodies(x: &Proposition) -> (StateFormula, StateFormula) {
    let g = *x.gadget().expect("gadget atom");
    let at = StateFormula::atom(x.clone());
    let same = |family| StateFormula::atom(Proposition::Gadget(crate::formula::Gadget { family, ..g }));
    if g.family == Family::R {
        (or_any(&[at.clone(), same(Family::A), same(Family::Abar)]), at.or(&same(Family::B)))
    } else {
        (at.or(&same(Family::CapA)), at.or(&same(Family::CapB)))
    }
}

fn g_prob(checker: &mut Checker<'_>, body: &StateFormula, s: StateId) -> Result<Rat, WitnessError> {
    let v = checker.path_probs(&PathFormula::until(&StateFormula::tt(), &body.not()))?;
    Ok(Rat::one() - &v[s])
}

fn vector_with(checker: &mut Checker<'_>, report: &WitnessReport, s: StateId, k: u8) -> Result<Vec2, WitnessError> {
    let props = &report.states.get(s).ok_or(WitnessError::NotRelevant(s, k))?.props;
    let x = relevant_atom(props, k).ok_or(WitnessError::NotRelevant(s, k))?;
    let (phi, psi) = bodies(&x);
    Ok(Vec2::new(g_prob(checker, &phi, s)?, g_prob(checker, &psi, s)?))
}

/// `γ^k[s] = (P_s(G Φ), P_s(G Ψ))`.
pub fn characteristic_vector(report: &WitnessReport, s: StateId, k: u8) -> Result<Vec2, WitnessError> {
    vector_with(&mut Checker::new(&report.chain), report, s, k)
}

/// `γ^k` at every state carrying an `r^k` or `R^k` atom, sharing one checker.
pub fn characteristic_vectors(report: &WitnessReport, k: u8) -> Result<Vec<(StateId, Vec2)>, WitnessError> {
    let mut checker = Checker::new(&report.chain);
    let mut out = Vec::new();
    for (s, st) in report.states.iter().enumerate() {
        if relevant_atom(&st.props, k).is_some() {
            out.push((s, vector_with(&mut checker, report, s, k)?));
        }
    }
    Ok(out)
}
