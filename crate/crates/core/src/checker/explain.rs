//! Locating the reason a formula fails at a state.
//!
//! Starting at the root, the walk follows a child whose truth value alone forces
//! the wrong outcome: a false conjunct below an expected-true conjunction, the
//! operand of a negation with flipped expectation. An expected-true
//! `P=0[true U ψ]` (the shape of `G_{=1}`) moves the walk to the nearest
//! reachable state satisfying `ψ`. Otherwise it stops at an atom or at a
//! probability operator, where it records the exact probability and the bound.

use std::collections::VecDeque;

use std::fmt;

use super::{CheckError, Checker};
use num_traits::Zero;

use crate::formula::{print_formula, Cmp, PathKind, StateFormula, StateKind};
use crate::markov::StateId;
use crate::rational::{fmt_fraction, Rat};

const SHOWN: usize = 160;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    /// State the node is evaluated at.
    pub state: StateId,
    pub id: u32,
    pub text: String,
    pub expected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    /// Where the walk started.
    pub state: StateId,
    /// Root first; the last entry is where the walk stopped.
    pub path: Vec<Finding>,
    /// Exact probability, comparison and bound of the final node when it is a `P` operator.
    pub probability: Option<(Rat, Cmp, Rat)>,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "at state {}:", self.state)?;
        let mut at = self.state;
        for (depth, step) in self.path.iter().enumerate() {
            if step.state != at {
                at = step.state;
                writeln!(f, "{:indent$}reached state {at}", "", indent = 2 * depth + 2)?;
            }
            let want = if step.expected { "should hold" } else { "should fail" };
            writeln!(f, "{:indent$}#{} {want}: {}", "", step.id, step.text, indent = 2 * depth + 2)?;
        }
        if let Some((p, cmp, r)) = &self.probability {
            writeln!(f, "  probability {} but required {}{}", fmt_fraction(p), cmp.symbol(), fmt_fraction(r))?;
        }
        Ok(())
    }
}

fn short(phi: &StateFormula) -> String {
    let text = print_formula(phi);
    if text.chars().count() <= SHOWN {
        text
    } else {
        let cut: String = text.chars().take(SHOWN).collect();
        format!("{cut}...")
    }
}

fn is_literal(phi: &StateFormula) -> bool {
    match phi.kind() {
        StateKind::True | StateKind::Atom(_) => true,
        StateKind::Not(a) => matches!(a.kind(), StateKind::True | StateKind::Atom(_)),
        _ => false,
    }
}

/// The first state reachable from `s` (breadth-first) in `target`.
fn nearest(checker: &Checker<'_>, s: StateId, target: &fixedbitset::FixedBitSet) -> Option<StateId> {
    let chain = checker.chain();
    let mut seen = vec![false; chain.len()];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(x) = queue.pop_front() {
        if target.contains(x) {
            return Some(x);
        }
        for (t, p) in &chain.rows[x] {
            if *p > Rat::from_integer(0.into()) && !seen[*t] {
                seen[*t] = true;
                queue.push_back(*t);
            }
        }
    }
    None
}

/// Explains why `phi` does not hold at `s`; `None` when it does.
pub fn explain(checker: &mut Checker<'_>, phi: &StateFormula, s: StateId) -> Result<Option<Explanation>, CheckError> {
    if checker.holds(phi, s)? {
        return Ok(None);
    }
    let mut path = Vec::new();
    let mut probability = None;
    let mut node = phi.clone();
    let mut expected = true;
    let mut at = s;
    loop {
        path.push(Finding { state: at, id: node.id(), text: short(&node), expected });
        let next = match node.kind() {
            StateKind::Not(a) => Some((a.clone(), !expected)),
            StateKind::And(a, b) if expected => {
                if !checker.holds(a, at)? {
                    Some((a.clone(), true))
                } else {
                    Some((b.clone(), true))
                }
            }
            // both conjuncts hold and either accounts for the failure; an
            // implication `¬(g ∧ ¬c)` is explained by its consequent, otherwise
            // prefer the side that is not a plain literal
            StateKind::And(a, b) => {
                let negated = |x: &StateFormula| matches!(x.kind(), StateKind::Not(_)) && !is_literal(x);
                let pick = if negated(b) || (!negated(a) && is_literal(a)) { b } else { a };
                Some((pick.clone(), false))
            }
            StateKind::Prob(path_f, cmp, bound) => {
                let v = checker.path_probs(path_f)?;
                let always = match path_f.kind() {
                    PathKind::Until(a, b) if expected && a.is_true() && *cmp == Cmp::Eq && bound.is_zero() => {
                        Some(b.clone())
                    }
                    _ => None,
                };
                let hit = match &always {
                    Some(b) => {
                        let set = checker.sat(b)?.clone();
                        nearest(checker, at, &set)
                    }
                    None => None,
                };
                match (always, hit) {
                    (Some(b), Some(t)) => {
                        at = t;
                        Some((b, false))
                    }
                    _ => {
                        probability = Some((v[at].clone(), *cmp, bound.clone()));
                        None
                    }
                }
            }
            _ => None,
        };
        match next {
            Some((child, e)) => {
                node = child;
                expected = e;
            }
            None => break,
        }
    }
    Ok(Some(Explanation { state: s, path, probability }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::markov::parse_chain;
    use crate::rational::rat;

    #[test]
    fn reports_failing_probability() {
        let c = parse_chain("state s :\nstate t : b\ns -> t 1/2\ns -> s 1/2\nt -> t 1").unwrap();
        let f = parse_formula("b | P=1/2[!b U<=2 b]").unwrap();
        let mut ch = Checker::new(&c);
        let e = explain(&mut ch, &f, 0).unwrap().unwrap();
        assert_eq!(e.probability, Some((rat(3, 4), Cmp::Eq, rat(1, 2))));
        assert!(e.to_string().contains("probability 3/4 but required =1/2"));
        assert!(explain(&mut ch, &f, 1).unwrap().is_none());
    }

    #[test]
    fn follows_always_to_the_bad_state() {
        let c = parse_chain("state s : a\nstate t : a\nstate u :\ns -> t 1\nt -> u 1/3\nt -> t 2/3\nu -> u 1").unwrap();
        let f = parse_formula("P=1[G (a | P>1/2[X a])]").unwrap();
        let mut ch = Checker::new(&c);
        let e = explain(&mut ch, &f, 0).unwrap().unwrap();
        assert_eq!(e.path.last().unwrap().state, 2);
        assert_eq!(e.probability, Some((rat(0, 1), Cmp::Gt, rat(1, 2))));
        assert!(e.to_string().contains("reached state 2"));
    }
}
