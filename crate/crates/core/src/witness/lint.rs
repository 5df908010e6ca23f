//! Cheap structural checks on a witness chain.

use num_traits::{One, Zero};

use super::vectors::relevant_atom;
use super::WitnessReport;
use crate::checker::Checker;
use crate::formula::{or_any, Family, PathFormula, Proposition, StateFormula};
use crate::markov::validate;
use crate::rational::{fmt_fraction, Rat};
use crate::reduction::phase_succ;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn is_marker(p: &Proposition) -> bool {
    matches!(
        p.family(),
        Some(
            Family::A
                | Family::Abar
                | Family::B
                | Family::C
                | Family::D
                | Family::CapA
                | Family::CapB
                | Family::CapC
                | Family::CapD
                | Family::CapE
                | Family::K
        )
    )
}

fn item(name: &'static str, failures: Vec<String>, checked: usize) -> LintItem {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{checked} checked")
    } else {
        format!("{} of {checked} failed; first: {}", failures.len(), failures[0])
    };
    LintItem { name, passed, detail }
}

fn prob(checker: &mut Checker<'_>, path: PathFormula, s: usize) -> Rat {
    checker.path_probs(&path).map(|v| v[s].clone()).unwrap_or_else(|_| Rat::zero())
}

/// Row sums and weights, marker persistence, the λ escape of `⟨R_i⟩_B`
/// states and the two δ balances of every `R` state.
pub fn lint_witness(report: &WitnessReport) -> Vec<LintItem> {
    let chain = &report.chain;
    let c = &report.constants;
    let violations = validate(chain);
    let mut out = vec![item("rows", violations.iter().map(|v| format!("{v:?}")).collect(), chain.len())];

    let mut bad = Vec::new();
    let mut checked = 0;
    for (s, row) in chain.rows.iter().enumerate() {
        for p in chain.labels[s].iter().filter(|p| is_marker(p)) {
            checked += 1;
            if let Some((t, _)) = row.iter().find(|(t, _)| !chain.labels[*t].contains(p)) {
                bad.push(format!("{p} lost on w{s} -> w{t}"));
            }
        }
    }
    out.push(item("marker-persistence", bad, checked));

    let mut checker = Checker::new(chain);
    let tt = StateFormula::tt();
    let g = |checker: &mut Checker<'_>, body: StateFormula, s| {
        Rat::one() - prob(checker, PathFormula::until(&tt, &body.not()), s)
    };
    let (mut lambda_bad, mut lambda_n) = (Vec::new(), 0);
    let (mut copy_bad, mut copy_n) = (Vec::new(), 0);
    for s in 0..chain.len() {
        for k in 1..=2u8 {
            let Some(x) = relevant_atom(&chain.labels[s], k) else {
                continue;
            };
            if x.family() != Some(Family::CapR) {
                continue;
            }
            let i = x.gadget().expect("gadget atom").phase;
            let up = |f, p| StateFormula::atom(Proposition::phased(f, k, p));
            let others_b = chain.labels[s]
                .iter()
                .any(|p| p.copy() == Some(k) && p != &x && p.family().is_some_and(|f| !f.is_labelled()));
            if !others_b {
                lambda_n += 1;
                let got = g(&mut checker, up(Family::CapR, i).or(&up(Family::CapE, i)), s);
                if got != c.lambda {
                    lambda_bad.push(format!("w{s} copy {k}: {}", fmt_fraction(&got)));
                }
            }
            copy_n += 1;
            let stay = g(&mut checker, or_any(&[up(Family::CapR, i), up(Family::CapA, i), up(Family::CapC, i)]), s);
            let leave = prob(
                &mut checker,
                PathFormula::until(&tt, &up(Family::CapR, phase_succ(i)).or(&up(Family::CapC, i))),
                s,
            );
            if stay != c.delta || leave != c.delta {
                copy_bad.push(format!("w{s} copy {k}: {} and {}", fmt_fraction(&stay), fmt_fraction(&leave)));
            }
        }
    }
    out.push(item("lambda", lambda_bad, lambda_n));
    out.push(item("copy-balance", copy_bad, copy_n));
    out
}
