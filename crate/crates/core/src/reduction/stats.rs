//! Size statistics and the atom-provenance audit.

use std::collections::BTreeSet;

use super::builder::CopyBuilder;
use super::{ReductionConfig, ReductionError};
use crate::formula::{atoms, depth, path_subformulae, subformulae, tree_size, PathKind, StateFormula, StateKind};
use crate::machines::{CounterMachine, Update};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormulaStats {
    /// Distinct state-formula nodes after hash-consing.
    pub state_nodes: usize,
    pub path_nodes: usize,
    pub prob_nodes: usize,
    /// Until nodes whose left operand is not `true`.
    pub proper_untils: usize,
    pub tree_size: u128,
    pub depth: usize,
    pub atoms: usize,
}

pub fn stats(phi: &StateFormula) -> FormulaStats {
    let subs = subformulae(phi);
    let paths = path_subformulae(phi);
    FormulaStats {
        state_nodes: subs.len(),
        path_nodes: paths.len(),
        prob_nodes: subs.iter().filter(|s| matches!(s.kind(), StateKind::Prob(..))).count(),
        proper_untils: paths
            .iter()
            .filter(|p| match p.kind() {
                PathKind::Until(a, _) | PathKind::BoundedUntil(a, _, _) => !a.is_true(),
                PathKind::Next(_) => true,
            })
            .count(),
        tree_size: tree_size(phi),
        depth: depth(phi),
        atoms: atoms(phi).len(),
    }
}

/// Builds every copy-local formula of both copies and reports any atom that
/// belongs to the other copy. Only NewSim, Sync and Recurrent may mix copies.
pub fn audit_provenance(machine: &CounterMachine, cfg: &ReductionConfig) -> Result<Vec<String>, ReductionError> {
    let m = machine.m();
    let mut findings = Vec::new();
    for k in 1..=2u8 {
        let b = CopyBuilder::new(m, k, cfg)?;
        let mut local = vec![
            ("struct".to_string(), b.build_struct()?),
            ("init".to_string(), b.build_init()?),
            ("zero".to_string(), b.build_zero()?),
        ];
        for l in b.labels() {
            local.push((format!("at{l}"), b.build_at(l)?));
            for l2 in b.labels() {
                for u in [Update::Inc, Update::Dec] {
                    local.push((format!("step{l},{l2},{}", u.keyword()), b.build_step(l, l2, u)?));
                }
            }
        }
        for (name, phi) in local {
            let foreign: BTreeSet<String> =
                atoms(&phi).iter().filter(|p| p.copy() != Some(k)).map(|p| p.to_string()).collect();
            if !foreign.is_empty() {
                findings.push(format!("copy {k} {name}: {}", foreign.into_iter().collect::<Vec<_>>().join(", ")));
            }
        }
    }
    Ok(findings)
}
