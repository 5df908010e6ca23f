//! Two-counter assembly: the per-copy simulations, `Sync` and `Recurrent`.

use std::collections::BTreeSet;

use super::builder::{all, any, g, g1, phase_succ, CopyBuilder};
use super::{ReductionConfig, ReductionError, Variant};
use crate::formula::{mk_f, Cmp, Family, Proposition, StateFormula};
use crate::machines::{CounterMachine, Label};
use crate::rational::zero;

impl CopyBuilder {
    fn zero_for_counter(&self, other: &CopyBuilder, counter: usize) -> Result<StateFormula, ReductionError> {
        if counter == self.k as usize {
            self.build_zero()
        } else {
            other.build_zero()
        }
    }

    /// `NewSim^k_ℓ`: follow the instruction while the other copy is at `ℓ`
    /// too, otherwise abandon the step with a decrement back to label `ℓ`.
    pub fn build_newsim(
        &self,
        l: Label,
        other: &CopyBuilder,
        machine: &CounterMachine,
    ) -> Result<StateFormula, ReductionError> {
        self.check_label(l)?;
        let ins = machine.instruction(l).ok_or_else(|| ReductionError::BadIndex(format!("label {l}")))?;
        let u = ins.updates[self.k as usize - 1];
        let new_zero = self.zero_for_counter(other, ins.test)?;
        let there = other.build_at(l)?;
        let steps = |targets: &BTreeSet<Label>| any(targets.iter().map(|&l2| self.build_step(l, l2, u)));
        let on_zero = new_zero.and(&there).implies(&steps(&ins.zero)?);
        let on_pos = new_zero.not().and(&there).implies(&steps(&ins.pos)?);
        let abandon = all((0..3).map(|i| {
            let guard = self.ex_a(&[self.lo(Family::R, i, l)])?.and(&there.not());
            Ok(guard.implies(&self.propagation(i, l, l)?.and(&self.udec(i, l, l)?)))
        }))?;
        Ok(on_zero.and(&on_pos).and(&abandon))
    }

    /// `ψ^k = Struct ∧ Init ∧ G_{=1} ⋀_ℓ (at_ℓ ⇒ NewSim_ℓ)`, as named parts.
    pub fn build_copy(
        &self,
        other: &CopyBuilder,
        machine: &CounterMachine,
    ) -> Result<Vec<(String, StateFormula)>, ReductionError> {
        let sim = all(self.labels().map(|l| Ok(self.build_at(l)?.implies(&self.build_newsim(l, other, machine)?))))?;
        let k = self.k;
        Ok(vec![
            (format!("struct{k}"), self.build_struct()?),
            (format!("init{k}"), self.build_init()?),
            (format!("sim{k}"), g1(&sim)?),
        ])
    }
}

fn both_r(c1: &CopyBuilder, c2: &CopyBuilder, i: u8, l: Label) -> StateFormula {
    c1.atom_lo(Family::R, i, l).and(&c2.atom_lo(Family::R, i, l))
}

/// `Sync`: while both copies sit at `r_{i,ℓ}`, they can move on together.
pub fn build_sync(c1: &CopyBuilder, c2: &CopyBuilder) -> Result<StateFormula, ReductionError> {
    let mut items = Vec::new();
    for l in c1.labels() {
        for i in 0..3 {
            let here = both_r(c1, c2, i, l);
            let s = phase_succ(i);
            let options = any(c1.labels().map(|l2| {
                let body = here.or(&both_r(c1, c2, s, l2)).or(&c1.atom_lo(Family::A, s, l2));
                g(Cmp::Gt, zero(), &body)
            }))?;
            items.push(g1(&here.implies(&options)));
        }
    }
    all(items)
}

/// `Recurrent`: from every joint position some joint `τ` position stays reachable.
pub fn build_recurrent(
    c1: &CopyBuilder,
    c2: &CopyBuilder,
    tau: &BTreeSet<Label>,
) -> Result<StateFormula, ReductionError> {
    if tau.is_empty() {
        return Err(ReductionError::EmptyTau);
    }
    let joint = |l: Label| Ok::<_, ReductionError>(c1.build_at(l)?.and(&c2.build_at(l)?));
    let target = any(tau.iter().map(|&l| joint(l)))?;
    let reach = mk_f(Cmp::Gt, zero(), &target)?;
    let body = all(c1.labels().map(|l| Ok(joint(l)?.implies(&reach))))?;
    g1(&body)
}

/// Both copies' proposition universes.
pub fn universe(m: usize) -> BTreeSet<Proposition> {
    let mut out = super::Universe::new(m, 1).a;
    out.extend(super::Universe::new(m, 2).a);
    out
}

/// A compiled formula with its top-level conjuncts kept by name.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub formula: StateFormula,
    pub parts: Vec<(String, StateFormula)>,
    pub universe: BTreeSet<Proposition>,
}

impl Compiled {
    pub fn part(&self, name: &str) -> Option<&StateFormula> {
        self.parts.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

pub fn compile_parts(machine: &CounterMachine, cfg: &ReductionConfig) -> Result<Compiled, ReductionError> {
    if machine.d != 2 {
        return Err(ReductionError::CounterCount(machine.d));
    }
    machine.validate()?;
    let m = machine.m();
    cfg.validate(m)?;
    let c1 = CopyBuilder::new(m, 1, cfg)?;
    let c2 = CopyBuilder::new(m, 2, cfg)?;
    let mut parts = c1.build_copy(&c2, machine)?;
    parts.extend(c2.build_copy(&c1, machine)?);
    parts.push(("sync".into(), build_sync(&c1, &c2)?));
    if let Variant::Recurrent(tau) = &cfg.variant {
        parts.push(("recurrent".into(), build_recurrent(&c1, &c2, tau)?));
    }
    let formula = crate::formula::and_all(&parts.iter().map(|(_, f)| f.clone()).collect::<Vec<_>>());
    Ok(Compiled { formula, parts, universe: universe(m) })
}

/// `φ_M` for the recurrent variant, `Ψ_M` for the finite one.
pub fn compile(machine: &CounterMachine, cfg: &ReductionConfig) -> Result<StateFormula, ReductionError> {
    Ok(compile_parts(machine, cfg)?.formula)
}
