//! Classical Minsky machines and their translation into counter machines that
//! update both counters on every step.
//!
//! The translation keeps the value of the instruction's counter exact and lets
//! the other counter alternate between an increment and a decrement. Labels
//! `i + m` finish a step on the inactive counter; labels `i + 2m` insert the
//! extra decrement needed when a counter becomes active right after an
//! increment.

use std::collections::BTreeSet;

use super::counter::{Configuration, CounterMachine, Instruction, Label, Update};
use super::MachineError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinskyInstr {
    /// `inc c_j; goto L`
    Inc { counter: usize, goto: BTreeSet<Label> },
    /// `if c_j = 0 then goto L else dec c_j; goto L'`
    Test { counter: usize, zero: BTreeSet<Label>, nonzero: BTreeSet<Label> },
}

impl MinskyInstr {
    /// The counter this instruction modifies (1-based).
    pub fn active(&self) -> usize {
        match self {
            MinskyInstr::Inc { counter, .. } | MinskyInstr::Test { counter, .. } => *counter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinskyMachine {
    pub name: String,
    pub d: usize,
    pub instructions: Vec<MinskyInstr>,
}

impl MinskyMachine {
    pub fn m(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.instructions.iter().all(|i| match i {
            MinskyInstr::Inc { goto, .. } => goto.len() == 1,
            MinskyInstr::Test { zero, nonzero, .. } => zero.len() == 1 && nonzero.len() == 1,
        })
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        if self.instructions.is_empty() {
            return Err(MachineError::Invalid("a machine needs at least one instruction".into()));
        }
        let m = self.m() as Label;
        for (i, ins) in self.instructions.iter().enumerate() {
            let l = i as Label + 1;
            if ins.active() == 0 || ins.active() > self.d {
                return Err(MachineError::BadCounter { label: l, counter: ins.active() });
            }
            let sets: Vec<&BTreeSet<Label>> = match ins {
                MinskyInstr::Inc { goto, .. } => vec![goto],
                MinskyInstr::Test { zero, nonzero, .. } => vec![zero, nonzero],
            };
            for s in sets {
                if s.is_empty() {
                    return Err(MachineError::EmptyTargets(l));
                }
                if s.len() > 2 {
                    return Err(MachineError::Invalid(format!("instruction {l}: target sets have one or two labels")));
                }
                if let Some(t) = s.iter().find(|t| **t == 0 || **t > m) {
                    return Err(MachineError::UnknownLabel { label: l, target: *t });
                }
            }
        }
        Ok(())
    }
}

pub fn minsky_successors(machine: &MinskyMachine, conf: &Configuration) -> Result<Vec<Configuration>, MachineError> {
    let ins = (conf.label as usize)
        .checked_sub(1)
        .and_then(|i| machine.instructions.get(i))
        .ok_or(MachineError::UnknownLabel { label: 0, target: conf.label })?;
    let mut counters = conf.counters.clone();
    let targets = match ins {
        MinskyInstr::Inc { counter, goto } => {
            counters[counter - 1] += 1;
            goto
        }
        MinskyInstr::Test { counter, zero, nonzero } => {
            if counters[counter - 1] == 0 {
                zero
            } else {
                counters[counter - 1] -= 1;
                nonzero
            }
        }
    };
    Ok(targets.iter().map(|&label| Configuration { label, counters: counters.clone() }).collect())
}

/// The first `steps + 1` configurations of a deterministic machine's computation.
pub fn minsky_trace(machine: &MinskyMachine, steps: usize) -> Result<Vec<Configuration>, MachineError> {
    machine.validate()?;
    if !machine.is_deterministic() {
        return Err(MachineError::NotDeterministic);
    }
    let mut cur = Configuration::initial(machine.d);
    let mut out = vec![cur.clone()];
    for _ in 0..steps {
        cur = minsky_successors(machine, &cur)?.pop().expect("deterministic step");
        out.push(cur.clone());
    }
    Ok(out)
}

fn other(j: usize) -> usize {
    3 - j
}

fn updates(dec_on: usize) -> Vec<Update> {
    (1..=2).map(|c| if c == dec_on { Update::Dec } else { Update::Inc }).collect()
}

fn updates_inc_on(inc_on: usize) -> Vec<Update> {
    updates(other(inc_on))
}

/// Builds the `3m`-instruction counter machine simulating `machine`.
pub fn minsky_to_counter(machine: &MinskyMachine) -> Result<CounterMachine, MachineError> {
    if machine.d != 2 {
        return Err(MachineError::CounterCount(machine.d));
    }
    machine.validate()?;
    let m = machine.m() as Label;
    let active = |l: Label| machine.instructions[l as usize - 1].active();
    // ℓ ↦ ℓ+m when ℓ works on counter j, otherwise ℓ+2m
    let retarget = |set: &BTreeSet<Label>, j: usize| -> BTreeSet<Label> {
        set.iter().map(|&l| if active(l) == j { l + m } else { l + 2 * m }).collect()
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut third = Vec::new();
    for ins in &machine.instructions {
        match ins {
            MinskyInstr::Inc { counter: j, goto } => {
                let x = retarget(goto, *j);
                first.push(Instruction { test: *j, zero: x.clone(), pos: x, updates: vec![Update::Inc, Update::Inc] });
                second.push(Instruction {
                    test: *j,
                    zero: goto.clone(),
                    pos: goto.clone(),
                    updates: updates_inc_on(*j),
                });
            }
            MinskyInstr::Test { counter: j, zero, nonzero } => {
                first.push(Instruction {
                    test: *j,
                    zero: retarget(zero, *j),
                    pos: retarget(nonzero, *j),
                    updates: updates(*j),
                });
                second.push(Instruction {
                    test: *j,
                    zero: zero.clone(),
                    pos: nonzero.clone(),
                    updates: vec![Update::Dec, Update::Dec],
                });
            }
        }
    }
    for (i, ins) in machine.instructions.iter().enumerate() {
        let target: BTreeSet<Label> = [i as Label + 1 + m].into();
        third.push(Instruction { test: 1, zero: target.clone(), pos: target, updates: updates(ins.active()) });
    }
    let mut instructions = first;
    instructions.extend(second);
    instructions.extend(third);
    let out = CounterMachine { name: format!("{}_n", machine.name), d: 2, instructions };
    out.validate()?;
    Ok(out)
}

/// Labels whose infinite recurrence matches recurrence of label 1 in the source.
pub fn recurrence_labels(machine: &MinskyMachine) -> BTreeSet<Label> {
    [1, machine.m() as Label + 1].into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[Label]) -> BTreeSet<Label> {
        v.iter().copied().collect()
    }

    #[test]
    fn successor_examples() {
        let m = MinskyMachine {
            name: "t".into(),
            d: 2,
            instructions: vec![
                MinskyInstr::Inc { counter: 1, goto: set(&[2]) },
                MinskyInstr::Test { counter: 1, zero: set(&[3]), nonzero: set(&[4, 5]) },
                MinskyInstr::Inc { counter: 1, goto: set(&[1]) },
                MinskyInstr::Inc { counter: 1, goto: set(&[1]) },
                MinskyInstr::Inc { counter: 1, goto: set(&[1]) },
            ],
        };
        let c = Configuration::initial(2);
        assert_eq!(minsky_successors(&m, &c).unwrap(), vec![Configuration { label: 2, counters: vec![1, 0] }]);
        let z = Configuration { label: 2, counters: vec![0, 7] };
        assert_eq!(minsky_successors(&m, &z).unwrap(), vec![Configuration { label: 3, counters: vec![0, 7] }]);
        let p = Configuration { label: 2, counters: vec![3, 0] };
        let s = minsky_successors(&m, &p).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|c| c.counters[0] == 2));
    }

    #[test]
    fn single_increment_loop() {
        let m = MinskyMachine {
            name: "t".into(),
            d: 2,
            instructions: vec![MinskyInstr::Inc { counter: 1, goto: set(&[1]) }],
        };
        let n = minsky_to_counter(&m).unwrap();
        assert_eq!(n.m(), 3);
        let i1 = &n.instructions[0];
        assert_eq!((i1.test, &i1.zero, &i1.pos), (1, &set(&[2]), &set(&[2])));
        assert_eq!(i1.updates, vec![Update::Inc, Update::Inc]);
        let bad = MinskyMachine { d: 3, ..m };
        assert!(matches!(minsky_to_counter(&bad), Err(MachineError::CounterCount(3))));
    }
}
