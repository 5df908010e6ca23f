//! Counter machines whose instructions update every counter at once.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::MachineError;

pub type Label = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Update {
    Inc,
    Dec,
}

impl Update {
    pub fn apply(self, c: u64) -> u64 {
        match self {
            Update::Inc => c + 1,
            Update::Dec => c.saturating_sub(1),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Update::Inc => "inc",
            Update::Dec => "dec",
        }
    }
}

/// `⟨C_k = 0 ? Z : P⟩: update_1, …, update_d`, with `k` 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub test: usize,
    pub zero: BTreeSet<Label>,
    pub pos: BTreeSet<Label>,
    pub updates: Vec<Update>,
}

impl Instruction {
    /// Targets taken when the tested counter has value `c`.
    pub fn targets(&self, c: u64) -> &BTreeSet<Label> {
        if c == 0 {
            &self.zero
        } else {
            &self.pos
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterMachine {
    pub name: String,
    pub d: usize,
    /// Instruction `ℓ` is stored at index `ℓ - 1`.
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub label: Label,
    pub counters: Vec<u64>,
}

impl Configuration {
    pub fn initial(d: usize) -> Configuration {
        Configuration { label: 1, counters: vec![0; d] }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        for c in &self.counters {
            write!(f, ", {c}")?;
        }
        write!(f, ")")
    }
}

/// A periodic computation `C_0 … C_{β-1}` with `C_{α-1} = C_{β-1}`, `1 ≤ α < β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoComputation {
    pub configs: Vec<Configuration>,
    pub alpha: usize,
}

impl LassoComputation {
    pub fn beta(&self) -> usize {
        self.configs.len()
    }

    pub fn period(&self) -> usize {
        self.beta() - self.alpha
    }

    /// `C_t` of the infinite computation the lasso describes.
    pub fn config_at(&self, t: usize) -> &Configuration {
        let b = self.beta();
        if t < b {
            &self.configs[t]
        } else {
            let start = self.alpha - 1;
            &self.configs[start + (t - start) % self.period()]
        }
    }
}

impl CounterMachine {
    pub fn m(&self) -> usize {
        self.instructions.len()
    }

    pub fn instruction(&self, label: Label) -> Option<&Instruction> {
        (label as usize).checked_sub(1).and_then(|i| self.instructions.get(i))
    }

    pub fn is_deterministic(&self) -> bool {
        self.instructions.iter().all(|i| i.zero.len() == 1 && i.pos.len() == 1)
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        if self.d == 0 {
            return Err(MachineError::Invalid("a machine needs at least one counter".into()));
        }
        if self.instructions.is_empty() {
            return Err(MachineError::Invalid("a machine needs at least one instruction".into()));
        }
        let m = self.m() as Label;
        for (i, ins) in self.instructions.iter().enumerate() {
            let l = i as Label + 1;
            if ins.test == 0 || ins.test > self.d {
                return Err(MachineError::BadCounter { label: l, counter: ins.test });
            }
            if ins.zero.is_empty() || ins.pos.is_empty() {
                return Err(MachineError::EmptyTargets(l));
            }
            if let Some(t) = ins.zero.iter().chain(&ins.pos).find(|t| **t == 0 || **t > m) {
                return Err(MachineError::UnknownLabel { label: l, target: *t });
            }
            if ins.updates.len() != self.d {
                return Err(MachineError::UpdateCount { label: l, expected: self.d, found: ins.updates.len() });
            }
        }
        Ok(())
    }

    /// Labels that are the target of some instruction.
    pub fn labels(&self) -> std::ops::RangeInclusive<Label> {
        1..=self.m() as Label
    }
}

/// All successors of `conf`; the updates hit every counter simultaneously.
pub fn successors(machine: &CounterMachine, conf: &Configuration) -> Result<Vec<Configuration>, MachineError> {
    let ins = machine.instruction(conf.label).ok_or(MachineError::UnknownLabel { label: 0, target: conf.label })?;
    let counters: Vec<u64> = conf.counters.iter().zip(&ins.updates).map(|(c, u)| u.apply(*c)).collect();
    Ok(ins
        .targets(conf.counters[ins.test - 1])
        .iter()
        .map(|&label| Configuration { label, counters: counters.clone() })
        .collect())
}

/// Simulates the unique computation until a configuration repeats.
pub fn run_deterministic(machine: &CounterMachine, max_steps: usize) -> Result<LassoComputation, MachineError> {
    machine.validate()?;
    if !machine.is_deterministic() {
        return Err(MachineError::NotDeterministic);
    }
    let mut seen: HashMap<Configuration, usize> = HashMap::new();
    let mut configs = Vec::new();
    let mut cur = Configuration::initial(machine.d);
    for t in 0..=max_steps {
        if let Some(&first) = seen.get(&cur) {
            configs.push(cur);
            return Ok(LassoComputation { configs, alpha: first + 1 });
        }
        seen.insert(cur.clone(), t);
        let next = successors(machine, &cur)?.pop().expect("deterministic step");
        configs.push(cur);
        cur = next;
    }
    Err(MachineError::Unbounded { steps: max_steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(test: usize, zero: &[Label], pos: &[Label], ups: &[Update]) -> Instruction {
        Instruction {
            test,
            zero: zero.iter().copied().collect(),
            pos: pos.iter().copied().collect(),
            updates: ups.to_vec(),
        }
    }

    fn machine(instructions: Vec<Instruction>) -> CounterMachine {
        CounterMachine { name: "t".into(), d: 2, instructions }
    }

    use Update::{Dec, Inc};

    pub(crate) fn m0() -> CounterMachine {
        machine(vec![ins(1, &[2], &[2], &[Dec, Dec]), ins(2, &[1], &[1], &[Dec, Dec])])
    }

    #[test]
    fn successor_examples() {
        let m = machine(vec![
            ins(1, &[2], &[3], &[Inc, Dec]),
            ins(1, &[1], &[1], &[Dec, Dec]),
            ins(1, &[1], &[1], &[Dec, Dec]),
        ]);
        let c = Configuration { label: 1, counters: vec![0, 5] };
        assert_eq!(successors(&m, &c).unwrap(), vec![Configuration { label: 2, counters: vec![1, 4] }]);
        let c = Configuration { label: 2, counters: vec![0, 0] };
        assert_eq!(successors(&m, &c).unwrap(), vec![Configuration { label: 1, counters: vec![0, 0] }]);
        let nd = machine(vec![
            ins(1, &[2, 4], &[1], &[Dec, Dec]),
            ins(1, &[1], &[1], &[Dec, Dec]),
            ins(1, &[1], &[1], &[Dec, Dec]),
            ins(1, &[1], &[1], &[Dec, Dec]),
        ]);
        let s = successors(&nd, &Configuration::initial(2)).unwrap();
        assert_eq!(s.iter().map(|c| c.label).collect::<Vec<_>>(), [2, 4]);
    }

    #[test]
    fn lasso_examples() {
        let l = run_deterministic(&m0(), 100).unwrap();
        assert_eq!((l.alpha, l.beta()), (1, 3));
        assert_eq!(l.configs[1], Configuration { label: 2, counters: vec![0, 0] });
        assert_eq!(l.config_at(5), &l.configs[1]);
        let grow = machine(vec![ins(1, &[1], &[1], &[Inc, Inc])]);
        assert!(matches!(run_deterministic(&grow, 50), Err(MachineError::Unbounded { steps: 50 })));
        let stay = machine(vec![ins(1, &[1], &[1], &[Dec, Dec])]);
        let l = run_deterministic(&stay, 10).unwrap();
        assert_eq!((l.alpha, l.beta()), (1, 2));
    }

    #[test]
    fn validation() {
        let mut m = m0();
        m.instructions[0].zero = [3].into();
        assert!(matches!(m.validate(), Err(MachineError::UnknownLabel { target: 3, .. })));
        let mut m = m0();
        m.instructions[1].updates.pop();
        assert!(matches!(m.validate(), Err(MachineError::UpdateCount { .. })));
    }
}
