//! Per-copy proposition universe and the formula helpers every builder uses.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use super::{Fragment, ReductionConfig, ReductionError, ZeroMode};
use crate::formula::{and_all, mk_exclusive, mk_f, mk_g, or_any, Cmp, Family, PathFormula, Proposition, StateFormula};
use crate::geometry::GadgetConstants;
use crate::machines::Label;
use crate::rational::Rat;

/// `S(i) = i + 1 mod 3`.
pub fn phase_succ(i: u8) -> u8 {
    (i + 1) % 3
}

/// Lower-case families that mark a finished simulation step.
pub(super) const STEP_MARKERS: [Family; 5] = [Family::A, Family::Abar, Family::B, Family::C, Family::D];

/// The proposition sets of one copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    /// `K` and the upper-case families, 19 atoms.
    pub b: BTreeSet<Proposition>,
    /// `B` plus the lower-case families, `19 + 18m` atoms.
    pub a: BTreeSet<Proposition>,
    /// The lower-case families alone.
    pub a_minus_b: BTreeSet<Proposition>,
    /// Lower-case markers `a, ā, b, c, d`.
    pub c: BTreeSet<Proposition>,
    /// The `r_{i,ℓ}` atoms.
    pub r: BTreeSet<Proposition>,
}

impl Universe {
    pub fn new(m: usize, k: u8) -> Universe {
        let mut b: BTreeSet<Proposition> = BTreeSet::new();
        b.insert(Proposition::k(k));
        for f in Family::PHASED {
            for i in 0..3 {
                b.insert(Proposition::phased(f, k, i));
            }
        }
        let mut a_minus_b = BTreeSet::new();
        for f in Family::LABELLED {
            for i in 0..3 {
                for l in 1..=m as Label {
                    a_minus_b.insert(Proposition::labelled(f, k, i, l));
                }
            }
        }
        let c = a_minus_b.iter().filter(|p| p.family() != Some(Family::R)).cloned().collect();
        let r = a_minus_b.iter().filter(|p| p.family() == Some(Family::R)).cloned().collect();
        let a = b.union(&a_minus_b).cloned().collect();
        Universe { b, a, a_minus_b, c, r }
    }
}

/// Which set an exclusive conjunction ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Over {
    A,
    B,
    AMinusB,
}

/// Builds the formulae of one copy `k ∈ {1,2}` for a machine with `m` instructions.
pub struct CopyBuilder {
    pub m: usize,
    pub k: u8,
    pub consts: GadgetConstants,
    pub fragment: Fragment,
    pub zero_mode: ZeroMode,
    pub universe: Universe,
    exclusive: RefCell<HashMap<(Over, Vec<Proposition>), StateFormula>>,
    zero: RefCell<Option<StateFormula>>,
}

impl CopyBuilder {
    pub fn new(m: usize, k: u8, cfg: &ReductionConfig) -> Result<CopyBuilder, ReductionError> {
        if m == 0 {
            return Err(ReductionError::BadIndex("a machine needs at least one instruction".into()));
        }
        if !(1..=2).contains(&k) {
            return Err(ReductionError::BadIndex(format!("copy {k}")));
        }
        cfg.constants.validate()?;
        Ok(CopyBuilder {
            m,
            k,
            consts: cfg.constants.clone(),
            fragment: cfg.fragment,
            zero_mode: cfg.zero_mode,
            universe: Universe::new(m, k),
            exclusive: RefCell::new(HashMap::new()),
            zero: RefCell::new(None),
        })
    }

    pub(super) fn check_label(&self, l: Label) -> Result<(), ReductionError> {
        if l == 0 || l as usize > self.m {
            return Err(ReductionError::BadIndex(format!("label {l} not in 1..={}", self.m)));
        }
        Ok(())
    }

    pub(super) fn check_phase(&self, i: u8) -> Result<(), ReductionError> {
        if i > 2 {
            return Err(ReductionError::BadIndex(format!("phase {i}")));
        }
        Ok(())
    }

    pub(super) fn labels(&self) -> impl Iterator<Item = Label> {
        1..=self.m as Label
    }

    // atoms

    pub(super) fn lo(&self, f: Family, i: u8, l: Label) -> Proposition {
        Proposition::labelled(f, self.k, i, l)
    }

    pub(super) fn up(&self, f: Family, i: u8) -> Proposition {
        Proposition::phased(f, self.k, i)
    }

    pub(super) fn kp(&self) -> Proposition {
        Proposition::k(self.k)
    }

    pub(super) fn atom_lo(&self, f: Family, i: u8, l: Label) -> StateFormula {
        StateFormula::atom(self.lo(f, i, l))
    }

    pub(super) fn atom_up(&self, f: Family, i: u8) -> StateFormula {
        StateFormula::atom(self.up(f, i))
    }

    pub(super) fn atom_k(&self) -> StateFormula {
        StateFormula::atom(self.kp())
    }

    /// `⟨L⟩_O`, cached per (O, L).
    pub(super) fn ex(&self, over: Over, l: &[Proposition]) -> Result<StateFormula, ReductionError> {
        let mut key: Vec<Proposition> = l.to_vec();
        key.sort();
        key.dedup();
        if let Some(f) = self.exclusive.borrow().get(&(over, key.clone())) {
            return Ok(f.clone());
        }
        let o = match over {
            Over::A => &self.universe.a,
            Over::B => &self.universe.b,
            Over::AMinusB => &self.universe.a_minus_b,
        };
        let set: BTreeSet<Proposition> = key.iter().cloned().collect();
        let f = mk_exclusive(&set, o)?;
        self.exclusive.borrow_mut().insert((over, key), f.clone());
        Ok(f)
    }

    pub(super) fn ex_a(&self, l: &[Proposition]) -> Result<StateFormula, ReductionError> {
        self.ex(Over::A, l)
    }

    pub(super) fn ex_b(&self, l: &[Proposition]) -> Result<StateFormula, ReductionError> {
        self.ex(Over::B, l)
    }

    // constants

    pub(super) fn z1(&self) -> Rat {
        self.consts.z.v1.clone()
    }

    pub(super) fn z2(&self) -> Rat {
        self.consts.z.v2.clone()
    }

    pub(super) fn delta(&self) -> Rat {
        self.consts.delta.clone()
    }

    pub(super) fn lambda(&self) -> Rat {
        self.consts.lambda.clone()
    }

    pub(super) fn rho(&self) -> Rat {
        self.consts.rho.clone()
    }

    /// Cached copy-level `Zero`.
    pub(super) fn cached_zero(
        &self,
        build: impl FnOnce() -> Result<StateFormula, ReductionError>,
    ) -> Result<StateFormula, ReductionError> {
        if let Some(z) = self.zero.borrow().as_ref() {
            return Ok(z.clone());
        }
        let z = build()?;
        *self.zero.borrow_mut() = Some(z.clone());
        Ok(z)
    }
}

// operator sugar shared by the builders

pub(super) fn g(cmp: Cmp, r: Rat, phi: &StateFormula) -> Result<StateFormula, ReductionError> {
    Ok(mk_g(cmp, r, phi)?)
}

pub(super) fn f(cmp: Cmp, r: Rat, phi: &StateFormula) -> Result<StateFormula, ReductionError> {
    Ok(mk_f(cmp, r, phi)?)
}

pub(super) fn g1(phi: &StateFormula) -> Result<StateFormula, ReductionError> {
    g(Cmp::Eq, Rat::one(), phi)
}

pub(super) fn f1(phi: &StateFormula) -> Result<StateFormula, ReductionError> {
    f(Cmp::Eq, Rat::one(), phi)
}

/// `P_{=1}[a U b]`.
pub(super) fn u1(a: &StateFormula, b: &StateFormula) -> Result<StateFormula, ReductionError> {
    Ok(StateFormula::prob(PathFormula::until(a, b), Cmp::Eq, Rat::one())?)
}

pub(super) fn all<I: IntoIterator<Item = Result<StateFormula, ReductionError>>>(
    items: I,
) -> Result<StateFormula, ReductionError> {
    let v = items.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(and_all(&v))
}

pub(super) fn any<I: IntoIterator<Item = Result<StateFormula, ReductionError>>>(
    items: I,
) -> Result<StateFormula, ReductionError> {
    let v = items.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(or_any(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_sizes() {
        for m in 1..5 {
            let u = Universe::new(m, 1);
            assert_eq!(u.b.len(), 19);
            assert_eq!(u.a.len(), 19 + 18 * m);
            assert_eq!(u.c.len(), 15 * m);
            assert_eq!(u.r.len(), 3 * m);
            assert!(u.a.iter().all(|p| p.copy() == Some(1)));
        }
    }

    #[test]
    fn phases_wrap() {
        assert_eq!([0, 1, 2].map(phase_succ), [1, 2, 0]);
    }
}
