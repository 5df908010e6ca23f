//! The structural conjuncts: successor shapes, marker persistence and the
//! λ-weighted `E` escape of upper-case states.

use std::collections::BTreeSet;

use num_traits::One;

use super::builder::{all, any, f, f1, g, g1, phase_succ, u1, CopyBuilder, Over, STEP_MARKERS};
use super::{Fragment, ReductionError};
use crate::formula::{Cmp, Family, Proposition, StateFormula};
use crate::machines::Label;
use crate::rational::Rat;

const UPPER_ABCDE: [Family; 5] = [Family::CapA, Family::CapB, Family::CapC, Family::CapD, Family::CapE];
const UPPER_ABCD: [Family; 4] = [Family::CapA, Family::CapB, Family::CapC, Family::CapD];

impl CopyBuilder {
    /// `at_ℓ = ⋁_i ⟨r_{i,ℓ}⟩_A`.
    pub fn build_at(&self, l: Label) -> Result<StateFormula, ReductionError> {
        self.check_label(l)?;
        any((0..3).map(|i| self.ex_a(&[self.lo(Family::R, i, l)])))
    }

    /// Successor shapes of an `r_{i,ℓ}` state heading for `ℓ'`.
    pub fn rsuc(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        self.check_phase(i)?;
        self.check_label(l)?;
        self.check_label(l2)?;
        let mut items = vec![self.ex_a(&[self.lo(Family::R, phase_succ(i), l2)])];
        for j in 0..3 {
            for x in STEP_MARKERS {
                items.push(self.ex_a(&[self.lo(x, i, l), self.up(Family::CapR, j)]));
            }
        }
        any(items)
    }

    /// Successor shapes of an `⟨R_i⟩_B` state.
    pub fn rsuc_upper(&self, i: u8) -> Result<StateFormula, ReductionError> {
        let mut items: Vec<_> = UPPER_ABCDE.iter().map(|x| self.ex_b(&[self.up(*x, i)])).collect();
        items.push(self.ex_b(&[self.up(Family::CapR, phase_succ(i)), self.kp()]));
        any(items)
    }

    /// Successor shapes of an `⟨R_i, K⟩_B` state.
    pub fn rksuc(&self, i: u8) -> Result<StateFormula, ReductionError> {
        let mut items: Vec<_> = UPPER_ABCD.iter().map(|x| self.ex_b(&[self.up(*x, i), self.kp()])).collect();
        items.push(self.ex_b(&[self.up(Family::CapR, phase_succ(i)), self.kp()]));
        any(items)
    }

    fn r_state(&self, i: u8, l: Label) -> Result<StateFormula, ReductionError> {
        self.ex_a(&[self.lo(Family::R, i, l)])
    }

    fn upper_state(&self, i: u8, with_k: bool) -> Result<StateFormula, ReductionError> {
        let mut l = vec![self.up(Family::CapR, i)];
        if with_k {
            l.push(self.kp());
        }
        self.ex_b(&l)
    }

    /// `Succ`, the `U_{=1}` form.
    pub fn succ(&self) -> Result<StateFormula, ReductionError> {
        let mut items = Vec::new();
        for l in self.labels() {
            for i in 0..3 {
                let here = self.r_state(i, l)?;
                let targets = any(self.labels().map(|l2| u1(&here, &self.rsuc(i, l, l2)?)))?;
                items.push(g1(&here.implies(&targets)));
            }
        }
        for i in 0..3 {
            let r = self.upper_state(i, false)?;
            let rk = self.upper_state(i, true)?;
            let body = r.implies(&u1(&r, &self.rsuc_upper(i)?)?).and(&rk.implies(&u1(&rk, &self.rksuc(i)?)?));
            items.push(g1(&body));
        }
        all(items)
    }

    /// `Succ-bar`, the F/G-only replacement for `Succ`.
    pub fn succ_bar(&self) -> Result<StateFormula, ReductionError> {
        let u = &self.universe;
        let mut items = Vec::new();
        for l in self.labels() {
            for i in 0..3 {
                let here = self.r_state(i, l)?;
                let targets = any(self.labels().map(|l2| f1(&self.rsuc(i, l, l2)?)))?;
                items.push(g1(&here.implies(&targets)));
                let elsewhere = any(self
                    .labels()
                    .flat_map(|l2| (0..3).map(move |z| (z, l2)))
                    .filter(|&(z, l2)| (z, l2) != (i, l))
                    .map(|(z, l2)| self.r_state(z, l2)))?;
                items.push(g1(&here.implies(&f(Cmp::Lt, Rat::one(), &elsewhere)?)));
            }
        }
        items.push(g1(&any(u.a_minus_b.iter().map(|x| self.ex(Over::AMinusB, std::slice::from_ref(x))))?));
        let tagged = all(u.c.iter().map(|x| {
            let shapes = any((0..3).map(|j| self.ex_a(&[x.clone(), self.up(Family::CapR, j)])))?;
            Ok(StateFormula::atom(x.clone()).implies(&shapes))
        }))?;
        items.push(g1(&tagged));
        let exact =
            all(u.r.iter().map(|x| Ok(StateFormula::atom(x.clone()).implies(&self.ex_a(std::slice::from_ref(x))?))))?;
        items.push(g1(&exact));
        for i in 0..3 {
            let r = self.upper_state(i, false)?;
            let rk = self.upper_state(i, true)?;
            items.push(g1(&r.implies(&f1(&self.rsuc_upper(i)?)?)));
            items.push(g1(&rk.implies(&f1(&self.rksuc(i)?)?)));
            let other_k = any((0..3).filter(|z| *z != i).map(|z| self.upper_state(z, true)))?;
            items.push(g1(&r.or(&rk).implies(&f(Cmp::Lt, Rat::one(), &other_k)?)));
        }
        let some_upper = any(u.b.iter().map(|x| Ok(StateFormula::atom(x.clone()))))?;
        let shapes = any((0..3).map(|i| Ok(self.rsuc_upper(i)?.or(&self.rksuc(i)?))))?;
        items.push(g1(&some_upper.implies(&g1(&shapes)?)));
        items.push(g1(&self.atom_k().implies(&g1(&self.atom_k())?)));
        all(items)
    }

    /// Marker sets `(L, O)`: lower-case singletons over `A ∖ B`, then the
    /// upper-case sets over `B`.
    pub fn marker_sets(&self) -> Vec<(BTreeSet<Proposition>, Over)> {
        let mut out = Vec::new();
        for x in &self.universe.c {
            out.push(([x.clone()].into(), Over::AMinusB));
        }
        for i in 0..3 {
            for fam in UPPER_ABCD {
                out.push(([self.up(fam, i)].into(), Over::B));
                out.push(([self.up(fam, i), self.kp()].into(), Over::B));
            }
            out.push(([self.up(Family::CapE, i)].into(), Over::B));
        }
        out
    }

    /// `Mark`: every marker set persists once it holds.
    pub fn mark(&self) -> Result<StateFormula, ReductionError> {
        let body = all(self.marker_sets().into_iter().map(|(l, over)| {
            let l: Vec<Proposition> = l.into_iter().collect();
            let ex = self.ex(over, &l)?;
            Ok(ex.implies(&g1(&ex)?))
        }))?;
        g1(&body)
    }

    /// `Lambda = G_{=1} ⋀_i (⟨R_i⟩_B ⇒ G_{=λ}(R_i ∨ E_i))`.
    pub fn lambda_formula(&self) -> Result<StateFormula, ReductionError> {
        let body = all((0..3).map(|i| {
            let keep = self.atom_up(Family::CapR, i).or(&self.atom_up(Family::CapE, i));
            Ok(self.upper_state(i, false)?.implies(&g(Cmp::Eq, self.lambda(), &keep)?))
        }))?;
        g1(&body)
    }

    /// `Struct` (or `Struct-bar` in the F/G fragment) `= Succ ∧ Mark ∧ Lambda`.
    pub fn build_struct(&self) -> Result<StateFormula, ReductionError> {
        self.build_struct_for(self.fragment)
    }

    pub fn build_struct_for(&self, fragment: Fragment) -> Result<StateFormula, ReductionError> {
        let succ = match fragment {
            Fragment::WithUntil => self.succ()?,
            Fragment::FGOnly => self.succ_bar()?,
        };
        Ok(succ.and(&self.mark()?).and(&self.lambda_formula()?))
    }
}
