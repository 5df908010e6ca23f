//! Counter representation: `Zero`, `Eligible`, `Decrement` and `Init`.

use super::builder::{all, f, g, g1, phase_succ, CopyBuilder};
use super::ReductionError;
use crate::formula::{or_any, Cmp, Family, StateFormula};

impl CopyBuilder {
    /// `(G(x ∨ a ∨ ā), G(x ∨ b))` bodies for an `r_{i,ℓ}` atom `x`.
    fn lower_bodies(&self, i: u8, l: u32) -> (StateFormula, StateFormula) {
        let r = self.atom_lo(Family::R, i, l);
        let first = or_any(&[r.clone(), self.atom_lo(Family::A, i, l), self.atom_lo(Family::Abar, i, l)]);
        let second = r.or(&self.atom_lo(Family::B, i, l));
        (first, second)
    }

    fn upper_bodies(&self, i: u8) -> (StateFormula, StateFormula) {
        let r = self.atom_up(Family::CapR, i);
        (r.or(&self.atom_up(Family::CapA, i)), r.or(&self.atom_up(Family::CapB, i)))
    }

    /// `Zero`: every `r`/`R` atom that holds has characteristic vector `z`.
    pub fn build_zero(&self) -> Result<StateFormula, ReductionError> {
        self.cached_zero(|| {
            let mut items = Vec::new();
            for l in self.labels() {
                for i in 0..3 {
                    let (p, q) = self.lower_bodies(i, l);
                    let both = g(Cmp::Eq, self.z1(), &p)?.and(&g(Cmp::Eq, self.z2(), &q)?);
                    items.push(Ok(self.atom_lo(Family::R, i, l).implies(&both)));
                }
            }
            for i in 0..3 {
                let (p, q) = self.upper_bodies(i);
                let both = g(Cmp::Eq, self.z1(), &p)?.and(&g(Cmp::Eq, self.z2(), &q)?);
                items.push(Ok(self.atom_up(Family::CapR, i).implies(&both)));
            }
            all(items)
        })
    }

    /// `Eligible`: first components stay within `[i_lo, z₁]` everywhere.
    pub fn build_eligible(&self) -> Result<StateFormula, ReductionError> {
        let lo = self.consts.beta_low().clone();
        let bounded = |atom: StateFormula, body: &StateFormula| -> Result<StateFormula, ReductionError> {
            let both = g(Cmp::Le, self.z1(), body)?.and(&g(Cmp::Ge, lo.clone(), body)?);
            g1(&atom.implies(&both))
        };
        let mut items = Vec::new();
        for l in self.labels() {
            for i in 0..3 {
                items.push(bounded(self.atom_lo(Family::R, i, l), &self.lower_bodies(i, l).0));
            }
        }
        for i in 0..3 {
            items.push(bounded(self.atom_up(Family::CapR, i), &self.upper_bodies(i).0));
        }
        all(items)
    }

    /// `Copy_i ∧ Succ_i` for an upper-case `R_i` state.
    fn copy_succ(&self, i: u8) -> Result<StateFormula, ReductionError> {
        let s = phase_succ(i);
        let ss = phase_succ(s);
        let up = |fam, p| self.atom_up(fam, p);
        let copy = g(Cmp::Eq, self.delta(), &or_any(&[up(Family::CapR, i), up(Family::CapA, i), up(Family::CapC, i)]))?
            .and(&f(Cmp::Eq, self.delta(), &up(Family::CapR, s).or(&up(Family::CapC, i)))?);
        let tail = [up(Family::CapC, s), up(Family::CapD, s), up(Family::CapR, ss)];
        let mut first = vec![up(Family::CapB, s)];
        first.extend(tail.iter().cloned());
        let mut second = vec![up(Family::CapB, i)];
        second.extend(tail.iter().cloned());
        let succ = f(Cmp::Eq, self.lambda(), &or_any(&first))?.and(&f(Cmp::Eq, self.lambda(), &or_any(&second))?);
        Ok(copy.and(&succ))
    }

    /// `Decrement = ⋀_i ((R_i ∧ ¬Zero) ⇒ Copy_i ∧ Succ_i)`.
    pub fn build_decrement(&self) -> Result<StateFormula, ReductionError> {
        let nz = self.build_zero()?.not();
        all((0..3).map(|i| Ok(self.atom_up(Family::CapR, i).and(&nz).implies(&self.copy_succ(i)?))))
    }

    /// `Init = ⟨r_{0,1}⟩_A ∧ Zero ∧ Eligible ∧ G_{=1} Decrement`.
    pub fn build_init(&self) -> Result<StateFormula, ReductionError> {
        let start = self.ex_a(&[self.lo(Family::R, 0, 1)])?;
        Ok(start.and(&self.build_zero()?).and(&self.build_eligible()?).and(&g1(&self.build_decrement()?)?))
    }
}
