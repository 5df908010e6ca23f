//! One simulation step of a copy: target selection plus the counter update.

use super::builder::{f, f1, g, phase_succ, u1, CopyBuilder};
use super::{Fragment, ReductionError, ZeroMode};
use crate::formula::{and_all, or_any, Cmp, Family, StateFormula};
use crate::machines::{Label, Update};
use crate::rational::Rat;

impl CopyBuilder {
    /// Moving on from `r_{i,ℓ}` towards `ℓ'`: `U_{=1}` in the Until fragment,
    /// `F_{=1}` in the F/G fragment where Struct-bar keeps the state in place.
    pub fn propagation(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        let target = self.rsuc(i, l, l2)?;
        match self.fragment {
            Fragment::WithUntil => u1(&self.ex_a(&[self.lo(Family::R, i, l)])?, &target),
            Fragment::FGOnly => f1(&target),
        }
    }

    /// `⋁_{ℓ''} r_{S²(i),ℓ''}`.
    fn any_r(&self, i: u8) -> StateFormula {
        or_any(&self.labels().map(|l| self.atom_lo(Family::R, i, l)).collect::<Vec<_>>())
    }

    fn ucopy(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        let s = phase_succ(i);
        let lo = |fam, p, x| self.atom_lo(fam, p, x);
        let stay = or_any(&[lo(Family::R, i, l), lo(Family::A, i, l), lo(Family::Abar, i, l), lo(Family::C, i, l)]);
        let leave = lo(Family::R, s, l2).or(&lo(Family::C, i, l));
        Ok(g(Cmp::Eq, self.delta(), &stay)?.and(&f(Cmp::Eq, self.delta(), &leave)?))
    }

    fn usucc(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        let s = phase_succ(i);
        let lo = |fam, p, x| self.atom_lo(fam, p, x);
        let tail = [lo(Family::C, s, l2), lo(Family::D, s, l2), self.any_r(phase_succ(s))];
        let mut first = vec![lo(Family::B, s, l2)];
        first.extend(tail.iter().cloned());
        let mut second = vec![lo(Family::B, i, l)];
        second.extend(tail.iter().cloned());
        Ok(f(Cmp::Eq, self.lambda(), &or_any(&first))?.and(&f(Cmp::Eq, self.lambda(), &or_any(&second))?))
    }

    /// The zero branch of a decrement: the counter stays at `z`.
    fn zero_branch(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        let s = phase_succ(i);
        let lo = |fam, p, x| self.atom_lo(fam, p, x);
        let first = or_any(&[lo(Family::R, i, l), lo(Family::R, s, l2), lo(Family::A, s, l2)]);
        let second = or_any(&[lo(Family::R, i, l), lo(Family::R, s, l2), lo(Family::B, s, l2)]);
        match self.zero_mode {
            ZeroMode::AsPrinted => Ok(g(Cmp::Eq, self.z1(), &first)?.and(&g(Cmp::Eq, self.z2(), &second)?)),
            ZeroMode::Rescaled => {
                let z1 = self.z1();
                let scaled = g(Cmp::Eq, &z1 * &z1, &first)?.and(&g(Cmp::Eq, &z1 * self.z2(), &second)?);
                Ok(self.ucopy(i, l, l2)?.and(&scaled))
            }
        }
    }

    /// `UDec_{i,ℓ,ℓ'}`.
    pub fn udec(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        let zero = self.build_zero()?;
        let nonzero = self.ucopy(i, l, l2)?.and(&self.usucc(i, l, l2)?);
        Ok(zero.implies(&self.zero_branch(i, l, l2)?).and(&zero.not().implies(&nonzero)))
    }

    /// The six `(bound, body)` pairs of `UInc_{i,ℓ,ℓ'}`, each read as `G_{=bound} body`.
    pub fn uinc_parts(&self, i: u8, l: Label, l2: Label) -> Result<[(Rat, StateFormula); 6], ReductionError> {
        self.check_phase(i)?;
        self.check_label(l)?;
        self.check_label(l2)?;
        let s = phase_succ(i);
        let lo = |fam, p, x| self.atom_lo(fam, p, x);
        let upper = |fam| or_any(&(0..3).map(|j| self.atom_up(fam, j)).collect::<Vec<_>>());
        let k = self.atom_k();
        let (r, a, abar, b, c) = (
            lo(Family::R, i, l),
            lo(Family::A, i, l),
            lo(Family::Abar, i, l),
            lo(Family::B, i, l),
            lo(Family::C, i, l),
        );
        let any_upper_r = upper(Family::CapR);
        let k_abar = k.implies(&abar);

        let one = or_any(&[
            r.clone(),
            any_upper_r.clone(),
            lo(Family::R, s, l2),
            lo(Family::A, s, l2),
            lo(Family::Abar, s, l2),
            upper(Family::CapA),
        ]);
        let one = and_all(&[one, k.not(), a.not(), abar.not()]);

        let two = or_any(&[
            r.clone(),
            any_upper_r.clone(),
            lo(Family::R, s, l2),
            abar.clone(),
            upper(Family::CapB),
            lo(Family::B, s, l2),
        ]);
        let two = and_all(&[two, a.not(), k_abar.clone()]);

        let e_b = or_any(&(0..3).map(|j| self.atom_up(Family::CapE, j).and(&b)).collect::<Vec<_>>());
        let three = or_any(&[r.clone(), any_upper_r.clone(), abar.clone(), e_b]).and(&k_abar);

        let a_needs_k = and_all(&(0..3).map(|j| self.atom_up(Family::CapA, j).implies(&k)).collect::<Vec<_>>());
        let four = or_any(&[r.clone(), a.clone(), abar.clone()]).and(&a_needs_k);

        let r_and =
            |x: &StateFormula| or_any(&(0..3).map(|j| self.atom_up(Family::CapR, j).and(x)).collect::<Vec<_>>());
        let five = or_any(&[r.clone(), c.clone(), r_and(&a), r_and(&abar), upper(Family::CapB)]).and(&k.implies(&c));

        let six = or_any(&[r, b, c]);

        Ok([
            (self.lambda(), one),
            (self.rho(), two),
            (self.rho(), three),
            (self.lambda(), four),
            (self.delta(), five),
            (self.delta(), six),
        ])
    }

    /// `UInc_{i,ℓ,ℓ'}`: the last three conjuncts only bind when the counter is nonzero.
    pub fn uinc(&self, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        let nz = self.build_zero()?.not();
        let parts = self
            .uinc_parts(i, l, l2)?
            .into_iter()
            .enumerate()
            .map(|(n, (r, body))| {
                let gf = g(Cmp::Eq, r, &body)?;
                Ok(if n >= 3 { nz.implies(&gf) } else { gf })
            })
            .collect::<Result<Vec<_>, ReductionError>>()?;
        Ok(and_all(&parts))
    }

    pub fn update(&self, u: Update, i: u8, l: Label, l2: Label) -> Result<StateFormula, ReductionError> {
        match u {
            Update::Dec => self.udec(i, l, l2),
            Update::Inc => self.uinc(i, l, l2),
        }
    }

    /// `Step_{ℓ,ℓ'} = ⋀_i (⟨r_{i,ℓ}⟩_A ⇒ propagation ∧ Update)`.
    pub fn build_step(&self, l: Label, l2: Label, u: Update) -> Result<StateFormula, ReductionError> {
        self.check_label(l)?;
        self.check_label(l2)?;
        let parts = (0..3)
            .map(|i| {
                let body = self.propagation(i, l, l2)?.and(&self.update(u, i, l, l2)?);
                Ok(self.ex_a(&[self.lo(Family::R, i, l)])?.implies(&body))
            })
            .collect::<Result<Vec<_>, ReductionError>>()?;
        Ok(and_all(&parts))
    }
}
