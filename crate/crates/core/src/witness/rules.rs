//! Successor rules of the witness closure.
//!
//! Every rule lists its successors with exact weights; the entries marked
//! [`Weight::Residual`] share whatever is left of the row. The printed
//! closed form of that residual is kept for comparison.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{WitnessError, WitnessState};
use crate::formula::{Family, Proposition};
use crate::geometry::{GadgetConstants, Geometry, Vec2};
use crate::machines::{Label, LassoComputation, Update};
use crate::rational::Rat;
use crate::reduction::phase_succ;

#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Exact(Rat),
    Residual,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub rule: &'static str,
    pub entries: Vec<(WitnessState, Weight)>,
    /// The residual as printed, when the rule gives one.
    pub printed_residual: Option<Rat>,
}

/// What a state's live atoms say about it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Both copies at `r_{i,ℓ}`.
    Main {
        i: u8,
        l: Label,
    },
    /// Copy `k` at `r^k_{i,ℓ}`, the other copy at `R_i`.
    Mixed {
        k: u8,
        i: u8,
        l: Label,
    },
    /// Only copy `k` is live, at `r^k_{i,ℓ}`.
    SingleR {
        k: u8,
        i: u8,
        l: Label,
    },
    /// Both copies at `R_i`.
    UpperPair {
        i: u8,
    },
    /// Only copy `k` is live, at `R^k_i`.
    SingleUpper {
        k: u8,
        i: u8,
    },
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Live {
    Lower(u8, Label),
    Upper(u8),
}

fn live(props: &BTreeSet<Proposition>, k: u8) -> Result<Option<Live>, ()> {
    let mut found = None;
    for p in props {
        let Some(g) = p.gadget() else { continue };
        if g.copy != k {
            continue;
        }
        let here = match g.family {
            Family::R => Live::Lower(g.phase, g.label),
            Family::CapR => Live::Upper(g.phase),
            _ => continue,
        };
        if found.replace(here).is_some() {
            return Err(());
        }
    }
    Ok(found)
}

pub fn shape(s: &WitnessState) -> Option<Shape> {
    let one = live(&s.props, 1).ok()?;
    let two = live(&s.props, 2).ok()?;
    Some(match (one, two) {
        (Some(Live::Lower(i, l)), Some(Live::Lower(i2, l2))) if (i, l) == (i2, l2) => Shape::Main { i, l },
        (Some(Live::Lower(i, l)), Some(Live::Upper(i2))) if i == i2 => Shape::Mixed { k: 1, i, l },
        (Some(Live::Upper(i2)), Some(Live::Lower(i, l))) if i == i2 => Shape::Mixed { k: 2, i, l },
        (Some(Live::Lower(i, l)), None) => Shape::SingleR { k: 1, i, l },
        (None, Some(Live::Lower(i, l))) => Shape::SingleR { k: 2, i, l },
        (Some(Live::Upper(i)), Some(Live::Upper(i2))) if i == i2 => Shape::UpperPair { i },
        (Some(Live::Upper(i)), None) => Shape::SingleUpper { k: 1, i },
        (None, Some(Live::Upper(i))) => Shape::SingleUpper { k: 2, i },
        (None, None) => Shape::Free,
        _ => return None,
    })
}

/// Everything but the live `r`/`R` atoms.
pub fn free_part(props: &BTreeSet<Proposition>) -> BTreeSet<Proposition> {
    props.iter().filter(|p| !matches!(p.family(), Some(Family::R | Family::CapR))).cloned().collect()
}

pub fn lo(f: Family, k: u8, i: u8, l: Label) -> Proposition {
    Proposition::labelled(f, k, i, l)
}

pub fn up(f: Family, k: u8, i: u8) -> Proposition {
    Proposition::phased(f, k, i)
}

/// The lasso as the closure sees it: indices `0..β-1`, with the step out of
/// the last one going back to index `α-1`.
pub struct Context<'a> {
    pub lasso: &'a LassoComputation,
    pub updates: Vec<[Update; 2]>,
    pub geometry: &'a Geometry,
    pub consts: &'a GadgetConstants,
    /// The ā-split weight for an increment of copy `k` at a main state.
    pub r: &'a dyn Fn(&WitnessState, u8) -> Rat,
}

impl Context<'_> {
    pub fn indices(&self) -> usize {
        self.lasso.beta() - 1
    }

    pub fn next_index(&self, j: usize) -> usize {
        if j + 1 < self.indices() {
            j + 1
        } else {
            self.lasso.alpha - 1
        }
    }

    /// The main state of index `j` at phase `i`.
    pub fn main_state(&self, j: usize, i: u8) -> WitnessState {
        let c = &self.lasso.configs[j];
        WitnessState {
            index: j,
            props: [lo(Family::R, 1, i, c.label), lo(Family::R, 2, i, c.label)].into(),
            n1: c.counters[0],
            n2: c.counters[1],
        }
    }

    fn cv(&self, n: u64) -> Result<Vec2, WitnessError> {
        Ok(self.geometry.inc_iter(n as usize)?)
    }
}

/// Builds successor tuples `[j, base ∪ add, n1, n2]`.
struct Out<'a> {
    j: usize,
    base: &'a BTreeSet<Proposition>,
    entries: Vec<(WitnessState, Weight)>,
}

impl Out<'_> {
    fn push(&mut self, add: &[Proposition], n1: u64, n2: u64, w: Rat) {
        self.entries.push((self.state(add, n1, n2), Weight::Exact(w)));
    }

    fn residual(&mut self, add: &[Proposition], n1: u64, n2: u64) {
        self.entries.push((self.state(add, n1, n2), Weight::Residual));
    }

    fn state(&self, add: &[Proposition], n1: u64, n2: u64) -> WitnessState {
        let mut props = self.base.clone();
        props.extend(add.iter().cloned());
        WitnessState { index: self.j, props, n1, n2 }
    }

    fn row(self, rule: &'static str, printed: Option<Rat>) -> Row {
        Row { rule, entries: self.entries, printed_residual: printed }
    }
}

fn dec1(c: u64) -> u64 {
    c.saturating_sub(1)
}

pub fn successors(ctx: &Context<'_>, s: &WitnessState) -> Result<Row, WitnessError> {
    let sh = shape(s).ok_or_else(|| WitnessError::NoRule(s.to_string()))?;
    let base = free_part(&s.props);
    let mut out = Out { j: s.index, base: &base, entries: Vec::new() };
    let delta = ctx.consts.delta.clone();
    let lambda = ctx.consts.lambda.clone();
    let z = ctx.consts.z.clone();
    let one = Rat::one();
    match sh {
        Shape::Main { i, l } => main_rule(ctx, s, i, l),
        Shape::Free => {
            out.push(&[], s.n1, s.n2, one);
            Ok(out.row("free", None))
        }
        Shape::Mixed { k, i, l } => {
            let o = 3 - k;
            let c = if k == 1 { s.n1 } else { s.n2 };
            let u = ctx.cv(c)?;
            let pair = |n: u64| if k == 1 { (n, 0) } else { (0, n) };
            let (rk, dk, d_other) = (up(Family::CapR, k, i), lo(Family::D, k, i, l), up(Family::CapD, o, i));
            let (a, b) = pair(0);
            out.push(&[lo(Family::A, k, i, l), rk.clone(), d_other.clone()], a, b, u.v1.clone());
            out.push(&[lo(Family::B, k, i, l), rk.clone(), d_other.clone()], a, b, u.v2.clone());
            out.push(&[lo(Family::C, k, i, l), rk.clone(), d_other.clone()], a, b, &delta - &u.v1);
            out.residual(&[dk.clone(), rk.clone(), d_other.clone()], a, b);
            let (a1, b1) = pair(dec1(c));
            out.push(&[lo(Family::R, k, phase_succ(i), l), d_other], a1, b1, u.v1.clone());
            out.push(&[dk.clone(), rk.clone(), up(Family::CapA, o, i)], a, b, z.v1.clone());
            out.push(&[dk.clone(), rk.clone(), up(Family::CapB, o, i)], a, b, z.v2.clone());
            out.push(&[dk.clone(), rk.clone(), up(Family::CapC, o, i)], a, b, &delta - &z.v1);
            out.push(&[dk.clone(), rk.clone(), up(Family::CapE, o, i)], a, b, lambda.clone());
            // the K tag is on copy 2 in both orientations, as written
            out.push(
                &[dk, up(Family::CapR, 1, phase_succ(i)), up(Family::CapR, 2, phase_succ(i)), Proposition::k(2)],
                0,
                0,
                z.v1.clone(),
            );
            let printed = &one - &u.v2 - &u.v1 - &z.v2 - &z.v1 - &delta * Rat::from_integer(2.into()) - &lambda;
            Ok(out.row(if k == 1 { "mixed-1" } else { "mixed-2" }, Some(printed)))
        }
        Shape::SingleR { k, i, l } => {
            let c = if k == 1 { s.n1 } else { s.n2 };
            let u = ctx.cv(c)?;
            let pair = |n: u64| if k == 1 { (n, 0) } else { (0, n) };
            let rk = up(Family::CapR, k, i);
            let (a, b) = pair(0);
            out.push(&[lo(Family::A, k, i, l), rk.clone()], a, b, u.v1.clone());
            out.push(&[lo(Family::B, k, i, l), rk.clone()], a, b, u.v2.clone());
            out.push(&[lo(Family::C, k, i, l), rk.clone()], a, b, &delta - &u.v1);
            out.residual(&[lo(Family::D, k, i, l), rk], a, b);
            let (a1, b1) = pair(dec1(c));
            out.push(&[lo(Family::R, k, phase_succ(i), l)], a1, b1, u.v1.clone());
            let printed = &one - &u.v2 - &u.v1 - &delta;
            Ok(out.row(if k == 1 { "single-r-1" } else { "single-r-2" }, Some(printed)))
        }
        Shape::UpperPair { i } => {
            let (u, v) = (ctx.cv(s.n1)?, ctx.cv(s.n2)?);
            let x = |f, k| up(f, k, i);
            out.push(&[x(Family::CapA, 1), x(Family::CapD, 2)], 0, 0, u.v1.clone());
            out.push(&[x(Family::CapB, 1), x(Family::CapD, 2)], 0, 0, u.v2.clone());
            out.push(&[x(Family::CapC, 1), x(Family::CapD, 2)], 0, 0, &delta - &u.v1);
            out.residual(&[x(Family::CapD, 1), x(Family::CapD, 2)], 0, 0);
            out.push(&[x(Family::CapE, 1), x(Family::CapD, 2)], 0, 0, lambda.clone());
            out.push(
                &[up(Family::CapR, 1, phase_succ(i)), Proposition::k(1), x(Family::CapD, 2)],
                dec1(s.n1),
                0,
                u.v1.clone(),
            );
            out.push(&[x(Family::CapD, 1), x(Family::CapA, 2)], 0, 0, v.v1.clone());
            out.push(&[x(Family::CapD, 1), x(Family::CapB, 2)], 0, 0, v.v2.clone());
            out.push(&[x(Family::CapD, 1), x(Family::CapC, 2)], 0, 0, &delta - &v.v1);
            out.push(&[x(Family::CapD, 1), x(Family::CapE, 2)], 0, 0, lambda.clone());
            out.push(
                &[x(Family::CapD, 1), up(Family::CapR, 2, phase_succ(i)), Proposition::k(2)],
                0,
                dec1(s.n2),
                v.v1.clone(),
            );
            let two = Rat::from_integer(2.into());
            let printed = &one - &u.v2 - &u.v1 - &v.v2 - &v.v1 - &two * &lambda - &two * &delta;
            Ok(out.row("upper-pair", Some(printed)))
        }
        Shape::SingleUpper { k, i } => {
            let c = if k == 1 { s.n1 } else { s.n2 };
            let u = ctx.cv(c)?;
            let pair = |n: u64| if k == 1 { (n, 0) } else { (0, n) };
            let (a, b) = pair(0);
            out.push(&[up(Family::CapA, k, i)], a, b, u.v1.clone());
            out.push(&[up(Family::CapB, k, i)], a, b, u.v2.clone());
            out.push(&[up(Family::CapC, k, i)], a, b, &delta - &u.v1);
            out.residual(&[up(Family::CapD, k, i)], a, b);
            let (a1, b1) = pair(dec1(c));
            out.push(&[up(Family::CapR, k, phase_succ(i)), Proposition::k(k)], a1, b1, u.v1.clone());
            let printed = &one - &u.v2 - &u.v1 - &delta;
            Ok(out.row(if k == 1 { "single-upper-1" } else { "single-upper-2" }, Some(printed)))
        }
    }
}

/// The four update-pair blocks for a main state `[j, r¹_{i,ℓ}, r²_{i,ℓ}, c1, c2]`.
fn main_rule(ctx: &Context<'_>, s: &WitnessState, i: u8, l: Label) -> Result<Row, WitnessError> {
    let j = s.index;
    let conf = &ctx.lasso.configs[j];
    if conf.label != l || conf.counters != [s.n1, s.n2] {
        return Err(WitnessError::BadLasso(format!("{s} does not match configuration {conf}")));
    }
    let nj = ctx.next_index(j);
    let si = phase_succ(i);
    let next_main = ctx.main_state(nj, si);
    let l2 = next_main_label(ctx, nj);
    let (c1, c2) = (s.n1, s.n2);
    let (u, v) = (ctx.cv(c1)?, ctx.cv(c2)?);
    let delta = ctx.consts.delta.clone();
    let two = Rat::from_integer(2.into());
    let one = Rat::one();
    let base = free_part(&s.props);
    let mut out = Out { j, base: &base, entries: Vec::new() };
    let m = |f, k| lo(f, k, i, l);
    let rr = [up(Family::CapR, 1, i), up(Family::CapR, 2, i)];
    let with_rr = |a: Proposition, b: Proposition| [a, b, rr[0].clone(), rr[1].clone()];
    let [up1, up2] = ctx.updates[l as usize - 1];
    let push_main = |out: &mut Out<'_>, w: Rat| out.entries.push((next_main.clone(), Weight::Exact(w)));
    match (up1, up2) {
        (Update::Dec, Update::Dec) => {
            let (n1, n2) = (0, 0);
            out.push(&with_rr(m(Family::A, 1), m(Family::D, 2)), n1, n2, u.v1.clone());
            out.push(&with_rr(m(Family::B, 1), m(Family::D, 2)), n1, n2, u.v2.clone());
            out.push(&with_rr(m(Family::C, 1), m(Family::D, 2)), n1, n2, &delta - &u.v1);
            out.push(&with_rr(m(Family::D, 1), m(Family::A, 2)), n1, n2, v.v1.clone());
            out.push(&with_rr(m(Family::D, 1), m(Family::B, 2)), n1, n2, v.v2.clone());
            out.push(&with_rr(m(Family::D, 1), m(Family::C, 2)), n1, n2, &delta - &v.v1);
            let (p, p2) = if u.v1 > v.v1 {
                out.push(
                    &[lo(Family::R, 1, si, l2), m(Family::D, 2), up(Family::CapR, 2, si)],
                    dec1(c1),
                    0,
                    &u.v1 - &v.v1,
                );
                (v.v1.clone(), &u.v1 - &v.v1)
            } else if u.v1 < v.v1 {
                out.push(
                    &[m(Family::D, 1), lo(Family::R, 2, si, l2), up(Family::CapR, 1, si)],
                    0,
                    dec1(c2),
                    &v.v1 - &u.v1,
                );
                (u.v1.clone(), &v.v1 - &u.v1)
            } else {
                (u.v1.clone(), Rat::zero())
            };
            push_main(&mut out, p.clone());
            out.residual(&with_rr(m(Family::D, 1), m(Family::D, 2)), 0, 0);
            let printed = &one - &u.v2 - &v.v2 - &two * &delta - &p - &p2;
            Ok(out.row("dec-dec", Some(printed)))
        }
        (Update::Dec, Update::Inc) | (Update::Inc, Update::Dec) => {
            // `d` is the decremented copy, `n` the incremented one
            let (d, n) = if up1 == Update::Dec { (1u8, 2u8) } else { (2, 1) };
            let (ud, un) = if d == 1 { (&u, &v) } else { (&v, &u) };
            let cn = if d == 1 { c2 } else { c1 };
            let r = (ctx.r)(s, n);
            let pair = |xd: u64, xn: u64| if d == 1 { (xd, xn) } else { (xn, xd) };
            let both = |x: Proposition, y: Proposition| if d == 1 { with_rr(x, y) } else { with_rr(y, x) };
            let (a, b) = pair(0, cn + 1);
            out.push(&both(m(Family::A, d), m(Family::D, n)), a, b, ud.v1.clone());
            out.push(&both(m(Family::B, d), m(Family::D, n)), a, b, ud.v2.clone());
            out.push(&both(m(Family::C, d), m(Family::D, n)), a, b, &delta - &ud.v1);
            let (a1, b1) = pair(0, dec1(cn));
            out.push(&both(m(Family::D, d), m(Family::A, n)), a1, b1, &un.v1 - &r);
            out.push(&both(m(Family::D, d), m(Family::Abar, n)), a1, b1, r);
            out.push(&both(m(Family::D, d), m(Family::B, n)), a, b, un.v2.clone());
            out.push(&both(m(Family::D, d), m(Family::C, n)), a, b, &delta - &un.v2);
            push_main(&mut out, ud.v1.clone());
            out.residual(&both(m(Family::D, d), m(Family::D, n)), a, b);
            let printed = &one - &ud.v2 - &un.v1 - &ud.v1 - &two * &delta;
            Ok(out.row(if d == 1 { "dec-inc" } else { "inc-dec" }, Some(printed)))
        }
        (Update::Inc, Update::Inc) => {
            let (r1, r2) = ((ctx.r)(s, 1), (ctx.r)(s, 2));
            let up_both = (c1 + 1, c2 + 1);
            out.push(&with_rr(m(Family::A, 1), m(Family::D, 2)), dec1(c1), c2 + 1, &u.v1 - &r1);
            out.push(&with_rr(m(Family::Abar, 1), m(Family::D, 2)), dec1(c1), c2 + 1, r1);
            out.push(&with_rr(m(Family::B, 1), m(Family::D, 2)), up_both.0, up_both.1, u.v2.clone());
            out.push(&with_rr(m(Family::C, 1), m(Family::D, 2)), up_both.0, up_both.1, &delta - &u.v2);
            out.push(&with_rr(m(Family::D, 1), m(Family::A, 2)), c1 + 1, dec1(c2), &v.v1 - &r2);
            out.push(&with_rr(m(Family::D, 1), m(Family::Abar, 2)), c1 + 1, dec1(c2), r2);
            out.push(&with_rr(m(Family::D, 1), m(Family::B, 2)), up_both.0, up_both.1, v.v2.clone());
            out.push(&with_rr(m(Family::D, 1), m(Family::C, 2)), up_both.0, up_both.1, &delta - &v.v2);
            out.entries.push((next_main.clone(), Weight::Residual));
            out.residual(&with_rr(m(Family::D, 1), m(Family::D, 2)), up_both.0, up_both.1);
            let printed_twice = &one - &v.v2 - &u.v1 - &v.v1 - &two * &delta;
            Ok(out.row("inc-inc", Some(printed_twice / two)))
        }
    }
}

fn next_main_label(ctx: &Context<'_>, nj: usize) -> Label {
    ctx.lasso.configs[nj].label
}

/// The printed ā-split weight `ϱ − ⟨c+1⟩₂ (1 − ⟨c⟩₁)`.
pub fn printed_r(g: &Geometry, c: u64) -> Result<Rat, WitnessError> {
    let now = g.inc_iter(c as usize)?;
    let next = g.inc_iter(c as usize + 1)?;
    Ok(&g.consts.rho - &next.v2 * (Rat::one() - &now.v1))
}
