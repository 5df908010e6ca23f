//! Breadth-first closure, residual completion and the ā-split solve.

use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};

use super::rules::{printed_r, shape, successors, Context, Row, Shape, Weight};
use super::{BadWeight, Diagnostic, RMode, WitnessConfig, WitnessError, WitnessReport, WitnessState};
use crate::checker::Checker;
use crate::formula::{PathFormula, StateFormula};
use crate::geometry::Geometry;
use crate::machines::{successors as machine_successors, Configuration, CounterMachine, LassoComputation, Update};
use crate::markov::MarkovChain;
use crate::rational::{fmt_fraction, Rat};
use crate::reduction::{CopyBuilder, Fragment, ReductionConfig, Variant};

fn check_lasso(machine: &CounterMachine, lasso: &LassoComputation) -> Result<(), WitnessError> {
    let bad = |m: String| Err(WitnessError::BadLasso(m));
    if machine.d != 2 {
        return Err(crate::machines::MachineError::CounterCount(machine.d).into());
    }
    machine.validate()?;
    if !machine.is_deterministic() {
        return Err(crate::machines::MachineError::NotDeterministic.into());
    }
    let (a, b) = (lasso.alpha, lasso.beta());
    if a == 0 || a >= b {
        return bad(format!("need 1 <= alpha < beta, got alpha = {a}, beta = {b}"));
    }
    if lasso.configs[0] != Configuration::initial(2) {
        return bad(format!("starts at {} instead of the initial configuration", lasso.configs[0]));
    }
    for t in 0..b - 1 {
        let next = machine_successors(machine, &lasso.configs[t])?;
        if next.first() != Some(&lasso.configs[t + 1]) {
            return bad(format!("{} is not the successor of {}", lasso.configs[t + 1], lasso.configs[t]));
        }
    }
    if lasso.configs[a - 1] != lasso.configs[b - 1] {
        return bad("the last configuration does not repeat an earlier one".into());
    }
    Ok(())
}

struct Closure {
    states: Vec<WitnessState>,
    rows: Vec<Row>,
    index: HashMap<WitnessState, usize>,
}

fn closure(ctx: &Context<'_>, cap: usize) -> Result<Closure, WitnessError> {
    let init = ctx.main_state(0, 0);
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut rows = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let row = successors(ctx, &states[id])?;
        for (t, _) in &row.entries {
            if !index.contains_key(t) {
                if states.len() >= cap {
                    return Err(WitnessError::StateCap(cap));
                }
                index.insert(t.clone(), states.len());
                queue.push_back(states.len());
                states.push(t.clone());
            }
        }
        rows.push(row);
    }
    // BFS pops ids in order, so rows[id] belongs to states[id]
    Ok(Closure { states, rows, index })
}

struct Finished {
    chain: MarkovChain,
    bad: Vec<BadWeight>,
    diagnostics: Vec<Diagnostic>,
}

/// Fills in residuals, merges parallel edges and checks every weight.
fn finish(c: &Closure) -> Finished {
    let mut chain = MarkovChain::new("witness");
    for (id, s) in c.states.iter().enumerate() {
        chain.add_state(format!("w{id}"), s.props.clone());
    }
    chain.init = Some(0);
    let mut bad = Vec::new();
    let mut diagnostics = Vec::new();
    for (id, row) in c.rows.iter().enumerate() {
        let exact: Rat =
            row.entries.iter().filter_map(|(_, w)| if let Weight::Exact(r) = w { Some(r) } else { None }).sum();
        let shares = row.entries.iter().filter(|(_, w)| *w == Weight::Residual).count();
        let residual = if shares > 0 { (Rat::one() - &exact) / Rat::from_integer(shares.into()) } else { Rat::zero() };
        if let (Some(p), true) = (&row.printed_residual, shares > 0) {
            if *p != residual {
                diagnostics.push(Diagnostic {
                    rule: row.rule.into(),
                    state: c.states[id].to_string(),
                    detail: format!(
                        "residual {} used; printed form gives {}",
                        fmt_fraction(&residual),
                        fmt_fraction(p)
                    ),
                });
            }
        }
        let mut merged: Vec<(usize, Rat)> = Vec::new();
        for (t, w) in &row.entries {
            let w = match w {
                Weight::Exact(r) => r.clone(),
                Weight::Residual => residual.clone(),
            };
            if w <= Rat::zero() || w > Rat::one() {
                bad.push(BadWeight {
                    rule: row.rule.into(),
                    from: c.states[id].to_string(),
                    to: t.to_string(),
                    weight: fmt_fraction(&w),
                });
            }
            let to = c.index[t];
            match merged.iter_mut().find(|(x, _)| *x == to) {
                Some((_, acc)) => *acc += w,
                None => merged.push((to, w)),
            }
        }
        chain.rows[id] = merged;
    }
    Finished { chain, bad, diagnostics }
}

/// Main states whose instruction increments copy `k`, with `(i, ℓ, ℓ')`.
fn increment_sites(ctx: &Context<'_>, c: &Closure) -> Vec<(usize, u8, u8, u32, u32)> {
    let mut out = Vec::new();
    for (id, s) in c.states.iter().enumerate() {
        if let Some(Shape::Main { i, l }) = shape(s) {
            let l2 = ctx.lasso.configs[ctx.next_index(s.index)].label;
            for k in 1..=2u8 {
                if ctx.updates[l as usize - 1][k as usize - 1] == Update::Inc {
                    out.push((id, k, i, l, l2));
                }
            }
        }
    }
    out
}

/// `P_s(G body)` on `chain`.
fn g_prob(checker: &mut Checker<'_>, body: &StateFormula, s: usize) -> Result<Rat, WitnessError> {
    let v = checker.path_probs(&PathFormula::until(&StateFormula::tt(), &body.not()))?;
    Ok(Rat::one() - &v[s])
}

pub fn build_witness(
    machine: &CounterMachine,
    lasso: &LassoComputation,
    cfg: &WitnessConfig,
) -> Result<WitnessReport, WitnessError> {
    check_lasso(machine, lasso)?;
    cfg.constants.validate()?;
    let geometry = Geometry::new(cfg.constants.clone());
    let updates: Vec<[Update; 2]> = machine.instructions.iter().map(|i| [i.updates[0], i.updates[1]]).collect();
    let max_c = lasso.configs.iter().flat_map(|c| c.counters.iter().copied()).max().unwrap_or(0);
    let vecs = (0..=max_c + 1).map(|n| geometry.inc_iter(n as usize)).collect::<Result<Vec<_>, _>>()?;
    let printed = (0..=max_c).map(|n| printed_r(&geometry, n)).collect::<Result<Vec<_>, _>>()?;
    let counter = |s: &WitnessState, k: u8| if k == 1 { s.n1 } else { s.n2 } as usize;

    let as_printed = |s: &WitnessState, k: u8| printed[counter(s, k)].clone();
    let base = |r: &dyn Fn(&WitnessState, u8) -> Rat| -> Result<(Closure, Finished), WitnessError> {
        let ctx = Context { lasso, updates: updates.clone(), geometry: &geometry, consts: &cfg.constants, r };
        let c = closure(&ctx, cfg.state_cap)?;
        let f = finish(&c);
        Ok((c, f))
    };

    let mut extra = Vec::new();
    let (c, fin) = match cfg.r_mode {
        RMode::AsPrinted => base(&as_printed)?,
        RMode::Solved => {
            let third = |s: &WitnessState, k: u8| &vecs[counter(s, k)].v1 / Rat::from_integer(3.into());
            let (c_a, f_a) = base(&third)?;
            let ctx =
                Context { lasso, updates: updates.clone(), geometry: &geometry, consts: &cfg.constants, r: &third };
            let sites = increment_sites(&ctx, &c_a);
            if sites.is_empty() {
                (c_a, f_a)
            } else {
                let two_thirds = |s: &WitnessState, k: u8| &vecs[counter(s, k)].v1 * Rat::new(2.into(), 3.into());
                let (_, f_b) = base(&two_thirds)?;
                let solved = solve_r(machine, cfg, &c_a, &f_a, &f_b, &sites, &third, &two_thirds, &mut extra)?;
                let pick = |s: &WitnessState, k: u8| match solved.get(&(s.clone(), k)) {
                    Some(r) => r.clone(),
                    None => as_printed(s, k),
                };
                let (c, f) = base(&pick)?;
                verify_r(machine, cfg, &c, &f, &sites, &pick, &as_printed, &mut extra)?;
                (c, f)
            }
        }
    };
    if !fin.bad.is_empty() {
        return Err(WitnessError::NonPositive(fin.bad));
    }
    let mut diagnostics = fin.diagnostics;
    diagnostics.extend(extra);
    Ok(WitnessReport { chain: fin.chain, states: c.states, init: 0, constants: cfg.constants.clone(), diagnostics })
}

fn builder(machine: &CounterMachine, cfg: &WitnessConfig, k: u8) -> Result<CopyBuilder, WitnessError> {
    let rc = ReductionConfig {
        constants: cfg.constants.clone(),
        fragment: Fragment::WithUntil,
        variant: Variant::FiniteSat,
        zero_mode: Default::default(),
    };
    Ok(CopyBuilder::new(machine.m(), k, &rc)?)
}

/// The second increment constraint is affine in `r` at its own state, so
/// two trial chains determine the value that makes it exact.
#[allow(clippy::too_many_arguments)]
fn solve_r(
    machine: &CounterMachine,
    cfg: &WitnessConfig,
    c: &Closure,
    f_a: &Finished,
    f_b: &Finished,
    sites: &[(usize, u8, u8, u32, u32)],
    r_a: &dyn Fn(&WitnessState, u8) -> Rat,
    r_b: &dyn Fn(&WitnessState, u8) -> Rat,
    diags: &mut Vec<Diagnostic>,
) -> Result<HashMap<(WitnessState, u8), Rat>, WitnessError> {
    let builders = [builder(machine, cfg, 1)?, builder(machine, cfg, 2)?];
    let mut ch_a = Checker::new(&f_a.chain);
    let mut ch_b = Checker::new(&f_b.chain);
    let mut out = HashMap::new();
    for &(id, k, i, l, l2) in sites {
        let s = &c.states[id];
        let body = builders[k as usize - 1].uinc_parts(i, l, l2)?[1].1.clone();
        let (pa, pb) = (g_prob(&mut ch_a, &body, id)?, g_prob(&mut ch_b, &body, id)?);
        let (ra, rb) = (r_a(s, k), r_b(s, k));
        if pa == pb {
            diags.push(Diagnostic {
                rule: "r-solve".into(),
                state: s.to_string(),
                detail: format!("copy {k}: constraint does not depend on r; printed value kept"),
            });
            continue;
        }
        let r = &ra + (&cfg.constants.rho - &pa) * (&rb - &ra) / (&pb - &pa);
        out.insert((s.clone(), k), r);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn verify_r(
    machine: &CounterMachine,
    cfg: &WitnessConfig,
    c: &Closure,
    f: &Finished,
    sites: &[(usize, u8, u8, u32, u32)],
    used: &dyn Fn(&WitnessState, u8) -> Rat,
    printed: &dyn Fn(&WitnessState, u8) -> Rat,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), WitnessError> {
    let builders = [builder(machine, cfg, 1)?, builder(machine, cfg, 2)?];
    let mut ch = Checker::new(&f.chain);
    for &(id, k, i, l, l2) in sites {
        let s = &c.states[id];
        let (r, p) = (used(s, k), printed(s, k));
        let body = builders[k as usize - 1].uinc_parts(i, l, l2)?[1].1.clone();
        let got = g_prob(&mut ch, &body, id)?;
        let mut detail = format!("copy {k}: r = {} (printed {})", fmt_fraction(&r), fmt_fraction(&p));
        if got != cfg.constants.rho {
            detail.push_str(&format!("; constraint gives {} after solving", fmt_fraction(&got)));
        }
        diags.push(Diagnostic { rule: "r-solve".into(), state: s.to_string(), detail });
    }
    Ok(())
}
