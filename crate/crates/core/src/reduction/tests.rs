use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::*;
use crate::formula::{atoms, parse_formula, print_formula, subformulae, Cmp, Family, Proposition, StateKind};
use crate::machines::{parse_machine, CounterMachine, Update};
use crate::rational::{rat, Rat};

const M0: &str = "machine m0\ncounters 2\n1: if C1 = 0 goto {2} else goto {2} ; dec dec\n2: if C2 = 0 goto {1} else goto {1} ; dec dec\n";

fn m0() -> CounterMachine {
    parse_machine(M0).unwrap()
}

fn cfg(fragment: Fragment, variant: Variant) -> ReductionConfig {
    ReductionConfig::new(fragment, variant)
}

fn finite(fragment: Fragment) -> ReductionConfig {
    cfg(fragment, Variant::FiniteSat)
}

fn bounds(phi: &crate::formula::StateFormula) -> BTreeSet<Rat> {
    subformulae(phi)
        .iter()
        .filter_map(|s| match s.kind() {
            StateKind::Prob(_, _, r) => Some(r.clone()),
            _ => None,
        })
        .collect()
}

#[test]
fn at_is_three_exclusive_conjunctions() {
    let b = CopyBuilder::new(1, 1, &finite(Fragment::WithUntil)).unwrap();
    let at = b.build_at(1).unwrap();
    let ats = atoms(&at);
    assert_eq!(ats.len(), 37);
    assert!(ats.iter().all(|p| p.copy() == Some(1)));
    let ex = b.ex_a(&[Proposition::labelled(Family::R, 1, 2, 1)]).unwrap();
    assert!(subformulae(&at).iter().any(|s| s.id() == ex.id()));
    assert!(b.build_at(2).is_err());
}

#[test]
fn universe_size() {
    for m in 1..4 {
        assert_eq!(universe(m).len(), 38 + 36 * m);
    }
    let c = compile_parts(&m0(), &finite(Fragment::WithUntil)).unwrap();
    let used = atoms(&c.formula);
    assert_eq!(used.len(), 110);
    assert!(used.is_subset(&c.universe));
}

#[test]
fn fg_fragment_has_only_f_and_g() {
    let fg = compile(&m0(), &finite(Fragment::FGOnly)).unwrap();
    assert_eq!(stats(&fg).proper_untils, 0);
    let u = compile(&m0(), &finite(Fragment::WithUntil)).unwrap();
    assert!(stats(&u).proper_untils > 0);
}

#[test]
fn all_bounds_are_probabilities() {
    let phi = compile(&m0(), &cfg(Fragment::WithUntil, Variant::Recurrent([1].into()))).unwrap();
    assert!(bounds(&phi).iter().all(|r| *r >= Rat::zero() && *r <= Rat::one()));
}

#[test]
fn step_bounds_by_update() {
    let c = finite(Fragment::WithUntil);
    let b = CopyBuilder::new(2, 1, &c).unwrap();
    let k = &c.constants;
    let one_minus = |r: &Rat| Rat::one() - r;
    let dec = bounds(&b.build_step(1, 2, Update::Dec).unwrap());
    for r in [&k.z.v1, &k.z.v2, &k.delta] {
        assert!(dec.contains(&one_minus(r)), "G bound {r}");
    }
    assert!(dec.contains(&k.lambda) && dec.contains(&k.delta));
    let inc = bounds(&b.build_step(1, 2, Update::Inc).unwrap());
    for r in [&k.lambda, &k.rho, &k.delta] {
        assert!(inc.contains(&one_minus(r)), "G bound {r}");
    }
}

#[test]
fn zero_mode_changes_the_zero_branch() {
    let mut c = finite(Fragment::WithUntil);
    let z1 = c.constants.z.v1.clone();
    let rescaled = bounds(&CopyBuilder::new(2, 1, &c).unwrap().udec(0, 1, 2).unwrap());
    assert!(rescaled.contains(&(Rat::one() - &z1 * &z1)));
    c.zero_mode = ZeroMode::AsPrinted;
    let printed = bounds(&CopyBuilder::new(2, 1, &c).unwrap().udec(0, 1, 2).unwrap());
    assert!(!printed.contains(&(Rat::one() - &z1 * &z1)));
}

#[test]
fn zero_and_eligible_bounds() {
    let c = finite(Fragment::WithUntil);
    let b = CopyBuilder::new(2, 1, &c).unwrap();
    let zb = bounds(&b.build_zero().unwrap());
    assert_eq!(zb, [rat(11, 12), rat(14, 15)].into());
    let eb = bounds(&b.build_eligible().unwrap());
    assert!(eb.contains(&rat(14, 15)) && eb.contains(&rat(11, 12)));
    let init = b.build_init().unwrap();
    let left = |f: &crate::formula::StateFormula| match f.kind() {
        StateKind::And(l, _) => l.clone(),
        _ => panic!("expected a conjunction"),
    };
    let start = left(&left(&left(&init)));
    assert_eq!(start.id(), b.ex_a(&[Proposition::labelled(Family::R, 1, 0, 1)]).unwrap().id());
}

#[test]
fn sync_has_one_reachability_per_triple() {
    for m in 1..4 {
        let c = finite(Fragment::WithUntil);
        let (c1, c2) = (CopyBuilder::new(m, 1, &c).unwrap(), CopyBuilder::new(m, 2, &c).unwrap());
        let sync = build_sync(&c1, &c2).unwrap();
        let positive = subformulae(&sync)
            .iter()
            .filter(|s| matches!(s.kind(), StateKind::Prob(_, Cmp::Lt, r) if r.is_one()))
            .count();
        assert_eq!(positive, 3 * m * m);
    }
}

#[test]
fn variants() {
    let fin = compile_parts(&m0(), &finite(Fragment::WithUntil)).unwrap();
    assert!(fin.part("recurrent").is_none());
    assert_eq!(fin.parts.len(), 7);
    let rec = compile_parts(&m0(), &cfg(Fragment::WithUntil, Variant::Recurrent([1].into()))).unwrap();
    assert!(rec.part("recurrent").is_some());
    assert!(matches!(
        compile(&m0(), &cfg(Fragment::WithUntil, Variant::Recurrent(BTreeSet::new()))),
        Err(ReductionError::EmptyTau)
    ));
    assert!(matches!(
        compile(&m0(), &cfg(Fragment::WithUntil, Variant::Recurrent([3].into()))),
        Err(ReductionError::TauLabel(3))
    ));
    let mut three = m0();
    three.d = 3;
    for ins in &mut three.instructions {
        ins.updates.push(Update::Dec);
    }
    assert!(matches!(compile(&three, &finite(Fragment::WithUntil)), Err(ReductionError::CounterCount(3))));
}

#[test]
fn fragments_differ_only_in_struct_and_sim() {
    let u = compile_parts(&m0(), &finite(Fragment::WithUntil)).unwrap();
    let fg = compile_parts(&m0(), &finite(Fragment::FGOnly)).unwrap();
    for ((name, a), (_, b)) in u.parts.iter().zip(&fg.parts) {
        let same = a.id() == b.id();
        let expected = name.starts_with("init") || name == "sync";
        assert_eq!(same, expected, "{name}");
    }
}

#[test]
fn newsim_reads_the_tested_counter() {
    let c = finite(Fragment::WithUntil);
    let (c1, c2) = (CopyBuilder::new(2, 1, &c).unwrap(), CopyBuilder::new(2, 2, &c).unwrap());
    let m = m0();
    let zero2 = c2.build_zero().unwrap().id();
    let has_zero2 = |l| subformulae(&c1.build_newsim(l, &c2, &m).unwrap()).iter().any(|s| s.id() == zero2);
    assert!(has_zero2(2));
    assert!(!has_zero2(1));
}

#[test]
fn provenance_is_clean() {
    for fragment in [Fragment::WithUntil, Fragment::FGOnly] {
        assert!(audit_provenance(&m0(), &finite(fragment)).unwrap().is_empty());
    }
}

#[test]
fn marker_count() {
    for m in 1..4 {
        let b = CopyBuilder::new(m, 2, &finite(Fragment::WithUntil)).unwrap();
        assert_eq!(b.marker_sets().len(), 15 * m + 27);
    }
}

#[test]
fn printed_output_parses_back() {
    for fragment in [Fragment::WithUntil, Fragment::FGOnly] {
        let phi = compile(&m0(), &finite(fragment)).unwrap();
        let back = parse_formula(&print_formula(&phi)).unwrap();
        assert_eq!(back.id(), phi.id());
    }
}
