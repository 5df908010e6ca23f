//! Property tests for the invariants each module promises.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;
use proptest::test_runner::Config;

use pctlwb::checker::{brute_force_bounded, prob_bounded_until, prob_until, until_residual_ok, Checker};
use pctlwb::formula::{
    mk_exclusive, parse_formula, print_formula, subformulae, Cmp, PathFormula, PathKind, Proposition, StateFormula,
    StateKind,
};
use pctlwb::geometry::{cross, dec, inc, slope, GadgetConstants, Geometry, Vec2};
use pctlwb::machines::{
    minsky_to_counter, run_deterministic, successors, Configuration, CounterMachine, Instruction, Label, MinskyInstr,
    MinskyMachine, Update,
};
use pctlwb::markov::{parse_chain, print_chain, validate, MarkovChain};
use pctlwb::rational::{rat, Rat};
use pctlwb::reduction::{compile, stats, universe, Fragment, ReductionConfig, Variant};
use pctlwb::witness::{
    build_witness, characteristic_vectors, counter_vec, lint_witness, relevant_atom, WitnessConfig, WitnessError,
};

const ATOMS: [&str; 3] = ["p", "q", "s"];

fn atom(i: usize) -> StateFormula {
    StateFormula::atom(Proposition::user(ATOMS[i % 3]))
}

fn cmp_strategy() -> impl Strategy<Value = Cmp> {
    prop_oneof![Just(Cmp::Le), Just(Cmp::Lt), Just(Cmp::Ge), Just(Cmp::Gt), Just(Cmp::Eq), Just(Cmp::Ne)]
}

fn bound_strategy() -> impl Strategy<Value = Rat> {
    (1i64..=12).prop_flat_map(|d| (0..=d).prop_map(move |n| rat(n, d)))
}

fn formula_strategy() -> impl Strategy<Value = StateFormula> {
    let leaf = prop_oneof![Just(StateFormula::tt()), (0usize..3).prop_map(atom)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| a.not()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(&b)),
            (inner.clone(), cmp_strategy(), bound_strategy()).prop_map(|(a, c, r)| StateFormula::prob(
                PathFormula::next(&a),
                c,
                r
            )
            .unwrap()),
            (inner.clone(), inner.clone(), cmp_strategy(), bound_strategy())
                .prop_map(|(a, b, c, r)| StateFormula::prob(PathFormula::until(&a, &b), c, r).unwrap()),
            (inner.clone(), inner, 0u64..5, cmp_strategy(), bound_strategy()).prop_map(|(a, b, k, c, r)| {
                StateFormula::prob(PathFormula::bounded_until(&a, &b, k), c, r).unwrap()
            }),
        ]
    })
}

/// Row-stochastic chains: each row has a nonempty random support with weights
/// `w / Σw`, labels are random subsets of three atoms.
fn chain_strategy(max_states: usize) -> impl Strategy<Value = MarkovChain> {
    (1..=max_states).prop_flat_map(|n| {
        let row = proptest::collection::vec((0..n, 1i64..=9), 1..=n);
        let labels = proptest::collection::vec(proptest::collection::btree_set(0usize..3, 0..=3), n);
        (proptest::collection::vec(row, n), labels).prop_map(move |(rows, labels)| {
            let mut chain = MarkovChain::new("prop");
            for (i, ls) in labels.iter().enumerate() {
                chain.add_state(format!("s{i}"), ls.iter().map(|a| Proposition::user(ATOMS[*a])).collect());
            }
            for (i, row) in rows.into_iter().enumerate() {
                let mut merged: std::collections::BTreeMap<usize, i64> = Default::default();
                for (t, w) in row {
                    *merged.entry(t).or_default() += w;
                }
                let total: i64 = merged.values().sum();
                chain.rows[i] = merged.into_iter().map(|(t, w)| (t, rat(w, total))).collect();
            }
            chain.init = Some(0);
            chain
        })
    })
}

fn set_strategy(n: usize) -> impl Strategy<Value = FixedBitSet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|bits| {
        let mut s = FixedBitSet::with_capacity(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            s.set(i, b);
        }
        s
    })
}

fn chain_with_sets(max_states: usize) -> impl Strategy<Value = (MarkovChain, FixedBitSet, FixedBitSet)> {
    chain_strategy(max_states).prop_flat_map(|c| {
        let n = c.len();
        (Just(c), set_strategy(n), set_strategy(n))
    })
}

proptest! {
    #![proptest_config(Config { cases: 128, ..Config::default() })]

    #[test]
    fn printing_then_parsing_gives_the_same_node(phi in formula_strategy()) {
        let back = parse_formula(&print_formula(&phi)).unwrap();
        prop_assert_eq!(back.id(), phi.id());
    }

    #[test]
    fn subformulae_list_children_first(phi in formula_strategy()) {
        let subs = subformulae(&phi);
        let pos = |f: &StateFormula| subs.iter().position(|g| g.id() == f.id()).unwrap();
        for (i, f) in subs.iter().enumerate() {
            for c in f.children() {
                prop_assert!(pos(&c) < i);
            }
        }
        prop_assert_eq!(subs.last().map(|f| f.id()), Some(phi.id()));
    }

    #[test]
    fn exclusive_sets_have_one_literal_per_universe_atom(
        universe in proptest::collection::btree_set("[a-z]{1,3}", 1..8),
        pick in proptest::collection::vec(any::<bool>(), 8),
    ) {
        let o: BTreeSet<Proposition> = universe.iter().map(Proposition::user).collect();
        let l: BTreeSet<Proposition> = o.iter().zip(&pick).filter(|(_, b)| **b).map(|(p, _)| p.clone()).collect();
        let phi = mk_exclusive(&l, &o).unwrap();
        let literals = subformulae(&phi)
            .into_iter()
            .filter(|f| match f.kind() {
                StateKind::Atom(_) => true,
                StateKind::Not(a) => matches!(a.kind(), StateKind::Atom(_)),
                _ => false,
            })
            .filter(|f| !matches!(f.kind(), StateKind::Atom(p) if !l.contains(p)))
            .count();
        prop_assert_eq!(literals, o.len());
    }

    #[test]
    fn chain_text_round_trips(chain in chain_strategy(8)) {
        prop_assert!(validate(&chain).is_empty());
        let back = parse_chain(&print_chain(&chain)).unwrap();
        prop_assert!(validate(&back).is_empty());
        prop_assert_eq!(back.rows, chain.rows);
        prop_assert_eq!(back.labels, chain.labels);
    }

    #[test]
    fn bounded_until_matches_path_enumeration((chain, s1, s2) in chain_with_sets(8), k in 0u64..=8) {
        let fast = prob_bounded_until(&chain, &s1, &s2, k);
        for (s, p) in fast.iter().enumerate() {
            prop_assert_eq!(p, &brute_force_bounded(&chain, &s1, &s2, k, s));
        }
    }

    #[test]
    fn bounded_until_grows_towards_until((chain, s1, s2) in chain_with_sets(6)) {
        let full = prob_until(&chain, &chain.predecessors(), &s1, &s2).unwrap();
        let mut prev = prob_bounded_until(&chain, &s1, &s2, 0);
        for k in 1..=8 {
            let next = prob_bounded_until(&chain, &s1, &s2, k);
            for s in 0..chain.len() {
                prop_assert!(prev[s] <= next[s]);
                prop_assert!(next[s] <= full[s]);
            }
            prev = next;
        }
    }

    #[test]
    fn until_solves_its_equations((chain, s1, s2) in chain_with_sets(8)) {
        let x = prob_until(&chain, &chain.predecessors(), &s1, &s2).unwrap();
        prop_assert!(until_residual_ok(&chain, &s1, &s2, &x));
        prop_assert!(x.iter().all(|p| *p >= rat(0, 1) && *p <= rat(1, 1)));
    }

    #[test]
    fn sat_follows_the_boolean_clauses(chain in chain_strategy(6), a in formula_strategy(), b in formula_strategy()) {
        let mut ch = Checker::new(&chain);
        let sa = ch.sat(&a).unwrap().clone();
        let sb = ch.sat(&b).unwrap().clone();
        let mut not_a = sa.clone();
        not_a.toggle_range(..);
        prop_assert_eq!(ch.sat(&a.not()).unwrap(), &not_a);
        prop_assert_eq!(ch.sat(&a.and(&b)).unwrap(), &(&sa & &sb));
    }
}

fn point_strategy() -> impl Strategy<Value = Vec2> {
    // Rationals strictly inside (1/15, 14/15) × (0, 1) with denominators up to 10⁴.
    (16i64..=10_000, any::<u32>(), 2i64..=10_000, any::<u32>()).prop_map(|(d1, x, d2, y)| {
        let (lo, span) = (d1 / 15 + 1, d1 * 13 / 15 - 1);
        let n1 = lo + (x as i64) % span.max(1);
        let n2 = 1 + (y as i64) % (d2 - 1);
        Vec2::new(rat(n1, d1), rat(n2, d2))
    })
}

proptest! {
    #![proptest_config(Config { cases: 256, ..Config::default() })]

    #[test]
    fn inc_and_dec_are_exact_inverses(v in point_strategy()) {
        let c = GadgetConstants::default();
        prop_assume!(c.in_interval(&v.v1));
        let iv = inc(&c, &v).unwrap();
        prop_assert_eq!(dec(&c, &iv).unwrap(), v.clone());
        prop_assert!(c.in_interval(&iv.v1) && iv.v2 >= rat(0, 1) && iv.v2 <= rat(1, 1));
        prop_assert!(iv.v1 < v.v1 && iv.v2 < v.v2);
    }

    #[test]
    fn slopes_line_up(v in point_strategy(), t in 0i64..=1000, y in 0i64..1000) {
        let c = GadgetConstants::default();
        prop_assume!(c.in_interval(&v.v1));
        let iv = inc(&c, &v).unwrap();
        let iiv = inc(&c, &iv).unwrap();
        let foot = Vec2::new(iiv.v1.clone(), rat(0, 1));
        prop_assert_eq!(slope(&foot, &iv).unwrap(), slope(&iv, &v).unwrap());

        let u = Vec2::new(iv.v1.clone(), &iv.v2 * rat(y, 1000));
        prop_assert!(slope(&u, &dec(&c, &u).unwrap()).unwrap() < slope(&iv, &v).unwrap());

        let w = iiv.scale(&rat(1000 - t, 1000)).add(&iv.scale(&rat(t, 1000)));
        let dw = dec(&c, &w).unwrap();
        prop_assert_eq!(cross(&iv, &v, &dw), rat(0, 1));
        prop_assert!(iv.v1 <= dw.v1 && dw.v1 <= v.v1);
    }
}

#[test]
fn inc_iterates_approach_the_lower_endpoint() {
    let g = Geometry::default();
    let lo = g.consts.i_lo.clone();
    let gaps: Vec<Rat> = (0..=64).map(|n| &g.inc_iter(n).unwrap().v1 - &lo).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[64] < rat(1, 1_000_000) && gaps[64] > rat(0, 1));
}

fn update_strategy() -> impl Strategy<Value = Update> {
    prop_oneof![Just(Update::Inc), Just(Update::Dec)]
}

/// Deterministic two-counter machines with `m` instructions.
fn machine_strategy(max_m: usize) -> impl Strategy<Value = CounterMachine> {
    (1..=max_m).prop_flat_map(|m| {
        let ins = (1usize..=2, 1..=m as Label, 1..=m as Label, update_strategy(), update_strategy()).prop_map(
            |(test, z, p, u1, u2)| Instruction { test, zero: [z].into(), pos: [p].into(), updates: vec![u1, u2] },
        );
        proptest::collection::vec(ins, m).prop_map(|instructions| CounterMachine {
            name: "prop".into(),
            d: 2,
            instructions,
        })
    })
}

fn minsky_strategy(max_m: usize) -> impl Strategy<Value = MinskyMachine> {
    (1..=max_m).prop_flat_map(|m| {
        let l = 1..=m as Label;
        let ins = prop_oneof![
            (1usize..=2, l.clone()).prop_map(|(counter, g)| MinskyInstr::Inc { counter, goto: [g].into() }),
            (1usize..=2, l.clone(), l).prop_map(|(counter, z, n)| MinskyInstr::Test {
                counter,
                zero: [z].into(),
                nonzero: [n].into()
            }),
        ];
        proptest::collection::vec(ins, m).prop_map(|instructions| MinskyMachine {
            name: "p".into(),
            d: 2,
            instructions,
        })
    })
}

proptest! {
    #![proptest_config(Config { cases: 128, ..Config::default() })]

    #[test]
    fn lassos_replay_the_computation(m in machine_strategy(4)) {
        m.validate().unwrap();
        match run_deterministic(&m, 200) {
            Ok(lasso) => {
                prop_assert!(lasso.alpha >= 1 && lasso.alpha < lasso.beta());
                prop_assert_eq!(&lasso.configs[0], &Configuration::initial(2));
                prop_assert_eq!(&lasso.configs[lasso.alpha - 1], lasso.configs.last().unwrap());
                let mut cur = Configuration::initial(2);
                for t in 0..3 * lasso.beta() {
                    prop_assert_eq!(&cur, lasso.config_at(t));
                    let next = successors(&m, &cur).unwrap();
                    prop_assert_eq!(next.len(), 1);
                    cur = next[0].clone();
                }
            }
            Err(e) => {
                let unbounded = matches!(e, pctlwb::machines::MachineError::Unbounded { .. });
                prop_assert!(unbounded, "{e}");
            }
        }
    }

    #[test]
    fn minsky_translation_is_a_valid_machine(p in minsky_strategy(5)) {
        let n = minsky_to_counter(&p).unwrap();
        n.validate().unwrap();
        prop_assert_eq!(n.m(), 3 * p.m());
        prop_assert!(n.is_deterministic());
    }
}

proptest! {
    #![proptest_config(Config { cases: 6, ..Config::default() })]

    #[test]
    fn compiled_formulae_are_well_formed(m in machine_strategy(2), fg in any::<bool>()) {
        let fragment = if fg { Fragment::FGOnly } else { Fragment::WithUntil };
        let phi = compile(&m, &ReductionConfig::new(fragment, Variant::FiniteSat)).unwrap();
        let uni = universe(m.m());
        for f in subformulae(&phi) {
            match f.kind() {
                StateKind::Atom(p) => prop_assert!(uni.contains(p), "{p}"),
                StateKind::Prob(path, _, r) => {
                    prop_assert!(*r >= rat(0, 1) && *r <= rat(1, 1));
                    if fg {
                        let pure = match path.kind() {
                            PathKind::Until(a, _) | PathKind::BoundedUntil(a, _, _) => a.is_true(),
                            PathKind::Next(_) => false,
                        };
                        prop_assert!(pure);
                    }
                }
                _ => {}
            }
        }
        if fg {
            prop_assert_eq!(stats(&phi).proper_untils, 0);
        }
        prop_assert_eq!(parse_formula(&print_formula(&phi)).unwrap().id(), phi.id());
    }

    /// Whenever construction succeeds the chain is valid, the lint items pass
    /// and every r-relevant state carries its counter's vector. Increment sites
    /// may legitimately fail with a weight outside (0,1].
    #[test]
    fn witnesses_are_valid_chains(m in machine_strategy(3)) {
        let Ok(lasso) = run_deterministic(&m, 200) else { return Ok(()) };
        let cfg = WitnessConfig { state_cap: 20_000, ..WitnessConfig::default() };
        let r = match build_witness(&m, &lasso, &cfg) {
            Ok(r) => r,
            Err(WitnessError::NonPositive(_) | WitnessError::StateCap(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(validate(&r.chain).is_empty());
        // The single-R rows carry no E branch, so `lambda` can only hold when
        // the lasso never increments; the witness unit tests pin that case.
        let dec_only = lasso.configs.iter().all(|c| {
            m.instructions[c.label as usize - 1].updates.iter().all(|u| *u == Update::Dec)
        });
        for item in lint_witness(&r) {
            if item.name != "lambda" || dec_only {
                prop_assert!(item.passed, "{}: {}", item.name, item.detail);
            }
        }
        let init = &r.states[r.init];
        prop_assert_eq!((init.index, init.n1, init.n2), (0, 0, 0));
        let g = Geometry::new(r.constants.clone());
        for k in 1..=2u8 {
            for (s, v) in characteristic_vectors(&r, k).unwrap() {
                let st = &r.states[s];
                if relevant_atom(&st.props, k).and_then(|p| p.family()) == Some(pctlwb::formula::Family::R) {
                    let n = if k == 1 { st.n1 } else { st.n2 };
                    prop_assert_eq!(v, counter_vec(&g, n).unwrap(), "{}", st);
                }
            }
        }
    }
}
