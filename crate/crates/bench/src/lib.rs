//! Shared fixtures for the criterion benches.

use std::collections::BTreeSet;

use pctlwb::formula::Proposition;
use pctlwb::machines::{parse_machine, CounterMachine};
use pctlwb::markov::MarkovChain;
use pctlwb::rational::rat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The all-dec machine whose witness is the main regression target.
pub const M0: &str = include_str!("../../../fixtures/m0.cm");

pub fn m0() -> CounterMachine {
    parse_machine(M0).expect("m0 fixture parses")
}

/// A seeded chain on `n` states over the atoms `p`, `q` and `s`, with about
/// `out` successors per state.
pub fn random_chain(n: usize, out: usize, seed: u64) -> MarkovChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<Proposition> = ["p", "q", "s"].iter().map(|a| Proposition::user(*a)).collect();
    let mut chain = MarkovChain::new("bench");
    for i in 0..n {
        let labels: BTreeSet<Proposition> = atoms.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        chain.add_state(format!("s{i}"), labels);
    }
    for i in 0..n {
        let mut support: Vec<usize> = (0..out).map(|_| rng.random_range(0..n)).collect();
        support.sort_unstable();
        support.dedup();
        let weights: Vec<i64> = support.iter().map(|_| rng.random_range(1..=9)).collect();
        let total: i64 = weights.iter().sum();
        chain.rows[i] = support.into_iter().zip(weights).map(|(t, w)| (t, rat(w, total))).collect();
    }
    chain.init = Some(0);
    chain
}
