//! Path-enumeration oracle for step-bounded until, kept independent of the
//! backward recursion so the two can be compared.

use fixedbitset::FixedBitSet;
use num_traits::{One, Zero};

use crate::markov::{MarkovChain, StateId};
use crate::rational::Rat;

/// Sums the probability of every minimal accepting prefix of length at most `k`
/// starting in `s`: the prefix stays in `S1 ∖ S2` and its last state is in `S2`.
pub fn brute_force_bounded(chain: &MarkovChain, s1: &FixedBitSet, s2: &FixedBitSet, k: u64, s: StateId) -> Rat {
    let mut total = Rat::zero();
    // depth-first over prefixes: (state, steps taken, prefix probability)
    let mut stack: Vec<(StateId, u64, Rat)> = vec![(s, 0, Rat::one())];
    while let Some((u, steps, p)) = stack.pop() {
        if s2.contains(u) {
            total += p;
            continue;
        }
        if !s1.contains(u) || steps == k {
            continue;
        }
        for (t, w) in &chain.rows[u] {
            stack.push((*t, steps + 1, &p * w));
        }
    }
    total
}
