//! Path-formula probabilities: next, step-bounded until and unbounded until.
//!
//! The unbounded solver removes the probability-0 states by a backward graph
//! search, splits the remaining unknowns into strongly connected components and
//! solves each component exactly, sinks first.

use fixedbitset::FixedBitSet;
use num_traits::{One, Signed, Zero};

use super::CheckError;
use crate::markov::{MarkovChain, StateId};
use crate::rational::Rat;

pub type ProbVector = Vec<Rat>;

/// `p(s) = Σ_{t ∈ target} Prob(s,t)`.
pub fn prob_next(chain: &MarkovChain, target: &FixedBitSet) -> ProbVector {
    chain.rows.iter().map(|row| row.iter().filter(|(t, _)| target.contains(*t)).map(|(_, w)| w).sum()).collect()
}

/// Backward recursion for `S1 U<=k S2`.
pub fn prob_bounded_until(chain: &MarkovChain, s1: &FixedBitSet, s2: &FixedBitSet, k: u64) -> ProbVector {
    let n = chain.len();
    let indicator: ProbVector = (0..n).map(|s| if s2.contains(s) { Rat::one() } else { Rat::zero() }).collect();
    let mut x = indicator;
    for _ in 0..k {
        let next: ProbVector = (0..n)
            .map(|s| {
                if s2.contains(s) {
                    Rat::one()
                } else if s1.contains(s) {
                    chain.rows[s].iter().map(|(t, w)| w * &x[*t]).sum()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        if next == x {
            break;
        }
        x = next;
    }
    x
}

/// States that reach `S2` along a path whose earlier states all lie in `S1`.
pub fn prob_positive(preds: &[Vec<StateId>], s1: &FixedBitSet, s2: &FixedBitSet) -> FixedBitSet {
    let mut reach = s2.clone();
    let mut stack: Vec<StateId> = s2.ones().collect();
    while let Some(t) = stack.pop() {
        for &s in &preds[t] {
            if s1.contains(s) && !reach.put(s) {
                stack.push(s);
            }
        }
    }
    reach
}

/// Exact probabilities of `S1 U S2`.
pub fn prob_until(
    chain: &MarkovChain,
    preds: &[Vec<StateId>],
    s1: &FixedBitSet,
    s2: &FixedBitSet,
) -> Result<ProbVector, CheckError> {
    let n = chain.len();
    let positive = prob_positive(preds, s1, s2);
    let mut x: ProbVector = vec![Rat::zero(); n];
    let mut maybe = FixedBitSet::with_capacity(n);
    for s in positive.ones() {
        if s2.contains(s) {
            x[s] = Rat::one();
        } else {
            maybe.insert(s);
        }
    }
    for comp in tarjan(chain, &maybe) {
        solve_component(chain, &comp, &mut x)?;
    }
    Ok(x)
}

fn solve_component(chain: &MarkovChain, comp: &[StateId], x: &mut ProbVector) -> Result<(), CheckError> {
    let size = comp.len();
    let local: std::collections::HashMap<StateId, usize> = comp.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    // rows of (I - P_CC) | b
    let mut a = vec![vec![Rat::zero(); size + 1]; size];
    for (i, &s) in comp.iter().enumerate() {
        a[i][i] = Rat::one();
        for (t, w) in &chain.rows[s] {
            match local.get(t) {
                Some(&j) => a[i][j] -= w,
                // already fixed: S2, prob-0, or a component emitted earlier
                None => a[i][size] += w * &x[*t],
            }
        }
    }
    let sol = gauss(a).ok_or(CheckError::Singular)?;
    for (i, &s) in comp.iter().enumerate() {
        x[s] = sol[i].clone();
    }
    Ok(())
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
pub fn gauss(mut a: Vec<Vec<Rat>>) -> Option<Vec<Rat>> {
    let n = a.len();
    for col in 0..n {
        let pivot =
            (col..n).filter(|&r| !a[r][col].is_zero()).max_by(|&p, &q| a[p][col].abs().cmp(&a[q][col].abs()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col][col..].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for c in col..=n {
                let delta = &factor * &pivot_row[c];
                row[c] -= delta;
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().expect("augmented column")).collect())
}

/// Strongly connected components of the subgraph induced by `within`,
/// emitted sinks first (every edge leaving a component points to one emitted earlier).
pub fn tarjan(chain: &MarkovChain, within: &FixedBitSet) -> Vec<Vec<StateId>> {
    const UNSEEN: usize = usize::MAX;
    let n = chain.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = FixedBitSet::with_capacity(n);
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in within.ones() {
        if index[root] != UNSEEN {
            continue;
        }
        // (state, next edge position)
        let mut call: Vec<(StateId, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack.insert(root);
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let row = &chain.rows[v];
            if *pos < row.len() {
                let w = row[*pos].0;
                *pos += 1;
                if !within.contains(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack.insert(w);
                    call.push((w, 0));
                } else if on_stack.contains(w) {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack.set(w, false);
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Checks `x_s = Σ w·x_t` exactly on every state of `S1 ∖ S2` with positive value.
pub fn until_residual_ok(chain: &MarkovChain, s1: &FixedBitSet, s2: &FixedBitSet, x: &ProbVector) -> bool {
    (0..chain.len()).all(|s| {
        if s2.contains(s) {
            return x[s].is_one();
        }
        if !s1.contains(s) {
            return x[s].is_zero();
        }
        if x[s].is_zero() {
            return true;
        }
        let rhs: Rat = chain.rows[s].iter().map(|(t, w)| w * &x[*t]).sum();
        rhs == x[s]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use std::collections::BTreeSet;

    fn chain(rows: Vec<Vec<(usize, Rat)>>) -> MarkovChain {
        let mut c = MarkovChain::new("t");
        for i in 0..rows.len() {
            c.add_state(i.to_string(), BTreeSet::new());
        }
        c.rows = rows;
        c
    }

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &i in items {
            s.insert(i);
        }
        s
    }

    fn loop_chain() -> MarkovChain {
        // s=0 loops with 1/2 and moves to the absorbing t=1 with 1/2
        chain(vec![vec![(1, rat(1, 2)), (0, rat(1, 2))], vec![(1, rat(1, 1))]])
    }

    #[test]
    fn next_examples() {
        let c = loop_chain();
        assert_eq!(prob_next(&c, &set(2, &[1]))[0], rat(1, 2));
        assert!(prob_next(&c, &set(2, &[])).iter().all(Zero::is_zero));
        assert!(prob_next(&c, &set(2, &[0, 1])).iter().all(One::is_one));
    }

    #[test]
    fn bounded_examples() {
        let c = loop_chain();
        let x = prob_bounded_until(&c, &set(2, &[0]), &set(2, &[1]), 2);
        assert_eq!(x[0], rat(3, 4));
        assert_eq!(x[1], rat(1, 1));
        let x = prob_bounded_until(&c, &set(2, &[]), &set(2, &[1]), 5);
        assert_eq!(x[0], rat(0, 1));
    }

    #[test]
    fn until_examples() {
        let c = loop_chain();
        let pre = c.predecessors();
        let x = prob_until(&c, &pre, &set(2, &[0]), &set(2, &[1])).unwrap();
        assert_eq!(x[0], rat(1, 1));
        let c = chain(vec![vec![(1, rat(1, 3)), (2, rat(2, 3))], vec![(1, rat(1, 1))], vec![(2, rat(1, 1))]]);
        let pre = c.predecessors();
        let x = prob_until(&c, &pre, &set(3, &[0]), &set(3, &[1])).unwrap();
        assert_eq!(x, vec![rat(1, 3), rat(1, 1), rat(0, 1)]);
        assert!(until_residual_ok(&c, &set(3, &[0]), &set(3, &[1]), &x));
    }

    #[test]
    fn tarjan_orders_sinks_first() {
        let one = rat(1, 1);
        let h = rat(1, 2);
        let c = chain(vec![
            vec![(1, h.clone()), (0, h.clone())],
            vec![(2, h.clone()), (3, h)],
            vec![(1, one.clone())],
            vec![(3, one)],
        ]);
        let comps = tarjan(&c, &set(4, &[0, 1, 2, 3]));
        assert_eq!(comps, vec![vec![3], vec![1, 2], vec![0]]);
    }

    #[test]
    fn gauss_solves_small_system() {
        // x + y = 3, x - y = 1
        let a = vec![vec![rat(1, 1), rat(1, 1), rat(3, 1)], vec![rat(1, 1), rat(-1, 1), rat(1, 1)]];
        assert_eq!(gauss(a).unwrap(), vec![rat(2, 1), rat(1, 1)]);
        assert!(gauss(vec![vec![rat(0, 1), rat(1, 1)]]).is_none());
    }
}
