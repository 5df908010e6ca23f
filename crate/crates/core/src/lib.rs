//! Exact-arithmetic PCTL workbench: model checking over rational Markov chains,
//! compilation of two-counter machines into PCTL, witness-chain synthesis and
//! the Inc/Dec point calculus the encoding rests on.

pub mod checker;
pub mod formula;
pub mod geometry;
pub mod machines;
pub mod markov;
pub mod rational;
pub mod reduction;
pub mod witness;

pub use checker::{CheckError, Checker, SatMap};
pub use formula::{Cmp, FormulaError, PathFormula, Proposition, StateFormula};
pub use markov::{MarkovChain, StateId};
pub use rational::Rat;
