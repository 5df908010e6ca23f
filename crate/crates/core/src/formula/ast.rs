//! Hash-consed PCTL state and path formulae.
//!
//! Every constructor goes through a global interner, so two structurally equal
//! formulae are the same node and compare by id. Nodes are never freed; the
//! reduction builds a few thousand of them at most.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, Mutex};

use num_traits::{One, Zero};

use super::prop::Proposition;
use super::FormulaError;
use crate::rational::{fmt_compact, Rat};

/// Probability comparison operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cmp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl Cmp {
    pub const ALL: [Cmp; 6] = [Cmp::Le, Cmp::Lt, Cmp::Ge, Cmp::Gt, Cmp::Eq, Cmp::Ne];

    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            Cmp::Le => lhs <= rhs,
            Cmp::Lt => lhs < rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ne => lhs != rhs,
        }
    }

    /// Logical negation: `!(x ⋈ r)` is `x negate(⋈) r`.
    pub fn negate(self) -> Cmp {
        match self {
            Cmp::Le => Cmp::Gt,
            Cmp::Lt => Cmp::Ge,
            Cmp::Ge => Cmp::Lt,
            Cmp::Gt => Cmp::Le,
            Cmp::Eq => Cmp::Ne,
            Cmp::Ne => Cmp::Eq,
        }
    }

    /// `x ⋈ r` iff `1-x mirror(⋈) 1-r`.
    pub fn mirror(self) -> Cmp {
        match self {
            Cmp::Le => Cmp::Ge,
            Cmp::Lt => Cmp::Gt,
            Cmp::Ge => Cmp::Le,
            Cmp::Gt => Cmp::Lt,
            Cmp::Eq => Cmp::Eq,
            Cmp::Ne => Cmp::Ne,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
            Cmp::Eq => "=",
            Cmp::Ne => "!=",
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug)]
pub enum StateKind {
    True,
    Atom(Proposition),
    Not(StateFormula),
    And(StateFormula, StateFormula),
    Prob(PathFormula, Cmp, Rat),
}

#[derive(Debug)]
pub enum PathKind {
    Next(StateFormula),
    Until(StateFormula, StateFormula),
    BoundedUntil(StateFormula, StateFormula, u64),
}

#[derive(Debug)]
struct StateNode {
    id: u32,
    kind: StateKind,
}

#[derive(Debug)]
struct PathNode {
    id: u32,
    kind: PathKind,
}

#[derive(Clone)]
pub struct StateFormula(Arc<StateNode>);

#[derive(Clone)]
pub struct PathFormula(Arc<PathNode>);

#[derive(PartialEq, Eq, Hash)]
enum StateKey {
    True,
    Atom(Proposition),
    Not(u32),
    And(u32, u32),
    Prob(u32, Cmp, Rat),
}

#[derive(PartialEq, Eq, Hash)]
enum PathKey {
    Next(u32),
    Until(u32, u32),
    BoundedUntil(u32, u32, u64),
}

#[derive(Default)]
struct Interner {
    states: HashMap<StateKey, StateFormula>,
    paths: HashMap<PathKey, PathFormula>,
}

static INTERNER: LazyLock<Mutex<Interner>> = LazyLock::new(|| Mutex::new(Interner::default()));

fn intern_state(kind: StateKind) -> StateFormula {
    let key = match &kind {
        StateKind::True => StateKey::True,
        StateKind::Atom(p) => StateKey::Atom(p.clone()),
        StateKind::Not(a) => StateKey::Not(a.id()),
        StateKind::And(a, b) => StateKey::And(a.id(), b.id()),
        StateKind::Prob(p, c, r) => StateKey::Prob(p.id(), *c, r.clone()),
    };
    let mut table = INTERNER.lock().unwrap_or_else(|e| e.into_inner());
    let next = u32::try_from(table.states.len()).expect("formula table overflow");
    table.states.entry(key).or_insert_with(|| StateFormula(Arc::new(StateNode { id: next, kind }))).clone()
}

fn intern_path(kind: PathKind) -> PathFormula {
    let key = match &kind {
        PathKind::Next(a) => PathKey::Next(a.id()),
        PathKind::Until(a, b) => PathKey::Until(a.id(), b.id()),
        PathKind::BoundedUntil(a, b, k) => PathKey::BoundedUntil(a.id(), b.id(), *k),
    };
    let mut table = INTERNER.lock().unwrap_or_else(|e| e.into_inner());
    let next = u32::try_from(table.paths.len()).expect("formula table overflow");
    table.paths.entry(key).or_insert_with(|| PathFormula(Arc::new(PathNode { id: next, kind }))).clone()
}

/// Rejects bounds outside `[0,1]`.
pub fn check_bound(bound: &Rat) -> Result<(), FormulaError> {
    if bound < &Rat::zero() || bound > &Rat::one() {
        return Err(FormulaError::BoundOutOfRange(fmt_compact(bound)));
    }
    Ok(())
}

impl StateFormula {
    pub fn tt() -> StateFormula {
        intern_state(StateKind::True)
    }

    pub fn ff() -> StateFormula {
        StateFormula::tt().not()
    }

    pub fn atom(p: Proposition) -> StateFormula {
        intern_state(StateKind::Atom(p))
    }

    pub fn not(&self) -> StateFormula {
        intern_state(StateKind::Not(self.clone()))
    }

    pub fn and(&self, other: &StateFormula) -> StateFormula {
        intern_state(StateKind::And(self.clone(), other.clone()))
    }

    /// `a | b` as `!(!a & !b)`.
    pub fn or(&self, other: &StateFormula) -> StateFormula {
        self.not().and(&other.not()).not()
    }

    /// `a => b` as `!(a & !b)`.
    pub fn implies(&self, other: &StateFormula) -> StateFormula {
        self.and(&other.not()).not()
    }

    pub fn prob(path: PathFormula, cmp: Cmp, bound: Rat) -> Result<StateFormula, FormulaError> {
        check_bound(&bound)?;
        Ok(intern_state(StateKind::Prob(path, cmp, bound)))
    }

    pub fn id(&self) -> u32 {
        self.0.id
    }

    pub fn kind(&self) -> &StateKind {
        &self.0.kind
    }

    pub fn is_true(&self) -> bool {
        matches!(self.kind(), StateKind::True)
    }

    /// Direct state-formula children, including the operands of a Prob node's path.
    pub fn children(&self) -> Vec<StateFormula> {
        match self.kind() {
            StateKind::True | StateKind::Atom(_) => Vec::new(),
            StateKind::Not(a) => vec![a.clone()],
            StateKind::And(a, b) => vec![a.clone(), b.clone()],
            StateKind::Prob(p, _, _) => p.operands(),
        }
    }
}

impl PathFormula {
    pub fn next(a: &StateFormula) -> PathFormula {
        intern_path(PathKind::Next(a.clone()))
    }

    pub fn until(a: &StateFormula, b: &StateFormula) -> PathFormula {
        intern_path(PathKind::Until(a.clone(), b.clone()))
    }

    pub fn bounded_until(a: &StateFormula, b: &StateFormula, k: u64) -> PathFormula {
        intern_path(PathKind::BoundedUntil(a.clone(), b.clone(), k))
    }

    pub fn id(&self) -> u32 {
        self.0.id
    }

    pub fn kind(&self) -> &PathKind {
        &self.0.kind
    }

    pub fn operands(&self) -> Vec<StateFormula> {
        match self.kind() {
            PathKind::Next(a) => vec![a.clone()],
            PathKind::Until(a, b) | PathKind::BoundedUntil(a, b, _) => vec![a.clone(), b.clone()],
        }
    }
}

impl PartialEq for StateFormula {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}
impl Eq for StateFormula {}
impl Hash for StateFormula {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.id().hash(h)
    }
}

impl PartialEq for PathFormula {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}
impl Eq for PathFormula {}
impl Hash for PathFormula {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.id().hash(h)
    }
}

impl fmt::Debug for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {}", self.id(), self)
    }
}

impl fmt::Debug for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {}", self.id(), self)
    }
}

fn write_state(out: &mut String, phi: &StateFormula) {
    match phi.kind() {
        StateKind::True => out.push_str("true"),
        StateKind::Atom(p) => out.push_str(&p.to_string()),
        StateKind::Not(a) => {
            out.push('!');
            write_state(out, a);
        }
        StateKind::And(a, b) => {
            out.push('(');
            write_state(out, a);
            out.push_str(" & ");
            write_state(out, b);
            out.push(')');
        }
        StateKind::Prob(p, c, r) => {
            out.push('P');
            out.push_str(c.symbol());
            out.push_str(&fmt_compact(r));
            out.push('[');
            write_path(out, p);
            out.push(']');
        }
    }
}

fn write_path(out: &mut String, p: &PathFormula) {
    match p.kind() {
        PathKind::Next(a) => {
            out.push_str("X ");
            write_state(out, a);
        }
        PathKind::Until(a, b) => {
            write_state(out, a);
            out.push_str(" U ");
            write_state(out, b);
        }
        PathKind::BoundedUntil(a, b, k) => {
            write_state(out, a);
            out.push_str(&format!(" U<={k} "));
            write_state(out, b);
        }
    }
}

/// Canonical, fully parenthesized text over the primitive connectives.
pub fn print_formula(phi: &StateFormula) -> String {
    let mut out = String::new();
    write_state(&mut out, phi);
    out
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_path(&mut out, self);
        f.write_str(&out)
    }
}

/// All state subformulae, children strictly before parents, each id once.
pub fn subformulae(phi: &StateFormula) -> Vec<StateFormula> {
    let mut order = Vec::new();
    let mut seen = std::collections::HashSet::new();
    // (node, children already pushed)
    let mut stack = vec![(phi.clone(), false)];
    while let Some((node, expanded)) = stack.pop() {
        if expanded {
            if seen.insert(node.id()) {
                order.push(node);
            }
            continue;
        }
        if seen.contains(&node.id()) {
            continue;
        }
        let children = node.children();
        stack.push((node, true));
        for c in children.into_iter().rev() {
            if !seen.contains(&c.id()) {
                stack.push((c, false));
            }
        }
    }
    order
}
