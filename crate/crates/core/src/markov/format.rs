//! Line-oriented chain files.
//!
//! ```text
//! chain NAME
//! state ID : prop prop ...
//! FROM -> TO P/Q
//! init ID
//! ```
//! `#` starts a comment. States may be declared in any order relative to
//! transitions; every transition endpoint must be declared somewhere.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use super::{ChainError, MarkovChain, StateId};
use crate::formula::Proposition;
use crate::rational::{fmt_fraction, parse_rat};

/// Parses a chain and validates it; invalid chains are reported with every violation.
pub fn parse_chain(text: &str) -> Result<MarkovChain, ChainError> {
    let mut chain = MarkovChain::new("");
    let mut index: HashMap<String, StateId> = HashMap::new();
    let mut pending: Vec<(usize, String, String, crate::rational::Rat)> = Vec::new();
    let mut init: Option<(usize, String)> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| ChainError::Parse { line, msg };
        if let Some(rest) = body.strip_prefix("chain ").or_else(|| (body == "chain").then_some("")) {
            chain.name = rest.trim().to_string();
        } else if let Some(rest) = body.strip_prefix("state ") {
            let (id, props) = rest.split_once(':').ok_or_else(|| err("expected `state ID : props`".into()))?;
            let id = id.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(err(format!("bad state id `{id}`")));
            }
            let mut labels = BTreeSet::new();
            for p in props.split_whitespace() {
                labels.insert(Proposition::from_name(p).map_err(err)?);
            }
            if index.contains_key(id) {
                return Err(ChainError::DuplicateState(id.to_string()));
            }
            let s = chain.add_state(id, labels);
            index.insert(id.to_string(), s);
        } else if let Some(rest) = body.strip_prefix("init ") {
            if init.is_some() {
                return Err(err("init given twice".into()));
            }
            init = Some((line, rest.trim().to_string()));
        } else if let Some((from, rest)) = body.split_once("->") {
            let mut parts = rest.split_whitespace();
            let (to, p) = match (parts.next(), parts.next(), parts.next()) {
                (Some(t), Some(p), None) => (t, p),
                _ => return Err(err("expected `FROM -> TO P/Q`".into())),
            };
            let prob = parse_rat(p).map_err(|e| err(e.to_string()))?;
            pending.push((line, from.trim().to_string(), to.to_string(), prob));
        } else {
            return Err(err(format!("unrecognised line `{body}`")));
        }
    }
    for (_, from, to, prob) in pending {
        let f = *index.get(&from).ok_or_else(|| ChainError::UnknownState(from.clone()))?;
        let t = *index.get(&to).ok_or_else(|| ChainError::UnknownState(to.clone()))?;
        chain.rows[f].push((t, prob));
    }
    if let Some((_, id)) = init {
        chain.init = Some(*index.get(&id).ok_or(ChainError::UnknownState(id))?);
    }
    chain.validate_or_err()?;
    Ok(chain)
}

/// Prints a chain in index order with reduced fractions.
pub fn print_chain(chain: &MarkovChain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "chain {}", chain.name);
    for (s, name) in chain.names.iter().enumerate() {
        let props: Vec<String> = chain.labels[s].iter().map(|p| p.to_string()).collect();
        if props.is_empty() {
            let _ = writeln!(out, "state {name} :");
        } else {
            let _ = writeln!(out, "state {name} : {}", props.join(" "));
        }
    }
    for (s, row) in chain.rows.iter().enumerate() {
        for (t, p) in row {
            let _ = writeln!(out, "{} -> {} {}", chain.names[s], chain.names[*t], fmt_fraction(p));
        }
    }
    if let Some(i) = chain.init {
        let _ = writeln!(out, "init {}", chain.names[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::validate;
    use crate::rational::rat;

    #[test]
    fn one_state_chain() {
        let c = parse_chain("state 0: a\n0 -> 0 1/1\ninit 0").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.init, Some(0));
        assert!(c.holds(0, &Proposition::user("a")));
    }

    #[test]
    fn fractions_are_reduced() {
        let c = parse_chain("chain x\nstate s :\nstate t : b\ns -> t 2/4\ns -> s 1/2\nt -> t 1").unwrap();
        assert_eq!(c.rows[0][0].1, rat(1, 2));
        let printed = print_chain(&c);
        assert!(printed.contains("s -> t 1/2"));
        assert!(printed.contains("t -> t 1/1"));
        let again = parse_chain(&printed).unwrap();
        assert_eq!(again, c);
        assert!(validate(&again).is_empty());
    }

    #[test]
    fn missing_init_is_fine_and_errors_are_reported() {
        assert_eq!(parse_chain("state 0 :\n0 -> 0 1").unwrap().init, None);
        assert!(matches!(parse_chain("state 0 :\nstate 0 :"), Err(ChainError::DuplicateState(_))));
        assert!(matches!(parse_chain("state 0 :\n0 -> 0 1/x"), Err(ChainError::Parse { line: 2, .. })));
        assert!(matches!(parse_chain("state 0 :\n0 -> 1 1"), Err(ChainError::UnknownState(_))));
        assert!(matches!(parse_chain("state 0 :\n0 -> 0 1/2"), Err(ChainError::Invalid(_))));
    }
}
