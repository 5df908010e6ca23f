//! Text formats for both machine models.
//!
//! ```text
//! machine NAME
//! counters 2
//! 1: if C1 = 0 goto {2} else goto {2} ; dec dec
//! ```
//!
//! ```text
//! minsky NAME
//! 1: inc c1 goto {2}
//! 2: test c1 zero {1} else {2}
//! ```
//! Lines may appear in any order but the labels must be exactly `1..m`.
//! `#` starts a comment. A Minsky program has two counters unless a
//! `counters D` line says otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::counter::{CounterMachine, Instruction, Label, Update};
use super::minsky::{MinskyInstr, MinskyMachine};
use super::MachineError;

fn perr(line: usize, msg: impl Into<String>) -> MachineError {
    MachineError::Parse { line, msg: msg.into() }
}

/// Non-comment lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_set(line: usize, s: &str) -> Result<(BTreeSet<Label>, &str), MachineError> {
    let s = s.trim_start();
    let rest = s.strip_prefix('{').ok_or_else(|| perr(line, "expected `{`"))?;
    let (inner, rest) = rest.split_once('}').ok_or_else(|| perr(line, "expected `}`"))?;
    let mut set = BTreeSet::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        set.insert(part.parse::<Label>().map_err(|_| perr(line, format!("bad label `{part}`")))?);
    }
    if set.is_empty() {
        return Err(perr(line, "empty target set"));
    }
    Ok((set, rest))
}

fn parse_counter(line: usize, tok: &str, prefix: char) -> Result<usize, MachineError> {
    tok.strip_prefix(prefix)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| perr(line, format!("expected a counter `{prefix}<k>`, found `{tok}`")))
}

fn expect_kw<'a>(line: usize, s: &'a str, kw: &str) -> Result<&'a str, MachineError> {
    s.trim_start().strip_prefix(kw).ok_or_else(|| perr(line, format!("expected `{kw}`")))
}

fn split_label(line: usize, body: &str) -> Result<(Label, &str), MachineError> {
    let (l, rest) = body.split_once(':').ok_or_else(|| perr(line, "expected `LABEL:`"))?;
    let l = l.trim().parse::<Label>().map_err(|_| perr(line, format!("bad label `{}`", l.trim())))?;
    Ok((l, rest))
}

fn dense<T>(map: BTreeMap<Label, T>) -> Result<Vec<T>, MachineError> {
    for (i, l) in map.keys().enumerate() {
        if *l != i as Label + 1 {
            return Err(MachineError::Invalid(format!("labels must be 1..m without gaps; missing {}", i + 1)));
        }
    }
    Ok(map.into_values().collect())
}

pub fn parse_machine(text: &str) -> Result<CounterMachine, MachineError> {
    let mut name = String::new();
    let mut d: Option<usize> = None;
    let mut ins: BTreeMap<Label, Instruction> = BTreeMap::new();
    for (line, body) in lines(text) {
        if let Some(rest) = body.strip_prefix("machine") {
            name = rest.trim().to_string();
            continue;
        }
        if let Some(rest) = body.strip_prefix("counters") {
            d = Some(rest.trim().parse().map_err(|_| perr(line, "bad counter count"))?);
            continue;
        }
        let (label, rest) = split_label(line, body)?;
        let rest = expect_kw(line, rest, "if")?;
        let (cnt, rest) =
            rest.trim_start().split_once(char::is_whitespace).ok_or_else(|| perr(line, "truncated test"))?;
        let test = parse_counter(line, cnt, 'C')?;
        let rest = expect_kw(line, rest, "=")?;
        let rest = expect_kw(line, rest, "0")?;
        let rest = expect_kw(line, rest, "goto")?;
        let (zero, rest) = parse_set(line, rest)?;
        let rest = expect_kw(line, rest, "else")?;
        let rest = expect_kw(line, rest, "goto")?;
        let (pos, rest) = parse_set(line, rest)?;
        let rest = expect_kw(line, rest, ";")?;
        let updates = rest
            .split_whitespace()
            .map(|u| match u {
                "inc" => Ok(Update::Inc),
                "dec" => Ok(Update::Dec),
                other => Err(perr(line, format!("unknown update `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if ins.insert(label, Instruction { test, zero, pos, updates }).is_some() {
            return Err(perr(line, format!("label {label} defined twice")));
        }
    }
    let d = d.ok_or_else(|| MachineError::Invalid("missing `counters D` line".into()))?;
    let machine = CounterMachine { name, d, instructions: dense(ins)? };
    machine.validate()?;
    Ok(machine)
}

fn fmt_set(s: &BTreeSet<Label>) -> String {
    let parts: Vec<String> = s.iter().map(|l| l.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn print_machine(machine: &CounterMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "machine {}", machine.name);
    let _ = writeln!(out, "counters {}", machine.d);
    for (i, ins) in machine.instructions.iter().enumerate() {
        let ups: Vec<&str> = ins.updates.iter().map(|u| u.keyword()).collect();
        let _ = writeln!(
            out,
            "{}: if C{} = 0 goto {} else goto {} ; {}",
            i + 1,
            ins.test,
            fmt_set(&ins.zero),
            fmt_set(&ins.pos),
            ups.join(" ")
        );
    }
    out
}

pub fn parse_minsky(text: &str) -> Result<MinskyMachine, MachineError> {
    let mut name = String::new();
    let mut d = 2;
    let mut ins: BTreeMap<Label, MinskyInstr> = BTreeMap::new();
    for (line, body) in lines(text) {
        if let Some(rest) = body.strip_prefix("minsky") {
            name = rest.trim().to_string();
            continue;
        }
        if let Some(rest) = body.strip_prefix("counters") {
            d = rest.trim().parse().map_err(|_| perr(line, "bad counter count"))?;
            continue;
        }
        let (label, rest) = split_label(line, body)?;
        let mut words = rest.trim_start().splitn(3, char::is_whitespace);
        let (op, cnt, rest) = match (words.next(), words.next(), words.next()) {
            (Some(op), Some(c), Some(r)) => (op, c, r),
            _ => return Err(perr(line, "truncated instruction")),
        };
        let counter = parse_counter(line, cnt, 'c')?;
        let instr = match op {
            "inc" => {
                let (goto, rest) = parse_set(line, expect_kw(line, rest, "goto")?)?;
                if !rest.trim().is_empty() {
                    return Err(perr(line, "trailing input"));
                }
                MinskyInstr::Inc { counter, goto }
            }
            "test" => {
                let (zero, rest) = parse_set(line, expect_kw(line, rest, "zero")?)?;
                let (nonzero, rest) = parse_set(line, expect_kw(line, rest, "else")?)?;
                if !rest.trim().is_empty() {
                    return Err(perr(line, "trailing input"));
                }
                MinskyInstr::Test { counter, zero, nonzero }
            }
            other => return Err(perr(line, format!("unknown instruction `{other}`"))),
        };
        if ins.insert(label, instr).is_some() {
            return Err(perr(line, format!("label {label} defined twice")));
        }
    }
    let machine = MinskyMachine { name, d, instructions: dense(ins)? };
    machine.validate()?;
    Ok(machine)
}

pub fn print_minsky(machine: &MinskyMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "minsky {}", machine.name);
    let _ = writeln!(out, "counters {}", machine.d);
    for (i, ins) in machine.instructions.iter().enumerate() {
        match ins {
            MinskyInstr::Inc { counter, goto } => {
                let _ = writeln!(out, "{}: inc c{counter} goto {}", i + 1, fmt_set(goto));
            }
            MinskyInstr::Test { counter, zero, nonzero } => {
                let _ = writeln!(out, "{}: test c{counter} zero {} else {}", i + 1, fmt_set(zero), fmt_set(nonzero));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const M0: &str = "machine m0\ncounters 2\n1: if C1 = 0 goto {2} else goto {2} ; dec dec\n2: if C2 = 0 goto {1} else goto {1} ; dec dec\n";

    #[test]
    fn machine_round_trip() {
        let m = parse_machine(M0).unwrap();
        assert_eq!(m.m(), 2);
        assert_eq!(print_machine(&m), M0);
    }

    #[test]
    fn machine_errors() {
        assert!(matches!(
            parse_machine("counters 2\n1: if C1 = 0 goto {3} else goto {1} ; dec dec"),
            Err(MachineError::UnknownLabel { target: 3, .. })
        ));
        assert!(matches!(
            parse_machine("counters 2\n1: if C1 = 0 goto {1} else goto {1} ; dec"),
            Err(MachineError::UpdateCount { .. })
        ));
        assert!(parse_machine("counters 2\n1: if C1 = 0 goto {} else goto {1} ; dec dec").is_err());
        assert!(parse_machine("counters 2\n2: if C1 = 0 goto {1} else goto {1} ; dec dec").is_err());
    }

    #[test]
    fn minsky_round_trip() {
        let text = "minsky x\ncounters 2\n1: inc c1 goto {2}\n2: test c1 zero {1} else {1,2}\n";
        let m = parse_minsky(text).unwrap();
        assert_eq!(print_minsky(&m), text);
        assert!(parse_minsky("1: inc c1 goto {2}").is_err());
        assert!(parse_minsky("1: jump c1 goto {1}").is_err());
    }
}
