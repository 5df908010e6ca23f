//! Recursive-descent parser for the formula grammar.
//!
//! Precedence, loosest first: `=>` (right-associative), `|`, `&`, `!`.
//! `F`, `G` and `F<=k` inside `P…[…]` are desugared on the fly.

use num_bigint::BigInt;

use super::ast::{Cmp, PathFormula, StateFormula};
use super::prop::Proposition;
use super::{mk_f, mk_f_bounded, mk_g, FormulaError};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Slash,
    Cmp(Cmp),
    Eof,
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match two.as_str() {
            "=>" => Some((Tok::Implies, 2)),
            "<=" => Some((Tok::Cmp(Cmp::Le), 2)),
            ">=" => Some((Tok::Cmp(Cmp::Ge), 2)),
            "!=" => Some((Tok::Cmp(Cmp::Ne), 2)),
            _ => None,
        };
        let (tok, n) = match tok {
            Some(t) => t,
            None => match c {
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                '/' => (Tok::Slash, 1),
                '<' => (Tok::Cmp(Cmp::Lt), 1),
                '>' => (Tok::Cmp(Cmp::Gt), 1),
                '=' => (Tok::Cmp(Cmp::Eq), 1),
                _ if c.is_ascii_digit() => {
                    let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                    let n = s.len();
                    (Tok::Nat(s), n)
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let s: String = chars[i..].iter().take_while(|c| c.is_ascii_alphanumeric() || **c == '_').collect();
                    let n = s.len();
                    (Tok::Ident(s), n)
                }
                _ => {
                    return Err(FormulaError::Syntax { line: l0, col: c0, msg: format!("unexpected character `{c}`") })
                }
            },
        };
        i += n;
        col += n;
        out.push(Lexed { tok, line: l0, col: c0 });
    }
    out.push(Lexed { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: [&str; 7] = ["true", "false", "X", "U", "F", "G", "P"];

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        let l = &self.toks[self.pos];
        Err(FormulaError::Syntax { line: l.line, col: l.col, msg: msg.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn state(&mut self) -> Result<StateFormula, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.state()?;
            return Ok(lhs.implies(&rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<StateFormula, FormulaError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            acc = acc.or(&rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<StateFormula, FormulaError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = acc.and(&rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<StateFormula, FormulaError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(self.unary()?.not());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<StateFormula, FormulaError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.state()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(StateFormula::tt())
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(StateFormula::ff())
            }
            Tok::Ident(s) if s == "P" => {
                self.bump();
                self.prob()
            }
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                self.err(format!("keyword `{s}` is not a state formula"))
            }
            Tok::Ident(s) => match Proposition::from_name(&s) {
                Ok(p) => {
                    self.bump();
                    Ok(StateFormula::atom(p))
                }
                Err(e) => self.err(e),
            },
            _ => self.err("expected a state formula"),
        }
    }

    fn nat(&mut self) -> Result<BigInt, FormulaError> {
        match self.peek().clone() {
            Tok::Nat(s) => {
                self.bump();
                Ok(s.parse().expect("lexer produces digits"))
            }
            _ => self.err("expected a natural number"),
        }
    }

    fn step_bound(&mut self) -> Result<u64, FormulaError> {
        let n = self.nat()?;
        u64::try_from(n).or_else(|_| self.err("step bound too large"))
    }

    fn prob(&mut self) -> Result<StateFormula, FormulaError> {
        let cmp = match *self.peek() {
            Tok::Cmp(c) => c,
            _ => return self.err("expected a comparison after `P`"),
        };
        self.bump();
        let bound_pos = self.pos;
        let num = self.nat()?;
        let bound = if *self.peek() == Tok::Slash {
            self.bump();
            let den = self.nat()?;
            if den == BigInt::from(0) {
                self.pos = bound_pos;
                return self.err("zero denominator");
            }
            Rat::new(num, den)
        } else {
            Rat::from_integer(num)
        };
        if let Err(e) = super::check_bound(&bound) {
            self.pos = bound_pos;
            return self.err(e.to_string());
        }
        self.expect(Tok::LBrack, "`[`")?;
        let f = self.path(cmp, bound)?;
        self.expect(Tok::RBrack, "`]`")?;
        Ok(f)
    }

    fn path(&mut self, cmp: Cmp, bound: Rat) -> Result<StateFormula, FormulaError> {
        if self.is_kw("X") {
            self.bump();
            let a = self.state()?;
            return StateFormula::prob(PathFormula::next(&a), cmp, bound);
        }
        if self.is_kw("G") {
            self.bump();
            let a = self.state()?;
            return mk_g(cmp, bound, &a);
        }
        if self.is_kw("F") {
            self.bump();
            if *self.peek() == Tok::Cmp(Cmp::Le) && matches!(self.peek_at(1), Tok::Nat(_)) {
                self.bump();
                let k = self.step_bound()?;
                let a = self.state()?;
                return mk_f_bounded(cmp, bound, k, &a);
            }
            let a = self.state()?;
            return mk_f(cmp, bound, &a);
        }
        let lhs = self.state()?;
        if !self.is_kw("U") {
            return self.err("expected `U` in path formula");
        }
        self.bump();
        if *self.peek() == Tok::Cmp(Cmp::Le) {
            self.bump();
            let k = self.step_bound()?;
            let rhs = self.state()?;
            return StateFormula::prob(PathFormula::bounded_until(&lhs, &rhs, k), cmp, bound);
        }
        let rhs = self.state()?;
        StateFormula::prob(PathFormula::until(&lhs, &rhs), cmp, bound)
    }
}

/// Parses one state formula; `#` starts a comment running to end of line.
pub fn parse_formula(text: &str) -> Result<StateFormula, FormulaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.state()?;
    if *p.peek() != Tok::Eof {
        return p.err("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{mk_g, print_formula};
    use crate::rational::rat;

    fn atom(s: &str) -> StateFormula {
        StateFormula::atom(Proposition::user(s))
    }

    #[test]
    fn next_with_fraction() {
        let f = parse_formula("P>=1/2[X a]").unwrap();
        let want = StateFormula::prob(PathFormula::next(&atom("a")), Cmp::Ge, rat(1, 2)).unwrap();
        assert_eq!(f, want);
    }

    #[test]
    fn globally_desugars() {
        let f = parse_formula("P=1[G (a | b)]").unwrap();
        assert_eq!(f, mk_g(Cmp::Eq, rat(1, 1), &atom("a").or(&atom("b"))).unwrap());
    }

    #[test]
    fn bounds_outside_unit_interval() {
        assert!(parse_formula("P=0[X a]").is_ok());
        assert!(matches!(parse_formula("P=2[X a]"), Err(FormulaError::Syntax { .. })));
        assert!(parse_formula("P=3/2[X a]").is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        let (a, b, c) = (atom("a"), atom("b"), atom("c"));
        assert_eq!(parse_formula("a | b & c").unwrap(), a.or(&b.and(&c)));
        assert_eq!(parse_formula("a => b => c").unwrap(), a.implies(&b.implies(&c)));
        assert_eq!(parse_formula("!a & b").unwrap(), a.not().and(&b));
        assert_eq!(parse_formula("a & b & c").unwrap(), a.and(&b).and(&c));
    }

    #[test]
    fn errors_carry_position() {
        match parse_formula("a &\n  ) ") {
            Err(FormulaError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("r9_0_1").is_err());
        assert!(parse_formula("P=1[U a]").is_err());
    }

    #[test]
    fn round_trip_sample() {
        let text = "P<1/3[(r1_0_1 & !K2) U<=4 P>0[F<=2 Acap1_2]] => P!=1[X false]";
        let f = parse_formula(text).unwrap();
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
    }
}
