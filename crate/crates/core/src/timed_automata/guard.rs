use std::fmt;

use crate::error::{Error, Result};

/// Clock constraint: `c ≤ r`, `r ≤ c`, negation and conjunction. Clocks are indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Guard {
    Le(usize, u64),
    Ge(u64, usize),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn max_constant(&self) -> u64 {
        match self {
            Guard::Le(_, r) | Guard::Ge(r, _) => *r,
            Guard::Not(g) => g.max_constant(),
            Guard::And(a, b) => a.max_constant().max(b.max_constant()),
        }
    }

    pub fn render(&self, clocks: &[String]) -> String {
        match self {
            Guard::Le(c, r) => format!("{} <= {r}", clocks[*c]),
            Guard::Ge(r, c) => format!("{r} <= {}", clocks[*c]),
            Guard::Not(g) => format!("!({})", g.render(clocks)),
            Guard::And(a, b) => format!("({}) & ({})", a.render(clocks), b.render(clocks)),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..64).map(|i| format!("c{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

/// Satisfaction of a guard by a valuation.
pub fn eval_guard(g: &Guard, v: &[u64]) -> bool {
    match g {
        Guard::Le(c, r) => v[*c] <= *r,
        Guard::Ge(r, c) => *r <= v[*c],
        Guard::Not(g) => !eval_guard(g, v),
        Guard::And(a, b) => eval_guard(a, v) && eval_guard(b, v),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Le,
    Lt,
    Ge,
    Gt,
    Not,
    And,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::Open,
            ')' => Tok::Close,
            '!' => Tok::Not,
            '&' => {
                if b.get(i + 1) == Some(&b'&') {
                    i += 1;
                }
                Tok::And
            }
            '<' | '>' => {
                let eq = b.get(i + 1) == Some(&b'=');
                if eq {
                    i += 1;
                }
                match (c, eq) {
                    ('<', true) => Tok::Le,
                    ('<', false) => Tok::Lt,
                    ('>', true) => Tok::Ge,
                    _ => Tok::Gt,
                }
            }
            '-' => return Err(Error::Parse { pos: i, message: "negative constant".into() }),
            d if d.is_ascii_digit() => {
                while i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..=i]
                    .parse()
                    .map_err(|_| Error::Parse { pos: start, message: "constant too large".into() })?;
                Tok::Num(n)
            }
            a if a.is_alphabetic() || a == '_' => {
                while i + 1 < b.len() && ((b[i + 1] as char).is_alphanumeric() || b[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(src[start..=i].to_string())
            }
            other => return Err(Error::Parse { pos: i, message: format!("unexpected character {other:?}") }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

enum Operand {
    Clock(usize),
    Const(u64),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    clocks: &'a [String],
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Guard> {
        let mut g = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            g = Guard::and(g, self.unary()?);
        }
        Ok(g)
    }

    fn unary(&mut self) -> Result<Guard> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(Guard::not(self.unary()?))
            }
            Some(Tok::Open) => {
                self.at += 1;
                let g = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return self.err("expected ')'");
                }
                self.at += 1;
                Ok(g)
            }
            _ => self.atom(),
        }
    }

    fn operand(&mut self) -> Result<Operand> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match self.clocks.iter().position(|c| *c == name) {
                    Some(i) => Ok(Operand::Clock(i)),
                    None => Err(Error::Parse { pos, message: format!("undeclared clock {name}") }),
                }
            }
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Operand::Const(n))
            }
            _ => self.err("expected a clock or a constant"),
        }
    }

    fn atom(&mut self) -> Result<Guard> {
        let lhs = self.operand()?;
        let op = match self.peek() {
            Some(t @ (Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt)) => t.clone(),
            _ => return self.err("expected a comparison"),
        };
        self.at += 1;
        let rhs = self.operand()?;
        use Operand::{Clock, Const};
        let g = match (lhs, op, rhs) {
            (Clock(c), Tok::Le, Const(r)) | (Const(r), Tok::Ge, Clock(c)) => Guard::Le(c, r),
            (Const(r), Tok::Le, Clock(c)) | (Clock(c), Tok::Ge, Const(r)) => Guard::Ge(r, c),
            (Clock(c), Tok::Lt, Const(r)) | (Const(r), Tok::Gt, Clock(c)) => Guard::not(Guard::Ge(r, c)),
            (Const(r), Tok::Lt, Clock(c)) | (Clock(c), Tok::Gt, Const(r)) => Guard::not(Guard::Le(c, r)),
            _ => return self.err("comparisons relate one clock and one constant"),
        };
        Ok(g)
    }
}

/// Parses `c <= 2 & !(1 <= d)`; `<`, `>`, `>=` desugar into the two base comparisons.
pub fn parse_guard(src: &str, clocks: &[String]) -> Result<Guard> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, end: src.len(), clocks };
    let g = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clocks() -> Vec<String> {
        vec!["c".into(), "d".into()]
    }

    #[test]
    fn parses_and_desugars() {
        let cs = clocks();
        assert_eq!(parse_guard("c <= 0", &cs).unwrap(), Guard::Le(0, 0));
        assert_eq!(parse_guard("2 <= d", &cs).unwrap(), Guard::Ge(2, 1));
        assert_eq!(parse_guard("c < 2", &cs).unwrap(), Guard::not(Guard::Ge(2, 0)));
        assert_eq!(parse_guard("c > 1", &cs).unwrap(), Guard::not(Guard::Le(0, 1)));
        assert_eq!(parse_guard("c >= 1", &cs).unwrap(), Guard::Ge(1, 0));
        let g = parse_guard("!(c <= 0) & (d <= 3 && 1 <= c)", &cs).unwrap();
        assert_eq!(g.max_constant(), 3);
        assert_eq!(parse_guard(&g.render(&cs), &cs).unwrap(), g);
    }

    #[test]
    fn errors_carry_positions() {
        let cs = clocks();
        assert!(matches!(parse_guard("x <= 1", &cs), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_guard("c <= -1", &cs), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_guard("c <= ", &cs), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_guard("c <= 1 )", &cs), Err(Error::Parse { pos: 7, .. })));
        assert!(matches!(parse_guard("1 <= 2", &cs), Err(Error::Parse { .. })));
    }

    #[test]
    fn evaluation() {
        assert!(eval_guard(&Guard::Le(0, 0), &[0]));
        assert!(!eval_guard(&Guard::not(Guard::Le(0, 0)), &[0]));
        // capped value still satisfies lower bounds below the cap
        assert!(eval_guard(&Guard::Ge(2, 0), &[3]));
        assert!(!eval_guard(&Guard::and(Guard::Le(0, 0), Guard::Ge(1, 0)), &[0]));
    }
}
