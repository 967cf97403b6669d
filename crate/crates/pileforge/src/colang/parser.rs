//! Recursive-descent parser for the concrete coformula syntax, one token of
//! lookahead. Round-trips with the `Display` pretty-printer.

use super::CoFormula;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    LeqSym,    // <=
    SqsubSym,  // [=
    EqSym,     // =
    Arrow,     // ->
    Amp,       // &
    Pipe,      // |
    LParen,
    RParen,
    Comma,
    Dot,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Tok, usize, usize)> {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'.' => {
                self.bump();
                Tok::Dot
            }
            b'&' => {
                self.bump();
                Tok::Amp
            }
            b'|' => {
                self.bump();
                Tok::Pipe
            }
            b'<' => {
                self.bump();
                if self.peek() == Some(b'=') {
                    self.bump();
                    Tok::LeqSym
                } else {
                    return Err(self.err("expected '=' after '<'"));
                }
            }
            b'[' => {
                self.bump();
                if self.peek() == Some(b'=') {
                    self.bump();
                    Tok::SqsubSym
                } else {
                    return Err(self.err("expected '=' after '['"));
                }
            }
            b'-' => {
                self.bump();
                if self.peek() == Some(b'>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    return Err(self.err("expected '>' after '-'"));
                }
            }
            b'=' => {
                self.bump();
                Tok::EqSym
            }
            b'0'..=b'9' => {
                let mut n = 0usize;
                while let Some(d) = self.peek() {
                    if d.is_ascii_digit() {
                        n = n * 10 + usize::from(d - b'0');
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while let Some(d) = self.peek() {
                    if d.is_ascii_alphanumeric() || d == b'_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            other => return Err(self.err(format!("unexpected character {:?}", other as char))),
        };
        Ok((tok, line, col))
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> Error {
        let (_, line, col) = self.toks[self.pos];
        Error::Syntax { line, col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}, found {:?}", self.peek())))
        }
    }

    /// Splits identifiers of the shape `G<digits>`.
    fn as_gn(ident: &str) -> Option<usize> {
        let rest = ident.strip_prefix('G')?;
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        rest.parse().ok()
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            other => Err(self.err_here(format!("expected {what}, found {other:?}"))),
        }
    }

    fn var(&mut self) -> Result<String> {
        let name = self.ident("a variable")?;
        if Self::as_gn(&name).is_some() || name == "Gp" || Self::is_keyword(&name) {
            return Err(self.err_here(format!("{name} is reserved and cannot be a variable")));
        }
        Ok(name)
    }

    fn is_keyword(s: &str) -> bool {
        matches!(s, "exists" | "forall" | "in" | "not" | "P")
    }

    fn formula(&mut self) -> Result<CoFormula> {
        match self.peek() {
            Tok::Ident(s) if s == "exists" || s == "forall" => {
                let is_exists = s == "exists";
                self.bump();
                let v = self.var()?;
                let kw = self.ident("'in'")?;
                if kw != "in" {
                    return Err(self.err_here("expected 'in' after the quantified variable"));
                }
                let bound = match self.bump() {
                    Tok::Ident(g) => Self::as_gn(&g)
                        .ok_or_else(|| self.err_here("expected a bound of the form Gn"))?,
                    other => {
                        return Err(self.err_here(format!("expected Gn bound, found {other:?}")))
                    }
                };
                self.expect(Tok::Dot, "'.'")?;
                let body = self.formula()?;
                Ok(if is_exists {
                    CoFormula::exists(v, bound, body)
                } else {
                    CoFormula::forall(v, bound, body)
                })
            }
            _ => self.implies(),
        }
    }

    fn implies(&mut self) -> Result<CoFormula> {
        let lhs = self.or()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rhs = self.formula_after_arrow()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    /// The right side of `->` may be another implication or a quantifier.
    fn formula_after_arrow(&mut self) -> Result<CoFormula> {
        self.formula()
    }

    fn or(&mut self) -> Result<CoFormula> {
        let mut lhs = self.and()?;
        while self.peek() == &Tok::Pipe {
            self.bump();
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<CoFormula> {
        let mut lhs = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CoFormula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "not" => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Ident(s) if s == "exists" || s == "forall" => self.formula(),
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<CoFormula> {
        match self.bump() {
            Tok::Ident(s) if s == "P" => {
                self.expect(Tok::LParen, "'('")?;
                let a = self.var()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.var()?;
                self.expect(Tok::Comma, "','")?;
                let c = self.var()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(CoFormula::P(a, b, c))
            }
            Tok::Ident(s) if s == "Gp" => {
                self.expect(Tok::LParen, "'('")?;
                let label = self.ident("a prime label")?;
                self.expect(Tok::Comma, "','")?;
                let n = match self.bump() {
                    Tok::Num(n) => n,
                    other => {
                        return Err(self.err_here(format!("expected arity, found {other:?}")))
                    }
                };
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::LParen, "'('")?;
                let mut args = vec![self.var()?];
                while self.peek() == &Tok::Comma {
                    self.bump();
                    args.push(self.var()?);
                }
                self.expect(Tok::RParen, "')'")?;
                if args.len() != n {
                    return Err(self.err_here(format!(
                        "Gp arity mismatch: declared {n}, got {} arguments",
                        args.len()
                    )));
                }
                Ok(CoFormula::Gpn(label, n, args))
            }
            Tok::Ident(s) => {
                if let Some(n) = Self::as_gn(&s) {
                    self.expect(Tok::LParen, "'('")?;
                    let v = self.var()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(CoFormula::Gn(n, v));
                }
                if Self::is_keyword(&s) || s == "Gp" {
                    return Err(self.err_here(format!("unexpected keyword {s}")));
                }
                // infix atom: v <= w, v [= w, v = w
                let lhs = s;
                match self.bump() {
                    Tok::LeqSym => Ok(CoFormula::Leq(lhs, self.var()?)),
                    Tok::SqsubSym => Ok(CoFormula::Sqsub(lhs, self.var()?)),
                    Tok::EqSym => Ok(CoFormula::Eq(lhs, self.var()?)),
                    other => Err(self.err_here(format!(
                        "expected '<=', '[=' or '=' after {lhs}, found {other:?}"
                    ))),
                }
            }
            other => Err(self.err_here(format!("expected an atom, found {other:?}"))),
        }
    }
}

/// Parses a coformula from its concrete syntax.
pub fn parse(text: &str) -> Result<CoFormula> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let eof = t.0 == Tok::Eof;
        toks.push(t);
        if eof {
            break;
        }
    }
    let mut parser = Parser { toks, pos: 0 };
    let formula = parser.formula()?;
    if parser.peek() != &Tok::Eof {
        return Err(parser.err_here("trailing input after the formula"));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_examples() {
        let f = parse("exists v0 in G2 . P(v0,v0,v0)").unwrap();
        assert!(matches!(f, CoFormula::Exists(_, 2, _)));
        let f = parse("Gp(p,2)(v0,v1)").unwrap();
        assert_eq!(f, CoFormula::Gpn("p".into(), 2, vec!["v0".into(), "v1".into()]));
    }

    #[test]
    fn unbalanced_paren_reports_position() {
        let err = parse("(v0 = v1").unwrap_err();
        match err {
            Error::Syntax { col, .. } => assert!(col >= 8),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_not_and_or_implies() {
        let f = parse("not v = w & u = w | v <= u -> v [= w").unwrap();
        // ((not(v=w) & u=w) | v<=u) -> v[=w
        assert!(matches!(f, CoFormula::Implies(_, _)));
        let printed = f.to_string();
        assert_eq!(parse(&printed).unwrap(), f);
    }

    #[test]
    fn reserved_names_rejected_as_variables() {
        assert!(parse("G2 = v").is_err());
        assert!(parse("exists Gp in G1 . Gp = Gp").is_err());
    }
}
