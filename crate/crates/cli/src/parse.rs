//! Operator-expression and degree-vector parsing.
//!
//! ```text
//! expr := ['+'|'-'] term (('+'|'-') term)*  |  '0'
//! term := [rational '*'] atom
//! atom := 'L(' int ')' | 'E(' nat ',' nat ';' int ')'
//! ```
//! Rationals are `p/q` or integers; whitespace is ignored.

use std::str::FromStr;

use num_traits::{One, Zero};
use sgl_core::{BasisTerm, OperatorExpr, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("index E({i},{j};..) out of range for rank {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.err(format!("expected '{want}', found '{c}'")),
            None => self.err(format!("expected '{want}', found end of input")),
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        let neg = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let d = self.digits();
        if d.is_empty() {
            self.pos = start;
            return self.err("expected an integer");
        }
        let v: i64 = d.parse().map_err(|_| ParseError::Syntax {
            pos: start,
            msg: "integer out of range".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let d = self.digits();
        if d.is_empty() {
            return self.err("expected a positive index");
        }
        d.parse().map_err(|_| ParseError::Syntax {
            pos: start,
            msg: "index out of range".into(),
        })
    }

    fn atom(&mut self) -> Result<BasisTerm, ParseError> {
        match self.peek() {
            Some('L') => {
                self.bump();
                self.expect('(')?;
                let r = self.int()?;
                self.expect(')')?;
                Ok(BasisTerm::L(r))
            }
            Some('E') => {
                self.bump();
                self.expect('(')?;
                let i = self.nat()?;
                self.expect(',')?;
                let j = self.nat()?;
                self.expect(';')?;
                let s = self.int()?;
                self.expect(')')?;
                Ok(BasisTerm::E { i, j, s })
            }
            Some(c) => self.err(format!("expected 'L(' or 'E(', found '{c}'")),
            None => self.err("expected 'L(' or 'E(', found end of input"),
        }
    }

    fn term(&mut self) -> Result<(Rational, BasisTerm), ParseError> {
        let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let start = self.pos;
            let mut text = self.digits();
            if self.peek() == Some('/') {
                self.bump();
                let den = self.digits();
                if den.is_empty() {
                    return self.err("expected a denominator");
                }
                text = format!("{text}/{den}");
            }
            let c = Rational::from_str(&text).map_err(|_| ParseError::Syntax {
                pos: start,
                msg: format!("bad rational '{text}'"),
            })?;
            self.expect('*')?;
            c
        } else {
            Rational::one()
        };
        Ok((coeff, self.atom()?))
    }
}

/// Parses an operator expression at rank `n`; repeated basis terms are merged.
pub fn parse_expr(text: &str, n: usize) -> Result<OperatorExpr, ParseError> {
    let mut cur = Cursor { src: text, pos: 0 };
    let mut expr = OperatorExpr::new(n);
    if text.trim() == "0" {
        return Ok(expr);
    }
    let mut first = true;
    loop {
        let sign = match cur.peek() {
            Some('+') => {
                cur.bump();
                Rational::one()
            }
            Some('-') => {
                cur.bump();
                -Rational::one()
            }
            None if first => return cur.err("empty expression"),
            Some(c) if !first => return cur.err(format!("expected '+' or '-', found '{c}'")),
            _ => Rational::one(),
        };
        let (c, t) = cur.term()?;
        if let BasisTerm::E { i, j, .. } = t {
            if !t.is_valid(n) {
                return Err(ParseError::IndexOutOfRange { i, j, n });
            }
        }
        let c = c * sign;
        if !c.is_zero() {
            expr.add_term(t, c);
        }
        first = false;
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(expr)
}

/// Comma-separated integers, e.g. `2,-1`.
pub fn parse_degrees(text: &str) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let t = part.trim();
        let v = t.parse().map_err(|_| ParseError::Syntax {
            pos: offset,
            msg: format!("expected an integer, found '{t}'"),
        })?;
        out.push(v);
        offset += part.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgl_core::laurent::{rat, ratio};

    #[test]
    fn two_terms() {
        let e = parse_expr("L(2) - 3*E(1,1;0)", 1).unwrap();
        assert_eq!(e.len(), 2);
        let terms: Vec<_> = e.terms().map(|(t, c)| (*t, c.clone())).collect();
        assert_eq!(terms[0], (BasisTerm::L(2), rat(1)));
        assert_eq!(terms[1], (BasisTerm::E { i: 1, j: 1, s: 0 }, rat(-3)));
    }

    #[test]
    fn rational_coefficient() {
        let e = parse_expr("1/2*L(-1)", 1).unwrap();
        let terms: Vec<_> = e.terms().collect();
        assert_eq!(terms, vec![(&BasisTerm::L(-1), &ratio(1, 2))]);
    }

    #[test]
    fn index_out_of_range() {
        assert_eq!(
            parse_expr("E(3,1;0)", 2),
            Err(ParseError::IndexOutOfRange { i: 3, j: 1, n: 2 })
        );
        assert!(parse_expr("E(0,1;0)", 2).is_err());
    }

    #[test]
    fn duplicates_merge_and_cancel() {
        let e = parse_expr("L(1) + 2*L(1) - E(1,2;3)", 2).unwrap();
        assert_eq!(e.to_string(), "3*L(1) - E(1,2;3)");
        assert!(parse_expr("L(1) - L(1)", 1).unwrap().is_zero());
        assert!(parse_expr(" 0 ", 1).unwrap().is_zero());
    }

    #[test]
    fn whitespace_insignificant() {
        assert_eq!(parse_expr(" - 2 / 3 * E ( 1 , 2 ; - 4 ) ", 2).unwrap(), parse_expr("-2/3*E(1,2;-4)", 2).unwrap());
    }

    #[test]
    fn syntax_errors_carry_position() {
        for (src, pos) in [("L(2) +", 6), ("L(x)", 2), ("3 L(1)", 2), ("L(1) L(2)", 5), ("", 0), ("1/*L(1)", 2)] {
            match parse_expr(src, 1) {
                Err(ParseError::Syntax { pos: p, .. }) => assert_eq!(p, pos, "{src:?}"),
                other => panic!("{src:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let e = parse_expr("-1/2*L(-3) + E(2,1;5) - 7*E(1,1;0)", 2).unwrap();
        assert_eq!(parse_expr(&e.to_string(), 2).unwrap(), e);
    }

    #[test]
    fn degrees() {
        assert_eq!(parse_degrees("2,-1").unwrap(), vec![2, -1]);
        assert_eq!(parse_degrees(" 3 ").unwrap(), vec![3]);
        assert!(parse_degrees("1,,2").is_err());
    }
}
