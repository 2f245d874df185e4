//! Text grammar for scalars:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' uint)?
//! base   := '(' expr ')' | uint | 'i' | name
//! ```
//!
//! A leading minus on a literal covers the `['-'] uint ['/' uint]` rational form. `l` and
//! `m` are accepted for `λ` and `μ`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{GaussRational, Polynomial, RationalFunction, ScalarError, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

/// Maps ASCII aliases to the canonical Unicode names.
pub fn canonical_name(name: &str) -> &str {
    match name {
        "l" | "lambda" => "λ",
        "m" | "mu" => "μ",
        "tau" => "τ",
        other => other,
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ScalarError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().expect("digits")), start));
                continue;
            }
            a if a.is_alphabetic() => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Name(s), start));
                continue;
            }
            other => {
                return Err(ScalarError::Syntax {
                    position: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, S> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    allowed: &'a [S],
}

impl<'a, S: AsRef<str>> Parser<'a, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<RationalFunction, ScalarError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, ScalarError> {
        let mut acc = self.factor()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Star => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(ScalarError::DivisionByZero { position: at });
                    }
                    acc = &acc / &d;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RationalFunction, ScalarError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let b = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let at = self.here();
            match self.toks.get(self.pos) {
                Some((Tok::Int(n), _)) => {
                    let e: u32 = n.try_into().map_err(|_| ScalarError::Syntax {
                        position: at,
                        message: "exponent too large".into(),
                    })?;
                    self.pos += 1;
                    return Ok(b.pow(e));
                }
                _ => {
                    return Err(ScalarError::Syntax {
                        position: at,
                        message: "expected unsigned integer exponent".into(),
                    })
                }
            }
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<RationalFunction, ScalarError> {
        let at = self.here();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(ScalarError::Syntax {
                position: at,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ScalarError::Syntax {
                        position: self.here(),
                        message: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Int(n) => Ok(RationalFunction::constant(GaussRational::from_rational(
                BigRational::from_integer(n),
            ))),
            Tok::Name(n) if n == "i" => Ok(RationalFunction::constant(GaussRational::i())),
            Tok::Name(n) => {
                let name = canonical_name(&n);
                if self.allowed.iter().any(|a| canonical_name(a.as_ref()) == name) {
                    Ok(RationalFunction::from_poly(Polynomial::var(Var::new(name))))
                } else {
                    Err(ScalarError::UnknownName {
                        name: n,
                        position: at,
                    })
                }
            }
            other => Err(ScalarError::Syntax {
                position: at,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parses a scalar over ℚ(i) in the listed indeterminates.
pub fn parse_scalar<S: AsRef<str>>(text: &str, allowed: &[S]) -> Result<RationalFunction, ScalarError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        allowed,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ScalarError::Syntax {
            position: p.here(),
            message: "trailing input".into(),
        });
    }
    Ok(v)
}

/// Parses a constant (no indeterminates).
pub fn parse_constant(text: &str) -> Result<GaussRational, ScalarError> {
    let f = parse_scalar::<&str>(text, &[])?;
    Ok(f.as_constant().expect("no indeterminates allowed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const VARS: [&str; 3] = ["t", "λ", "μ"];

    #[test]
    fn gaussian_constant() {
        let c = parse_scalar("3/2 + 1/2*i", &VARS).unwrap().as_constant().unwrap();
        assert_eq!(c.re(), &BigRational::new(3.into(), 2.into()));
        assert_eq!(c.im(), &BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn negated_fraction() {
        let f = parse_scalar("-(1)/((1-λ)*(1+λ)*t^2)", &VARS).unwrap();
        let d = parse_scalar("(1-λ)*(1+λ)*t^2", &VARS).unwrap();
        assert_eq!(&f * &d, RationalFunction::from_int(-1));
        assert_eq!(f.numer().to_string(), "1");
        assert_eq!(f.denom().to_string(), "t^2*λ^2 - t^2");
    }

    #[test]
    fn aliases() {
        assert_eq!(parse_scalar("l*m", &VARS).unwrap(), parse_scalar("λ*μ", &VARS).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_scalar("t/0", &VARS),
            Err(ScalarError::DivisionByZero { position: 2 })
        );
        assert_eq!(
            parse_scalar("1 + x", &VARS),
            Err(ScalarError::UnknownName { name: "x".into(), position: 4 })
        );
        assert!(matches!(parse_scalar("(1+t", &VARS), Err(ScalarError::Syntax { position: 4, .. })));
        assert!(matches!(parse_scalar("2 $", &VARS), Err(ScalarError::Syntax { position: 2, .. })));
        assert!(matches!(parse_scalar("t^λ", &VARS), Err(ScalarError::Syntax { position: 2, .. })));
    }

    #[test]
    fn precedence() {
        let a = parse_scalar("-t^2", &VARS).unwrap();
        let b = parse_scalar("0 - t*t", &VARS).unwrap();
        assert_eq!(a, b);
        let c = parse_scalar("1/2*t", &VARS).unwrap();
        let d = parse_scalar("t/2", &VARS).unwrap();
        assert_eq!(c, d);
    }
}
