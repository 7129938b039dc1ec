//! Recursive-descent parser for rule expressions: integer and `a/b`
//! literals, declared variable names, `+ - * / ^` with standard precedence,
//! parentheses and unary minus. Every value is carried as an exact fraction
//! of polynomials; contexts that need a plain polynomial reject non-constant
//! denominators at the end.

use num_bigint::BigInt;
use num_traits::One;

use super::{ParseError, ParseErrorKind};
use crate::poly::{MultiPoly, Rat};

/// Hard ceilings keeping parse-time arithmetic from exhausting memory on
/// hostile input. Rule expressions in practice are tiny.
const MAX_EXPONENT: u32 = 4096;
const MAX_TERMS: usize = 10_000;
const MAX_COEFF_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex(text: &str, line: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Spanned { tok: Tok::Plus, col });
                i += 1;
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, col });
                i += 1;
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, col });
                i += 1;
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, col });
                i += 1;
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, col });
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, col });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value = digits
                    .parse::<BigInt>()
                    .expect("digit runs parse as integers");
                out.push(Spanned {
                    tok: Tok::Int(value),
                    col,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    col,
                });
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                });
            }
        }
    }
    Ok(out)
}

/// Exact fraction of polynomials; the denominator is never the zero
/// polynomial.
#[derive(Debug, Clone)]
pub struct RationalExpr {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalExpr {
    fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.varcount());
        RationalExpr { num: p, den }
    }

    /// Reject a non-constant denominator; constants are divided through.
    pub fn into_poly(self, line: usize) -> Result<MultiPoly, ParseError> {
        match self.den.total_degree() {
            None => unreachable!("denominator is nonzero"),
            Some(0) => {
                let c = self.den.constant_term();
                Ok(self.num.scale(&(Rat::one() / c)))
            }
            Some(_) => Err(ParseError {
                line,
                col: 1,
                kind: ParseErrorKind::NonPolynomial,
            }),
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vars: &'a [String],
    line: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.col)
            .unwrap_or_else(|| self.toks.last().map(|s| s.col + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col(),
            kind,
        }
    }

    fn syntax(&self, msg: &str) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.to_string()))
    }

    fn check_size(&self, p: &MultiPoly) -> Result<(), ParseError> {
        if p.term_count() > MAX_TERMS {
            return Err(self.err(ParseErrorKind::ExpressionTooLarge));
        }
        for (_, c) in p.terms() {
            if c.numer().bits() > MAX_COEFF_BITS || c.denom().bits() > MAX_COEFF_BITS {
                return Err(self.err(ParseErrorKind::ExpressionTooLarge));
            }
        }
        Ok(())
    }

    fn checked_mul(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, ParseError> {
        let p = a
            .try_mul_bounded(b, MAX_TERMS)
            .map_err(|_| self.err(ParseErrorKind::ExpressionTooLarge))?;
        self.check_size(&p)?;
        Ok(p)
    }

    fn checked_pow(&self, a: &MultiPoly, e: u32) -> Result<MultiPoly, ParseError> {
        let mut acc = MultiPoly::one(a.varcount());
        for _ in 0..e {
            acc = self.checked_mul(&acc, a)?;
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<RationalExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.add(acc, rhs)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.add(acc, self.negate(rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = self.mul(acc, rhs)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let col = self.col();
                    let rhs = self.factor()?;
                    if rhs.num.is_zero() {
                        return Err(ParseError {
                            line: self.line,
                            col,
                            kind: ParseErrorKind::DivisionByZero,
                        });
                    }
                    let inverted = RationalExpr {
                        num: rhs.den,
                        den: rhs.num,
                    };
                    acc = self.mul(acc, inverted)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalExpr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.factor()?;
            return Ok(self.negate(inner));
        }
        let mut base = self.atom()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let e = self.exponent()?;
            base = RationalExpr {
                num: self.checked_pow(&base.num, e)?,
                den: self.checked_pow(&base.den, e)?,
            };
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Minus) => Err(self.err(ParseErrorKind::NegativeExponent)),
            Some(Tok::Int(v)) => {
                self.bump();
                let e = u32::try_from(&v)
                    .map_err(|_| self.err(ParseErrorKind::ExponentTooLarge(MAX_EXPONENT)))?;
                if e > MAX_EXPONENT {
                    return Err(self.err(ParseErrorKind::ExponentTooLarge(MAX_EXPONENT)));
                }
                Ok(e)
            }
            _ => Err(self.syntax("expected a nonnegative integer exponent after `^`")),
        }
    }

    fn atom(&mut self) -> Result<RationalExpr, ParseError> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.bump();
                Ok(RationalExpr::from_poly(MultiPoly::constant(
                    n,
                    Rat::from(v),
                )))
            }
            Some(Tok::Ident(name)) => {
                let col = self.col();
                self.bump();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(RationalExpr::from_poly(MultiPoly::var(n, i))),
                    None => Err(ParseError {
                        line: self.line,
                        col,
                        kind: ParseErrorKind::UnknownVariable(name),
                    }),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.syntax("expected `)`")),
                }
            }
            Some(_) => Err(self.syntax("expected a literal, variable or `(`")),
            None => Err(self.syntax("unexpected end of expression")),
        }
    }

    fn add(&self, a: RationalExpr, b: RationalExpr) -> Result<RationalExpr, ParseError> {
        // a/b + c/d = (ad + cb) / bd
        let num = self
            .checked_mul(&a.num, &b.den)?
            .add(&self.checked_mul(&b.num, &a.den)?);
        self.check_size(&num)?;
        let den = self.checked_mul(&a.den, &b.den)?;
        Ok(RationalExpr { num, den })
    }

    fn mul(&self, a: RationalExpr, b: RationalExpr) -> Result<RationalExpr, ParseError> {
        Ok(RationalExpr {
            num: self.checked_mul(&a.num, &b.num)?,
            den: self.checked_mul(&a.den, &b.den)?,
        })
    }

    fn negate(&self, a: RationalExpr) -> RationalExpr {
        RationalExpr {
            num: a.num.neg(),
            den: a.den,
        }
    }
}

fn parse_with(
    text: &str,
    vars: &[String],
    line: usize,
) -> Result<RationalExpr, ParseError> {
    let toks = lex(text, line)?;
    if toks.is_empty() {
        return Err(ParseError {
            line,
            col: 1,
            kind: ParseErrorKind::Syntax("empty expression".to_string()),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        line,
    };
    let value = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.syntax("trailing input after expression"));
    }
    Ok(value)
}

/// Parse a polynomial over the given variable names. Division is allowed
/// only by (expressions that evaluate to) nonzero constants.
pub fn parse_expr(text: &str, vars: &[String]) -> Result<MultiPoly, ParseError> {
    parse_expr_at(text, vars, 1)
}

pub(crate) fn parse_expr_at(
    text: &str,
    vars: &[String],
    line: usize,
) -> Result<MultiPoly, ParseError> {
    parse_with(text, vars, line)?.into_poly(line)
}

/// Parse a rational function as an exact (numerator, denominator) pair; no
/// simplification is performed.
pub fn parse_rational_expr(
    text: &str,
    vars: &[String],
) -> Result<(MultiPoly, MultiPoly), ParseError> {
    parse_rational_expr_at(text, vars, 1)
}

pub(crate) fn parse_rational_expr_at(
    text: &str,
    vars: &[String],
    line: usize,
) -> Result<(MultiPoly, MultiPoly), ParseError> {
    let v = parse_with(text, vars, line)?;
    Ok((v.num, v.den))
}

/// Parse a polynomial in window variables `x0..xk`, inferring the variable
/// count from the largest index mentioned. Constant expressions get one
/// variable.
pub fn parse_window_poly(text: &str) -> Result<MultiPoly, ParseError> {
    let toks = lex(text, 1)?;
    let mut max_index: Option<usize> = None;
    for s in &toks {
        if let Tok::Ident(name) = &s.tok {
            let idx = name
                .strip_prefix('x')
                .and_then(|rest| {
                    if rest.is_empty() || rest.chars().any(|c| !c.is_ascii_digit()) {
                        None
                    } else {
                        rest.parse::<usize>().ok()
                    }
                })
                .ok_or(ParseError {
                    line: 1,
                    col: s.col,
                    kind: ParseErrorKind::UnknownVariable(name.clone()),
                })?;
            max_index = Some(max_index.map_or(idx, |m| m.max(idx)));
        }
    }
    let varcount = max_index.map_or(1, |m| m + 1);
    let vars: Vec<String> = (0..varcount).map(|i| format!("x{i}")).collect();
    parse_expr(text, &vars)
}
