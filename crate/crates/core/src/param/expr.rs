//! Parser and extended-precision evaluator for parameter expressions.
//!
//! Grammar: integers, decimals, `p/q`, `sqrt(n)`, `pi`, `e`, the four binary
//! operators, unary minus and parentheses. Numbers are carried either exactly
//! (as rationals) or as fixed-point approximations `n / 2^PREC` with an
//! absolute error bound in ulps, tagged as certified irrational.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ParamError;

/// Fixed-point fraction bits used while evaluating expressions.
pub const PREC: u32 = 512;
const GUARD: u32 = 32;

#[derive(Clone, Debug)]
pub(crate) enum Num {
    Exact(BigRational),
    /// `mant / 2^PREC` with `|true - mant / 2^PREC| <= err / 2^PREC`.
    Irrational { mant: BigInt, err: BigInt },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParamError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push((start, Tok::Num(chars[start..i].iter().collect())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else if c == '(' {
            out.push((i, Tok::LParen));
            i += 1;
        } else if c == ')' {
            out.push((i, Tok::RParen));
            i += 1;
        } else {
            return Err(ParamError::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParamError> {
        Err(ParamError::Parse { pos: self.here(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Num, ParamError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { add(lhs, rhs)? } else { add(lhs, neg(rhs))? };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Num, ParamError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let at = self.here();
            let rhs = self.unary()?;
            lhs = if op == '*' { mul(lhs, rhs)? } else { div(lhs, rhs, at)? };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Num, ParamError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Num, ParamError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Num(s) => {
                let v = parse_decimal(&s).ok_or(ParamError::Parse {
                    pos: self.here(),
                    msg: format!("bad number '{s}'"),
                })?;
                self.pos += 1;
                Ok(Num::Exact(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => Ok(Num::Irrational { mant: pi_fixed(), err: BigInt::from(2) }),
                    "e" => Ok(Num::Irrational { mant: e_fixed(), err: BigInt::from(2) }),
                    "sqrt" => {
                        if self.peek() != Some(&Tok::LParen) {
                            return self.err("expected '(' after sqrt");
                        }
                        self.pos += 1;
                        let at = self.here();
                        let arg = self.expr()?;
                        if self.peek() != Some(&Tok::RParen) {
                            return self.err("expected ')'");
                        }
                        self.pos += 1;
                        match arg {
                            Num::Exact(r) => sqrt_exact(r, at),
                            Num::Irrational { .. } => Err(ParamError::CannotCertify(
                                "sqrt of an irrational subexpression".into(),
                            )),
                        }
                    }
                    other => Err(ParamError::Parse {
                        pos: self.toks[self.pos - 1].0,
                        msg: format!("unknown identifier '{other}'"),
                    }),
                }
            }
            Tok::Op(c) => self.err(format!("unexpected operator '{c}'")),
            Tok::RParen => self.err("unexpected ')'"),
        }
    }
}

pub(crate) fn evaluate(src: &str) -> Result<Num, ParamError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, len: src.chars().count() };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = BigInt::from(10u8).pow(frac.len() as u32);
    Some(BigRational::new(n, d))
}

fn to_fixed(r: &BigRational) -> BigInt {
    (r.numer() << PREC).div_floor(r.denom())
}

fn neg(x: Num) -> Num {
    match x {
        Num::Exact(r) => Num::Exact(-r),
        Num::Irrational { mant, err } => Num::Irrational { mant: -mant, err },
    }
}

fn add(x: Num, y: Num) -> Result<Num, ParamError> {
    Ok(match (x, y) {
        (Num::Exact(a), Num::Exact(b)) => Num::Exact(a + b),
        (Num::Exact(r), Num::Irrational { mant, err }) | (Num::Irrational { mant, err }, Num::Exact(r)) => {
            Num::Irrational { mant: mant + to_fixed(&r), err: err + 1 }
        }
        _ => return Err(ParamError::CannotCertify("sum of two irrational terms".into())),
    })
}

fn mul(x: Num, y: Num) -> Result<Num, ParamError> {
    Ok(match (x, y) {
        (Num::Exact(a), Num::Exact(b)) => Num::Exact(a * b),
        (Num::Exact(r), Num::Irrational { mant, err }) | (Num::Irrational { mant, err }, Num::Exact(r)) => {
            if r.is_zero() {
                return Ok(Num::Exact(r));
            }
            // r * mant is computed exactly then floored; the error scales by |r|.
            let m = (r.numer() * &mant).div_floor(r.denom());
            let scaled_err = (r.numer().abs() * err).div_ceil(r.denom()) + 1;
            Num::Irrational { mant: m, err: scaled_err }
        }
        _ => return Err(ParamError::CannotCertify("product of two irrational factors".into())),
    })
}

fn div(x: Num, y: Num, at: usize) -> Result<Num, ParamError> {
    match (x, y) {
        (_, Num::Exact(b)) if b.is_zero() => Err(ParamError::Parse { pos: at, msg: "division by zero".into() }),
        (Num::Exact(a), Num::Exact(b)) => Ok(Num::Exact(a / b)),
        (Num::Irrational { mant, err }, Num::Exact(r)) => mul(Num::Irrational { mant, err }, Num::Exact(r.recip())),
        (Num::Exact(r), Num::Irrational { mant, err }) => {
            if r.is_zero() {
                return Ok(Num::Exact(r));
            }
            let lo = mant.abs() - &err;
            if lo.sign() != Sign::Plus {
                return Err(ParamError::PrecisionExhausted);
            }
            // r / (m / 2^P) = r * 2^(2P) / m in fixed point.
            let num = r.numer() << (2 * PREC);
            let den = r.denom() * &mant;
            let q = num.div_floor(&den);
            // |d(1/m)| <= err / lo^2, scaled by |r| 2^(2P).
            let e = (r.numer().abs() << (2 * PREC)) * &err;
            let e = e.div_ceil(&(r.denom() * &lo * &lo)) + 2;
            Ok(Num::Irrational { mant: q, err: e })
        }
        _ => Err(ParamError::CannotCertify("quotient of two irrational terms".into())),
    }
}

fn is_square(n: &BigInt) -> bool {
    let r = n.sqrt();
    &(&r * &r) == n
}

fn sqrt_exact(r: BigRational, at: usize) -> Result<Num, ParamError> {
    if r.is_negative() {
        return Err(ParamError::Parse { pos: at, msg: "sqrt of a negative number".into() });
    }
    let (n, d) = (r.numer().clone(), r.denom().clone());
    if is_square(&n) && is_square(&d) {
        return Ok(Num::Exact(BigRational::new(n.sqrt(), d.sqrt())));
    }
    // sqrt(n/d) * 2^P = isqrt(n * 2^(2P) / d)
    let s = ((n << (2 * PREC)) / d).sqrt();
    Ok(Num::Irrational { mant: s, err: BigInt::from(2) })
}

fn arctan_inv(x: u64, bits: u32) -> BigInt {
    // arctan(1/x) = sum (-1)^k / ((2k+1) x^(2k+1))
    let one = BigInt::one() << bits;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = one / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

fn pi_fixed() -> BigInt {
    let bits = PREC + GUARD;
    let pi = (arctan_inv(5, bits) * 16) - (arctan_inv(239, bits) * 4);
    pi >> GUARD
}

fn e_fixed() -> BigInt {
    let bits = PREC + GUARD;
    let mut term = BigInt::one() << bits;
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term;
        term /= BigInt::from(k);
        k += 1;
    }
    sum >> GUARD
}
