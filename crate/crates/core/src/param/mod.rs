//! The jump parameter `a` and the number theory that drives the case splits.

mod expr;
pub mod hp;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use expr::{Num, PREC};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("a = {0} is outside (-1, 1)")]
    OutOfRange(String),
    #[error("cannot certify irrationality: {0}")]
    CannotCertify(String),
    #[error("parameter is rational")]
    NotIrrational,
    #[error("extended precision exhausted")]
    PrecisionExhausted,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamKind {
    /// `p/q` in lowest terms with `q > 0` and `|p| < q`.
    Rational { p: i64, q: i64 },
    /// Fixed-point approximation `mant / 2^PREC`, accurate to `err` ulps.
    Irrational { mant: BigInt, err: BigInt, source: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamA {
    value: f64,
    kind: ParamKind,
}

impl ParamA {
    pub fn parse(src: &str) -> Result<Self, ParamError> {
        match expr::evaluate(src)? {
            Num::Exact(r) => {
                let p = r.numer().to_i64().ok_or(ParamError::Overflow)?;
                let q = r.denom().to_i64().ok_or(ParamError::Overflow)?;
                Self::rational(p, q)
            }
            Num::Irrational { mant, err } => {
                if err.bits() > u64::from(PREC) - 200 {
                    return Err(ParamError::PrecisionExhausted);
                }
                let one = BigInt::one() << PREC;
                if &mant.abs() + &err >= one {
                    return Err(ParamError::OutOfRange(src.trim().to_string()));
                }
                let value = hp::to_f64(&BigRational::new(mant.clone(), one));
                Ok(ParamA {
                    value,
                    kind: ParamKind::Irrational { mant, err, source: src.trim().to_string() },
                })
            }
        }
    }

    pub fn rational(p: i64, q: i64) -> Result<Self, ParamError> {
        if q == 0 {
            return Err(ParamError::Parse { pos: 0, msg: "zero denominator".into() });
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        if p.abs() >= q {
            return Err(ParamError::OutOfRange(format!("{p}/{q}")));
        }
        Ok(ParamA { value: p as f64 / q as f64, kind: ParamKind::Rational { p, q } })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn kind(&self) -> &ParamKind {
        &self.kind
    }

    pub fn as_ratio(&self) -> Option<(i64, i64)> {
        match self.kind {
            ParamKind::Rational { p, q } => Some((p, q)),
            ParamKind::Irrational { .. } => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_ratio().is_some()
    }

    /// Exact value for rational `a`, the extended-precision approximation otherwise.
    pub fn hp(&self) -> BigRational {
        match &self.kind {
            ParamKind::Rational { p, q } => BigRational::new(BigInt::from(*p), BigInt::from(*q)),
            ParamKind::Irrational { mant, .. } => BigRational::new(mant.clone(), BigInt::one() << PREC),
        }
    }

    /// `-a`, keeping the exactness information.
    pub fn negate(&self) -> ParamA {
        let kind = match &self.kind {
            ParamKind::Rational { p, q } => ParamKind::Rational { p: -p, q: *q },
            ParamKind::Irrational { mant, err, source } => ParamKind::Irrational {
                mant: -mant,
                err: err.clone(),
                source: format!("-({source})"),
            },
        };
        ParamA { value: -self.value, kind }
    }

    /// Jump point `pi a / 2`.
    pub fn jump_point(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 * self.value
    }
}

impl FromStr for ParamA {
    type Err = ParamError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamA::parse(s)
    }
}

impl fmt::Display for ParamA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParamKind::Rational { p, q: 1 } => write!(f, "{p}"),
            ParamKind::Rational { p, q } => write!(f, "{p}/{q}"),
            ParamKind::Irrational { source, .. } => f.write_str(source),
        }
    }
}

#[derive(Serialize)]
struct ParamView<'a> {
    expr: String,
    value: f64,
    rational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<&'a str>,
}

impl Serialize for ParamA {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (p, q, source) = match &self.kind {
            ParamKind::Rational { p, q } => (Some(*p), Some(*q), None),
            ParamKind::Irrational { source, .. } => (None, None, Some(source.as_str())),
        };
        ParamView { expr: self.to_string(), value: self.value, rational: self.is_rational(), p, q, source }
            .serialize(s)
    }
}

/// `m(1+a)/(1-a)` is an integer (it is positive whenever it is).
pub fn is_exceptional_minus(a: &ParamA, m: u64) -> bool {
    match a.kind {
        ParamKind::Rational { p, q } => {
            let (p, q, m) = (i128::from(p), i128::from(q), i128::from(m));
            (m * (q + p)) % (q - p) == 0
        }
        ParamKind::Irrational { .. } => false,
    }
}

/// `m(1-a)/(1+a)` is an integer.
pub fn is_exceptional_plus(a: &ParamA, m: u64) -> bool {
    is_exceptional_minus(&a.negate(), m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroClassCase {
    ZeroEigenvalue,
    Generic,
    ExceptionalOdd,
    ExceptionalEven,
}

/// Case split for the class-0 eigenvalue `(2m)^2`.
///
/// The integrality test on `m a` is over Z, so negative `a` with `q | m` is
/// exceptional as well; that is where `sin(m pi a)` vanishes.
pub fn zero_class_case(a: &ParamA, m: u64) -> ZeroClassCase {
    if m == 0 {
        return ZeroClassCase::ZeroEigenvalue;
    }
    match a.kind {
        ParamKind::Rational { p, q } => {
            let m = i128::from(m);
            let (p, q) = (i128::from(p), i128::from(q));
            if (m * p) % q != 0 {
                ZeroClassCase::Generic
            } else if (m + m * p / q).rem_euclid(2) == 1 {
                ZeroClassCase::ExceptionalOdd
            } else {
                ZeroClassCase::ExceptionalEven
            }
        }
        ParamKind::Irrational { .. } => ZeroClassCase::Generic,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergent {
    pub k: usize,
    pub p: i128,
    pub q: i128,
    pub error_bound: f64,
}

/// Continued-fraction convergents of an irrational `a`.
///
/// Partial quotients are read off both ends of the certified enclosure; the
/// expansion stops with `PrecisionExhausted` as soon as they disagree.
pub fn convergents(a: &ParamA, count: usize) -> Result<Vec<Convergent>, ParamError> {
    let ParamKind::Irrational { mant, err, .. } = &a.kind else {
        return Err(ParamError::NotIrrational);
    };
    let one = BigInt::one() << PREC;
    let mut lo = BigRational::new(mant - err, one.clone());
    let mut hi = BigRational::new(mant + err, one);
    let center = a.hp();
    let (mut p_prev, mut q_prev) = (0i128, 1i128);
    let (mut p_cur, mut q_cur) = (1i128, 0i128);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (f_lo, f_hi) = (lo.floor(), hi.floor());
        if f_lo != f_hi {
            return Err(ParamError::PrecisionExhausted);
        }
        let digit = f_lo.to_integer().to_i128().ok_or(ParamError::Overflow)?;
        let p_next = digit.checked_mul(p_cur).and_then(|v| v.checked_add(p_prev)).ok_or(ParamError::Overflow)?;
        let q_next = digit.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)).ok_or(ParamError::Overflow)?;
        (p_prev, q_prev, p_cur, q_cur) = (p_cur, q_cur, p_next, q_next);
        let approx = BigRational::new(BigInt::from(p_cur), BigInt::from(q_cur));
        let error_bound = hp::to_f64(&(&center - approx).abs());
        out.push(Convergent { k, p: p_cur, q: q_cur, error_bound });

        let r_lo = &lo - &f_lo;
        let r_hi = &hi - &f_hi;
        if !r_lo.is_positive() || r_hi.is_zero() {
            if k + 1 < count {
                return Err(ParamError::PrecisionExhausted);
            }
            break;
        }
        (lo, hi) = (r_hi.recip(), r_lo.recip());
    }
    Ok(out)
}

pub fn convergents_csv(convs: &[Convergent]) -> String {
    let mut s = String::from("k,p,q,error\n");
    for c in convs {
        s.push_str(&format!("{},{},{},{:.16e}\n", c.k, c.p, c.q, c.error_bound));
    }
    s
}
