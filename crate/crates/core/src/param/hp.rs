//! Helpers for evaluating trig functions of exact or extended-precision
//! arguments without losing the fractional part.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer();
    let d = r.denom();
    let shift = 64 - (n.bits() as i64 - d.bits() as i64);
    let q: BigInt = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    let mut v = q.to_f64().unwrap_or(f64::NAN);
    // scale in steps to stay inside the exponent range
    let mut s = shift;
    while s != 0 {
        let step = s.clamp(-1000, 1000);
        v *= 2f64.powi(-step as i32);
        s -= step;
    }
    v
}

fn split_round(x: &BigRational) -> (BigInt, f64) {
    let n = x.round().to_integer();
    let r = x - BigRational::from_integer(n.clone());
    (n, to_f64(&r))
}

fn is_odd(n: &BigInt) -> bool {
    (n % 2u8).abs() == BigInt::from(1u8)
}

/// `sin(pi x)` with exact reduction of the integer part.
pub fn sin_pi(x: &BigRational) -> f64 {
    let (n, r) = split_round(x);
    let s = if r.abs() == 0.5 { r.signum() } else { (std::f64::consts::PI * r).sin() };
    if is_odd(&n) { -s } else { s }
}

/// `cos(pi x)` with exact reduction of the integer part.
pub fn cos_pi(x: &BigRational) -> f64 {
    let (n, r) = split_round(x);
    let c = if r.abs() == 0.5 { 0.0 } else { (std::f64::consts::PI * r).cos() };
    if is_odd(&n) { -c } else { c }
}

/// Signed distance from `x` to the nearest integer.
pub fn centered_frac(x: &BigRational) -> f64 {
    split_round(x).1
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
