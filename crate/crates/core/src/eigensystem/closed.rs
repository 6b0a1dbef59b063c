//! Closed-form pairings `(phi, psi)` with all normalisation constants equal to one.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::param::hp::{cos_pi, sin_pi};
use crate::param::ParamA;

fn big(m: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(m))
}

/// `m (1+a)/(1-a)`
pub fn minus_ratio(a: &ParamA, m: u64) -> BigRational {
    let one = BigRational::one();
    let x = a.hp();
    big(m) * (&one + &x) / (&one - &x)
}

/// `m (1-a)/(1+a)`
pub fn plus_ratio(a: &ParamA, m: u64) -> BigRational {
    minus_ratio(&a.negate(), m)
}

fn cos_m_pi(m: u64) -> f64 {
    if m % 2 == 0 { 1.0 } else { -1.0 }
}

pub fn minus_generic(a: &ParamA, m: u64) -> f64 {
    -(PI / 4.0) * (1.0 - a.value()) * sin_pi(&minus_ratio(a, m)) * cos_m_pi(m)
}

pub fn plus_generic(a: &ParamA, m: u64) -> f64 {
    (PI / 4.0) * (1.0 + a.value()) * sin_pi(&plus_ratio(a, m)) * cos_m_pi(m)
}

pub fn zero_mode(a: &ParamA) -> f64 {
    let a = a.value();
    -(PI * PI / 4.0) * (1.0 - a * a)
}

pub fn zero_generic(a: &ParamA, m: u64) -> f64 {
    let ma = big(m) * a.hp();
    (PI / 2.0) * (1.0 - cos_m_pi(m) * cos_pi(&ma)) / sin_pi(&ma)
}

pub fn zero_odd(m: u64) -> f64 {
    (PI / 2.0) * cos_m_pi(m)
}

/// Common factor `cos(m pi (1+a)/(1-a)) cos(m pi)` of the exceptional
/// pairings, `m` being the index in the -1 family.
pub fn pair_factor(a: &ParamA, m: u64) -> f64 {
    cos_pi(&minus_ratio(a, m)) * cos_m_pi(m)
}

/// The same factor written with the +1 index.
pub fn pair_factor_plus(a: &ParamA, m: u64) -> f64 {
    cos_pi(&plus_ratio(a, m)) * cos_m_pi(m)
}

/// Exceptional pairings in -1 form: `[(phi1, psi1), (phi2, psi1)]`.
pub fn minus_exceptional(a: &ParamA, m: u64) -> [f64; 2] {
    let c = pair_factor(a, m);
    let av = a.value();
    [(PI / 4.0) * (1.0 - av) * c, (PI / 4.0) * (1.0 + av) * c]
}

pub fn plus_exceptional(a: &ParamA, m: u64) -> [f64; 2] {
    let c = pair_factor_plus(a, m);
    let av = a.value();
    [(PI / 4.0) * (1.0 - av) * c, (PI / 4.0) * (1.0 + av) * c]
}

pub fn zero_even(a: &ParamA, m: u64) -> [f64; 2] {
    let c = cos_m_pi(m);
    let av = a.value();
    [(PI / 4.0) * (1.0 - av) * c, (PI / 4.0) * (1.0 + av) * c]
}

/// `[(phi1, xi), (phi2, xi)]` in -1 form.
pub fn minus_generalised(a: &ParamA, m: u64) -> [f64; 2] {
    let av = a.value();
    let v = PI * PI / (128.0 * m as f64) * (1.0 - av).powi(2) * (1.0 + av) * pair_factor(a, m);
    [-v, v]
}

pub fn plus_generalised(a: &ParamA, m: u64) -> [f64; 2] {
    let av = a.value();
    let v = PI * PI / (128.0 * m as f64) * (1.0 + av).powi(2) * (1.0 - av) * pair_factor_plus(a, m);
    [-v, v]
}

/// `[(phi1, xi), (phi2, xi)]` in class-0 form. The prefactor is `pi^2`, as
/// the substitution `m -> m(1-a)/2` into the -1 form gives.
pub fn zero_generalised(a: &ParamA, m: u64) -> [f64; 2] {
    let av = a.value();
    let v = PI * PI / (64.0 * m as f64) * (1.0 - av * av) * cos_m_pi(m);
    [-v, v]
}

/// `(eta, psi2)` with `A_- = 1`, in -1 form.
pub fn eta_psi2(a: &ParamA, m: u64) -> f64 {
    let av = a.value();
    PI * PI / (64.0 * m as f64) * (1.0 - av) * (1.0 + av) * pair_factor(a, m)
}
