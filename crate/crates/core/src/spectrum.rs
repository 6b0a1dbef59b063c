//! Enumeration of the point spectrum, multiplicities and the characteristic
//! determinant.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::param::{
    zero_class_case, ParamA, ParamKind, ZeroClassCase,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("lambda_max must be positive, got {0}")]
    InvalidLambdaMax(f64),
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("grid value {0} outside (-1, 1)")]
    GridOutOfRange(f64),
    #[error("bad grid spec '{0}' (expected lo:hi:step)")]
    BadGrid(String),
}

/// Eigenvalue family: `(4m/(1-a))^2`, `(4m/(1+a))^2` or `(2m)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(try_from = "i8")]
pub enum Class {
    Minus,
    Plus,
    Zero,
}

impl Class {
    pub fn tag(self) -> i8 {
        match self {
            Class::Minus => -1,
            Class::Plus => 1,
            Class::Zero => 0,
        }
    }

    /// Wavenumber of index `m` in this family, as a float.
    pub fn wavenumber(self, a: f64, m: u64) -> f64 {
        let m = m as f64;
        match self {
            Class::Minus => 4.0 * m / (1.0 - a),
            Class::Plus => 4.0 * m / (1.0 + a),
            Class::Zero => 2.0 * m,
        }
    }
}

impl TryFrom<i8> for Class {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            -1 => Ok(Class::Minus),
            1 => Ok(Class::Plus),
            0 => Ok(Class::Zero),
            _ => Err(format!("unknown class {v}")),
        }
    }
}

impl Serialize for Class {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Membership {
    pub class: Class,
    pub m: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EigCase {
    Generic,
    ExceptionalPair,
    ZeroEv,
    ExceptionalOdd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigRecord {
    pub lambda: f64,
    pub k: f64,
    pub memberships: BTreeSet<Membership>,
    pub geom_mult: u8,
    pub alg_mult: u8,
    pub case: EigCase,
}

impl EigRecord {
    pub fn member(&self, class: Class) -> Option<u64> {
        self.memberships.iter().find(|mb| mb.class == class).map(|mb| mb.m)
    }

    fn from_members(k: f64, memberships: BTreeSet<Membership>, a: &ParamA) -> EigRecord {
        let has = |c| memberships.iter().any(|mb: &Membership| mb.class == c);
        let case = if has(Class::Minus) && has(Class::Plus) {
            EigCase::ExceptionalPair
        } else if let Some(m) = memberships.iter().find(|mb| mb.class == Class::Zero).map(|mb| mb.m) {
            match zero_class_case(a, m) {
                ZeroClassCase::ZeroEigenvalue => EigCase::ZeroEv,
                ZeroClassCase::ExceptionalOdd => EigCase::ExceptionalOdd,
                ZeroClassCase::Generic | ZeroClassCase::ExceptionalEven => EigCase::Generic,
            }
        } else {
            EigCase::Generic
        };
        let (geom_mult, alg_mult) = if case == EigCase::ExceptionalPair { (2, 3) } else { (1, 1) };
        EigRecord { lambda: k * k, k, memberships, geom_mult, alg_mult, case }
    }
}

fn index_bound(kmax: f64, per_index: f64) -> u64 {
    (kmax / per_index).floor().max(0.0) as u64 + 1
}

/// All eigenvalues `<= lambda_max`, ascending, coincidences merged.
pub fn enumerate(a: &ParamA, lambda_max: f64) -> Result<Vec<EigRecord>, SpectrumError> {
    if !(lambda_max > 0.0) {
        return Err(SpectrumError::InvalidLambdaMax(lambda_max));
    }
    let kmax = lambda_max.sqrt();
    let av = a.value();
    let families = [Class::Minus, Class::Plus, Class::Zero];
    match *a.kind() {
        ParamKind::Rational { p, q } => {
            let (p, q) = (i128::from(p), i128::from(q));
            let exact_k = |class: Class, m: u64| -> Ratio<i128> {
                let m = i128::from(m);
                match class {
                    Class::Minus => Ratio::new(4 * m * q, q - p),
                    Class::Plus => Ratio::new(4 * m * q, q + p),
                    Class::Zero => Ratio::from_integer(2 * m),
                }
            };
            let mut by_k: BTreeMap<Ratio<i128>, BTreeSet<Membership>> = BTreeMap::new();
            for class in families {
                let first = u64::from(class != Class::Zero);
                let last = index_bound(kmax, class.wavenumber(av, 1));
                for m in first..=last {
                    let k = exact_k(class, m);
                    // lambda <= lambda_max decided on the float image of the exact k
                    let kf = *k.numer() as f64 / *k.denom() as f64;
                    if kf * kf <= lambda_max {
                        by_k.entry(k).or_default().insert(Membership { class, m });
                    }
                }
            }
            Ok(by_k
                .into_iter()
                .map(|(k, mem)| EigRecord::from_members(*k.numer() as f64 / *k.denom() as f64, mem, a))
                .collect())
        }
        ParamKind::Irrational { .. } => {
            let mut out = Vec::new();
            for class in families {
                let first = u64::from(class != Class::Zero);
                let last = index_bound(kmax, class.wavenumber(av, 1));
                for m in first..=last {
                    let k = class.wavenumber(av, m);
                    if k * k <= lambda_max {
                        let mem = BTreeSet::from([Membership { class, m }]);
                        out.push(EigRecord::from_members(k, mem, a));
                    }
                }
            }
            out.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
            Ok(out)
        }
    }
}

/// Smallest eigenvalue with algebraic multiplicity three, for rational `a`.
pub fn first_exceptional_lambda(a: &ParamA) -> Option<f64> {
    let (p, q) = a.as_ratio()?;
    let g = (q - p).gcd(&(q + p));
    let k = 4.0 * q as f64 / g as f64;
    Some(k * k)
}

/// Wavenumbers of `sigma_-1 cap sigma_+1` below `lambda_max`, from the
/// cross-multiplied condition `m (q+p) = m' (q-p)`.
pub fn pair_wavenumbers(a: &ParamA, lambda_max: f64) -> Vec<Ratio<i128>> {
    let Some((p, q)) = a.as_ratio() else {
        return Vec::new();
    };
    let (p, q) = (i128::from(p), i128::from(q));
    let last = index_bound(lambda_max.max(0.0).sqrt(), Class::Minus.wavenumber(a.value(), 1));
    (1..=i128::from(last))
        .filter(|m| (m * (q + p)) % (q - p) == 0)
        .map(|m| Ratio::new(4 * m * q, q - p))
        .filter(|k| {
            let kf = *k.numer() as f64 / *k.denom() as f64;
            kf * kf <= lambda_max
        })
        .collect()
}

/// `-4 sin(k pi (1+a)/4) sin(k pi (1-a)/4) sin(k pi / 2)`
pub fn char_det(a: f64, k: Complex64) -> Complex64 {
    let s1 = (k * (PI * (1.0 + a) / 4.0)).sin();
    let s2 = (k * (PI * (1.0 - a) / 4.0)).sin();
    let s3 = (k * (PI / 2.0)).sin();
    -4.0 * s1 * s2 * s3
}

/// The 2x2 boundary-condition matrix whose determinant is `char_det`.
pub fn char_matrix(a: f64, k: f64) -> [[f64; 2]; 2] {
    let (sh, ch) = (k * PI / 2.0).sin_cos();
    let (sa, ca) = (k * PI * a / 2.0).sin_cos();
    [[sh + sa, -ch + ca], [sh - sa, ch - ca]]
}

fn det_real(a: f64, k: f64) -> f64 {
    char_det(a, Complex64::new(k, 0.0)).re
}

/// Real zeros of the determinant on `[0, k_max]`: sign-change scan with the
/// given step, refined by bisection to `tol`.
pub fn det_real_zeros(a: f64, k_max: f64, step: f64, tol: f64) -> Vec<f64> {
    let mut zeros = vec![0.0];
    let n = (k_max / step).ceil() as usize;
    let mut x0 = 0.0;
    let mut f0 = det_real(a, step * 1e-3).signum();
    for i in 1..=n {
        let x1 = (i as f64 * step).min(k_max);
        let f1 = det_real(a, x1);
        if f1 == 0.0 {
            zeros.push(x1);
            f0 = det_real(a, x1 + step * 1e-3).signum();
            x0 = x1;
            continue;
        }
        if f1.signum() != f0 && i > 0 {
            let (mut lo, mut hi) = (x0.max(step * 1e-3), x1);
            let flo = det_real(a, lo).signum();
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let fm = det_real(a, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        f0 = f1.signum();
        x0 = x1;
    }
    zeros
}

/// Winding number of the determinant around the rectangle
/// `[re_lo, re_hi] x [im_lo, im_hi]` in the k-plane, i.e. the number of
/// zeros inside counted with multiplicity.
pub fn argument_count(a: f64, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> i64 {
    let corners = [
        Complex64::new(re_lo, im_lo),
        Complex64::new(re_hi, im_lo),
        Complex64::new(re_hi, im_hi),
        Complex64::new(re_lo, im_hi),
    ];
    let mut total = 0.0;
    for i in 0..4 {
        let (z0, z1) = (corners[i], corners[(i + 1) % 4]);
        total += winding_segment(a, z0, z1, 0);
    }
    (total / (2.0 * PI)).round() as i64
}

fn winding_segment(a: f64, z0: Complex64, z1: Complex64, depth: u32) -> f64 {
    let n = 64;
    let mut acc = 0.0;
    let mut prev = char_det(a, z0);
    for i in 1..=n {
        let z = z0 + (z1 - z0) * (i as f64 / n as f64);
        let cur = char_det(a, z);
        let d = (cur / prev).arg();
        if d.abs() > 0.5 && depth < 12 {
            let za = z0 + (z1 - z0) * ((i - 1) as f64 / n as f64);
            acc += winding_segment(a, za, z, depth + 1);
        } else {
            acc += d;
        }
        prev = cur;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub a: f64,
    pub class: Class,
    pub m: u64,
    pub lambda: f64,
}

/// `(a, class, m, lambda)` rows for every grid value; class 0 runs over
/// `m = 0..=m_max`, the other two over `m = 1..=m_max`.
pub fn curves(a_grid: &[f64], m_max: u64) -> Result<Vec<CurveRow>, SpectrumError> {
    if let Some(&bad) = a_grid.iter().find(|a| !(a.abs() < 1.0)) {
        return Err(SpectrumError::GridOutOfRange(bad));
    }
    let rows: Vec<Vec<CurveRow>> = a_grid
        .par_iter()
        .map(|&a| {
            let mut rows = Vec::new();
            for class in [Class::Minus, Class::Plus, Class::Zero] {
                let first = u64::from(class != Class::Zero);
                for m in first..=m_max {
                    let k = class.wavenumber(a, m);
                    rows.push(CurveRow { a, class, m, lambda: k * k });
                }
            }
            rows
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn curves_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from("a,class,m,lambda\n");
    for r in rows {
        s.push_str(&format!("{:.16e},{},{},{:.16e}\n", r.a, r.class.tag(), r.m, r.lambda));
    }
    s
}

/// `lo:hi:step`, generated by index so the end point is hit exactly.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, SpectrumError> {
    let bad = || SpectrumError::BadGrid(spec.to_string());
    let parts: Vec<f64> = spec.split(':').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || hi < lo {
        return Err(bad());
    }
    let n = ((hi - lo) / step).round() as usize;
    Ok((0..=n).map(|i| if i == n { hi } else { lo + step * i as f64 }).collect())
}

/// Spectral gap of the drifted problem:
/// `2 sigma^2 + b^2 / (2 sigma^2)` up to `|b| = 2 sqrt(3) sigma^2`, then `8 sigma^2`.
pub fn drift_gap(sigma: f64, b: f64) -> Result<f64, SpectrumError> {
    if !(sigma > 0.0) {
        return Err(SpectrumError::InvalidSigma(sigma));
    }
    let s2 = sigma * sigma;
    Ok(if b.abs() < 2.0 * 3f64.sqrt() * s2 { 2.0 * s2 + b * b / (2.0 * s2) } else { 8.0 * s2 })
}

/// The same formula in exact arithmetic on `sigma^2` and `b^2`.
pub fn drift_gap_exact(sigma2: Ratio<i128>, b2: Ratio<i128>) -> Result<Ratio<i128>, SpectrumError> {
    if sigma2 <= Ratio::from_integer(0) {
        return Err(SpectrumError::InvalidSigma(*sigma2.numer() as f64 / *sigma2.denom() as f64));
    }
    let two = Ratio::from_integer(2);
    Ok(if b2 <= Ratio::from_integer(12) * sigma2 * sigma2 { two * sigma2 + b2 / (two * sigma2) } else { Ratio::from_integer(8) * sigma2 })
}
