//! Eigenfunctions of H and H*, the Jordan chain at coincidences, and the
//! normalised biorthogonal family.

pub mod closed;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Matrix3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::funcspace::{inner, FuncError, Grid, GridFn, PiecewiseTrig, TrigTerm, C64};
use crate::param::hp::{cos_pi, sin_pi};
use crate::param::{is_exceptional_minus, is_exceptional_plus, zero_class_case, ParamA, ZeroClassCase};
use crate::spectrum::{enumerate, Class, EigCase, EigRecord, SpectrumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("record at lambda = {lambda} is inconsistent with a: {reason}")]
    CaseMismatch { lambda: f64, reason: String },
    #[error("closed-form pairing vanishes at lambda = {0}")]
    DegenerateNormalization(f64),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Forward,
    Adjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rank {
    Eigen,
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigFun {
    pub lambda: f64,
    pub k: f64,
    pub case: EigCase,
    pub side: Side,
    pub rank: Rank,
    #[serde(rename = "fn")]
    pub func: PiecewiseTrig,
    pub constants: BTreeMap<&'static str, C64>,
}

impl EigFun {
    fn new(rec: &EigRecord, side: Side, rank: Rank, func: PiecewiseTrig, constants: &[(&'static str, C64)]) -> Self {
        EigFun {
            lambda: rec.lambda,
            k: rec.k,
            case: rec.case,
            side,
            rank,
            func,
            constants: constants.iter().copied().collect(),
        }
    }

    /// Rescaled copy; the constants record the accumulated factor.
    pub fn scaled(&self, s: C64) -> EigFun {
        let mut out = self.clone();
        out.func = self.func.scale(s);
        *out.constants.entry("scale").or_insert(C64::new(1.0, 0.0)) *= s;
        out
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn mismatch(rec: &EigRecord, reason: impl Into<String>) -> EigenError {
    EigenError::CaseMismatch { lambda: rec.lambda, reason: reason.into() }
}

/// Re-derive the case of `rec` from `a` and its memberships.
fn check_case(rec: &EigRecord, a: &ParamA) -> Result<(), EigenError> {
    let av = a.value();
    for mb in &rec.memberships {
        let k = mb.class.wavenumber(av, mb.m);
        if (k - rec.k).abs() > 1e-9 * k.max(1.0) {
            return Err(mismatch(rec, format!("wavenumber of {:?} m={} is {k}", mb.class, mb.m)));
        }
    }
    let expected = match (rec.member(Class::Minus), rec.member(Class::Plus), rec.member(Class::Zero)) {
        (Some(l), Some(_), _) if is_exceptional_minus(a, l) => EigCase::ExceptionalPair,
        (Some(l), None, None) if !is_exceptional_minus(a, l) => EigCase::Generic,
        (None, Some(m), None) if !is_exceptional_plus(a, m) => EigCase::Generic,
        (None, None, Some(m)) => match zero_class_case(a, m) {
            ZeroClassCase::ZeroEigenvalue => EigCase::ZeroEv,
            ZeroClassCase::Generic => EigCase::Generic,
            ZeroClassCase::ExceptionalOdd => EigCase::ExceptionalOdd,
            ZeroClassCase::ExceptionalEven => return Err(mismatch(rec, "even class-0 point without its partners")),
        },
        _ => return Err(mismatch(rec, "membership set does not match the exceptional predicates")),
    };
    if expected != rec.case {
        return Err(mismatch(rec, format!("expected {expected:?}, record says {:?}", rec.case)));
    }
    Ok(())
}

fn minus_index(rec: &EigRecord) -> Result<u64, EigenError> {
    rec.member(Class::Minus).ok_or_else(|| mismatch(rec, "no -1 membership"))
}

pub fn eigenfunctions_h(rec: &EigRecord, a: &ParamA) -> Result<Vec<EigFun>, EigenError> {
    check_case(rec, a)?;
    let k = rec.k;
    let f = |terms: Vec<TrigTerm>, names: &[(&'static str, C64)]| {
        EigFun::new(rec, Side::Forward, Rank::Eigen, PiecewiseTrig::single(terms), names)
    };
    Ok(match rec.case {
        EigCase::ZeroEv => vec![f(vec![TrigTerm::constant(1.0)], &[("B", one())])],
        EigCase::ExceptionalOdd => vec![f(vec![TrigTerm::sin(1.0, k, 0.0)], &[("A", one())])],
        EigCase::ExceptionalPair => vec![
            f(vec![TrigTerm::sin(1.0, k, 0.0)], &[("A", one())]),
            f(vec![TrigTerm::cos(1.0, k, 0.0)], &[("B", one())]),
        ],
        EigCase::Generic => match rec.member(Class::Zero) {
            Some(m) => {
                let ma = a.hp() * num_rational::BigRational::from_integer(m.into());
                let cm = if m % 2 == 0 { 1.0 } else { -1.0 };
                let ratio = (cm - cos_pi(&ma)) / sin_pi(&ma);
                vec![f(vec![TrigTerm::cos(1.0, k, 0.0), TrigTerm::sin(ratio, k, 0.0)], &[("B", one())])]
            }
            None => vec![f(vec![TrigTerm::cos(1.0, k, 0.0)], &[("B", one())])],
        },
    })
}

fn split(a: &ParamA, left: Vec<TrigTerm>, right: Vec<TrigTerm>) -> PiecewiseTrig {
    PiecewiseTrig::split(a.jump_point(), left, right).expect("jump point lies inside the interval")
}

/// `(0, sin k (x - pi/2))`
fn phi_right(a: &ParamA, k: f64) -> PiecewiseTrig {
    split(a, vec![], vec![TrigTerm::sin(1.0, k, -k * FRAC_PI_2)])
}

/// `(sin k (x + pi/2), 0)`
fn phi_left(a: &ParamA, k: f64) -> PiecewiseTrig {
    split(a, vec![TrigTerm::sin(1.0, k, k * FRAC_PI_2)], vec![])
}

pub fn eigenfunctions_hstar(rec: &EigRecord, a: &ParamA) -> Result<Vec<EigFun>, EigenError> {
    check_case(rec, a)?;
    let k = rec.k;
    let av = a.value();
    let f = |func: PiecewiseTrig, names: &[(&'static str, C64)]| EigFun::new(rec, Side::Adjoint, Rank::Eigen, func, names);
    Ok(match rec.case {
        EigCase::ZeroEv => {
            let left = vec![TrigTerm::linear(av - 1.0), TrigTerm::constant((av - 1.0) * FRAC_PI_2)];
            let right = vec![TrigTerm::linear(av + 1.0), TrigTerm::constant(-(av + 1.0) * FRAC_PI_2)];
            vec![f(split(a, left, right), &[("C", one())])]
        }
        EigCase::ExceptionalPair => vec![f(phi_right(a, k), &[("A+", one())]), f(phi_left(a, k), &[("A-", one())])],
        EigCase::ExceptionalOdd | EigCase::Generic => {
            if rec.member(Class::Zero).is_some() {
                let s = k * FRAC_PI_2;
                let func = split(a, vec![TrigTerm::sin(1.0, k, s)], vec![TrigTerm::sin(1.0, k, -s)]);
                vec![f(func, &[("C", one())])]
            } else if rec.member(Class::Minus).is_some() {
                vec![f(phi_right(a, k), &[("A+", one())])]
            } else {
                vec![f(phi_left(a, k), &[("A-", one())])]
            }
        }
    })
}

/// Solution of `(H - lambda) xi = cos(kx)` in D(H), with `B = 1`.
pub fn generalized_xi(rec: &EigRecord, a: &ParamA) -> Result<EigFun, EigenError> {
    check_case(rec, a)?;
    if rec.case != EigCase::ExceptionalPair {
        return Err(mismatch(rec, "generalized vectors exist only at coincidences"));
    }
    let l = minus_index(rec)? as f64;
    let (k, av) = (rec.k, a.value());
    let s = -(1.0 - av) / (64.0 * l * l);
    let func = PiecewiseTrig::single(vec![TrigTerm::cos(s * (1.0 - av), k, 0.0), TrigTerm::xsin(s * 8.0 * l, k, 0.0)]);
    Ok(EigFun::new(rec, Side::Forward, Rank::Generalized, func, &[("B", one())]))
}

/// Normalisation constants of the adjoint chain, tied by `A_-(1+a) = -A_+(1-a)`.
pub fn eta_constants(a: &ParamA) -> (f64, f64) {
    let av = a.value();
    (1.0 - av, -(1.0 + av))
}

/// Solution of `(H* - lambda) eta = A_+ phi1 + A_- phi2` in D(H*).
pub fn generalized_eta(rec: &EigRecord, a: &ParamA) -> Result<EigFun, EigenError> {
    check_case(rec, a)?;
    if rec.case != EigCase::ExceptionalPair {
        return Err(mismatch(rec, "generalized vectors exist only at coincidences"));
    }
    let l = minus_index(rec)? as f64;
    let (k, av) = (rec.k, a.value());
    let (am, ap) = eta_constants(a);
    let s = (1.0 - av) / (64.0 * l * l);
    let piece = |amp: f64, sign: f64| {
        let sh = sign * k * FRAC_PI_2;
        vec![
            TrigTerm::xcos(amp * s * 8.0 * l, k, sh),
            TrigTerm::cos(amp * s * 8.0 * l * sign * FRAC_PI_2, k, sh),
            TrigTerm::sin(-amp * s * (1.0 - av), k, sh),
        ]
    };
    let func = split(a, piece(am, 1.0), piece(ap, -1.0));
    Ok(EigFun::new(rec, Side::Adjoint, Rank::Generalized, func, &[("A-", C64::new(am, 0.0)), ("A+", C64::new(ap, 0.0))]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiorthPair {
    pub psi: EigFun,
    pub phi: EigFun,
    /// `(phi, psi)` after normalisation, by symbolic integration.
    pub pairing: C64,
}

fn nonzero(p: f64, rec: &EigRecord) -> Result<f64, EigenError> {
    if p.abs() < 1e-14 || !p.is_finite() {
        Err(EigenError::DegenerateNormalization(rec.lambda))
    } else {
        Ok(p)
    }
}

/// Closed-form pairing of a simple eigenvalue, unit constants.
pub fn simple_pairing(rec: &EigRecord, a: &ParamA) -> Result<f64, EigenError> {
    let p = match (rec.case, rec.member(Class::Minus), rec.member(Class::Plus), rec.member(Class::Zero)) {
        (EigCase::ZeroEv, ..) => closed::zero_mode(a),
        (EigCase::ExceptionalOdd, _, _, Some(m)) => closed::zero_odd(m),
        (EigCase::Generic, Some(m), None, None) => closed::minus_generic(a, m),
        (EigCase::Generic, None, Some(m), None) => closed::plus_generic(a, m),
        (EigCase::Generic, None, None, Some(m)) => closed::zero_generic(a, m),
        _ => return Err(mismatch(rec, "not a simple eigenvalue")),
    };
    nonzero(p, rec)
}

/// Raw root-space bases at a coincidence: `[psi1, psi2, xi]`, `[phi1, phi2, eta]`.
pub fn root_space(rec: &EigRecord, a: &ParamA) -> Result<([EigFun; 3], [EigFun; 3]), EigenError> {
    let [psi1, psi2]: [EigFun; 2] = eigenfunctions_h(rec, a)?.try_into().map_err(|_| mismatch(rec, "pair"))?;
    let [phi1, phi2]: [EigFun; 2] = eigenfunctions_hstar(rec, a)?.try_into().map_err(|_| mismatch(rec, "pair"))?;
    let xi = generalized_xi(rec, a)?;
    let eta = generalized_eta(rec, a)?;
    Ok(([psi1, psi2, xi], [phi1, phi2, eta]))
}

/// Gram block `G[i][j] = (Phi_i, Psi_j)` of the raw root-space bases, from
/// the closed-form pairings where they exist and symbolic integration for the
/// two entries involving `eta` that have none.
pub fn root_gram(rec: &EigRecord, a: &ParamA, psi: &[EigFun; 3], phi: &[EigFun; 3]) -> Result<Matrix3<C64>, EigenError> {
    let l = minus_index(rec)?;
    let [p11, p21] = closed::minus_exceptional(a, l);
    let [g1, g2] = closed::minus_generalised(a, l);
    let (am, _) = eta_constants(a);
    let e2 = am * closed::eta_psi2(a, l);
    nonzero(p11, rec)?;
    nonzero(g2, rec)?;
    nonzero(e2, rec)?;
    let e1 = inner(&phi[2].func, &psi[0].func)?;
    let e3 = inner(&phi[2].func, &psi[2].func)?;
    let r = |x: f64| C64::new(x, 0.0);
    Ok(Matrix3::new(r(p11), r(0.0), r(g1), r(p21), r(0.0), r(g2), e1, r(e2), e3))
}

/// Normalised pairs for every spectral point up to `lambda_max`. The forward
/// functions keep unit constants; at coincidences the dual basis is
/// `Phi conj(G^{-1})`.
pub fn biorthogonalize(a: &ParamA, lambda_max: f64) -> Result<Vec<BiorthPair>, EigenError> {
    let recs = enumerate(a, lambda_max)?;
    let per: Vec<Result<Vec<BiorthPair>, EigenError>> = recs.par_iter().map(|rec| pairs_for(rec, a)).collect();
    let mut out = Vec::new();
    for p in per {
        out.extend(p?);
    }
    Ok(out)
}

pub fn pairs_for(rec: &EigRecord, a: &ParamA) -> Result<Vec<BiorthPair>, EigenError> {
    if rec.case == EigCase::ExceptionalPair {
        let (psi, phi) = root_space(rec, a)?;
        let g = root_gram(rec, a, &psi, &phi)?;
        let ginv = g.try_inverse().ok_or(EigenError::DegenerateNormalization(rec.lambda))?;
        let mut out = Vec::with_capacity(3);
        for (j, psi_j) in psi.iter().enumerate() {
            let mut func = PiecewiseTrig::zero();
            for (i, phi_i) in phi.iter().enumerate() {
                func = func.plus(&phi_i.func.scale(ginv[(j, i)].conj()))?;
            }
            let mut dual = phi[j].clone();
            dual.func = func;
            dual.constants.insert("dual", C64::new(j as f64, 0.0));
            let pairing = inner(&dual.func, &psi_j.func)?;
            out.push(BiorthPair { psi: psi_j.clone(), phi: dual, pairing });
        }
        return Ok(out);
    }
    let psi = eigenfunctions_h(rec, a)?.remove(0);
    let phi = eigenfunctions_hstar(rec, a)?.remove(0);
    let p = simple_pairing(rec, a)?;
    let phi = phi.scaled(C64::new(1.0 / p, 0.0));
    let pairing = inner(&phi.func, &psi.func)?;
    Ok(vec![BiorthPair { psi, phi, pairing }])
}

/// `G[i][j] = (phi_i, psi_j)` by composite Gauss-Legendre quadrature.
pub fn gram_quadrature(pairs: &[BiorthPair], a: &ParamA) -> Result<DMatrix<C64>, EigenError> {
    let kmax = pairs.iter().map(|p| p.psi.k).fold(1.0, f64::max);
    let panels = ((kmax * 2.0).ceil() as usize).max(8);
    let grid = Grid::new(a.jump_point(), panels, panels, 24)?;
    let psis: Vec<GridFn> = pairs.par_iter().map(|p| GridFn::sample(&grid, &p.psi.func)).collect();
    let phis: Vec<GridFn> = pairs.par_iter().map(|p| GridFn::sample(&grid, &p.phi.func)).collect();
    let n = pairs.len();
    let mut g = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = phis[i].inner(&psis[j])?;
        }
    }
    Ok(g)
}

pub fn gram_csv(g: &DMatrix<C64>) -> String {
    let mut s = String::from("i,j,re,im\n");
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            s.push_str(&format!("{i},{j},{:.16e},{:.16e}\n", g[(i, j)].re, g[(i, j)].im));
        }
    }
    s
}

#[cfg(test)]
mod tests;
