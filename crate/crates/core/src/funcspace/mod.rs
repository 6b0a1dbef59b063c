//! Piecewise trigonometric functions on (-pi/2, pi/2) with a possible break
//! at the jump point, plus sampled grid functions.

mod domain;
mod grid;
mod integrate;

pub use domain::{validate_domain_h, validate_domain_hstar, DomainReport, Violation};
pub use grid::{Grid, GridFn};
pub use integrate::{inner, inner_quadrature, norm_sampled};

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Slack allowed when locating a point inside the interval.
pub const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncError {
    #[error("x = {0} lies outside [-pi/2, pi/2]")]
    OutOfDomain(f64),
    #[error("functions are split at different points ({0} vs {1})")]
    IncompatibleDomains(f64, f64),
    #[error("quadrature did not reach {target:e} (last change {achieved:e})")]
    QuadratureNotConverged { target: f64, achieved: f64 },
    #[error("breakpoint {0} is not inside the interval")]
    BadBreakpoint(f64),
    #[error("grid is not closed under the requested reflection")]
    GridNotReflectionClosed,
    #[error("grid functions live on different grids")]
    GridMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Const,
    Linear,
    Cos,
    Sin,
    XCos,
    XSin,
}

/// `coeff * x^n * trig(freq * x + shift)`, with the power and trig factor
/// fixed by `kind`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coeff: C64,
    pub freq: f64,
    pub shift: f64,
    pub kind: TermKind,
}

impl TrigTerm {
    pub fn constant(c: impl Into<C64>) -> Self {
        TrigTerm { coeff: c.into(), freq: 0.0, shift: 0.0, kind: TermKind::Const }
    }

    pub fn linear(c: impl Into<C64>) -> Self {
        TrigTerm { coeff: c.into(), freq: 0.0, shift: 0.0, kind: TermKind::Linear }
    }

    pub fn cos(c: impl Into<C64>, freq: f64, shift: f64) -> Self {
        TrigTerm { coeff: c.into(), freq, shift, kind: TermKind::Cos }.normalized()
    }

    pub fn sin(c: impl Into<C64>, freq: f64, shift: f64) -> Self {
        TrigTerm { coeff: c.into(), freq, shift, kind: TermKind::Sin }.normalized()
    }

    pub fn xcos(c: impl Into<C64>, freq: f64, shift: f64) -> Self {
        TrigTerm { coeff: c.into(), freq, shift, kind: TermKind::XCos }.normalized()
    }

    pub fn xsin(c: impl Into<C64>, freq: f64, shift: f64) -> Self {
        TrigTerm { coeff: c.into(), freq, shift, kind: TermKind::XSin }.normalized()
    }

    // Negative frequencies are folded by parity; zero frequency collapses
    // the trig factor to a constant.
    fn normalized(mut self) -> Self {
        use TermKind::*;
        if self.freq < 0.0 {
            self.freq = -self.freq;
            self.shift = -self.shift;
            if matches!(self.kind, Sin | XSin) {
                self.coeff = -self.coeff;
            }
        }
        if self.freq == 0.0 {
            let (s, c) = self.shift.sin_cos();
            self = match self.kind {
                Cos => TrigTerm::constant(self.coeff * c),
                Sin => TrigTerm::constant(self.coeff * s),
                XCos => TrigTerm::linear(self.coeff * c),
                XSin => TrigTerm::linear(self.coeff * s),
                Const | Linear => TrigTerm { freq: 0.0, shift: 0.0, ..self },
            };
        }
        self
    }

    pub fn eval(&self, x: f64) -> C64 {
        let th = self.freq * x + self.shift;
        let v = match self.kind {
            TermKind::Const => 1.0,
            TermKind::Linear => x,
            TermKind::Cos => th.cos(),
            TermKind::Sin => th.sin(),
            TermKind::XCos => x * th.cos(),
            TermKind::XSin => x * th.sin(),
        };
        self.coeff * v
    }

    fn with(&self, coeff: C64, kind: TermKind) -> TrigTerm {
        TrigTerm { coeff, freq: self.freq, shift: self.shift, kind }.normalized()
    }

    fn d1(&self, out: &mut Vec<TrigTerm>) {
        use TermKind::*;
        let (c, w) = (self.coeff, self.freq);
        match self.kind {
            Const => {}
            Linear => out.push(TrigTerm::constant(c)),
            Cos => out.push(self.with(-(c * w), Sin)),
            Sin => out.push(self.with(c * w, Cos)),
            XCos => {
                out.push(self.with(c, Cos));
                out.push(self.with(-(c * w), XSin));
            }
            XSin => {
                out.push(self.with(c, Sin));
                out.push(self.with(c * w, XCos));
            }
        }
    }

    fn d2(&self, out: &mut Vec<TrigTerm>) {
        use TermKind::*;
        let (c, w) = (self.coeff, self.freq);
        match self.kind {
            Const | Linear => {}
            Cos => out.push(self.with(-(c * w) * w, Cos)),
            Sin => out.push(self.with(-((c * w) * w), Sin)),
            XCos => {
                let t = -(c * w);
                out.push(self.with(t + t, Sin));
                out.push(self.with(t * w, XCos));
            }
            XSin => {
                let t = c * w;
                out.push(self.with(t + t, Cos));
                out.push(self.with(-(t * w), XSin));
            }
        }
    }

    /// The term composed with `x -> s - x`, appended to `out`.
    fn reflect(&self, s: f64, out: &mut Vec<TrigTerm>) {
        use TermKind::*;
        let c = self.coeff;
        let ph = -(self.freq * s + self.shift);
        let w = self.freq;
        match self.kind {
            Const => out.push(*self),
            Linear => {
                out.push(TrigTerm::constant(c * s));
                out.push(TrigTerm::linear(-c));
            }
            Cos => out.push(TrigTerm::cos(c, w, ph)),
            Sin => out.push(TrigTerm::sin(-c, w, ph)),
            XCos => {
                out.push(TrigTerm::cos(c * s, w, ph));
                out.push(TrigTerm::xcos(-c, w, ph));
            }
            XSin => {
                out.push(TrigTerm::sin(-(c * s), w, ph));
                out.push(TrigTerm::xsin(c, w, ph));
            }
        }
    }

    fn key_cmp(&self, other: &TrigTerm) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.freq.total_cmp(&other.freq))
            .then(self.shift.total_cmp(&other.shift))
    }

    /// Rough bound on `|f| + |f'|` over the interval, used to scale tolerances.
    pub fn magnitude(&self) -> f64 {
        let amp = self.coeff.norm();
        let xf = match self.kind {
            TermKind::Linear | TermKind::XCos | TermKind::XSin => FRAC_PI_2 + 1.0,
            _ => 1.0,
        };
        amp * xf * (1.0 + self.freq)
    }
}

/// Sort by (kind, freq, shift), merge equal keys, drop zero coefficients.
pub fn canonicalize(mut terms: Vec<TrigTerm>) -> Vec<TrigTerm> {
    terms.sort_by(|a, b| a.key_cmp(b));
    let mut out: Vec<TrigTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.key_cmp(&t) == Ordering::Equal => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != C64::new(0.0, 0.0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<TrigTerm>,
}

/// Either one piece over the whole interval or two pieces meeting at `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseTrig {
    pub pieces: Vec<Piece>,
}

impl PiecewiseTrig {
    pub fn single(terms: Vec<TrigTerm>) -> Self {
        PiecewiseTrig { pieces: vec![Piece { lo: -FRAC_PI_2, hi: FRAC_PI_2, terms: canonicalize(terms) }] }
    }

    pub fn split(c: f64, left: Vec<TrigTerm>, right: Vec<TrigTerm>) -> Result<Self, FuncError> {
        if !(c > -FRAC_PI_2 && c < FRAC_PI_2) {
            return Err(FuncError::BadBreakpoint(c));
        }
        Ok(PiecewiseTrig {
            pieces: vec![
                Piece { lo: -FRAC_PI_2, hi: c, terms: canonicalize(left) },
                Piece { lo: c, hi: FRAC_PI_2, terms: canonicalize(right) },
            ],
        })
    }

    pub fn zero() -> Self {
        Self::single(Vec::new())
    }

    pub fn breakpoint(&self) -> Option<f64> {
        (self.pieces.len() == 2).then(|| self.pieces[0].hi)
    }

    pub fn is_single(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn eval(&self, x: f64, side: Side) -> Result<C64, FuncError> {
        if !(x >= -FRAC_PI_2 - DOMAIN_SLACK && x <= FRAC_PI_2 + DOMAIN_SLACK) {
            return Err(FuncError::OutOfDomain(x));
        }
        let piece = match self.breakpoint() {
            None => &self.pieces[0],
            Some(c) if x < c || (x == c && side == Side::Left) => &self.pieces[0],
            Some(_) => &self.pieces[1],
        };
        Ok(piece.terms.iter().map(|t| t.eval(x)).sum())
    }

    /// Evaluation for points already known to be inside the interval.
    pub fn at(&self, x: f64) -> C64 {
        self.eval(x.clamp(-FRAC_PI_2, FRAC_PI_2), Side::Left).unwrap_or_default()
    }

    pub fn derivative(&self, order: u8) -> PiecewiseTrig {
        assert!(order == 1 || order == 2, "derivative order must be 1 or 2");
        self.map_pieces(|terms| {
            let mut out = Vec::with_capacity(terms.len() * 2);
            for t in terms {
                if order == 1 {
                    t.d1(&mut out);
                } else {
                    t.d2(&mut out);
                }
            }
            out
        })
    }

    fn map_pieces(&self, f: impl Fn(&[TrigTerm]) -> Vec<TrigTerm>) -> PiecewiseTrig {
        PiecewiseTrig {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { lo: p.lo, hi: p.hi, terms: canonicalize(f(&p.terms)) })
                .collect(),
        }
    }

    /// Term lists on the two sides of `c` (duplicated when single-piece).
    fn sides(&self) -> (&[TrigTerm], &[TrigTerm]) {
        match self.pieces.len() {
            1 => (&self.pieces[0].terms, &self.pieces[0].terms),
            _ => (&self.pieces[0].terms, &self.pieces[1].terms),
        }
    }

    fn common_break(&self, other: &PiecewiseTrig) -> Result<Option<f64>, FuncError> {
        match (self.breakpoint(), other.breakpoint()) {
            (Some(c1), Some(c2)) if (c1 - c2).abs() > 1e-15 => Err(FuncError::IncompatibleDomains(c1, c2)),
            (Some(c), _) | (None, Some(c)) => Ok(Some(c)),
            (None, None) => Ok(None),
        }
    }

    pub fn plus(&self, other: &PiecewiseTrig) -> Result<PiecewiseTrig, FuncError> {
        self.combine(other, C64::new(1.0, 0.0))
    }

    pub fn minus(&self, other: &PiecewiseTrig) -> Result<PiecewiseTrig, FuncError> {
        self.combine(other, C64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &PiecewiseTrig, s: C64) -> Result<PiecewiseTrig, FuncError> {
        let join = |a: &[TrigTerm], b: &[TrigTerm]| {
            let mut v = a.to_vec();
            v.extend(b.iter().map(|t| TrigTerm { coeff: t.coeff * s, ..*t }));
            v
        };
        match self.common_break(other)? {
            None => Ok(PiecewiseTrig::single(join(&self.pieces[0].terms, &other.pieces[0].terms))),
            Some(c) => {
                let (l1, r1) = self.sides();
                let (l2, r2) = other.sides();
                PiecewiseTrig::split(c, join(l1, l2), join(r1, r2))
            }
        }
    }

    pub fn scale(&self, s: impl Into<C64>) -> PiecewiseTrig {
        let s = s.into();
        self.map_pieces(|terms| terms.iter().map(|t| TrigTerm { coeff: t.coeff * s, ..*t }).collect())
    }

    /// Two-piece form at `c`, duplicating the terms of a single piece.
    pub fn split_at(&self, c: f64) -> Result<PiecewiseTrig, FuncError> {
        match self.breakpoint() {
            Some(b) if (b - c).abs() > 1e-15 => Err(FuncError::IncompatibleDomains(b, c)),
            Some(_) => Ok(self.clone()),
            None => PiecewiseTrig::split(c, self.pieces[0].terms.clone(), self.pieces[0].terms.clone()),
        }
    }

    /// Term list of the piece `idx` composed with `x -> s - x`.
    pub fn reflected_terms(terms: &[TrigTerm], s: f64) -> Vec<TrigTerm> {
        let mut out = Vec::with_capacity(terms.len() * 2);
        for t in terms {
            t.reflect(s, &mut out);
        }
        canonicalize(out)
    }

    /// Single-piece function composed with `x -> -x`.
    pub fn reflect_origin(&self) -> Option<PiecewiseTrig> {
        self.is_single().then(|| PiecewiseTrig::single(Self::reflected_terms(&self.pieces[0].terms, 0.0)))
    }

    pub fn magnitude(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.terms.iter().map(TrigTerm::magnitude).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_freq(&self) -> f64 {
        self.pieces.iter().flat_map(|p| p.terms.iter().map(|t| t.freq)).fold(0.0, f64::max)
    }

    /// Max-modulus deviation between two functions at `n` equispaced points
    /// per piece, both endpoints of each piece included.
    pub fn sup_distance(&self, other: &PiecewiseTrig, n: usize) -> Result<f64, FuncError> {
        let d = self.minus(other)?;
        let mut worst = 0.0f64;
        for p in &d.pieces {
            for i in 0..=n {
                let x = p.lo + (p.hi - p.lo) * i as f64 / n as f64;
                let v: C64 = p.terms.iter().map(|t| t.eval(x)).sum();
                worst = worst.max(v.norm());
            }
        }
        Ok(worst)
    }
}

/// `-f'' - lambda f`, piecewise.
pub fn helmholtz(f: &PiecewiseTrig, lambda: f64) -> PiecewiseTrig {
    f.derivative(2)
        .scale(-1.0)
        .minus(&f.scale(lambda))
        .expect("a function always shares its own breakpoint")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let f = PiecewiseTrig::single(vec![TrigTerm::cos(1.0, 2.0, 0.0)]);
        assert!((f.eval(0.0, Side::Left).unwrap() - 1.0).norm() < 1e-15);
        assert!(matches!(f.eval(2.0, Side::Left), Err(FuncError::OutOfDomain(_))));
        // tent apex of the adjoint zero mode at a = 0
        let left = vec![TrigTerm::linear(-1.0), TrigTerm::constant(-FRAC_PI_2)];
        let right = vec![TrigTerm::linear(1.0), TrigTerm::constant(-FRAC_PI_2)];
        let phi = PiecewiseTrig::split(0.0, left, right).unwrap();
        let l = phi.eval(0.0, Side::Left).unwrap();
        let r = phi.eval(0.0, Side::Right).unwrap();
        assert!((l - C64::new(-FRAC_PI_2, 0.0)).norm() < 1e-15);
        assert!((r - C64::new(-FRAC_PI_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let f = PiecewiseTrig::single(vec![TrigTerm::sin(1.0, 2.0, 0.0)]);
        assert_eq!(f.derivative(2), PiecewiseTrig::single(vec![TrigTerm::sin(-4.0, 2.0, 0.0)]));
        let g = PiecewiseTrig::single(vec![TrigTerm::xsin(1.0, 2.0, 0.0)]);
        let want = PiecewiseTrig::single(vec![TrigTerm::cos(4.0, 2.0, 0.0), TrigTerm::xsin(-4.0, 2.0, 0.0)]);
        assert_eq!(g.derivative(2), want);
    }

    #[test]
    fn reflection_roundtrip() {
        let f = PiecewiseTrig::single(vec![
            TrigTerm::xsin(C64::new(0.3, -1.0), 3.0, 0.2),
            TrigTerm::xcos(0.7, 1.5, -0.4),
            TrigTerm::linear(2.0),
            TrigTerm::sin(1.0, 2.5, 0.1),
        ]);
        let s = 0.37;
        let r = PiecewiseTrig::single(PiecewiseTrig::reflected_terms(&f.pieces[0].terms, s));
        for i in 0..50 {
            let x = -0.6 + 0.02 * i as f64;
            assert!((r.at(x) - f.at(s - x)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_freq_collapses() {
        let t = TrigTerm::cos(2.0, 0.0, 0.0);
        assert_eq!(t.kind, TermKind::Const);
        let t = TrigTerm::sin(1.0, -2.0, 0.5);
        assert_eq!(t.freq, 2.0);
        assert!((t.eval(0.3) - C64::new((-2.0 * 0.3 + 0.5f64).sin(), 0.0)).norm() < 1e-15);
    }
}
