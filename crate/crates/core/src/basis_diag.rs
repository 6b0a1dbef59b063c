//! Norms of the one-dimensional spectral projections, their blow-up along
//! convergent denominators, uniform bounds for rational `a` and truncated
//! biorthogonal expansions.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eigensystem::{
    biorthogonalize, closed, pairs_for, root_space, BiorthPair, EigFun, EigenError,
};
use crate::funcspace::{inner_quadrature, FuncError, Grid, GridFn, PiecewiseTrig, C64};
use crate::metric::random_smooth;
use crate::param::hp::{cos_pi, ratio, sin_pi};
use crate::param::{convergents, zero_class_case, ParamA, ParamError, ZeroClassCase};
use crate::spectrum::{enumerate, Class, EigCase, EigRecord, SpectrumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("a must be irrational for this probe")]
    NotIrrational,
    #[error("a must be rational for this check")]
    NotRational,
    #[error("record at lambda = {0} does not match a")]
    CaseMismatch(f64),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    Single,
    P1,
    P2,
    P3,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjNormRecord {
    pub lambda: f64,
    pub class: Class,
    pub m: u64,
    pub case: EigCase,
    pub which: Which,
    pub closed_form: f64,
    pub quadrature: f64,
}

impl ProjNormRecord {
    pub fn rel_error(&self) -> f64 {
        (self.closed_form - self.quadrature).abs() / self.closed_form
    }
}

fn minus_generic_norm(a: &ParamA, m: u64) -> f64 {
    let av = a.value();
    let k = 4.0 * m as f64 / (1.0 - av);
    let num = ((4.0 * PI + (1.0 - av) / m as f64 * (k * PI).sin()) / 8.0).sqrt();
    num / ((PI / 4.0 * (1.0 - av)).sqrt() * sin_pi(&closed::minus_ratio(a, m)).abs())
}

/// `sqrt(2) / sqrt(1 - cos(m pi (1+a)))`, written as `1/|sin(m pi (1+a)/2)|`
/// to avoid the cancellation in `1 - cos`.
pub fn zero_generic_norm(a: &ParamA, m: u64) -> f64 {
    let arg = ratio(m as i64, 2) * (BigRational::one() + a.hp());
    1.0 / sin_pi(&arg).abs()
}

/// `[|P1|, |P2|, |P3|]` at a coincidence, `l` being the -1 index.
pub fn triple_norms(a: f64, l: u64) -> [f64; 3] {
    let l = l as f64;
    let p1 = 2f64.sqrt() / (1.0 - a).sqrt();
    let p2 = (15.0 * (1.0 - a) + 16.0 * l * l * PI * PI * (1.0 + a)).sqrt() / (2.0 * 3f64.sqrt() * PI * (1.0 + a).sqrt() * l);
    let p3 = (64.0 * l * l * PI * PI - 36.0 * (1.0 - a) * (1.0 - a)).sqrt()
        / (2.0 * 6f64.sqrt() * PI * (1.0 + a).sqrt() * (1.0 - a) * l);
    [p1, p2, p3]
}

/// Limits of `|P2|` and `|P3|` as the index grows.
pub fn triple_limits(a: f64) -> [f64; 2] {
    [2.0 / 3f64.sqrt(), 4.0 / (6f64.sqrt() * (1.0 + a).sqrt() * (1.0 - a))]
}

fn qnorm(f: &PiecewiseTrig) -> Result<f64, FuncError> {
    Ok(inner_quadrature(f, f)?.re.max(0.0).sqrt())
}

/// `|psi| |phi| / |(phi, psi)|` by adaptive quadrature.
fn quad_proj(psi: &EigFun, phi: &EigFun) -> Result<f64, FuncError> {
    Ok(qnorm(&psi.func)? * qnorm(&phi.func)? / inner_quadrature(&phi.func, &psi.func)?.norm())
}

fn primary(rec: &EigRecord) -> (Class, u64) {
    let mb = rec.memberships.iter().next().expect("records have a class");
    (mb.class, mb.m)
}

/// Closed-form norms of the projections at `rec`, each with its quadrature
/// counterpart. The triple uses the pairs `psi1(phi1, .)`,
/// `psi2(eta, .)` and `xi(phi2, .)`.
pub fn projection_norm(rec: &EigRecord, a: &ParamA) -> Result<Vec<ProjNormRecord>, BasisError> {
    let row = |class, m, which, closed_form, quadrature| ProjNormRecord {
        lambda: rec.lambda,
        class,
        m,
        case: rec.case,
        which,
        closed_form,
        quadrature,
    };
    if rec.case == EigCase::ExceptionalPair {
        let l = rec.member(Class::Minus).ok_or(BasisError::CaseMismatch(rec.lambda))?;
        let ([psi1, psi2, xi], [phi1, phi2, eta]) = root_space(rec, a)?;
        let cf = triple_norms(a.value(), l);
        return Ok(vec![
            row(Class::Minus, l, Which::P1, cf[0], quad_proj(&psi1, &phi1)?),
            row(Class::Minus, l, Which::P2, cf[1], quad_proj(&psi2, &eta)?),
            row(Class::Minus, l, Which::P3, cf[2], quad_proj(&xi, &phi2)?),
        ]);
    }
    let (class, m) = primary(rec);
    let closed_form = match (rec.case, class) {
        (EigCase::ZeroEv, _) => (4.0f64 / 3.0).sqrt(),
        (EigCase::ExceptionalOdd, _) => 1.0,
        (EigCase::Generic, Class::Minus) => minus_generic_norm(a, m),
        (EigCase::Generic, Class::Plus) => minus_generic_norm(&a.negate(), m),
        (EigCase::Generic, Class::Zero) => zero_generic_norm(a, m),
        _ => return Err(BasisError::CaseMismatch(rec.lambda)),
    };
    let pair = pairs_for(rec, a)?.remove(0);
    let quadrature = qnorm(&pair.psi.func)? * qnorm(&pair.phi.func)?;
    Ok(vec![row(class, m, Which::Single, closed_form, quadrature)])
}

pub fn projection_norms(a: &ParamA, lambda_max: f64) -> Result<Vec<ProjNormRecord>, BasisError> {
    let recs = enumerate(a, lambda_max)?;
    let rows: Result<Vec<Vec<ProjNormRecord>>, BasisError> = recs.par_iter().map(|r| projection_norm(r, a)).collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub fn projection_csv(rows: &[ProjNormRecord]) -> String {
    let mut s = String::from("class,m,which,norm_closed,norm_quad\n");
    for r in rows {
        s.push_str(&format!("{},{},{:?},{:.16e},{:.16e}\n", r.class as i8, r.m, r.which, r.closed_form, r.quadrature));
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupRow {
    pub k: usize,
    pub p: i128,
    pub q: i128,
    pub m: u64,
    pub norm: f64,
    /// `q_k / pi`, the lower bound implied by `|q_k a - p_k| < 1/q_k`.
    pub dirichlet_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupReport {
    pub rows: Vec<BlowupRow>,
    pub median_generic: f64,
    pub running_max: Vec<f64>,
    /// First convergent index where the running max exceeds ten medians.
    pub exceeds_at: Option<usize>,
}

/// Median of the class-0 generic norms for `m = 1..=m_max`.
pub fn median_generic_norm(a: &ParamA, m_max: u64) -> f64 {
    let mut v: Vec<f64> = (1..=m_max)
        .filter(|&m| zero_class_case(a, m) == ZeroClassCase::Generic)
        .map(|m| zero_generic_norm(a, m))
        .collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

/// Class-0 generic norms at `m = 2 q_k` over the first `k_count` convergents.
pub fn blowup_probe(a: &ParamA, k_count: usize) -> Result<BlowupReport, BasisError> {
    if a.is_rational() {
        return Err(BasisError::NotIrrational);
    }
    let rows: Vec<BlowupRow> = convergents(a, k_count)?
        .into_iter()
        .map(|cv| {
            let m = 2 * cv.q as u64;
            BlowupRow { k: cv.k, p: cv.p, q: cv.q, m, norm: zero_generic_norm(a, m), dirichlet_bound: cv.q as f64 / PI }
        })
        .collect();
    let median_generic = median_generic_norm(a, 1000);
    let running_max: Vec<f64> = rows
        .iter()
        .scan(0.0f64, |mx, r| {
            *mx = mx.max(r.norm);
            Some(*mx)
        })
        .collect();
    let exceeds_at = running_max.iter().position(|&x| x > 10.0 * median_generic).map(|i| rows[i].k);
    Ok(BlowupReport { rows, median_generic, running_max, exceeds_at })
}

pub fn blowup_csv(rep: &BlowupReport) -> String {
    let mut s = String::from("k,q,m,norm\n");
    for r in &rep.rows {
        s.push_str(&format!("{},{},{},{:.16e}\n", r.k, r.q, r.m, r.norm));
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassBound {
    pub class: Class,
    pub count: usize,
    /// Smallest value of the denominator quantity over the tested indices.
    pub min_denominator: f64,
    pub denominator_bound: f64,
    pub max_norm: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalBoundReport {
    pub p: i64,
    pub q: i64,
    pub classes: Vec<ClassBound>,
    /// Largest norm of any kind up to the tested indices.
    pub sup_norm: f64,
    pub sup_bound: f64,
    pub holds: bool,
}

/// Checks the three elementary lower bounds on the generic denominators,
/// `|sin| >= 2/|q-p|`, `|sin| >= 2/|q+p|`, `1 - cos >= 4/q^2`, and the norm
/// bounds they imply, for `m <= m_max`.
pub fn rational_bound_check(a: &ParamA, m_max: u64) -> Result<RationalBoundReport, BasisError> {
    let (p, q) = a.as_ratio().ok_or(BasisError::NotRational)?;
    let av = a.value();
    let minus_num_max = ((4.0 * PI + (1.0 - av)) / 8.0).sqrt();
    let plus_num_max = ((4.0 * PI + (1.0 + av)) / 8.0).sqrt();
    let mut classes = Vec::new();

    let mut side = |class: Class, a_side: &ParamA, num_max: f64, width: f64, d_bound: f64| {
        let ms: Vec<u64> = (1..=m_max).filter(|&m| !crate::param::is_exceptional_minus(a_side, m)).collect();
        let dens: Vec<f64> = ms.iter().map(|&m| sin_pi(&closed::minus_ratio(a_side, m)).abs()).collect();
        let norms: Vec<f64> = ms.iter().map(|&m| minus_generic_norm(a_side, m)).collect();
        let bound = num_max / ((PI / 4.0 * width).sqrt() * d_bound);
        let min_den = dens.iter().copied().fold(f64::INFINITY, f64::min);
        let max_norm = norms.iter().copied().fold(0.0, f64::max);
        let holds = dens.iter().all(|&d| d >= d_bound) && norms.iter().all(|&n| n <= bound);
        classes.push(ClassBound { class, count: ms.len(), min_denominator: min_den, denominator_bound: d_bound, max_norm, bound, holds });
    };
    side(Class::Minus, a, minus_num_max, 1.0 - av, 2.0 / (q - p).abs() as f64);
    side(Class::Plus, &a.negate(), plus_num_max, 1.0 + av, 2.0 / (q + p).abs() as f64);

    let ms: Vec<u64> = (1..=m_max).filter(|&m| zero_class_case(a, m) == ZeroClassCase::Generic).collect();
    // exact rational form, so that equality cases stay exact
    let one_plus_a = BigRational::one() + a.hp();
    let dens: Vec<f64> =
        ms.iter().map(|&m| 1.0 - cos_pi(&(ratio(m as i64, 1) * &one_plus_a))).collect();
    let d_bound = 4.0 / (q * q) as f64;
    let bound = 2f64.sqrt() / d_bound.sqrt();
    let norms: Vec<f64> = dens.iter().map(|&d| 2f64.sqrt() / d.sqrt()).collect();
    classes.push(ClassBound {
        class: Class::Zero,
        count: ms.len(),
        min_denominator: dens.iter().copied().fold(f64::INFINITY, f64::min),
        denominator_bound: d_bound,
        max_norm: norms.iter().copied().fold(0.0, f64::max),
        bound,
        holds: dens.iter().all(|&d| d >= d_bound) && norms.iter().all(|&n| n <= bound),
    });

    let kmax = m_max as f64 * 4.0 / (1.0 - av.abs());
    let mut sup_norm = classes.iter().map(|c| c.max_norm).fold(0.0, f64::max);
    let mut sup_bound = classes.iter().map(|c| c.bound).fold(0.0, f64::max);
    sup_bound = sup_bound.max((4.0f64 / 3.0).sqrt()).max(1.0);
    for rec in enumerate(a, kmax * kmax)?.iter().filter(|r| r.case != EigCase::Generic) {
        let v: Vec<f64> = match rec.case {
            EigCase::ZeroEv => vec![(4.0f64 / 3.0).sqrt()],
            EigCase::ExceptionalOdd => vec![1.0],
            _ => triple_norms(av, rec.member(Class::Minus).unwrap_or(1)).to_vec(),
        };
        for x in v {
            sup_norm = sup_norm.max(x);
            sup_bound = sup_bound.max(x);
        }
    }
    let holds = classes.iter().all(|c| c.holds) && sup_norm <= sup_bound;
    Ok(RationalBoundReport { p, q, classes, sup_norm, sup_bound, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessRow {
    pub probe: usize,
    pub n: usize,
    pub residual: f64,
    pub norm: f64,
}

/// Residuals of the biorthogonal partial sums `sum_{j<N} psi_j (phi_j, f)`.
pub struct Expansion {
    pub pairs: Vec<BiorthPair>,
    pub grid: Arc<Grid>,
    psi: Vec<GridFn>,
    phi: Vec<GridFn>,
}

impl Expansion {
    /// At least `n` pairs, ordered by eigenvalue.
    pub fn new(a: &ParamA, n: usize, include_generalized: bool) -> Result<Expansion, BasisError> {
        let mut lmax = ((n as f64) + 4.0).powi(2);
        let pairs = loop {
            let mut pairs = biorthogonalize(a, lmax)?;
            if !include_generalized {
                pairs.retain(|p| p.psi.rank == crate::eigensystem::Rank::Eigen);
            }
            if pairs.len() >= n {
                pairs.truncate(n);
                break pairs;
            }
            lmax *= 2.0;
        };
        let kmax = pairs.iter().map(|p| p.psi.k).fold(1.0, f64::max);
        let c = a.jump_point();
        let panels = |len: f64| ((kmax * len / 3.0).ceil() as usize).max(8);
        let grid = Grid::new(c, panels(c + FRAC_PI_2), panels(FRAC_PI_2 - c), 24)?;
        let psi = pairs.par_iter().map(|p| GridFn::sample(&grid, &p.psi.func)).collect();
        let phi = pairs.par_iter().map(|p| GridFn::sample(&grid, &p.phi.func)).collect();
        Ok(Expansion { pairs, grid, psi, phi })
    }

    /// `|f - S_N f|` for each requested `N`.
    pub fn residuals(&self, f: &GridFn, ns: &[usize]) -> Result<Vec<f64>, BasisError> {
        let coeffs: Vec<C64> = self.phi.iter().map(|p| p.inner(f)).collect::<Result<_, _>>()?;
        let mut out = Vec::with_capacity(ns.len());
        let mut acc = GridFn::zeros(&self.grid);
        let mut used = 0;
        let mut sorted: Vec<usize> = ns.to_vec();
        sorted.sort_unstable();
        let mut by_n = std::collections::BTreeMap::new();
        for &n in &sorted {
            let n = n.min(self.psi.len());
            while used < n {
                let c = coeffs[used];
                for (v, s) in acc.values.iter_mut().zip(&self.psi[used].values) {
                    *v += c * s;
                }
                used += 1;
            }
            by_n.insert(n, f.minus(&acc)?.norm());
        }
        for &n in ns {
            out.push(by_n[&n.min(self.psi.len())]);
        }
        Ok(out)
    }
}

/// Smooth bump `exp(-1/(1-t^2))` with `t = (x - x0)/w`, zero outside.
pub fn bump(x0: f64, w: f64) -> impl Fn(f64) -> C64 {
    move |x| {
        let t = (x - x0) / w;
        if t.abs() >= 1.0 { C64::new(0.0, 0.0) } else { C64::new((-1.0 / (1.0 - t * t)).exp(), 0.0) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub ns: Vec<usize>,
    pub rows: Vec<CompletenessRow>,
    /// For every probe, residual at the largest N below residual at the smallest.
    pub decreasing: bool,
}

/// Random smooth probes (seeded, `1/n^3` Fourier decay) expanded in the
/// first `N` biorthogonal pairs, for a ladder of `N` up to `n`.
pub fn truncated_completeness(a: &ParamA, n: usize, probe_count: usize, seed: u64) -> Result<CompletenessReport, BasisError> {
    let n = n.min(200);
    let exp = Expansion::new(a, n, true)?;
    let ns: Vec<usize> = [n / 8, n / 4, n / 2, n].into_iter().filter(|&x| x > 0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut decreasing = true;
    for probe in 0..probe_count {
        let f = GridFn::sample(&exp.grid, &random_smooth(&mut rng, 8));
        let res = exp.residuals(&f, &ns)?;
        decreasing &= res.last() < res.first();
        let norm = f.norm();
        rows.extend(ns.iter().zip(&res).map(|(&n, &residual)| CompletenessRow { probe, n, residual, norm }));
    }
    Ok(CompletenessReport { ns, rows, decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pa(s: &str) -> ParamA {
        ParamA::parse(s).unwrap()
    }

    #[test]
    fn special_norms() {
        for s in ["1/3", "sqrt(2)-1", "2/5", "0"] {
            let a = pa(s);
            for row in projection_norms(&a, 400.0).unwrap() {
                assert!(row.rel_error() < 1e-8, "{s} {row:?}");
                assert!(row.closed_form >= 1.0 - 1e-12, "{row:?}");
                match (row.case, row.which) {
                    (EigCase::ZeroEv, _) => assert!((row.closed_form - (4f64 / 3.0).sqrt()).abs() < 1e-12),
                    (EigCase::ExceptionalOdd, _) => assert_eq!(row.closed_form, 1.0),
                    (EigCase::ExceptionalPair, Which::P1) => {
                        assert!((row.closed_form - 2f64.sqrt() / (1.0 - a.value()).sqrt()).abs() < 1e-12)
                    }
                    _ => {}
                }
            }
        }
        let a = pa("1/3");
        let p1 = triple_norms(a.value(), 1)[0];
        assert!((p1 - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn triple_limits_at_large_index() {
        for a in [1.0 / 3.0, 0.0, 0.4] {
            let [_, p2, p3] = triple_norms(a, 1000);
            let [l2, l3] = triple_limits(a);
            assert!((p2 / l2 - 1.0).abs() < 0.01);
            assert!((p3 / l3 - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn blowup_sqrt2() {
        let a = pa("sqrt(2)-1");
        let rep = blowup_probe(&a, 10).unwrap();
        let at29 = rep.rows.iter().find(|r| r.q == 29).unwrap();
        assert!(at29.norm > 10.0);
        for r in &rep.rows {
            assert!(r.norm >= r.dirichlet_bound, "{r:?}");
        }
        assert!(rep.exceeds_at.is_some());
        assert!(matches!(blowup_probe(&pa("1/3"), 4), Err(BasisError::NotIrrational)));
    }

    #[test]
    fn rational_bounds() {
        let rep = rational_bound_check(&pa("1/3"), 300).unwrap();
        assert!(rep.holds, "{rep:?}");
        let zero = rep.classes.iter().find(|c| c.class == Class::Zero).unwrap();
        assert!((zero.bound - 3.0 * 2f64.sqrt() / 2.0).abs() < 1e-14);
        let rep0 = rational_bound_check(&pa("0"), 100).unwrap();
        assert_eq!(rep0.classes.iter().find(|c| c.class == Class::Zero).unwrap().count, 0);
        assert!(rep0.holds);
        // equality case of 1 - cos >= 4/q^2
        assert!(rational_bound_check(&pa("1/2"), 200).unwrap().holds);
    }

    #[test]
    fn expansion_of_member_and_bump() {
        let a = pa("sqrt(2)-1");
        let exp = Expansion::new(&a, 100, true).unwrap();
        let f = GridFn::sample(&exp.grid, &exp.pairs[5].psi.func);
        let r = exp.residuals(&f, &[6, 40, 100]).unwrap();
        assert!(r.iter().all(|&x| x < 1e-9), "{r:?}");
        let g = GridFn::from_fn(&exp.grid, bump(-0.9, 0.5));
        let r = exp.residuals(&g, &[25, 100]).unwrap();
        assert!(r[1] < r[0], "{r:?}");
    }

    #[test]
    fn eigenfunctions_alone_miss_xi() {
        let a = pa("1/3");
        let exp = Expansion::new(&a, 30, false).unwrap();
        let rec = enumerate(&a, 40.0).unwrap().into_iter().find(|r| r.case == EigCase::ExceptionalPair).unwrap();
        let xi = crate::eigensystem::generalized_xi(&rec, &a).unwrap();
        let f = GridFn::sample(&exp.grid, &xi.func);
        let r = exp.residuals(&f, &[10, 20, 30]).unwrap();
        let nf = f.norm();
        assert!(r.iter().all(|&x| x > 0.5 * nf), "{r:?} {nf}");
    }
}
