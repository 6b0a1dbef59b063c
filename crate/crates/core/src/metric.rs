//! Closed-form metric operator `Theta = phi0 (phi0, .) + P0 + P_- (+) P_+`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;
use thiserror::Error;

use crate::funcspace::{
    inner, inner_quadrature, norm_sampled, validate_domain_h, validate_domain_hstar, DomainReport, FuncError, GridFn, PiecewiseTrig,
    TrigTerm, C64,
};
use crate::param::{convergents, ParamA, ParamError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("a must be irrational for this probe")]
    NotIrrational,
    #[error("the reflection x -> -x needs a function without a break point")]
    NeedsSinglePiece,
    #[error("input is not in D(H): {0:?}")]
    DomainViolation(DomainReport),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Clone, Debug)]
pub struct MetricOp {
    pub a: ParamA,
    pub c: f64,
    /// Adjoint zero mode with unit constant; nonpositive.
    pub phi0: PiecewiseTrig,
    /// Centres `s` of the piece reflections `x -> s - x`.
    pub s_left: f64,
    pub s_right: f64,
}

fn sq_norm(f: &PiecewiseTrig) -> Result<f64, FuncError> {
    Ok(inner(f, f)?.re)
}

impl MetricOp {
    pub fn new(a: &ParamA) -> MetricOp {
        let av = a.value();
        let c = a.jump_point();
        let phi0 = PiecewiseTrig::split(
            c,
            vec![TrigTerm::linear(av - 1.0), TrigTerm::constant((av - 1.0) * FRAC_PI_2)],
            vec![TrigTerm::linear(av + 1.0), TrigTerm::constant(-(av + 1.0) * FRAC_PI_2)],
        )
        .expect("c is interior");
        MetricOp { a: a.clone(), c, phi0, s_left: -PI * (1.0 - av) / 2.0, s_right: PI * (1.0 + av) / 2.0 }
    }

    /// `(f(x) - f(-x)) / 2`
    pub fn p0(&self, f: &PiecewiseTrig) -> Result<PiecewiseTrig, MetricError> {
        let r = f.reflect_origin().ok_or(MetricError::NeedsSinglePiece)?;
        Ok(f.minus(&r)?.scale(0.5))
    }

    /// Antisymmetric part of each piece about its own midpoint.
    pub fn ppm(&self, f: &PiecewiseTrig) -> Result<PiecewiseTrig, MetricError> {
        let f = f.split_at(self.c)?;
        let half = |terms: &[TrigTerm], s: f64| {
            let mut v = terms.to_vec();
            v.extend(PiecewiseTrig::reflected_terms(terms, s).into_iter().map(|t| TrigTerm { coeff: -t.coeff, ..t }));
            v.into_iter().map(|t| TrigTerm { coeff: t.coeff * 0.5, ..t }).collect::<Vec<_>>()
        };
        Ok(PiecewiseTrig::split(
            self.c,
            half(&f.pieces[0].terms, self.s_left),
            half(&f.pieces[1].terms, self.s_right),
        )?)
    }

    pub fn rank_one(&self, f: &PiecewiseTrig) -> Result<PiecewiseTrig, MetricError> {
        Ok(self.phi0.scale(inner(&self.phi0, f)?))
    }

    pub fn apply(&self, f: &PiecewiseTrig) -> Result<PiecewiseTrig, MetricError> {
        Ok(self.rank_one(f)?.plus(&self.p0(f)?)?.plus(&self.ppm(f)?)?)
    }

    /// `|(phi0, f)|^2 + |P0 f|^2 + |P f|^2`, the three summands separately.
    pub fn quadratic_form(&self, f: &PiecewiseTrig) -> Result<[f64; 3], MetricError> {
        Ok([inner(&self.phi0, f)?.norm_sqr(), sq_norm(&self.p0(f)?)?, sq_norm(&self.ppm(f)?)?])
    }

    /// `(f, Theta f)` through the operator itself.
    pub fn form(&self, f: &PiecewiseTrig) -> Result<C64, MetricError> {
        Ok(inner(f, &self.apply(f)?)?)
    }

    /// `Theta f` on a reflection-closed grid.
    pub fn apply_grid(&self, f: &GridFn) -> Result<GridFn, MetricError> {
        let refl = f.grid.reflections();
        let (Some(o), Some(l), Some(r)) = (&refl.origin, &refl.left, &refl.right) else {
            return Err(FuncError::GridNotReflectionClosed.into());
        };
        let p0 = f.minus(&f.permuted(o))?.scale(0.5);
        let ppm = self.ppm_grid(f, l, r)?;
        let phi = GridFn::sample(&f.grid, &self.phi0);
        let rank = phi.scale(phi.inner(f)?);
        Ok(rank.plus(&p0)?.plus(&ppm)?)
    }

    fn ppm_grid(&self, f: &GridFn, l: &[usize], r: &[usize]) -> Result<GridFn, MetricError> {
        let nl = f.grid.left_len();
        let perm: Vec<usize> = (0..f.values.len()).map(|i| if i < nl { l[i] } else { r[i] }).collect();
        Ok(f.minus(&f.permuted(&perm))?.scale(0.5))
    }

    /// Grid versions of `P0` and `P_- (+) P_+`.
    pub fn projections_grid(&self, f: &GridFn) -> Result<(GridFn, GridFn), MetricError> {
        let refl = f.grid.reflections();
        let (Some(o), Some(l), Some(r)) = (&refl.origin, &refl.left, &refl.right) else {
            return Err(FuncError::GridNotReflectionClosed.into());
        };
        Ok((f.minus(&f.permuted(o))?.scale(0.5), self.ppm_grid(f, l, r)?))
    }

    /// `|H* Theta psi - Theta H psi|_2` for `psi` in D(H).
    pub fn quasi_self_adjointness_residual(&self, psi: &PiecewiseTrig) -> Result<f64, MetricError> {
        let rep = validate_domain_h(psi, self.c);
        if !rep.in_domain {
            return Err(MetricError::DomainViolation(rep));
        }
        let lhs = self.apply(psi)?.derivative(2).scale(-1.0);
        let rhs = self.apply(&psi.derivative(2).scale(-1.0))?;
        Ok(norm_sampled(&lhs.minus(&rhs)?)?)
    }

    /// `Theta psi` for `psi` in D(H) together with its D(H*) report.
    pub fn image_domain(&self, psi: &PiecewiseTrig) -> Result<DomainReport, MetricError> {
        Ok(validate_domain_hstar(&self.apply(psi)?, self.c))
    }
}

/// Neumann mode of index `n` with unit norm.
pub fn neumann_mode(n: u64) -> PiecewiseTrig {
    let s = (2.0 / PI).sqrt();
    match n {
        0 => PiecewiseTrig::single(vec![TrigTerm::constant(1.0 / PI.sqrt())]),
        n if n % 2 == 0 => PiecewiseTrig::single(vec![TrigTerm::cos(s, n as f64, 0.0)]),
        n => PiecewiseTrig::single(vec![TrigTerm::sin(s, n as f64, 0.0)]),
    }
}

/// `(1 - cos(n pi/2) cos(n pi a/2)) / 2`
pub fn neumann_coefficient(a: &ParamA, n: u64) -> f64 {
    use crate::param::hp::{cos_pi, ratio};
    let half_n = ratio(n as i64, 2);
    let ca = cos_pi(&(&half_n * a.hp()));
    0.5 * (1.0 - cos_pi(&half_n) * ca)
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityRow {
    pub n: u64,
    pub coefficient: f64,
    pub quadrature: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub rows: Vec<InjectivityRow>,
    pub all_positive: bool,
    pub max_off_diagonal: f64,
    pub max_diagonal_error: f64,
}

/// Diagonal coefficients of `P_- (+) P_+` on even Neumann modes up to
/// `n_max`, and the off-diagonal block up to `min(n_max, 40)` by quadrature.
pub fn injectivity_probe(a: &ParamA, n_max: u64) -> Result<InjectivityReport, MetricError> {
    if a.is_rational() {
        return Err(MetricError::NotIrrational);
    }
    let op = MetricOp::new(a);
    let quad_max = n_max.min(40);
    let mut rows = Vec::new();
    let mut max_diag = 0.0f64;
    for n in (0..=n_max).step_by(2) {
        let coefficient = neumann_coefficient(a, n);
        let quadrature = if n <= quad_max {
            let chi = neumann_mode(n);
            inner_quadrature(&chi, &op.ppm(&chi)?)?.re
        } else {
            f64::NAN
        };
        if quadrature.is_finite() {
            max_diag = max_diag.max((quadrature - coefficient).abs());
        }
        rows.push(InjectivityRow { n, coefficient, quadrature });
    }
    let mut max_off = 0.0f64;
    for n in (0..=quad_max).step_by(2) {
        let pn = op.ppm(&neumann_mode(n))?;
        for m in (0..=quad_max).step_by(2).filter(|&m| m != n) {
            max_off = max_off.max(inner_quadrature(&neumann_mode(m), &pn)?.norm());
        }
    }
    let all_positive = rows.iter().filter(|r| r.n != 0).all(|r| r.coefficient > 0.0);
    Ok(InjectivityReport { rows, all_positive, max_off_diagonal: max_off, max_diagonal_error: max_diag })
}

#[derive(Clone, Debug, Serialize)]
pub struct RayleighRow {
    pub k: usize,
    pub q: i128,
    pub n: u64,
    pub rayleigh: f64,
}

/// Rayleigh quotients `(chi_n, Theta chi_n)` along `n = mult * q_k`.
pub fn rayleigh_sequence(a: &ParamA, k_max: usize, mult: u64) -> Result<Vec<RayleighRow>, MetricError> {
    if a.is_rational() {
        return Err(MetricError::NotIrrational);
    }
    let op = MetricOp::new(a);
    convergents(a, k_max)?
        .into_iter()
        .map(|cv| {
            let n = mult * cv.q as u64;
            let chi = neumann_mode(n);
            let rayleigh = op.form(&chi)?.re / sq_norm(&chi)?;
            Ok(RayleighRow { k: cv.k, q: cv.q, n, rayleigh })
        })
        .collect()
}

/// Rayleigh quotients along `n = 4 q_k`, where `cos(n pi/2) = 1` and
/// `cos(n pi a/2)` approaches 1.
pub fn noninvertibility_probe(a: &ParamA, k_max: usize) -> Result<Vec<RayleighRow>, MetricError> {
    rayleigh_sequence(a, k_max, 4)
}

/// Random element of D(H): a trig sum made to satisfy
/// `f(-pi/2) = f(c) = f(pi/2)` by adding `beta x + gamma cos x`.
pub fn into_domain_h(g: PiecewiseTrig, c: f64) -> PiecewiseTrig {
    let beta = (g.at(-FRAC_PI_2) - g.at(FRAC_PI_2)) / PI;
    let with_lin = g.plus(&PiecewiseTrig::single(vec![TrigTerm::linear(beta)])).expect("single pieces");
    let gamma = (with_lin.at(FRAC_PI_2) - with_lin.at(c)) / c.cos();
    with_lin.plus(&PiecewiseTrig::single(vec![TrigTerm::cos(gamma, 1.0, 0.0)])).expect("single pieces")
}

/// Seeded smooth trig sum with decay `1/n^3`, single piece.
pub fn random_smooth(rng: &mut impl rand::Rng, terms: usize) -> PiecewiseTrig {
    use rand_distr::{Distribution, StandardNormal};
    let mut v = vec![TrigTerm::constant(C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))];
    for n in 1..=terms {
        let amp = 1.0 / (n as f64).powi(3);
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let shift = rng.gen_range(0.0..2.0 * PI);
        v.push(TrigTerm::cos(C64::new(re, im) * amp, n as f64, shift));
    }
    PiecewiseTrig::single(v)
}
