//! Named contract checks grouped into suites, shared by the CLI and tests.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis_diag::{blowup_probe, projection_norms, rational_bound_check};
use crate::eigensystem::{biorthogonalize, eigenfunctions_h, gram_quadrature, pairs_for};
use crate::funcspace::{Grid, GridFn, PiecewiseTrig, C64};
use crate::metric::{injectivity_probe, into_domain_h, noninvertibility_probe, random_smooth, MetricOp};
use crate::param::ParamA;
use crate::resolvent::{fd_residual, singular_value_probe, ResolventKernel};
use crate::simulator::{estimate_gap, run, tent_moment2, SimConfig};
use crate::spectrum::{char_det, det_real_zeros, drift_gap, enumerate, EigCase};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spectrum,
    Gram,
    Resolvent,
    Metric,
    Projections,
    Basis,
    Sim,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "spectrum" => Suite::Spectrum,
            "gram" => Suite::Gram,
            "resolvent" => Suite::Resolvent,
            "metric" => Suite::Metric,
            "projections" => Suite::Projections,
            "basis" => Suite::Basis,
            "sim" => Suite::Sim,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite `{s}`")),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    /// Reported but not counted, e.g. theorem-level checks at rational `a`.
    pub informational: bool,
}

impl Check {
    /// Passes when `measured < threshold`.
    pub fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Check {
        Check { name: name.into(), passed: measured < threshold, measured, threshold, informational: false }
    }

    pub fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Check {
        Check { name: name.into(), passed: measured > threshold, measured, threshold, informational: false }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        Check { name: name.into(), passed: ok, measured: ok as u8 as f64, threshold: 1.0, informational: false }
    }

    fn info(mut self) -> Check {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub a: ParamA,
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn run_suite(a: &ParamA, suite: Suite) -> Result<SuiteReport, Error> {
    let mut checks = Vec::new();
    let wanted = |s: Suite| suite == s || suite == Suite::All;
    if wanted(Suite::Spectrum) {
        checks.extend(spectrum_checks(a)?);
    }
    if wanted(Suite::Gram) {
        checks.extend(gram_checks(a)?);
    }
    if wanted(Suite::Resolvent) {
        checks.extend(resolvent_checks(a)?);
    }
    if wanted(Suite::Metric) {
        checks.extend(metric_checks(a)?);
    }
    if wanted(Suite::Projections) {
        checks.extend(projection_checks(a)?);
    }
    if wanted(Suite::Basis) {
        checks.extend(basis_checks(a)?);
    }
    if wanted(Suite::Sim) {
        checks.extend(sim_checks(a)?);
    }
    let passed = checks.iter().filter(|c| !c.informational).all(|c| c.passed);
    Ok(SuiteReport { a: a.clone(), suite, checks, passed })
}

pub fn spectrum_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    let lmax = 2500.0;
    let recs = enumerate(a, lmax)?;
    let av = a.value();
    let worst = recs.iter().map(|r| char_det(av, C64::new(r.k, 0.0)).norm()).fold(0.0, f64::max);
    let zeros = det_real_zeros(av, lmax.sqrt(), 1e-3, 1e-13);
    let missing = zeros
        .iter()
        .filter(|&&k| !recs.iter().any(|r| (r.k - k).abs() < 1e-8))
        .count();
    let mut out = vec![
        Check::below("det vanishes on enumerated spectrum", worst, 1e-9),
        Check::below("determinant zeros missing from enumeration", missing as f64, 0.5),
    ];
    let multiple = recs.iter().filter(|r| r.alg_mult > 1).count();
    if a.is_rational() {
        out.push(Check::above("coincidences with (geom, alg) = (2, 3)", multiple as f64, 0.5));
    } else {
        out.push(Check::below("non-simple eigenvalues for irrational a", multiple as f64, 0.5));
    }
    let g0 = drift_gap(1.0, 0.0)?;
    let g1 = drift_gap(1.0, 2.0 * 3f64.sqrt())?;
    out.push(Check::flag("drift gap 2 at b = 0 and 8 at b = 2 sqrt(3)", g0 == 2.0 && g1 == 8.0));
    Ok(out)
}

pub fn gram_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    let mut pairs = biorthogonalize(a, 4000.0)?;
    pairs.truncate(30);
    let g = gram_quadrature(&pairs, a)?;
    let n = g.nrows();
    let dev = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    let mut out = vec![Check::below(format!("Gram of first {n} pairs equals identity"), dev, 1e-9)];
    if a.is_rational() {
        if let Some(rec) = enumerate(a, 1e5)?.into_iter().find(|r| r.case == EigCase::ExceptionalPair) {
            let block = pairs_for(&rec, a)?;
            let gb = gram_quadrature(&block, a)?;
            let dev = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| (gb[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
                .fold(0.0, f64::max);
            out.push(Check::below(format!("root block at lambda = {} equals I3", rec.lambda), dev, 1e-9));
        }
    }
    Ok(out)
}

pub fn resolvent_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    let c = a.jump_point();
    let grid = Grid::new(c, 12, 12, 24)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let probes: Vec<PiecewiseTrig> = (0..10).map(|_| random_smooth(&mut rng, 8)).collect();
    let (mut bc, mut pde) = (0.0f64, 0.0f64);
    for lambda in [C64::new(-1.0, 0.0), C64::new(-2.0, 0.0), C64::new(2.5, 1.0)] {
        let kern = ResolventKernel::new(a, lambda)?;
        for f in &probes {
            let sol = kern.solve(&GridFn::sample(&grid, f));
            bc = bc.max(sol.boundary_deviation());
            pde = pde.max(fd_residual(|x| sol.eval(x), |x| f.at(x), lambda, c, 40));
        }
    }
    let kern = ResolventKernel::new(a, C64::new(-1.0, 0.0))?;
    let one = GridFn::from_fn(&grid, |_| C64::new(1.0, 0.0));
    let sol = kern.solve(&one);
    let dev = (0..=64).map(|i| (sol.eval(-PI / 2.0 + PI * i as f64 / 64.0) - 1.0).norm()).fold(0.0, f64::max);
    let svd = singular_value_probe(a, C64::new(-1.0, 0.0), 512)?;
    Ok(vec![
        Check::below("boundary deviation of R f", bc, 1e-8),
        Check::below("PDE residual of R f", pde, 1e-6),
        Check::below("R(-1) 1 = 1", dev, 1e-10),
        Check::below("singular value decay exponent", svd.decay_exponent, -1.8),
    ])
}

/// Random element of D(H) built from a seeded smooth sum.
pub fn random_domain_h(rng: &mut ChaCha8Rng, c: f64) -> PiecewiseTrig {
    into_domain_h(random_smooth(rng, 8), c)
}

pub fn metric_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    let op = MetricOp::new(a);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tests: Vec<PiecewiseTrig> = Vec::new();
    for rec in enumerate(a, 400.0)? {
        for ef in eigenfunctions_h(&rec, a)? {
            if tests.len() < 10 {
                tests.push(ef.func);
            }
        }
    }
    while tests.len() < 20 {
        tests.push(random_domain_h(&mut rng, op.c));
    }
    let mut worst = 0.0f64;
    for psi in &tests {
        let norm = crate::funcspace::norm_sampled(psi)?;
        worst = worst.max(op.quasi_self_adjointness_residual(psi)? / norm);
    }
    let mut pos = f64::INFINITY;
    for _ in 0..100 {
        let f = random_smooth(&mut rng, 8);
        pos = pos.min(op.form(&f)?.re);
    }
    let mut out = vec![
        Check::below("quasi-self-adjointness residual", worst, 1e-8),
        Check::above("min (f, Theta f)", pos, -1e-12),
    ];
    if a.is_rational() {
        return Ok(out.into_iter().map(Check::info).collect());
    }
    let seq = noninvertibility_probe(a, 8)?;
    let min_r = seq.iter().map(|r| r.rayleigh).fold(f64::INFINITY, f64::min);
    out.push(Check::below("Rayleigh quotient along n = 4 q_k", min_r, 1e-2));
    out.push(Check::above("all Rayleigh quotients positive", min_r, 0.0));
    let inj = injectivity_probe(a, 200)?;
    out.push(Check::flag("Neumann coefficients positive for n > 0", inj.all_positive));
    out.push(Check::below("off-diagonal Neumann entries", inj.max_off_diagonal, 1e-10));
    Ok(out)
}

pub fn projection_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    let rows = projection_norms(a, 2500.0)?;
    let worst = rows.iter().map(|r| r.rel_error()).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.closed_form).fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::below("closed-form projection norms vs quadrature", worst, 1e-8),
        Check::above("projection norms >= 1", min, 1.0 - 1e-12),
    ])
}

pub fn basis_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    if a.is_rational() {
        let rep = rational_bound_check(a, 1000)?;
        return Ok(vec![Check::flag("uniform bounds for rational a", rep.holds)]);
    }
    let rep = blowup_probe(a, 10)?;
    let peak = rep.running_max.last().copied().unwrap_or(0.0);
    Ok(vec![Check::above("running max over ten medians", peak / rep.median_generic, 10.0)])
}

pub fn sim_checks(a: &ParamA) -> Result<Vec<Check>, Error> {
    let mut cfg = SimConfig::new(a.clone(), 1e5 / 16.0, 16, 7);
    cfg.dt = 1e-3;
    let rep = run(&cfg)?;
    let target = tent_moment2(a.value());
    let mut gcfg = SimConfig::new(a.clone(), 1.0, 100_000, 11);
    gcfg.dt = 1e-3;
    let rec = enumerate(a, 4.5)?.into_iter().find(|r| (r.lambda - 4.0).abs() < 1e-12);
    let mut out = vec![
        Check::below("E[X^2] relative error", (rep.moment2 / target - 1.0).abs(), 0.02),
        Check::below("histogram distance to tent density", rep.tent_sup_distance, 0.02),
    ];
    if let Some(rec) = rec {
        let g = eigenfunctions_h(&rec, a)?.remove(0).func;
        let est = estimate_gap(&gcfg, &g)?;
        out.push(Check::below("gap estimate relative error", (est.gap / 4.0 - 1.0).abs(), 0.2));
    }
    Ok(out)
}

