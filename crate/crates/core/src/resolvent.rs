//! Dirichlet Green's function and the rank-one resolvent formula
//! `R f = R0 f + h / (1 - h(c)) (R0 f)(c)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock};

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::funcspace::{FuncError, Grid, GridFn, Side, C64};
use crate::param::ParamA;
use crate::spectrum::enumerate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolventError {
    #[error("lambda = {0} is an eigenvalue of H")]
    PoleAtEigenvalue(C64),
    #[error("lambda = {0} is a Dirichlet eigenvalue; the decomposition is not evaluated there")]
    PoleAtDirichletEigenvalue(C64),
    #[error("1 - h(c) = {0:e} is too small")]
    DenominatorVanishes(f64),
    #[error(transparent)]
    Func(#[from] FuncError),
}

/// Interior step of the fourth-order difference checks.
pub const FD_STEP: f64 = PI / 4096.0;

fn gl(order: usize) -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    assert_eq!(order, 24);
    RULE.get_or_init(|| GaussLegendre::new(24).expect("degree >= 2").into_node_weight_pairs())
}

/// `-1/(k sin k pi) sin(k(x_< + pi/2)) sin(k(x_> - pi/2))`
pub fn green0(lambda: C64, x: f64, y: f64) -> Result<C64, ResolventError> {
    let k = lambda.sqrt();
    let s = (k * PI).sin();
    if s.norm() < 1e-12 {
        return Err(ResolventError::PoleAtDirichletEigenvalue(lambda));
    }
    Ok(green0_unchecked(k, s, x, y))
}

fn green0_unchecked(k: C64, sin_kpi: C64, x: f64, y: f64) -> C64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    -(k * (lo + FRAC_PI_2)).sin() * (k * (hi - FRAC_PI_2)).sin() / (k * sin_kpi)
}

#[derive(Clone, Debug)]
pub struct ResolventKernel {
    pub lambda: C64,
    pub k: C64,
    pub c: f64,
    sin_kpi: C64,
    /// `sqrt(-lambda)`, principal branch.
    root: C64,
    cosh_end: C64,
    pub denom: C64,
}

impl ResolventKernel {
    pub fn new(a: &ParamA, lambda: C64) -> Result<Self, ResolventError> {
        let near = |mu: f64| (lambda - mu).norm() < 1e-10 * mu.max(1.0);
        if lambda.im.abs() < 1e-9 && lambda.re > -1.0 {
            let spec = enumerate(a, lambda.re.max(0.0) + 10.0).map_err(|_| ResolventError::PoleAtEigenvalue(lambda))?;
            if spec.iter().any(|r| near(r.lambda)) {
                return Err(ResolventError::PoleAtEigenvalue(lambda));
            }
        }
        let k = lambda.sqrt();
        let sin_kpi = (k * PI).sin();
        if sin_kpi.norm() < 1e-12 {
            return Err(ResolventError::PoleAtDirichletEigenvalue(lambda));
        }
        let root = (-lambda).sqrt();
        let cosh_end = (root * FRAC_PI_2).cosh();
        let c = a.jump_point();
        let hc = (root * c).cosh() / cosh_end;
        let denom = C64::new(1.0, 0.0) - hc;
        if denom.norm() < 1e-8 {
            return Err(ResolventError::DenominatorVanishes(denom.norm()));
        }
        Ok(ResolventKernel { lambda, k, c, sin_kpi, root, cosh_end, denom })
    }

    pub fn green0(&self, x: f64, y: f64) -> C64 {
        green0_unchecked(self.k, self.sin_kpi, x, y)
    }

    /// `cosh(sqrt(-lambda) x) / cosh(sqrt(-lambda) pi/2)`
    pub fn h(&self, x: f64) -> C64 {
        (self.root * x).cosh() / self.cosh_end
    }

    /// Full resolvent kernel `R(lambda)(x, y)`.
    pub fn kernel(&self, x: f64, y: f64) -> C64 {
        self.green0(x, y) + self.h(x) / self.denom * self.green0(self.c, y)
    }

    pub fn solve(&self, f: &GridFn) -> Solution {
        Solution::new(self, f)
    }

    /// `R(lambda) f` sampled on the grid of `f`.
    pub fn apply(&self, f: &GridFn) -> GridFn {
        let sol = self.solve(f);
        GridFn::from_fn(&f.grid, |x| sol.eval(x))
    }
}

/// Convenience wrapper: guards, then `R(lambda) f` on the grid of `f`.
pub fn apply_resolvent(lambda: C64, f: &GridFn, a: &ParamA) -> Result<GridFn, ResolventError> {
    Ok(ResolventKernel::new(a, lambda)?.apply(f))
}

/// `R(lambda) f` evaluable at any point, via cumulative panel integrals of
/// the separable Dirichlet kernel.
#[derive(Clone, Debug)]
pub struct Solution {
    kernel: ResolventKernel,
    f: GridFn,
    panels: Vec<(f64, f64, usize)>,
    /// `int_{-pi/2}^{panel lo} sin(k(y+pi/2)) f`
    prefix_l: Vec<C64>,
    /// `int_{panel lo}^{pi/2} sin(k(y-pi/2)) f`, summed from the right end
    /// because the factor grows away from `pi/2` for complex `k`.
    suffix_r: Vec<C64>,
    at_c: C64,
}

impl Solution {
    fn new(kernel: &ResolventKernel, f: &GridFn) -> Solution {
        let grid = &f.grid;
        let k = kernel.k;
        let panels: Vec<_> = grid.panels().collect();
        let order = grid.order();
        let panel_sum = |first: usize, shift: f64| -> C64 {
            (first..first + order)
                .map(|i| (k * (grid.nodes()[i] + shift)).sin() * f.values[i] * grid.weights()[i])
                .sum()
        };
        let prefix_l: Vec<C64> = panels
            .iter()
            .scan(C64::new(0.0, 0.0), |acc, &(_, _, first)| {
                let before = *acc;
                *acc += panel_sum(first, FRAC_PI_2);
                Some(before)
            })
            .collect();
        let mut suffix_r: Vec<C64> = panels
            .iter()
            .rev()
            .scan(C64::new(0.0, 0.0), |acc, &(_, _, first)| {
                *acc += panel_sum(first, -FRAC_PI_2);
                Some(*acc)
            })
            .collect();
        suffix_r.reverse();
        let mut sol = Solution { kernel: kernel.clone(), f: f.clone(), panels, prefix_l, suffix_r, at_c: C64::new(0.0, 0.0) };
        sol.at_c = sol.r0(kernel.c);
        sol
    }

    fn panel_index(&self, x: f64) -> usize {
        let i = self.panels.partition_point(|p| p.1 < x);
        i.min(self.panels.len() - 1)
    }

    /// `(R0 f)(x)`
    pub fn r0(&self, x: f64) -> C64 {
        let x = x.clamp(-FRAC_PI_2, FRAC_PI_2);
        let k = self.kernel.k;
        let i = self.panel_index(x);
        let (lo, _, _) = self.panels[i];
        let side = if x < self.kernel.c || (x == self.kernel.c && lo < self.kernel.c) { Side::Left } else { Side::Right };
        let (mut pl, mut pr) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        if x > lo {
            let (mid, half) = ((x + lo) / 2.0, (x - lo) / 2.0);
            for &(t, w) in gl(24) {
                let y = mid + half * t;
                let fy = self.f.eval(y, side);
                pl += (k * (y + FRAC_PI_2)).sin() * fy * (w * half);
                pr += (k * (y - FRAC_PI_2)).sin() * fy * (w * half);
            }
        }
        let left = self.prefix_l[i] + pl;
        let right = self.suffix_r[i] - pr;
        -((k * (x - FRAC_PI_2)).sin() * left + (k * (x + FRAC_PI_2)).sin() * right) / (k * self.kernel.sin_kpi)
    }

    /// `(R f)(x)`
    pub fn eval(&self, x: f64) -> C64 {
        self.r0(x) + self.kernel.h(x) / self.kernel.denom * self.at_c
    }

    /// `(R f)(x) - (R0 f)(x)`
    pub fn correction(&self, x: f64) -> C64 {
        self.kernel.h(x) / self.kernel.denom * self.at_c
    }

    /// Deviations `|u(-pi/2) - u(c)|` and `|u(pi/2) - u(c)|`.
    pub fn boundary_deviation(&self) -> f64 {
        let uc = self.eval(self.kernel.c);
        (self.eval(-FRAC_PI_2) - uc).norm().max((self.eval(FRAC_PI_2) - uc).norm())
    }
}

/// Max of `|-u'' - lambda u - f|` by fourth-order central differences at
/// `n` points per piece, staying two steps away from the break points.
pub fn fd_residual(u: impl Fn(f64) -> C64 + Sync, f: impl Fn(f64) -> C64 + Sync, lambda: C64, c: f64, n: usize) -> f64 {
    let h = FD_STEP;
    let pts: Vec<f64> = [(-FRAC_PI_2, c), (c, FRAC_PI_2)]
        .iter()
        .flat_map(|&(lo, hi)| {
            let (lo, hi) = (lo + 2.5 * h, hi - 2.5 * h);
            (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
        })
        .collect();
    pts.par_iter()
        .map(|&x| {
            let d2 = (-u(x + 2.0 * h) + 16.0 * u(x + h) - 30.0 * u(x) + 16.0 * u(x - h) - u(x - 2.0 * h)) / (12.0 * h * h);
            (-d2 - lambda * u(x) - f(x)).norm()
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct SvdProbe {
    pub n: usize,
    pub singular_values: Vec<f64>,
    pub partial_sum: f64,
    /// Least-squares slope of `log s_j` against `log j` over `fit_range`.
    pub decay_exponent: f64,
    pub fit_range: (usize, usize),
}

/// Singular values of the Nystrom discretisation `sqrt(w_i) K(x_i, y_j) sqrt(w_j)`.
pub fn singular_value_probe(a: &ParamA, lambda: C64, n: usize) -> Result<SvdProbe, ResolventError> {
    let kern = ResolventKernel::new(a, lambda)?;
    let order = 16;
    let panels = (n / order).max(2);
    let left = ((panels as f64) * (1.0 + a.value()) / 2.0).round().max(1.0) as usize;
    let right = panels.saturating_sub(left).max(1);
    let grid: Arc<Grid> = Grid::new(a.jump_point(), left, right, order)?;
    let x = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let size = x.len();
    let rows: Vec<Vec<C64>> = (0..size)
        .into_par_iter()
        .map(|i| (0..size).map(|j| kern.kernel(x[i], x[j]) * (sw[i] * sw[j])).collect())
        .collect();
    let m = DMatrix::from_fn(size, size, |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|p, q| q.total_cmp(p));
    let fit_range = (8usize, (size / 8).max(16));
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (fit_range.0..=fit_range.1).map(|j| ((j as f64).ln(), s[j - 1].max(1e-300).ln())).unzip();
    let decay_exponent = slope(&xs, &ys);
    Ok(SvdProbe { n: size, partial_sum: s.iter().sum(), singular_values: s, decay_exponent, fit_range })
}

pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
