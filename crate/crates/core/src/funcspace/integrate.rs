//! Inner products `(f, g) = int conj(f) g` over the interval.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use super::{FuncError, Grid, GridFn, PiecewiseTrig, TermKind, TrigTerm, C64};

/// `amp * x^n * exp(i (om x + ph))`
#[derive(Clone, Copy, Debug)]
struct ExpTerm {
    amp: C64,
    n: u8,
    om: f64,
    ph: f64,
}

fn expand(t: &TrigTerm, conj: bool, out: &mut Vec<ExpTerm>) {
    let c = if conj { t.coeff.conj() } else { t.coeff };
    let (n, trig) = match t.kind {
        TermKind::Const => (0, None),
        TermKind::Linear => (1, None),
        TermKind::Cos => (0, Some(true)),
        TermKind::Sin => (0, Some(false)),
        TermKind::XCos => (1, Some(true)),
        TermKind::XSin => (1, Some(false)),
    };
    match trig {
        None => out.push(ExpTerm { amp: c, n, om: 0.0, ph: 0.0 }),
        Some(is_cos) => {
            let (p, m) = if is_cos {
                (C64::new(0.5, 0.0), C64::new(0.5, 0.0))
            } else {
                (C64::new(0.0, -0.5), C64::new(0.0, 0.5))
            };
            out.push(ExpTerm { amp: c * p, n, om: t.freq, ph: t.shift });
            out.push(ExpTerm { amp: c * m, n, om: -t.freq, ph: -t.shift });
        }
    }
}

fn gl20() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20).expect("degree >= 2").into_node_weight_pairs())
}

/// `int_lo^hi x^n exp(i (om x + ph)) dx`
fn moment(n: u8, om: f64, ph: f64, lo: f64, hi: f64) -> C64 {
    let scale = lo.abs().max(hi.abs()).max(hi - lo);
    if om == 0.0 {
        let k = i32::from(n) + 1;
        return C64::from_polar(1.0, ph) * ((hi.powi(k) - lo.powi(k)) / f64::from(k));
    }
    if om.abs() * scale < 1.0 {
        let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
        return gl20()
            .iter()
            .map(|&(t, w)| {
                let x = mid + half * t;
                C64::from_polar(w * x.powi(i32::from(n)), om * x + ph)
            })
            .sum::<C64>()
            * half;
    }
    // antiderivative e^{sx} sum_j (-1)^j n!/(n-j)! x^{n-j} / s^{j+1}
    let s = C64::new(0.0, om);
    let anti = |x: f64| {
        let mut acc = C64::new(0.0, 0.0);
        let mut fall = 1.0;
        let mut sp = s;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * fall * x.powi(i32::from(n - j)) / sp;
            fall *= f64::from(n - j);
            sp *= s;
        }
        acc * C64::from_polar(1.0, om * x + ph)
    };
    anti(hi) - anti(lo)
}

fn inner_terms(f: &[TrigTerm], g: &[TrigTerm], lo: f64, hi: f64) -> C64 {
    let mut ef = Vec::with_capacity(2 * f.len());
    let mut eg = Vec::with_capacity(2 * g.len());
    f.iter().for_each(|t| expand(t, true, &mut ef));
    g.iter().for_each(|t| expand(t, false, &mut eg));
    let mut acc = C64::new(0.0, 0.0);
    for u in &ef {
        for v in &eg {
            acc += u.amp * v.amp * moment(u.n + v.n, u.om + v.om, u.ph + v.ph, lo, hi);
        }
    }
    acc
}

/// Closed-form inner product of two piecewise trigonometric functions.
pub fn inner(f: &PiecewiseTrig, g: &PiecewiseTrig) -> Result<C64, FuncError> {
    match f.common_break(g)? {
        None => Ok(inner_terms(&f.pieces[0].terms, &g.pieces[0].terms, f.pieces[0].lo, f.pieces[0].hi)),
        Some(c) => {
            let (fl, fr) = f.sides();
            let (gl, gr) = g.sides();
            let lo = f.pieces[0].lo;
            let hi = f.pieces[f.pieces.len() - 1].hi;
            Ok(inner_terms(fl, gl, lo, c) + inner_terms(fr, gr, c, hi))
        }
    }
}

/// Quadrature inner product on composite Gauss-Legendre grids, refined until
/// two successive levels agree to `1e-12` relative.
pub fn inner_quadrature(f: &PiecewiseTrig, g: &PiecewiseTrig) -> Result<C64, FuncError> {
    let c = f.common_break(g)?.unwrap_or(0.0);
    let freq = f.max_freq() + g.max_freq();
    let target = 1e-12;
    let mut panels = ((freq / 4.0).ceil() as usize).max(2);
    let eval = |panels: usize| -> Result<C64, FuncError> {
        let grid = Grid::new(c, panels, panels, 24)?;
        let gf = GridFn::sample(&grid, f);
        let gg = GridFn::sample(&grid, g);
        gf.inner(&gg)
    };
    let mut prev = eval(panels)?;
    let mut last_change = f64::INFINITY;
    for _ in 0..6 {
        panels *= 2;
        let cur = eval(panels)?;
        let scale = f.magnitude().max(1e-300) * g.magnitude().max(1e-300);
        last_change = (cur - prev).norm() / scale.max(cur.norm());
        if last_change < target {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(FuncError::QuadratureNotConverged { target, achieved: last_change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn cos_norm() {
        let f = PiecewiseTrig::single(vec![TrigTerm::cos(1.0, 2.0, 0.0)]);
        assert!((inner(&f, &f).unwrap() - C64::new(PI / 2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn moments_match_quadrature() {
        for &om in &[0.0, 1e-9, 0.3, 0.9, 1.2, 7.0, 55.5] {
            for n in 0..=2u8 {
                let exact = moment(n, om, 0.3, -FRAC_PI_2, 0.4);
                let mut q = C64::new(0.0, 0.0);
                let m = 4000;
                let h = (0.4 + FRAC_PI_2) / m as f64;
                for i in 0..m {
                    for &(t, w) in gl20() {
                        let x = -FRAC_PI_2 + h * (i as f64 + 0.5 + 0.5 * t);
                        q += C64::from_polar(w * x.powi(i32::from(n)), om * x + 0.3) * (h / 2.0);
                    }
                }
                assert!((exact - q).norm() < 1e-12, "n={n} om={om}: {exact} vs {q}");
            }
        }
    }
}

/// L2 norm from pointwise samples on a composite Gauss-Legendre grid fine
/// enough for the highest frequency. Unlike `inner(f, f)` it keeps the
/// cancellation between terms at the level of values, so small residuals
/// are resolved down to rounding.
pub fn norm_sampled(f: &PiecewiseTrig) -> Result<f64, FuncError> {
    let c = f.breakpoint().unwrap_or(0.0);
    let panels = |len: f64| ((f.max_freq() * len / 4.0).ceil() as usize).max(4);
    let grid = Grid::new(c, panels(c + FRAC_PI_2), panels(FRAC_PI_2 - c), 24)?;
    Ok(GridFn::sample(&grid, f).norm())
}
