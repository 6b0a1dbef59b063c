//! Monte Carlo for the restarted Brownian motion: variance-2 increments,
//! absorption at `+-pi/2`, restart at `c = pi a/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eigensystem::{eigenfunctions_hstar, EigenError};
use crate::funcspace::{inner, FuncError, PiecewiseTrig};
use crate::metric::MetricOp;
use crate::param::ParamA;
use crate::resolvent::slope;
use crate::spectrum::enumerate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("observable has no component along the lambda = 4 mode")]
    ObservableOrthogonalToGapMode,
    #[error("decay signal lost in noise before the end of the fit window")]
    NoSignal,
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Func(#[from] FuncError),
}

/// Five relaxation times of the gap mode.
pub const BURN_IN: f64 = 6.25;
pub const FIT_WINDOW: (f64, f64) = (0.2, 1.2);
pub const FIT_POINTS: usize = 50;

#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub a: ParamA,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub bridge_correction: bool,
    pub burn_in: f64,
    /// Start point; `None` starts at the restart point.
    pub start: Option<f64>,
    pub bins: usize,
}

impl SimConfig {
    pub fn new(a: ParamA, horizon: f64, n_paths: usize, seed: u64) -> SimConfig {
        SimConfig { a, dt: 1e-4, horizon, n_paths, seed, bridge_correction: true, burn_in: BURN_IN, start: None, bins: 32 }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.into()));
        if !(self.dt > 0.0 && self.dt <= 1e-3) {
            return bad("dt must lie in (0, 1e-3]");
        }
        if self.n_paths == 0 {
            return bad("n_paths must be positive");
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return bad("horizon must be positive");
        }
        if self.bins == 0 {
            return bad("bins must be positive");
        }
        if let Some(x) = self.start {
            if !(x > -FRAC_PI_2 && x < FRAC_PI_2) {
                return bad("start must be interior");
            }
        }
        Ok(())
    }

    fn start_point(&self) -> f64 {
        self.start.unwrap_or(self.a.jump_point())
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One path of the process, owning its RNG stream.
struct Walker {
    x: f64,
    c: f64,
    step: f64,
    dt: f64,
    bridge: bool,
    rng: ChaCha8Rng,
}

impl Walker {
    fn new(cfg: &SimConfig, path: u64, x0: f64) -> Walker {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path);
        Walker { x: x0, c: cfg.a.jump_point(), step: (2.0 * cfg.dt).sqrt(), dt: cfg.dt, bridge: cfg.bridge_correction, rng }
    }

    /// Advances one step; returns whether the boundary was hit.
    #[inline]
    fn advance(&mut self) -> bool {
        let z: f64 = self.rng.sample(StandardNormal);
        let x1 = self.x + self.step * z;
        let mut hit = x1.abs() >= FRAC_PI_2;
        if !hit && self.bridge {
            // (b - x)(b - x1) for the nearer boundary
            let d = (FRAC_PI_2 - self.x.abs()) * (FRAC_PI_2 - x1.abs());
            if (self.x >= 0.0) == (x1 >= 0.0) && d < 20.0 * self.dt {
                hit = self.rng.gen::<f64>() < (-d / self.dt).exp();
            } else if (self.x >= 0.0) != (x1 >= 0.0) {
                let dp = (FRAC_PI_2 - self.x) * (FRAC_PI_2 - x1);
                let dm = (FRAC_PI_2 + self.x) * (FRAC_PI_2 + x1);
                let d = dp.min(dm);
                if d < 20.0 * self.dt {
                    hit = self.rng.gen::<f64>() < (-d / self.dt).exp();
                }
            }
        }
        self.x = if hit { self.c } else { x1 };
        hit
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Counts normalised to a probability density.
    pub density: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub histogram: Histogram,
    pub mean: f64,
    pub mean_stderr: f64,
    pub moment2: f64,
    pub moment2_stderr: f64,
    pub jumps_per_unit_time: f64,
    pub total_time: f64,
    pub tent_sup_distance: f64,
}

struct PathStats {
    counts: Vec<u64>,
    batches_x: Vec<f64>,
    batches_x2: Vec<f64>,
    jumps: u64,
}

/// Stationary density `(1-a)(x+pi/2)` left of `c`, `(1+a)(pi/2-x)` right of
/// it, over `pi^2 (1-a^2)/4`.
pub fn tent_density(a: f64, x: f64) -> f64 {
    let z = PI * PI * (1.0 - a * a) / 4.0;
    let c = FRAC_PI_2 * a;
    if x < -FRAC_PI_2 || x > FRAC_PI_2 {
        0.0
    } else if x <= c {
        (1.0 - a) * (x + FRAC_PI_2) / z
    } else {
        (1.0 + a) * (FRAC_PI_2 - x) / z
    }
}

/// Mean of the tent density over `[lo, hi]`, exact for piecewise-linear.
fn tent_bin_mean(a: f64, lo: f64, hi: f64) -> f64 {
    let c = FRAC_PI_2 * a;
    let trap = |l: f64, h: f64| 0.5 * (tent_density(a, l) + tent_density(a, h)) * (h - l);
    let mass = if lo < c && c < hi { trap(lo, c) + trap(c, hi) } else { trap(lo, hi) };
    mass / (hi - lo)
}

/// Occupation statistics after burn-in.
pub fn run(cfg: &SimConfig) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let burn = (cfg.burn_in / cfg.dt).round() as u64;
    let steps = (cfg.horizon / cfg.dt).round().max(1.0) as u64;
    let batch = ((1.0 / cfg.dt).round() as u64).clamp(1, steps);
    let bins = cfg.bins;
    let width = PI / bins as f64;
    let x0 = cfg.start_point();

    let stats: Vec<PathStats> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut w = Walker::new(cfg, path, x0);
            for _ in 0..burn {
                w.advance();
            }
            let mut counts = vec![0u64; bins];
            let (mut bx, mut bx2) = (Vec::new(), Vec::new());
            let (mut sx, mut sx2) = (KahanSum::default(), KahanSum::default());
            let mut in_batch = 0u64;
            let mut jumps = 0u64;
            for _ in 0..steps {
                jumps += w.advance() as u64;
                let x = w.x;
                let b = (((x + FRAC_PI_2) / width) as usize).min(bins - 1);
                counts[b] += 1;
                sx.add(x);
                sx2.add(x * x);
                in_batch += 1;
                if in_batch == batch {
                    bx.push(sx.value() / batch as f64);
                    bx2.push(sx2.value() / batch as f64);
                    sx = KahanSum::default();
                    sx2 = KahanSum::default();
                    in_batch = 0;
                }
            }
            PathStats { counts, batches_x: bx, batches_x2: bx2, jumps }
        })
        .collect();

    let mut counts = vec![0u64; bins];
    let (mut bx, mut bx2) = (Vec::new(), Vec::new());
    let mut jumps = 0u64;
    for s in &stats {
        for (c, v) in counts.iter_mut().zip(&s.counts) {
            *c += v;
        }
        bx.extend_from_slice(&s.batches_x);
        bx2.extend_from_slice(&s.batches_x2);
        jumps += s.jumps;
    }
    let total: u64 = counts.iter().sum();
    let edges: Vec<f64> = (0..=bins).map(|i| -FRAC_PI_2 + width * i as f64).collect();
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (total as f64 * width)).collect();
    let av = cfg.a.value();
    let tent_sup_distance = density
        .iter()
        .enumerate()
        .map(|(i, d)| (d - tent_bin_mean(av, edges[i], edges[i + 1])).abs())
        .fold(0.0, f64::max);
    let (mean, mean_stderr) = mean_and_stderr(&bx);
    let (moment2, moment2_stderr) = mean_and_stderr(&bx2);
    let total_time = total as f64 * cfg.dt;
    Ok(SimReport {
        config: cfg.clone(),
        histogram: Histogram { edges, counts, density },
        mean,
        mean_stderr,
        moment2,
        moment2_stderr,
        jumps_per_unit_time: jumps as f64 / total_time,
        total_time,
        tent_sup_distance,
    })
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mut s = KahanSum::default();
    v.iter().for_each(|&x| s.add(x));
    let m = s.value() / n;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let mut q = KahanSum::default();
    v.iter().for_each(|&x| q.add((x - m) * (x - m)));
    (m, (q.value() / (n - 1.0) / n).sqrt())
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut s = String::from("lo,hi,count,density\n");
    for i in 0..h.counts.len() {
        s.push_str(&format!("{:.16e},{:.16e},{},{:.16e}\n", h.edges[i], h.edges[i + 1], h.counts[i], h.density[i]));
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct GapEstimate {
    pub gap: f64,
    pub stderr: f64,
    pub start: f64,
    pub mu_inf: f64,
    pub times: Vec<f64>,
    pub means: Vec<f64>,
    pub stderrs: Vec<f64>,
}

/// `(phi0, g) / (phi0, 1)`
pub fn stationary_mean(a: &ParamA, g: &PiecewiseTrig) -> Result<f64, SimError> {
    let op = MetricOp::new(a);
    let one = PiecewiseTrig::single(vec![crate::funcspace::TrigTerm::constant(1.0)]);
    Ok((inner(&op.phi0, g)? / inner(&op.phi0, &one)?).re)
}

/// Decay rate of `E g(X_t) - mu_inf(g)` from a start point maximising
/// `|g - mu_inf|`, by weighted least squares of the log over the fit window.
/// `cfg.horizon` and `cfg.burn_in` are ignored.
pub fn estimate_gap(cfg: &SimConfig, g: &PiecewiseTrig) -> Result<GapEstimate, SimError> {
    cfg.validate()?;
    let a = &cfg.a;
    let rec = enumerate(a, 4.5)
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?
        .into_iter()
        .find(|r| (r.lambda - 4.0).abs() < 1e-12)
        .ok_or(SimError::ObservableOrthogonalToGapMode)?;
    let overlap: f64 = eigenfunctions_hstar(&rec, a)?
        .iter()
        .map(|phi| inner(&phi.func, g).map(|v| v.norm() / inner(&phi.func, &phi.func).unwrap_or_default().norm().sqrt()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if overlap < 1e-10 * g.magnitude().max(1e-300) {
        return Err(SimError::ObservableOrthogonalToGapMode);
    }
    let mu_inf = stationary_mean(a, g)?;
    let start = cfg.start.unwrap_or_else(|| {
        (1..400)
            .map(|i| -FRAC_PI_2 + PI * i as f64 / 400.0)
            .max_by(|x, y| (g.at(*x).re - mu_inf).abs().total_cmp(&(g.at(*y).re - mu_inf).abs()))
            .expect("nonempty scan")
    });
    let times: Vec<f64> = (0..FIT_POINTS)
        .map(|i| FIT_WINDOW.0 + (FIT_WINDOW.1 - FIT_WINDOW.0) * i as f64 / (FIT_POINTS - 1) as f64)
        .collect();
    let marks: Vec<u64> = times.iter().map(|t| (t / cfg.dt).round() as u64).collect();
    let last = *marks.last().expect("fit points");
    let gvals: Vec<Vec<f64>> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut w = Walker::new(cfg, path, start);
            let mut out = Vec::with_capacity(marks.len());
            let mut next = 0;
            for s in 1..=last {
                w.advance();
                while next < marks.len() && marks[next] == s {
                    out.push(g.at(w.x).re);
                    next += 1;
                }
            }
            out
        })
        .collect();
    let mut means = Vec::with_capacity(times.len());
    let mut stderrs = Vec::with_capacity(times.len());
    for j in 0..times.len() {
        let col: Vec<f64> = gvals.iter().map(|v| v[j]).collect();
        let (m, se) = mean_and_stderr(&col);
        means.push(m - mu_inf);
        stderrs.push(se);
    }
    // signed decay: the sign is fixed by the start point
    let sign = means[0].signum();
    let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..times.len() {
        let v = sign * means[j];
        if v > 2.0 * stderrs[j] {
            xs.push(times[j]);
            ys.push(v.ln());
            ws.push((v / stderrs[j]).powi(2));
        }
    }
    if xs.len() < FIT_POINTS / 2 {
        return Err(SimError::NoSignal);
    }
    let (b, se) = weighted_slope(&xs, &ys, &ws);
    Ok(GapEstimate { gap: -b, stderr: se, start, mu_inf, times, means, stderrs })
}

fn weighted_slope(xs: &[f64], ys: &[f64], ws: &[f64]) -> (f64, f64) {
    if ws.iter().all(|w| (w - ws[0]).abs() == 0.0) {
        return (slope(xs, ys), f64::NAN);
    }
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}

/// Exact `E[X^2]` under the tent density.
pub fn tent_moment2(a: f64) -> f64 {
    // int x^2 p(x) dx, piecewise polynomial
    let z = PI * PI * (1.0 - a * a) / 4.0;
    let c = FRAC_PI_2 * a;
    let h = FRAC_PI_2;
    let left = |x: f64| (1.0 - a) * (x.powi(4) / 4.0 + h * x.powi(3) / 3.0);
    let right = |x: f64| (1.0 + a) * (h * x.powi(3) / 3.0 - x.powi(4) / 4.0);
    ((left(c) - left(-h)) + (right(h) - right(c))) / z
}
