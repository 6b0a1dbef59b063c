//! Shared fixtures for the criterion benches.

use jumpspec::{ParamA, PiecewiseTrig, TrigTerm};

pub fn params() -> [(&'static str, ParamA); 2] {
    [("1/3", ParamA::parse("1/3").unwrap()), ("sqrt(2)-1", ParamA::parse("sqrt(2)-1").unwrap())]
}

fn terms(n: usize, s: f64) -> Vec<TrigTerm> {
    (1..=n).map(|j| TrigTerm::cos(1.0 / (j * j) as f64, j as f64, s * j as f64)).collect()
}

/// Smooth trig sum with `n` terms on the partition of `a`.
pub fn trig_sum(a: &ParamA, n: usize) -> PiecewiseTrig {
    PiecewiseTrig::split(a.jump_point(), terms(n, 0.3), terms(n, -0.7)).unwrap()
}

pub fn single_trig_sum(n: usize) -> PiecewiseTrig {
    PiecewiseTrig::single(terms(n, 0.3))
}
