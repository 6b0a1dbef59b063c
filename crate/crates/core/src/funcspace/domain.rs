//! Membership checks for the domains of H and its adjoint.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::{PiecewiseTrig, Side, C64};

const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub condition: &'static str,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    pub in_domain: bool,
    pub violations: Vec<Violation>,
}

struct Checker {
    scale: f64,
    violations: Vec<Violation>,
}

impl Checker {
    fn new(f: &PiecewiseTrig) -> Self {
        Checker { scale: f.magnitude().max(1.0), violations: Vec::new() }
    }

    fn expect_zero(&mut self, condition: &'static str, v: C64) {
        let d = v.norm();
        if d > TOL * self.scale {
            self.violations.push(Violation { condition, deviation: d });
        }
    }

    fn finish(self) -> DomainReport {
        DomainReport { in_domain: self.violations.is_empty(), violations: self.violations }
    }
}

fn ev(f: &PiecewiseTrig, x: f64, side: Side) -> C64 {
    f.eval(x, side).expect("checkpoints are inside the interval")
}

/// `f` is H^2 across the jump point `c` and `f(-pi/2) = f(c) = f(pi/2)`.
pub fn validate_domain_h(f: &PiecewiseTrig, c: f64) -> DomainReport {
    let mut ch = Checker::new(f);
    let df = f.derivative(1);
    ch.expect_zero("value continuity at c", ev(f, c, Side::Right) - ev(f, c, Side::Left));
    ch.expect_zero("derivative continuity at c", ev(&df, c, Side::Right) - ev(&df, c, Side::Left));
    let fc = ev(f, c, Side::Left);
    ch.expect_zero("f(-pi/2) = f(c)", ev(f, -FRAC_PI_2, Side::Left) - fc);
    ch.expect_zero("f(pi/2) = f(c)", ev(f, FRAC_PI_2, Side::Right) - fc);
    ch.finish()
}

/// `f(+-pi/2) = 0`, `f` continuous at `c`, and the derivative jump at `c`
/// equals `f'(pi/2) - f'(-pi/2)`.
pub fn validate_domain_hstar(f: &PiecewiseTrig, c: f64) -> DomainReport {
    let mut ch = Checker::new(f);
    let df = f.derivative(1);
    ch.expect_zero("f(-pi/2) = 0", ev(f, -FRAC_PI_2, Side::Left));
    ch.expect_zero("f(pi/2) = 0", ev(f, FRAC_PI_2, Side::Right));
    ch.expect_zero("value continuity at c", ev(f, c, Side::Right) - ev(f, c, Side::Left));
    let outer = ev(&df, FRAC_PI_2, Side::Right) - ev(&df, -FRAC_PI_2, Side::Left);
    let jump = ev(&df, c, Side::Right) - ev(&df, c, Side::Left);
    ch.expect_zero("derivative jump identity", outer - jump);
    ch.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::TrigTerm;

    #[test]
    fn forward_examples() {
        let c = FRAC_PI_2 / 3.0;
        let f = PiecewiseTrig::single(vec![TrigTerm::cos(1.0, 2.0, 0.0)]);
        assert!(!validate_domain_h(&f, c).in_domain);
        let one = PiecewiseTrig::single(vec![TrigTerm::constant(1.0)]);
        assert!(validate_domain_h(&one, c).in_domain);
    }

    #[test]
    fn adjoint_examples() {
        let s = PiecewiseTrig::single(vec![TrigTerm::sin(1.0, 1.0, 0.0)]);
        let r = validate_domain_hstar(&s, 0.2);
        assert!(!r.in_domain);
        assert_eq!(r.violations.len(), 2);
    }
}
