//! Composite Gauss-Legendre grids split at the jump point.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{FuncError, PiecewiseTrig, Side, C64};
use crate::param::{ParamA, ParamKind};

const MIN_NODES_PER_PIECE: usize = 64;

#[derive(Clone, Debug, PartialEq)]
struct Panel {
    lo: f64,
    hi: f64,
    first: usize,
}

/// Node permutations realising the reflections used by the metric operator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Reflections {
    /// `x -> -x` on the whole interval.
    pub origin: Option<Vec<usize>>,
    /// Midpoint reflection of the left piece.
    pub left: Option<Vec<usize>>,
    /// Midpoint reflection of the right piece.
    pub right: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    c: f64,
    order: usize,
    ref_nodes: Vec<f64>,
    bary: Vec<f64>,
    panels: [Vec<Panel>; 2],
    nodes: Vec<f64>,
    weights: Vec<f64>,
    reflections: Reflections,
}

impl Grid {
    /// `n_left` and `n_right` equal panels on each side of `c`, `order` nodes
    /// per panel. Panel counts are raised so that each piece carries at least
    /// 64 nodes.
    pub fn new(c: f64, n_left: usize, n_right: usize, order: usize) -> Result<Arc<Grid>, FuncError> {
        if !(c > -FRAC_PI_2 && c < FRAC_PI_2) {
            return Err(FuncError::BadBreakpoint(c));
        }
        let order = order.max(2);
        let min_panels = MIN_NODES_PER_PIECE.div_ceil(order);
        let rule = GaussLegendre::new(order).expect("order >= 2");
        let mut pairs = rule.into_node_weight_pairs();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ref_nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ref_weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let bary = (0..order)
            .map(|j| {
                let prod: f64 = (0..order).filter(|&k| k != j).map(|k| ref_nodes[j] - ref_nodes[k]).product();
                1.0 / prod
            })
            .collect();

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut panels: [Vec<Panel>; 2] = [Vec::new(), Vec::new()];
        for (piece, (lo, hi, n)) in [(-FRAC_PI_2, c, n_left), (c, FRAC_PI_2, n_right)].into_iter().enumerate() {
            let n = n.max(min_panels);
            let h = (hi - lo) / n as f64;
            for i in 0..n {
                let plo = lo + h * i as f64;
                let phi = if i + 1 == n { hi } else { lo + h * (i + 1) as f64 };
                panels[piece].push(Panel { lo: plo, hi: phi, first: nodes.len() });
                let (mid, half) = ((plo + phi) / 2.0, (phi - plo) / 2.0);
                for (t, w) in ref_nodes.iter().zip(&ref_weights) {
                    nodes.push(mid + half * t);
                    weights.push(half * w);
                }
            }
        }
        let mut grid = Grid { c, order, ref_nodes, bary, panels, nodes, weights, reflections: Reflections::default() };
        let n_left_nodes = grid.panels[0].len() * order;
        let s_left = -FRAC_PI_2 + c;
        let s_right = c + FRAC_PI_2;
        grid.reflections.origin = grid.match_reflection(0.0, 0..grid.nodes.len());
        grid.reflections.left = grid.match_reflection(s_left, 0..n_left_nodes);
        grid.reflections.right = grid.match_reflection(s_right, n_left_nodes..grid.nodes.len());
        Ok(Arc::new(grid))
    }

    /// Grid with panel width `pi / (2 q n)`, closed under all three
    /// reflections. Only rational `a = p/q` admits such a grid.
    pub fn reflection_closed(a: &ParamA, n: usize, order: usize) -> Result<Arc<Grid>, FuncError> {
        let ParamKind::Rational { p, q } = *a.kind() else {
            return Err(FuncError::GridNotReflectionClosed);
        };
        let min_panels = MIN_NODES_PER_PIECE.div_ceil(order.max(2)) as i64;
        let short = (q - p).min(q + p);
        let n = (n.max(1) as i64).max((min_panels + short - 1) / short);
        let g = Grid::new(a.jump_point(), ((q + p) * n) as usize, ((q - p) * n) as usize, order)?;
        if g.reflections.origin.is_none() || g.reflections.left.is_none() || g.reflections.right.is_none() {
            return Err(FuncError::GridNotReflectionClosed);
        }
        Ok(g)
    }

    /// Index map of `x -> s - x` restricted to `range`, if the node set is closed.
    fn match_reflection(&self, s: f64, range: std::ops::Range<usize>) -> Option<Vec<usize>> {
        let mut perm: Vec<usize> = (0..self.nodes.len()).collect();
        let tol = 1e-11;
        let slice = &self.nodes[range.clone()];
        for i in range.clone() {
            let target = s - self.nodes[i];
            let pos = slice.partition_point(|&x| x < target - tol);
            let j = range.start + pos;
            if j >= range.end || (self.nodes[j] - target).abs() > tol {
                return None;
            }
            perm[i] = j;
        }
        Some(perm)
    }

    pub fn breakpoint(&self) -> f64 {
        self.c
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn reflections(&self) -> &Reflections {
        &self.reflections
    }

    /// Number of nodes in the left piece.
    pub fn left_len(&self) -> usize {
        self.panels[0].len() * self.order
    }

    /// Panels as `(lo, hi, first node index)`.
    pub fn panels(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        self.panels.iter().flatten().map(|p| (p.lo, p.hi, p.first))
    }

    fn locate(&self, x: f64, side: Side) -> &Panel {
        let piece = if x < self.c || (x == self.c && side == Side::Left) { 0 } else { 1 };
        let ps = &self.panels[piece];
        let (lo, hi) = (ps[0].lo, ps[ps.len() - 1].hi);
        let i = (((x - lo) / (hi - lo)) * ps.len() as f64).floor();
        &ps[(i.max(0.0) as usize).min(ps.len() - 1)]
    }

    /// Barycentric interpolation of panel values at `x`.
    pub fn interpolate(&self, values: &[C64], x: f64, side: Side) -> C64 {
        let p = self.locate(x, side);
        let t = (2.0 * x - p.lo - p.hi) / (p.hi - p.lo);
        let vals = &values[p.first..p.first + self.order];
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((tj, bj), v) in self.ref_nodes.iter().zip(&self.bary).zip(vals) {
            let d = t - tj;
            if d == 0.0 {
                return *v;
            }
            num += v * (bj / d);
            den += bj / d;
        }
        num / den
    }
}

/// Complex samples at the nodes of a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    pub grid: Arc<Grid>,
    pub values: Vec<C64>,
}

impl GridFn {
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> C64) -> GridFn {
        GridFn { grid: Arc::clone(grid), values: grid.nodes.iter().map(|&x| f(x)).collect() }
    }

    pub fn sample(grid: &Arc<Grid>, f: &PiecewiseTrig) -> GridFn {
        let c = grid.c;
        GridFn::from_fn(grid, |x| {
            let side = if x < c { Side::Left } else { Side::Right };
            f.eval(x, side).unwrap_or_default()
        })
    }

    pub fn zeros(grid: &Arc<Grid>) -> GridFn {
        GridFn { grid: Arc::clone(grid), values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    fn check(&self, other: &GridFn) -> Result<(), FuncError> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid {
            Ok(())
        } else {
            Err(FuncError::GridMismatch)
        }
    }

    pub fn inner(&self, other: &GridFn) -> Result<C64, FuncError> {
        self.check(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.grid.weights)
            .map(|((f, g), w)| f.conj() * g * *w)
            .sum())
    }

    pub fn integral(&self) -> C64 {
        self.values.iter().zip(&self.grid.weights).map(|(f, w)| f * *w).sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(f, w)| f.norm_sqr() * w).sum::<f64>().sqrt()
    }

    pub fn eval(&self, x: f64, side: Side) -> C64 {
        self.grid.interpolate(&self.values, x, side)
    }

    pub fn zip_with(&self, other: &GridFn, f: impl Fn(C64, C64) -> C64) -> Result<GridFn, FuncError> {
        self.check(other)?;
        Ok(GridFn {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn plus(&self, other: &GridFn) -> Result<GridFn, FuncError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn minus(&self, other: &GridFn) -> Result<GridFn, FuncError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: impl Into<C64>) -> GridFn {
        let s = s.into();
        GridFn { grid: Arc::clone(&self.grid), values: self.values.iter().map(|v| v * s).collect() }
    }

    /// Values permuted by a node index map.
    pub fn permuted(&self, perm: &[usize]) -> GridFn {
        GridFn { grid: Arc::clone(&self.grid), values: perm.iter().map(|&j| self.values[j]).collect() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im\n");
        for (x, v) in self.grid.nodes.iter().zip(&self.values) {
            let _ = writeln!(s, "{x:.16e},{:.16e},{:.16e}", v.re, v.im);
        }
        s
    }
}

impl Serialize for GridFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GridFn", 3)?;
        st.serialize_field("breakpoint", &self.grid.c)?;
        st.serialize_field("nodes", &self.grid.nodes)?;
        let vals: Vec<[f64; 2]> = self.values.iter().map(|v| [v.re, v.im]).collect();
        st.serialize_field("values", &vals)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::TrigTerm;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrates_to_pi() {
        let g = Grid::new(0.3, 4, 4, 16).unwrap();
        let one = GridFn::from_fn(&g, |_| C64::new(1.0, 0.0));
        assert!((one.integral().re - PI).abs() < 1e-12);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g.left_len() >= 64 && g.len() - g.left_len() >= 64);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn interpolation_is_spectral() {
        let g = Grid::new(-0.2, 8, 8, 16).unwrap();
        let f = PiecewiseTrig::single(vec![TrigTerm::cos(1.0, 5.0, 0.3)]);
        let gf = GridFn::sample(&g, &f);
        for &x in &[-FRAC_PI_2, -0.2, 0.0, 1.1, FRAC_PI_2] {
            assert!((gf.eval(x, Side::Left) - f.at(x)).norm() < 1e-12, "{x}");
        }
    }

    #[test]
    fn reflection_closure() {
        let a = ParamA::parse("1/3").unwrap();
        let g = Grid::reflection_closed(&a, 2, 8).unwrap();
        let r = g.reflections();
        let p0 = r.origin.as_ref().unwrap();
        for (i, &j) in p0.iter().enumerate() {
            assert!((g.nodes()[i] + g.nodes()[j]).abs() < 1e-12);
        }
        let irr = ParamA::parse("sqrt(2)-1").unwrap();
        assert_eq!(Grid::reflection_closed(&irr, 2, 8), Err(FuncError::GridNotReflectionClosed));
        // the piecewise reflections exist on any uniform grid
        let g = Grid::new(irr.jump_point(), 5, 7, 8).unwrap();
        assert!(g.reflections().left.is_some() && g.reflections().right.is_some());
        assert!(g.reflections().origin.is_none());
    }
}
