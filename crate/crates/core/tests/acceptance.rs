//! The ten acceptance criteria, one line each. Exits nonzero on any failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jumpspec::basis_diag::{blowup_probe, projection_norms, rational_bound_check, triple_norms, Which};
use jumpspec::eigensystem::{
    biorthogonalize, closed, eigenfunctions_h, eigenfunctions_hstar, eta_constants, gram_quadrature, pairs_for,
    root_space,
};
use jumpspec::funcspace::{inner_quadrature, norm_sampled};
use jumpspec::metric::{into_domain_h, neumann_coefficient, random_smooth, rayleigh_sequence, MetricOp};
use jumpspec::param::{is_exceptional_minus, zero_class_case, ZeroClassCase};
use jumpspec::resolvent::{singular_value_probe, ResolventKernel};
use jumpspec::simulator::{estimate_gap, run, tent_moment2, SimConfig};
use jumpspec::spectrum::{char_det, curves, curves_csv, drift_gap, drift_gap_exact, enumerate};
use jumpspec::{Class, EigCase, EigRecord, Grid, GridFn, ParamA, C64};

type Outcome = Result<String, String>;

fn pa(s: &str) -> ParamA {
    ParamA::parse(s).expect("test parameter parses")
}

fn test_values() -> Vec<ParamA> {
    ["1/3", "0", "2/5", "sqrt(2)-1", "(sqrt(5)-1)/2"].iter().map(|s| pa(s)).collect()
}

fn ok_if(cond: bool, msg: String) -> Outcome {
    if cond { Ok(msg) } else { Err(msg) }
}

/// `sin(k pi (1+a)/4) sin(k pi (1-a)/4) sin(k pi/2)`, the determinant up to `-4`.
fn det_product(a: f64, k: f64) -> f64 {
    (k * PI * (1.0 + a) / 4.0).sin() * (k * PI * (1.0 - a) / 4.0).sin() * (k * PI / 2.0).sin()
}

fn scan_zeros(a: f64, kmax: f64) -> Vec<f64> {
    let step = 2e-4;
    let mut out = vec![0.0];
    let mut x0 = step * 0.5;
    let mut f0 = det_product(a, x0);
    while x0 < kmax {
        let x1 = x0 + step;
        let f1 = det_product(a, x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut lo, mut hi, flo) = (x0, x1, f0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = det_product(a, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() { lo = mid } else { hi = mid }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    out.retain(|&k| k * k <= 2500.0 + 1e-9);
    out
}

fn c1_spectrum() -> Outcome {
    let t = Instant::now();
    let mut worst_det = 0.0f64;
    let mut unmatched = Vec::new();
    for a in test_values() {
        let recs = enumerate(&a, 2500.0).map_err(|e| e.to_string())?;
        for r in &recs {
            worst_det = worst_det.max(char_det(a.value(), C64::new(r.k, 0.0)).norm());
        }
        let zeros = scan_zeros(a.value(), 50.0 + 1e-3);
        for z in &zeros {
            if !recs.iter().any(|r| (r.k - z).abs() < 1e-8) {
                unmatched.push(format!("{a}: zero k = {z} not enumerated"));
            }
        }
        for r in &recs {
            if !zeros.iter().any(|z| (r.k - z).abs() < 1e-8) {
                unmatched.push(format!("{a}: k = {} not a scanned zero", r.k));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ok_if(
        worst_det < 1e-9 && unmatched.is_empty() && secs < 5.0,
        format!("max |det| = {worst_det:.2e}, unmatched = {:?}, {secs:.2} s", unmatched.iter().take(3).collect::<Vec<_>>()),
    )
}

/// Exact `sigma_-1 cap sigma_+1` for `a = p/q`: wavenumbers `4mq/(q-p)` and
/// `4m'q/(q+p)` that coincide, with `k^2 <= 2500`.
fn exact_intersection(p: i64, q: i64) -> Vec<Ratio<i64>> {
    let kmax = Ratio::from_integer(50);
    let minus: Vec<Ratio<i64>> = (1..)
        .map(|m| Ratio::new(4 * m * q, q - p))
        .take_while(|k| *k <= kmax)
        .collect();
    let plus: Vec<Ratio<i64>> = (1..)
        .map(|m| Ratio::new(4 * m * q, q + p))
        .take_while(|k| *k <= kmax)
        .collect();
    minus.into_iter().filter(|k| plus.contains(k)).collect()
}

fn c2_multiplicity() -> Outcome {
    let mut notes = Vec::new();
    let mut good = true;
    for a in test_values() {
        let recs = enumerate(&a, 2500.0).map_err(|e| e.to_string())?;
        match a.as_ratio() {
            None => {
                let bad = recs.iter().filter(|r| (r.geom_mult, r.alg_mult) != (1, 1)).count();
                good &= bad == 0;
                notes.push(format!("{a}: {} simple", recs.len()));
            }
            Some((p, q)) => {
                let triples: Vec<f64> = recs.iter().filter(|r| (r.geom_mult, r.alg_mult) == (2, 3)).map(|r| r.k).collect();
                let other_multiple = recs.iter().filter(|r| r.alg_mult != 1 && (r.geom_mult, r.alg_mult) != (2, 3)).count();
                let exact = exact_intersection(p, q);
                let same = triples.len() == exact.len()
                    && exact.iter().zip(&triples).all(|(e, k)| (*e.numer() as f64 / *e.denom() as f64 - k).abs() < 1e-12);
                good &= same && !exact.is_empty() && other_multiple == 0;
                notes.push(format!("{a}: {} triples", triples.len()));
            }
        }
    }
    ok_if(good, notes.join(", "))
}

fn rel(closed: f64, quad: f64) -> f64 {
    (closed - quad).abs() / closed.abs()
}

fn random_rational(rng: &mut ChaCha8Rng, qmax: i64) -> ParamA {
    loop {
        let q = rng.gen_range(2..=qmax);
        let p = rng.gen_range(-(q - 1)..q);
        if num_integer::gcd(p, q) == 1 {
            return ParamA::rational(p, q).expect("|p| < q");
        }
    }
}

fn record_with(a: &ParamA, class: Class, m: u64) -> Option<EigRecord> {
    let k = class.wavenumber(a.value(), m);
    enumerate(a, k * k + 1.0).ok()?.into_iter().find(|r| r.member(class) == Some(m))
}

fn quad(f: &jumpspec::PiecewiseTrig, g: &jumpspec::PiecewiseTrig) -> f64 {
    inner_quadrature(f, g).expect("quadrature").re
}

fn c3_pairings() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: Vec<(&str, f64)> = Vec::new();
    let mut pi_prefactor = 0.0f64;

    let generic = |name: &'static str, class: Class, rng: &mut ChaCha8Rng| {
        let mut w = 0.0f64;
        let mut n = 0;
        while n < 50 {
            let a = if rng.gen_bool(0.5) { random_rational(rng, 997) } else { pa(&format!("sqrt({})/7", rng.gen_range(2..48))) };
            let m = rng.gen_range(1..25u64);
            let Some(rec) = record_with(&a, class, m) else { continue };
            if rec.case != EigCase::Generic {
                continue;
            }
            let closed = match class {
                Class::Minus => closed::minus_generic(&a, m),
                Class::Plus => closed::plus_generic(&a, m),
                Class::Zero => closed::zero_generic(&a, m),
            };
            let psi = eigenfunctions_h(&rec, &a).expect("psi").remove(0);
            let phi = eigenfunctions_hstar(&rec, &a).expect("phi").remove(0);
            w = w.max(rel(closed, quad(&phi.func, &psi.func)));
            n += 1;
        }
        (name, w)
    };
    worst.push(generic("minus generic", Class::Minus, &mut rng));
    worst.push(generic("plus generic", Class::Plus, &mut rng));
    worst.push(generic("zero generic", Class::Zero, &mut rng));

    // zero mode and odd case
    let (mut wz, mut wo, mut n) = (0.0f64, 0.0f64, 0);
    while n < 50 {
        let a = random_rational(&mut rng, 40);
        let rec0 = &enumerate(&a, 0.5).expect("spectrum")[0];
        let psi = eigenfunctions_h(rec0, &a).expect("psi").remove(0);
        let phi = eigenfunctions_hstar(rec0, &a).expect("phi").remove(0);
        wz = wz.max(rel(closed::zero_mode(&a), quad(&phi.func, &psi.func)));
        let Some((_, q)) = a.as_ratio() else { continue };
        let m = q as u64 * rng.gen_range(1..4u64);
        if zero_class_case(&a, m) != ZeroClassCase::ExceptionalOdd {
            continue;
        }
        let rec = record_with(&a, Class::Zero, m).expect("odd record");
        let psi = eigenfunctions_h(&rec, &a).expect("psi").remove(0);
        let phi = eigenfunctions_hstar(&rec, &a).expect("phi").remove(0);
        wo = wo.max(rel(closed::zero_odd(m), quad(&phi.func, &psi.func)));
        n += 1;
    }
    worst.push(("zero eigenvalue", wz));
    worst.push(("zero odd", wo));

    // coincidences, every closed form in its own index
    let mut w = [0.0f64; 7];
    let mut n = 0;
    while n < 50 {
        let a = random_rational(&mut rng, 25);
        let nth = rng.gen_range(1..=2);
        let Some(l) = (1..400u64).filter(|&m| is_exceptional_minus(&a, m)).nth(nth - 1) else { continue };
        let Some(rec) = record_with(&a, Class::Minus, l) else { continue };
        if rec.case != EigCase::ExceptionalPair {
            continue;
        }
        let (mp, m0) = (rec.member(Class::Plus).expect("+1 index"), rec.member(Class::Zero).expect("0 index"));
        let ([psi1, psi2, xi], [phi1, phi2, eta]) = root_space(&rec, &a).expect("root space");
        let q11 = quad(&phi1.func, &psi1.func);
        let q21 = quad(&phi2.func, &psi1.func);
        let q1x = quad(&phi1.func, &xi.func);
        let q2x = quad(&phi2.func, &xi.func);
        let qe2 = quad(&eta.func, &psi2.func);
        let zero_psi2 = quad(&phi1.func, &psi2.func).abs().max(quad(&phi2.func, &psi2.func).abs());
        let pair_rel = |c: [f64; 2], q: [f64; 2]| rel(c[0], q[0]).max(rel(c[1], q[1]));
        w[0] = w[0].max(pair_rel(closed::minus_exceptional(&a, l), [q11, q21]).max(zero_psi2));
        w[1] = w[1].max(pair_rel(closed::minus_generalised(&a, l), [q1x, q2x]));
        w[2] = w[2].max(pair_rel(closed::plus_exceptional(&a, mp), [q11, q21]));
        w[3] = w[3].max(pair_rel(closed::plus_generalised(&a, mp), [q1x, q2x]));
        w[4] = w[4].max(pair_rel(closed::zero_even(&a, m0), [q11, q21]));
        w[5] = w[5].max(pair_rel(closed::zero_generalised(&a, m0), [q1x, q2x]));
        let (am, _) = eta_constants(&a);
        w[6] = w[6].max(rel(am * closed::eta_psi2(&a, l), qe2));
        // class-0 generalised prefactor pi in place of pi^2
        pi_prefactor = pi_prefactor.max(rel(closed::zero_generalised(&a, m0)[1] / PI, q2x));
        n += 1;
    }
    for (name, v) in ["minus exceptional", "minus generalised", "plus exceptional", "plus generalised", "zero even", "zero generalised", "adjoint-pair minus exceptional"]
        .into_iter()
        .zip(w)
    {
        worst.push((name, v));
    }
    let secs = t.elapsed().as_secs_f64();
    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    println!("    info: prefactor pi (not pi^2) in the class-0 generalised pairing has rel. error {pi_prefactor:.3}");
    let detail: Vec<String> = worst.iter().map(|(n, v)| format!("{n} {v:.1e}")).collect();
    ok_if(max < 1e-10 && secs < 10.0, format!("{} formulas x 50, worst {max:.2e}, {secs:.2} s [{}]", worst.len(), detail.join(", ")))
}

fn identity_dev(g: &nalgebra::DMatrix<C64>) -> f64 {
    let mut d = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            d = d.max((g[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm());
        }
    }
    d
}

fn c4_biorthogonality() -> Outcome {
    let a = pa("sqrt(2)-1");
    let mut pairs = biorthogonalize(&a, 2000.0).map_err(|e| e.to_string())?;
    pairs.truncate(30);
    let d30 = identity_dev(&gram_quadrature(&pairs, &a).map_err(|e| e.to_string())?);
    let b = pa("1/3");
    let rec = enumerate(&b, 40.0).map_err(|e| e.to_string())?.into_iter().find(|r| (r.lambda - 36.0).abs() < 1e-9).ok_or("no 36")?;
    let block = pairs_for(&rec, &b).map_err(|e| e.to_string())?;
    let d3 = identity_dev(&gram_quadrature(&block, &b).map_err(|e| e.to_string())?);
    ok_if(pairs.len() == 30 && d30 < 1e-9 && d3 < 1e-9 && rec.alg_mult == 3, format!("30-pair Gram dev {d30:.2e}, I3 dev {d3:.2e}"))
}

fn c5_resolvent() -> Outcome {
    let a = pa("1/3");
    let c = a.jump_point();
    let grid = Grid::new(c, 12, 12, 24).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let probes: Vec<_> = (0..10).map(|_| random_smooth(&mut rng, 8)).collect();
    let h = PI / 4096.0;
    let (mut bc, mut pde) = (0.0f64, 0.0f64);
    for lambda in [C64::new(-1.0, 0.0), C64::new(-2.0, 0.0), C64::new(2.5, 1.0)] {
        let kern = ResolventKernel::new(&a, lambda).map_err(|e| e.to_string())?;
        for f in &probes {
            let sol = kern.solve(&GridFn::sample(&grid, f));
            let u = |x: f64| sol.eval(x);
            let uc = u(c);
            bc = bc.max((u(-FRAC_PI_2) - uc).norm()).max((u(FRAC_PI_2) - uc).norm());
            for (lo, hi) in [(-FRAC_PI_2, c), (c, FRAC_PI_2)] {
                for i in 0..25 {
                    let x = lo + 3.0 * h + (hi - lo - 6.0 * h) * (i as f64 + 0.5) / 25.0;
                    let d2 = (-u(x + 2.0 * h) + 16.0 * u(x + h) - 30.0 * u(x) + 16.0 * u(x - h) - u(x - 2.0 * h)) / (12.0 * h * h);
                    pde = pde.max((-d2 - lambda * u(x) - f.at(x)).norm());
                }
            }
        }
    }
    let one = GridFn::from_fn(&grid, |_| C64::new(1.0, 0.0));
    let sol = ResolventKernel::new(&a, C64::new(-1.0, 0.0)).map_err(|e| e.to_string())?.solve(&one);
    let unit = (0..=50).map(|i| (sol.eval(-FRAC_PI_2 + PI * i as f64 / 50.0) - 1.0).norm()).fold(0.0, f64::max);
    let svd = singular_value_probe(&a, C64::new(-1.0, 0.0), 512).map_err(|e| e.to_string())?;
    ok_if(
        bc < 1e-8 && pde < 1e-6 && unit < 1e-10 && svd.decay_exponent <= -1.8,
        format!("bc {bc:.1e}, pde {pde:.1e}, R(-1)1 dev {unit:.1e}, decay exponent {:.3} (n = {})", svd.decay_exponent, svd.n),
    )
}

fn c6_projections() -> Outcome {
    let mut checked = [0usize; 3];
    let mut worst = 0.0f64;
    let mut good = true;
    for a in test_values() {
        for row in projection_norms(&a, 2500.0).map_err(|e| e.to_string())? {
            match (row.case, row.which) {
                (EigCase::ZeroEv, _) => {
                    good &= (row.closed_form - (4.0f64 / 3.0).sqrt()).abs() < 1e-12;
                    checked[0] += 1;
                }
                (EigCase::ExceptionalOdd, _) => {
                    good &= row.closed_form == 1.0;
                    checked[1] += 1;
                }
                (EigCase::ExceptionalPair, Which::P1) => {
                    good &= (row.closed_form - 2f64.sqrt() / (1.0 - a.value()).sqrt()).abs() < 1e-12;
                    checked[2] += 1;
                }
                _ => continue,
            }
            worst = worst.max(row.rel_error());
        }
    }
    let p1_third = triple_norms(1.0 / 3.0, 1)[0];
    good &= (p1_third - 3f64.sqrt()).abs() < 1e-12 && checked.iter().all(|&c| c > 0);
    ok_if(good && worst < 1e-8, format!("zero/odd/P1 cases {checked:?}, worst closed-vs-quadrature {worst:.2e}"))
}

fn c7_blowup() -> Outcome {
    let mut notes = Vec::new();
    let mut good = true;
    for s in ["sqrt(2)-1", "(sqrt(5)-1)/2", "1/pi"] {
        let a = pa(s);
        let rep = blowup_probe(&a, 10).map_err(|e| e.to_string())?;
        let at = rep.exceeds_at;
        good &= at.is_some();
        notes.push(format!("{s}: exceeds 10x median {:.3} at k = {:?}", rep.median_generic, at));
    }
    for s in ["1/3", "0", "2/5"] {
        let a = pa(s);
        let (p, q) = a.as_ratio().expect("rational");
        let av = a.value();
        let rep = rational_bound_check(&a, 1000).map_err(|e| e.to_string())?;
        // bounds recomputed here from (p, q)
        let b_minus = ((4.0 * PI + (1.0 - av)) / 8.0).sqrt() / ((PI / 4.0 * (1.0 - av)).sqrt() * 2.0 / (q - p) as f64);
        let b_plus = ((4.0 * PI + (1.0 + av)) / 8.0).sqrt() / ((PI / 4.0 * (1.0 + av)).sqrt() * 2.0 / (q + p) as f64);
        let b_zero = 2f64.sqrt() / (2.0 / q as f64);
        let mut ok = rep.holds;
        for row in projection_norms(&a, 2500.0).map_err(|e| e.to_string())? {
            if row.case != EigCase::Generic {
                continue;
            }
            let bound = match row.class {
                Class::Minus => b_minus,
                Class::Plus => b_plus,
                Class::Zero => b_zero,
            };
            ok &= row.closed_form <= bound;
        }
        good &= ok;
        notes.push(format!("{s}: bounds {}", if ok { "hold" } else { "VIOLATED" }));
    }
    ok_if(good, notes.join("; "))
}

fn c8_metric() -> Outcome {
    let a = pa("sqrt(2)-1");
    let op = MetricOp::new(&a);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tests = Vec::new();
    for rec in enumerate(&a, 300.0).map_err(|e| e.to_string())? {
        if tests.len() < 10 {
            tests.push(eigenfunctions_h(&rec, &a).map_err(|e| e.to_string())?.remove(0).func);
        }
    }
    while tests.len() < 20 {
        tests.push(into_domain_h(random_smooth(&mut rng, 8), op.c));
    }
    let mut resid = 0.0f64;
    for psi in &tests {
        let r = op.quasi_self_adjointness_residual(psi).map_err(|e| e.to_string())?;
        resid = resid.max(r / norm_sampled(psi).map_err(|e| e.to_string())?);
    }
    let mut pos = f64::INFINITY;
    for _ in 0..100 {
        pos = pos.min(op.form(&random_smooth(&mut rng, 8)).map_err(|e| e.to_string())?.re);
    }
    let seq = rayleigh_sequence(&a, 8, 4).map_err(|e| e.to_string())?;
    let literal = rayleigh_sequence(&a, 8, 2).map_err(|e| e.to_string())?;
    let min_seq = seq.iter().map(|r| r.rayleigh).fold(f64::INFINITY, f64::min);
    let all_pos = seq.iter().chain(&literal).all(|r| r.rayleigh > 0.0);
    let inj = (1..=200u64).filter(|n| n % 2 == 0).all(|n| neumann_coefficient(&a, n) > 0.0);
    println!(
        "    info: along n = 2 q_k the quotients stay near 1 ({:?}); p_k + q_k is odd for every convergent",
        literal.iter().map(|r| format!("{:.3}", r.rayleigh)).collect::<Vec<_>>()
    );
    ok_if(
        resid < 1e-8 && pos >= -1e-12 && min_seq < 1e-2 && all_pos && inj,
        format!("residual {resid:.1e}, min (f, Theta f) {pos:.3e}, min Rayleigh along 4 q_k {min_seq:.2e}, positive {all_pos}"),
    )
}

fn c9_simulator() -> Outcome {
    let t = Instant::now();
    let mut cfg = SimConfig::new(pa("0"), 1e5 / 16.0, 16, 7);
    cfg.dt = 1e-3;
    let rep = run(&cfg).map_err(|e| e.to_string())?;
    let target = PI * PI / 24.0;
    let m2_rel = (rep.moment2 / target - 1.0).abs();
    let mut gaps = Vec::new();
    for (s, seed) in [("0", 11u64), ("1/3", 12)] {
        let a = pa(s);
        let rec = enumerate(&a, 4.5).map_err(|e| e.to_string())?.into_iter().find(|r| r.lambda == 4.0).ok_or("no 4")?;
        let g = eigenfunctions_h(&rec, &a).map_err(|e| e.to_string())?.remove(0).func;
        let mut gc = SimConfig::new(a, 1.0, 100_000, seed);
        gc.dt = 1e-3;
        gaps.push(estimate_gap(&gc, &g).map_err(|e| e.to_string())?.gap);
    }
    let rows = curves(&[1.0 / 3.0], 6).map_err(|e| e.to_string())?;
    let at36: Vec<Class> = rows.iter().filter(|r| (r.lambda - 36.0).abs() < 1e-9).map(|r| r.class).collect();
    let grid: Vec<f64> = (0..=190).map(|i| -0.95 + 0.01 * i as f64).collect();
    let path = std::env::temp_dir().join("jumpspec-acceptance-curves.csv");
    std::fs::write(&path, curves_csv(&curves(&grid, 4).map_err(|e| e.to_string())?)).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let gap_ok = gaps.iter().all(|g| (g / 4.0 - 1.0).abs() < 0.2);
    ok_if(
        m2_rel < 0.02 && rep.tent_sup_distance < 0.02 && gap_ok && at36.len() == 3 && rep.total_time >= 1e5 && (tent_moment2(0.0) - target).abs() < 1e-15,
        format!(
            "E[X^2] = {:.5} ({:.2}% off, {:.0} time units), hist dist {:.4}, gaps {:.3?}, classes at (1/3, 36) {at36:?}, curves in {}, {secs:.1} s",
            rep.moment2,
            100.0 * m2_rel,
            rep.total_time,
            rep.tent_sup_distance,
            gaps,
            path.display()
        ),
    )
}

fn c10_drift() -> Outcome {
    let s2 = Ratio::from_integer(3i128);
    let b2 = Ratio::from_integer(12i128) * s2 * s2;
    let left = Ratio::from_integer(2) * s2 + b2 / (Ratio::from_integer(2) * s2);
    let at = drift_gap_exact(s2, b2).map_err(|e| e.to_string())?;
    let right = Ratio::from_integer(8) * s2;
    let v0 = drift_gap(1.0, 0.0).map_err(|e| e.to_string())?;
    let v1 = drift_gap(1.0, 2.0 * 3f64.sqrt()).map_err(|e| e.to_string())?;
    ok_if(left == right && at == right && v0 == 2.0 && v1 == 8.0, format!("branches meet exactly at 24 for sigma^2 = 3; values {v0}, {v1}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spectrum vs determinant", c1_spectrum),
        ("multiplicity theorem", c2_multiplicity),
        ("closed-form inner products", c3_pairings),
        ("biorthogonality", c4_biorthogonality),
        ("resolvent decomposition", c5_resolvent),
        ("projection norms", c6_projections),
        ("no conditional basis mechanism", c7_blowup),
        ("metric operator", c8_metric),
        ("simulator vs theory", c9_simulator),
        ("drift gap formula", c10_drift),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let tag = if res.is_ok() { "PASS" } else { "FAIL" };
        failed += res.is_err() as usize;
        let msg = res.unwrap_or_else(|e| e);
        println!("[{tag}] criterion {:>2} {name}: {msg} ({:.2} s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
