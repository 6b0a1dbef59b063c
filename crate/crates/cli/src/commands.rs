use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use jumpspec::basis_diag::{blowup_csv, bump, blowup_probe, projection_csv, projection_norms, rational_bound_check, truncated_completeness};
use jumpspec::eigensystem::eigenfunctions_h;
use jumpspec::funcspace::norm_sampled;
use jumpspec::metric::{noninvertibility_probe, random_smooth};
use jumpspec::resolvent::{fd_residual, singular_value_probe};
use jumpspec::simulator::{estimate_gap, histogram_csv, run, GapEstimate};
use jumpspec::spectrum::{curves, curves_csv, enumerate, parse_grid};
use jumpspec::verify::{random_domain_h, run_suite};
use jumpspec::{Error, Grid, GridFn, MetricOp, ParamA, PiecewiseTrig, ResolventKernel, SimConfig, SimReport, TrigTerm, C64};

use crate::output::OutDir;
use crate::{BasisArgs, CliError, MetricArgs, ResolventArgs, SimulateArgs, SpectrumArgs, VerifyArgs};

fn param(src: &str) -> Result<ParamA, CliError> {
    ParamA::parse(src).map_err(|e| Error::from(e).into())
}

fn lib<T, E: Into<Error>>(r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Lib(e.into()))
}

pub fn spectrum(args: SpectrumArgs, mut out: OutDir) -> Result<(), CliError> {
    if args.a.is_none() && !args.curves {
        return Err(CliError::Usage("spectrum needs --a or --curves".into()));
    }
    if let Some(src) = &args.a {
        let a = param(src)?;
        let recs = lib(enumerate(&a, args.lambda_max))?;
        out.write_json("eigenvalues.json", &json!({ "a": a, "lambda_max": args.lambda_max, "records": recs }))?;
    }
    if args.curves {
        let grid = lib(parse_grid(&args.a_grid))?;
        out.write("curves.csv", &curves_csv(&lib(curves(&grid, args.m_max))?))?;
    }
    let params = json!({ "a": args.a, "lambda_max": args.lambda_max, "curves": args.curves, "a_grid": args.a_grid, "m_max": args.m_max });
    out.finish("spectrum", params, None)?;
    Ok(())
}

pub fn verify(args: VerifyArgs, mut out: OutDir) -> Result<(), CliError> {
    let a = param(&args.a)?;
    let report = lib(run_suite(&a, args.suite))?;
    out.write_json("verify.json", &report)?;
    out.finish("verify", json!({ "a": a, "suite": args.suite }), None)?;
    for c in &report.checks {
        let tag = match (c.informational, c.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        eprintln!("[{tag}] {}: {:e} (threshold {:e})", c.name, c.measured, c.threshold);
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed && !c.informational).map(|c| c.name.as_str()).collect();
        Err(CliError::ContractFailed(format!("failed checks: {}", failed.join(", "))))
    }
}

fn parse_complex(src: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("expected \"re,im\", got `{src}`"));
    let (re, im) = src.split_once(',').ok_or_else(bad)?;
    Ok(C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

type TestFn = Box<dyn Fn(f64) -> C64 + Sync>;

fn test_function(spec: &str, seed: u64) -> Result<TestFn, CliError> {
    let bad = || CliError::Usage(format!("unknown --f `{spec}` (const, sin:K, cos:K, bump:X0,W, random)"));
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let trig = |f: PiecewiseTrig| -> TestFn { Box::new(move |x| f.at(x)) };
    Ok(match kind {
        "const" => trig(PiecewiseTrig::single(vec![TrigTerm::constant(1.0)])),
        "sin" => trig(PiecewiseTrig::single(vec![TrigTerm::sin(1.0, num(arg)?, 0.0)])),
        "cos" => trig(PiecewiseTrig::single(vec![TrigTerm::cos(1.0, num(arg)?, 0.0)])),
        "random" => trig(random_smooth(&mut ChaCha8Rng::seed_from_u64(seed), 8)),
        "bump" => {
            let (x0, w) = arg.split_once(',').ok_or_else(bad)?;
            let (x0, w) = (num(x0)?, num(w)?);
            if !(w > 0.0) {
                return Err(bad());
            }
            Box::new(bump(x0, w))
        }
        _ => return Err(bad()),
    })
}

#[derive(Serialize)]
struct ResolventSummary {
    a: ParamA,
    lambda: C64,
    k: C64,
    denom: C64,
    f: String,
    boundary_deviation: f64,
    pde_residual: f64,
    points: usize,
}

pub fn resolvent(args: ResolventArgs, mut out: OutDir) -> Result<(), CliError> {
    let a = param(&args.a)?;
    let lambda = parse_complex(&args.lambda)?;
    let f = test_function(&args.f, args.seed)?;
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let kern = lib(ResolventKernel::new(&a, lambda))?;
    let grid = lib(Grid::new(a.jump_point(), 12, 12, 24))?;
    let sol = kern.solve(&GridFn::from_fn(&grid, &f));
    let mut csv = String::from("x,re,im\n");
    for i in 0..args.points {
        let x = -FRAC_PI_2 + PI * i as f64 / (args.points - 1) as f64;
        let u = sol.eval(x);
        csv.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", x, u.re, u.im));
    }
    let scale = (0..=400).map(|i| f(-FRAC_PI_2 + PI * i as f64 / 400.0).norm()).fold(1e-300, f64::max);
    let summary = ResolventSummary {
        a: a.clone(),
        lambda,
        k: kern.k,
        denom: kern.denom,
        f: args.f.clone(),
        boundary_deviation: sol.boundary_deviation(),
        pde_residual: fd_residual(|x| sol.eval(x), &f, lambda, a.jump_point(), 200) / scale,
        points: args.points,
    };
    out.write("resolvent.csv", &csv)?;
    out.write_json("resolvent.json", &summary)?;
    if let Some(n) = args.svd {
        let probe = lib(singular_value_probe(&a, lambda, n))?;
        let mut s = String::from("j,sigma\n");
        for (j, v) in probe.singular_values.iter().enumerate() {
            s.push_str(&format!("{},{:.16e}\n", j + 1, v));
        }
        out.write("singular_values.csv", &s)?;
        out.write_json("svd.json", &json!({ "n": probe.n, "partial_sum": probe.partial_sum, "decay_exponent": probe.decay_exponent, "fit_range": probe.fit_range }))?;
    }
    let params = json!({ "a": a, "lambda": [lambda.re, lambda.im], "f": args.f, "points": args.points, "svd": args.svd });
    out.finish("resolvent", params, Some(args.seed))?;
    Ok(())
}

fn psi_from_spec(spec: &str, a: &ParamA, seed: u64) -> Result<PiecewiseTrig, CliError> {
    let bad = || CliError::Usage(format!("unknown --psi `{spec}` (eig:N or random)"));
    if spec == "random" {
        return Ok(random_domain_h(&mut ChaCha8Rng::seed_from_u64(seed), a.jump_point()));
    }
    let n: usize = spec.strip_prefix("eig:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let mut lmax = 100.0;
    loop {
        let recs = lib(enumerate(a, lmax))?;
        if recs.len() > n {
            return Ok(lib(eigenfunctions_h(&recs[n], a))?.remove(0).func);
        }
        lmax *= 4.0;
    }
}

pub fn metric_check(args: MetricArgs, mut out: OutDir) -> Result<(), CliError> {
    let a = param(&args.a)?;
    let op = MetricOp::new(&a);
    let psi = psi_from_spec(&args.psi, &a, args.seed)?;
    let residual = lib(op.quasi_self_adjointness_residual(&psi))?;
    let norm = lib(norm_sampled(&psi))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let mut positivity_min = f64::INFINITY;
    for _ in 0..args.probes {
        positivity_min = positivity_min.min(lib(op.form(&random_smooth(&mut rng, 8)))?.re);
    }
    let rayleigh_sequence = if a.is_rational() { Vec::new() } else { lib(noninvertibility_probe(&a, args.convergents))? };
    let image = lib(op.image_domain(&psi))?;
    let report = json!({
        "a": a,
        "psi": args.psi,
        "residual": residual,
        "relative_residual": residual / norm,
        "psi_at_jump": [psi.at(op.c).re, psi.at(op.c).im],
        "image_in_domain_hstar": image.in_domain,
        "positivity_min": positivity_min,
        "probes": args.probes,
        "rayleigh_sequence": rayleigh_sequence,
        "informational_only": a.is_rational(),
    });
    out.write_json("metric.json", &report)?;
    let params = json!({ "a": a, "psi": args.psi, "probes": args.probes, "convergents": args.convergents });
    out.finish("metric-check", params, Some(args.seed))?;
    Ok(())
}

pub fn basis(args: BasisArgs, mut out: OutDir) -> Result<(), CliError> {
    let a = param(&args.a)?;
    let rows = lib(projection_norms(&a, args.lambda_max))?;
    out.write("projections.csv", &projection_csv(&rows))?;
    let mut report = serde_json::Map::new();
    report.insert("a".into(), serde_json::to_value(&a)?);
    report.insert("projection_count".into(), rows.len().into());
    let worst = rows.iter().map(|r| r.rel_error()).fold(0.0, f64::max);
    report.insert("worst_closed_vs_quadrature".into(), worst.into());
    if args.blowup {
        if a.is_rational() {
            return Err(CliError::Usage("--blowup needs an irrational --a".into()));
        }
        let rep = lib(blowup_probe(&a, args.convergents))?;
        out.write("blowup.csv", &blowup_csv(&rep))?;
        report.insert("blowup".into(), serde_json::to_value(&rep)?);
    }
    if a.is_rational() {
        report.insert("rational_bounds".into(), serde_json::to_value(lib(rational_bound_check(&a, args.m_max))?)?);
    }
    if let Some(n) = args.completeness {
        report.insert("completeness".into(), serde_json::to_value(lib(truncated_completeness(&a, n, 5, args.seed))?)?);
    }
    out.write_json("basis.json", &report)?;
    let params = json!({
        "a": a, "lambda_max": args.lambda_max, "blowup": args.blowup, "convergents": args.convergents,
        "m_max": args.m_max, "completeness": args.completeness,
    });
    out.finish("basis", params, Some(args.seed))?;
    Ok(())
}

#[derive(Serialize)]
struct SimOutput<'a> {
    report: &'a SimReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<GapEstimate>,
}

pub fn simulate(args: SimulateArgs, mut out: OutDir) -> Result<(), CliError> {
    let a = param(&args.a)?;
    let mut cfg = SimConfig::new(a.clone(), args.horizon, args.paths, args.seed);
    cfg.dt = args.dt;
    cfg.bins = args.bins;
    cfg.start = args.start;
    cfg.bridge_correction = !args.no_bridge;
    if let Some(b) = args.burn_in {
        if !(b >= 0.0) {
            return Err(CliError::Usage("--burn-in must be nonnegative".into()));
        }
        cfg.burn_in = b;
    }
    let report = lib(run(&cfg))?;
    let gap = if args.gap {
        let rec = lib(enumerate(&a, 4.5))?.into_iter().find(|r| (r.lambda - 4.0).abs() < 1e-12);
        let rec = rec.ok_or(CliError::Lib(jumpspec::SimError::ObservableOrthogonalToGapMode.into()))?;
        let g = lib(eigenfunctions_h(&rec, &a))?.remove(0).func;
        let gcfg = SimConfig { n_paths: args.gap_paths, seed: args.seed.wrapping_add(1), start: None, ..cfg.clone() };
        Some(lib(estimate_gap(&gcfg, &g))?)
    } else {
        None
    };
    out.write_json("sim.json", &SimOutput { report: &report, gap })?;
    out.write("histogram.csv", &histogram_csv(&report.histogram))?;
    let params = json!({
        "a": a, "dt": args.dt, "horizon": args.horizon, "paths": args.paths, "bins": args.bins,
        "burn_in": cfg.burn_in, "start": args.start, "bridge_correction": cfg.bridge_correction,
        "gap": args.gap, "gap_paths": args.gap_paths,
    });
    out.finish("simulate", params, Some(args.seed))?;
    Ok(())
}
