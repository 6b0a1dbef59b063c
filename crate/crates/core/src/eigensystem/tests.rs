use super::*;
use crate::funcspace::{helmholtz, inner_quadrature, validate_domain_h, validate_domain_hstar};

fn pa(s: &str) -> ParamA {
    ParamA::parse(s).unwrap()
}

fn rec_at(a: &ParamA, lambda: f64) -> EigRecord {
    enumerate(a, lambda + 1.0).unwrap().into_iter().find(|r| (r.lambda - lambda).abs() < 1e-9).unwrap()
}

#[test]
fn zero_class_generic_example() {
    let a = pa("1/3");
    let f = eigenfunctions_h(&rec_at(&a, 4.0), &a).unwrap().remove(0);
    let want = PiecewiseTrig::single(vec![TrigTerm::cos(1.0, 2.0, 0.0), TrigTerm::sin(-(3f64.sqrt()), 2.0, 0.0)]);
    assert!(f.func.sup_distance(&want, 200).unwrap() < 1e-14);
}

#[test]
fn residuals_and_domains() {
    for s in ["1/3", "0", "2/5", "sqrt(2)-1", "-3/7"] {
        let a = pa(s);
        let c = a.jump_point();
        for rec in enumerate(&a, 900.0).unwrap() {
            for f in eigenfunctions_h(&rec, &a).unwrap() {
                let r = helmholtz(&f.func, rec.lambda);
                assert!(r.sup_distance(&PiecewiseTrig::zero(), 1000).unwrap() < 1e-12 * rec.lambda.max(1.0), "{s} {}", rec.lambda);
                assert!(validate_domain_h(&f.func, c).in_domain, "{s} {} {:?}", rec.lambda, validate_domain_h(&f.func, c));
            }
            for f in eigenfunctions_hstar(&rec, &a).unwrap() {
                let r = helmholtz(&f.func, rec.lambda);
                assert!(r.sup_distance(&PiecewiseTrig::zero(), 1000).unwrap() < 1e-12 * rec.lambda.max(1.0));
                assert!(validate_domain_hstar(&f.func, c).in_domain, "{s} {}", rec.lambda);
            }
        }
    }
}

#[test]
fn jordan_chains() {
    for s in ["1/3", "0", "2/5", "-1/5"] {
        let a = pa(s);
        let c = a.jump_point();
        for rec in enumerate(&a, 2500.0).unwrap().into_iter().filter(|r| r.case == EigCase::ExceptionalPair) {
            let (psi, phi) = root_space(&rec, &a).unwrap();
            let r = helmholtz(&psi[2].func, rec.lambda).minus(&psi[1].func).unwrap();
            assert!(r.sup_distance(&PiecewiseTrig::zero(), 1000).unwrap() < 1e-10);
            assert!(validate_domain_h(&psi[2].func, c).in_domain);
            let (am, ap) = eta_constants(&a);
            let rhs = phi[0].func.scale(ap).plus(&phi[1].func.scale(am)).unwrap();
            let r = helmholtz(&phi[2].func, rec.lambda).minus(&rhs).unwrap();
            assert!(r.sup_distance(&PiecewiseTrig::zero(), 1000).unwrap() < 1e-10);
            assert!(validate_domain_hstar(&phi[2].func, c).in_domain, "{s} {:?}", validate_domain_hstar(&phi[2].func, c));
            let twice = helmholtz(&helmholtz(&psi[2].func, rec.lambda), rec.lambda);
            assert!(twice.sup_distance(&PiecewiseTrig::zero(), 1000).unwrap() < 1e-9);
        }
    }
}

#[test]
fn a_third_triple_gram_is_identity() {
    let a = pa("1/3");
    let rec = rec_at(&a, 36.0);
    let pairs = pairs_for(&rec, &a).unwrap();
    assert_eq!(pairs.len(), 3);
    for (i, p) in pairs.iter().enumerate() {
        for (j, q) in pairs.iter().enumerate() {
            let g = inner_quadrature(&p.phi.func, &q.psi.func).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).norm() < 1e-9, "{i}{j} {g}");
        }
    }
}

#[test]
fn root_gram_matches_quadrature() {
    let a = pa("1/3");
    let rec = rec_at(&a, 36.0);
    let (psi, phi) = root_space(&rec, &a).unwrap();
    let g = root_gram(&rec, &a, &psi, &phi).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let q = inner_quadrature(&phi[i].func, &psi[j].func).unwrap();
            assert!((g[(i, j)] - q).norm() < 1e-10 * q.norm().max(1.0), "{i}{j}: {} vs {q}", g[(i, j)]);
        }
    }
}

#[test]
fn irrational_gram() {
    let a = pa("sqrt(2)-1");
    let pairs: Vec<_> = biorthogonalize(&a, 2000.0).unwrap().into_iter().take(30).collect();
    assert_eq!(pairs.len(), 30);
    let g = gram_quadrature(&pairs, &a).unwrap();
    let dev = (0..30)
        .flat_map(|i| (0..30).map(move |j| (i, j)))
        .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn case_mismatch_detected() {
    let a = pa("1/3");
    let mut rec = rec_at(&a, 36.0);
    rec.case = EigCase::Generic;
    assert!(matches!(eigenfunctions_h(&rec, &a), Err(EigenError::CaseMismatch { .. })));
    let rec = rec_at(&a, 4.0);
    assert!(matches!(generalized_xi(&rec, &a), Err(EigenError::CaseMismatch { .. })));
}
