use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symsos::certpipeline::fixtures::*;
use symsos::certpipeline::*;
use symsos::grouprep::{catalog, CatalogSpec};
use symsos::isotypic::InducedRep;
use symsos::polyring::{parse_polynomial, VarNames};
use symsos::rational::{q, to_f64, Q};
use symsos::Error;

fn d4() -> CatalogSpec {
    CatalogSpec::parse("dihedral:4").unwrap()
}

#[test]
fn d4_bound_and_rounded_certificate() {
    let f = d4_sextic();
    let (bound, cert) = sos_lower_bound(&f, &d4()).unwrap();
    assert!((bound + 3825.0 / 4096.0).abs() < 1e-6, "{bound}");
    let exact = round_certificate(&cert, &f, &DEFAULT_SCHEDULE).unwrap();
    let report = verify_certificate(&exact, &f);
    assert!(report.valid, "{report:?}");
    let lambda = exact.lambda.exact().unwrap();
    assert!((to_f64(lambda) - bound).abs() < 1e-6);
}

#[test]
fn s3_quartic_bound_and_block_sizes() {
    let f = s3_quartic();
    let (bound, cert) = sos_lower_bound(&f, &CatalogSpec::Symmetric(3)).unwrap();
    assert!((bound - S3_QUARTIC_BOUND).abs() < 1e-6, "{bound}");
    assert_eq!(cert.block_sizes(), vec![4, 3]);
    let sdp = invariant_program(&f, &fixture_bundle_s3(), Objective::MaximizeLambda)
        .unwrap()
        .sdp;
    let fixed = sdp.fix_free(&[Q::new((-2113).into(), 1000.into())]).unwrap();
    assert_eq!(fixed.affine_dimension().unwrap(), 5);
}

fn fixture_bundle_s3() -> GeneratorBundle {
    algorithm_one_upto(&CatalogSpec::Symmetric(3), Some(2)).unwrap()
}

#[test]
fn s3_rational_certificate_verifies_and_perturbation_fails() {
    let f = s3_quartic();
    let cert = s3_rational_certificate().unwrap();
    let report = verify_certificate(&cert, &f);
    assert!(report.valid, "{report:?}");

    let mut bad = cert.clone();
    if let CertificateBody::Invariant { blocks, .. } = &mut bad.body {
        if let Gram::Exact(m) = &mut blocks[0].gram {
            let v = m.get(1, 1) + Q::new(1.into(), 1000.into());
            m.set(1, 1, v);
        }
    }
    let report = verify_certificate(&bad, &f);
    assert!(!report.valid);
    assert!(report.failure.unwrap().contains("identity fails"));
}

#[test]
fn s3_bound_is_below_the_minimizer_value() {
    let f = s3_quartic();
    let (bound, _) = sos_lower_bound(&f, &CatalogSpec::Symmetric(3)).unwrap();
    assert!(bound <= f.evaluate_f64(&S3_MINIMIZER) + 1e-9);
}

#[test]
fn choi_certificate_expands_exactly() {
    let report = verify_certificate(&choi_certificate(), &choi_product());
    assert!(report.valid, "{report:?}");
}

#[test]
fn sottile_quartic_expands_and_uses_one_block() {
    let f = sottile_quartic().unwrap();
    assert_eq!(f, sottile_squares());
    let bundle = algorithm_one_upto(&CatalogSpec::Symmetric(4), Some(2)).unwrap();
    let cert = algorithm_two(&f, &bundle, Objective::Feasibility).unwrap();
    assert_eq!(cert.lambda, Value::Exact(q(0)));
    let CertificateBody::Invariant { blocks, .. } = &cert.body else {
        panic!("invariant certificate expected");
    };
    assert_eq!(cert.block_sizes(), vec![2, 2, 1]);
    for b in blocks {
        let norm = b.gram.to_f64().norm();
        if b.label == "[2,2]" {
            assert!(norm > 1.0, "{norm}");
        } else {
            assert!(norm < 1e-6, "{} has norm {norm}", b.label);
        }
    }
}

#[test]
fn sign_flip_sextic_is_feasible_at_zero() {
    let f = sign_flip_sextic();
    let bundle = algorithm_one(&CatalogSpec::C2n(1)).unwrap();
    let cert = algorithm_two(&f, &bundle, Objective::Feasibility).unwrap();
    let exact = round_certificate(&cert, &f, &DEFAULT_SCHEDULE).unwrap();
    assert!(verify_certificate(&exact, &f).valid);
}

#[test]
fn symmetric_quadratic_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 2..=8 {
        let bundle = symmetric_quadratic_bundle(n).unwrap();
        let mut cases: Vec<(Q, Q)> = (0..200)
            .map(|_| {
                (
                    Q::new(rng.gen_range(-1000i64..=1000).into(), 100.into()),
                    Q::new(rng.gen_range(-1000i64..=1000).into(), 100.into()),
                )
            })
            .collect();
        // Boundary of the SOS cone: b = 0, and 2na + (n − 1)b = 0 with b < 0.
        cases.push((q(1), q(0)));
        cases.push((q(n as i64 - 1), q(-2 * n as i64)));
        for (a, b) in cases {
            let f = symmetric_quadratic(n, &a, &b);
            let got = match algorithm_two(&f, &bundle, Objective::Feasibility) {
                Ok(_) => true,
                Err(Error::NoCertificate(_)) => false,
                Err(e) => panic!("n={n} a={a} b={b}: {e}"),
            };
            assert_eq!(got, symmetric_quadratic_is_sos(n, &a, &b), "n={n} a={a} b={b}");
        }
    }
}

#[test]
fn square_has_bound_zero_on_the_trivial_group() {
    let f = parse_polynomial("x^2", &VarNames::new(&["x"])).unwrap();
    let (bound, cert) = sos_lower_bound(&f, &CatalogSpec::Trivial(1)).unwrap();
    assert!(bound.abs() < 1e-8, "{bound}");
    let exact = round_certificate(&cert, &f, &DEFAULT_SCHEDULE).unwrap();
    assert_eq!(exact.lambda, Value::Exact(q(0)));
}

#[test]
fn certificates_survive_the_text_format() {
    let exact = s3_rational_certificate().unwrap();
    assert_eq!(parse_certificate(&render_certificate(&exact)).unwrap(), exact);
    let (_, float) = sos_lower_bound(&d4_sextic(), &d4()).unwrap();
    assert_eq!(parse_certificate(&render_certificate(&float)).unwrap(), float);
    let plain = choi_certificate();
    assert_eq!(parse_certificate(&render_certificate(&plain)).unwrap(), plain);
}

#[test]
fn plain_symmetric_and_invariant_bounds_agree() {
    let f = d4_sextic();
    let plain = plain_lower_bound(&f, None).unwrap();
    let reduced = plain_lower_bound(&f, Some(&d4())).unwrap();
    let (inv, _) = sos_lower_bound(&f, &d4()).unwrap();
    assert!((plain.lambda - reduced.lambda).abs() < 1e-6);
    assert!((plain.lambda - inv).abs() < 1e-6);
    assert!(reduced.block_sizes.iter().sum::<usize>() < plain.block_sizes[0]);
}

#[test]
fn square_factors_lie_in_their_isotypic_components() {
    let spec = d4();
    let cat = catalog(&spec).unwrap();
    let bound = plain_lower_bound(&d4_sextic(), Some(&spec)).unwrap();
    let CertificateBody::Plain { monomials, .. } = &bound.certificate.body else {
        panic!("plain certificate expected");
    };
    let rep = InducedRep::new(&cat.action, monomials.clone()).unwrap();
    let order = cat.action.order();
    assert!(!bound.factors.is_empty());
    for factor in &bound.factors {
        let i = factor.irrep.unwrap();
        let irrep = &cat.irreps[i];
        let mut p = DMatrix::<f64>::zeros(rep.dim(), rep.dim());
        for g in 0..order {
            p += rep.matrix(g).to_f64() * irrep.character(g).to_f64();
        }
        p *= irrep.dim() as f64 / order as f64;
        let v = &factor.coefficients;
        let defect = (&p * v - v).norm() / v.norm();
        assert!(defect < 1e-8, "irrep {} defect {defect}", irrep.label);
    }
}

#[test]
fn odd_degree_and_wrong_arity_are_rejected() {
    let vars = VarNames::new(&["x", "y"]);
    let odd = parse_polynomial("x^3 + y^3", &vars).unwrap();
    assert!(sos_lower_bound(&odd, &d4()).is_err());
    let three = s3_quartic();
    assert!(sos_lower_bound(&three, &d4()).is_err());
}

#[test]
fn unbounded_polynomial_has_no_certificate() {
    let vars = VarNames::new(&["x", "y"]);
    let f = parse_polynomial("x^2*y^2 - x^2 - y^2", &vars).unwrap();
    match sos_lower_bound(&f, &d4()) {
        Err(Error::NoCertificate(_)) => {}
        other => panic!("expected no certificate, got {other:?}"),
    }
}

/// Feasibility of a degree-20 form built from the degree-4 one; set
/// `SYMSOS_SKIP_SLOW` to skip.
#[test]
fn sottile_degree_twenty_smoke() {
    if std::env::var_os("SYMSOS_SKIP_SLOW").is_some() {
        eprintln!("skipped: SYMSOS_SKIP_SLOW is set");
        return;
    }
    let start = std::time::Instant::now();
    let f = sottile_quartic().unwrap().pow(5);
    let bundle = algorithm_one_upto(&CatalogSpec::Symmetric(4), Some(10)).unwrap();
    let cert = algorithm_two(&f, &bundle, Objective::Feasibility).unwrap();
    assert_eq!(cert.block_sizes().len(), 5);
    assert!(cert.residual.unwrap() < 1e-6, "{:?}", cert.residual);
    assert!(start.elapsed().as_secs() < 600);
}
