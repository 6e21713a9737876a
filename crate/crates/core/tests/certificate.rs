use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use vbm_core::cert::{build_certificate, complementary_slackness, flow_check, harmonic_condition, verify_certificate};
use vbm_core::digraph::WeightedDigraph;
use vbm_core::gen::{gen_lr14, gen_vbm, Crossing, Label, Lr14Params, PlantedInstance, Strategy, VbmParams};
use vbm_core::sdp::{build_primal, solve, SdpSolution, SolverOptions};

const TOL: f64 = 1e-9;

fn params(seed: u64) -> VbmParams {
    VbmParams {
        n: 200,
        eps1: 0.05,
        eps2: 0.05,
        p1: 0.5,
        p2: 0.5,
        c: 3,
        r: 2.0,
        lambda1: 0.3,
        lambda2: 0.3,
        expander_degree: 8,
        adversary: vec![Strategy::RandomWithinSides { q: 0.05 }],
        seed,
    }
}

fn instance(seed: u64) -> PlantedInstance {
    gen_vbm(&params(seed)).unwrap()
}

fn int(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// `d_{T′}(t)` is the `Y`-weighted degree from `t` into the opposite
/// boundary, counting both directions.
#[test]
fn b_on_boundary_is_twice_the_crossing_degree() {
    let inst = instance(1);
    let cert = build_certificate(&inst).unwrap();
    let labels = inst.labels();
    for (&t, across) in inst.t.iter().map(|t| (t, Label::BoundaryP)).chain(inst.tp.iter().map(|t| (t, Label::Boundary)))
    {
        let mut d = BigRational::zero();
        for j in 0..inst.n() {
            if labels[j] == across {
                d += cert.y.get(t, j) + cert.y.get(j, t);
            }
        }
        assert!(!d.is_zero());
        assert_eq!(cert.b_diag[t], int(2) * d, "vertex {t}");
    }
    assert!(inst.s.iter().chain(&inst.sp).filter(|&&v| !labels[v].is_boundary()).all(|&v| cert.b_diag[v].is_zero()));
}

#[test]
fn dual_objective_and_row_sums_are_exact() {
    for seed in 0..3 {
        let inst = instance(seed);
        let cert = build_certificate(&inst).unwrap();
        let boundary = inst.t.len() + inst.tp.len();
        assert_eq!(boundary, 20);
        assert_eq!(cert.dual_objective(), int(4 * boundary));
        assert!(cert.y.row_sums().iter().all(|s| s.is_one()));
        assert!(cert.y.check_support(&inst.graph).is_ok());
    }
}

#[test]
fn verification_passes_and_detects_tampering() {
    let inst = instance(2);
    let cert = build_certificate(&inst).unwrap();
    let rep = verify_certificate(&inst, &cert, TOL);
    assert!(rep.integrality_certified, "failed {:?}", rep.failed_checks);

    let mut zeroed = cert.clone();
    zeroed.b_diag.iter_mut().for_each(|b| *b = BigRational::zero());
    let rep = verify_certificate(&inst, &zeroed, TOL);
    assert!(!rep.planted_null);
    assert!(rep.failed_checks.contains(&2));
}

#[test]
fn large_boundary_is_not_certified() {
    let mut p = params(3);
    p.eps1 = 0.28;
    p.eps2 = 0.28;
    let inst = gen_vbm(&p).unwrap();
    match build_certificate(&inst) {
        Ok(cert) => assert!(!verify_certificate(&inst, &cert, TOL).integrality_certified),
        Err(_) => {}
    }
}

#[test]
fn flow_check_agrees_with_max_flow() {
    let inst = instance(4);
    let cert = build_certificate(&inst).unwrap();
    let rep = flow_check(&inst, &cert.y, &cert.c_prime);
    assert!(!rep.samples.is_empty());
    assert!(rep.max_discrepancy <= 1e-9, "{}", rep.max_discrepancy);
    for s in &rep.samples {
        assert!((s.closed_form - s.max_flow / 2.0).abs() <= 1e-9);
    }

    let zero = flow_check(&inst, &WeightedDigraph::new(inst.n()), &cert.c_prime);
    assert_eq!(zero.min_flow, 0.0);
    assert!(zero.samples.iter().all(|s| s.closed_form == 0.0 && s.max_flow == 0.0));
}

#[test]
fn harmonic_sums_on_constructed_instances() {
    let lr = gen_lr14(&Lr14Params {
        n: 100,
        eps: 0.1,
        lambda: 0.0,
        expander_degree: 6,
        r: 2.0,
        crossing: Crossing::Matching,
        adversary: Vec::new(),
        seed: 1,
    })
    .unwrap();
    let rep = harmonic_condition(&lr, 1.0);
    assert!(rep.entries.iter().all(|e| e.h_ext == 1.0), "{:?}", rep.entries);

    let mut p = params(5);
    p.p1 = 0.0;
    p.p2 = 0.0;
    p.c = 1;
    let inst = gen_vbm(&p).unwrap();
    let rep = harmonic_condition(&inst, 1.0);
    assert!(rep.entries.iter().all(|e| e.h_int == 0.0));

    let inst = instance(6);
    let measured = harmonic_condition(&inst, 0.0).min_ratio.unwrap();
    assert!(harmonic_condition(&inst, measured).holds);
    assert!(!harmonic_condition(&inst, measured * 1.01).holds);
}

#[test]
fn complementary_slackness_cases() {
    let inst = instance(7);
    let cert = build_certificate(&inst).unwrap();
    let problem = build_primal(&inst.graph, SolverOptions::default());
    let s = inst.sign_vector();
    let n = inst.n();

    let integral = SdpSolution::from_matrix(&problem, Mat::from_fn(n, n, |i, j| s[i] * s[j])).unwrap();
    let rep = complementary_slackness(&integral, &cert, 1e-9).unwrap();
    assert!(rep.holds, "{rep:?}");

    let identity = SdpSolution::from_matrix(&problem, Mat::identity(n, n)).unwrap();
    let rep = complementary_slackness(&identity, &cert, 1e-9).unwrap();
    let trace: f64 = (0..n).map(|i| cert.dual_matrix()[(i, i)]).sum();
    assert!((rep.inner_product - trace).abs() <= 1e-9 * trace.abs());
    assert!(!rep.holds);

    let sol = solve(&problem).unwrap();
    let rep = complementary_slackness(&sol, &cert, 1e-4).unwrap();
    assert!(rep.holds, "{rep:?}");
}
