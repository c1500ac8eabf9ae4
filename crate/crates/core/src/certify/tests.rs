use super::*;
use crate::frechet::second_diff_g;
use crate::linalg::Hermitian;
use crate::scalar::registry;
use proptest::prelude::*;
use rand::Rng;

fn cfg(samples: usize) -> TestConfig {
    TestConfig {
        dims: vec![2, 3],
        bipartite: vec![(2, 2)],
        samples,
        seed: 42,
        ..TestConfig::default()
    }
}

fn herm(j: &crate::linalg::MatrixJson) -> Hermitian {
    Hermitian::try_from(j).unwrap()
}

fn assert_sound(f: &ScalarFunction, o: &TestOutcome, tol: f64) {
    assert_eq!(o.verdict, Verdict::Fail, "{}", o.name);
    let c = o.counterexample.as_ref().expect("FAIL carries a counterexample");
    let text = serde_json::to_string(c).unwrap();
    let back: Counterexample = serde_json::from_str(&text).unwrap();
    let m = back.reverify(f).unwrap();
    assert!(m < -tol / 2.0, "{}: re-verified margin {m}", o.name);
    assert_eq!(m, c.margin);
}

#[test]
fn config_validation() {
    assert!(TestConfig::default().validate().is_ok());
    for bad in [
        TestConfig { samples: 0, ..TestConfig::default() },
        TestConfig { tol: 0.0, ..TestConfig::default() },
        TestConfig { eig_range: (0.0, 1.0), ..TestConfig::default() },
        TestConfig { eig_range: (2.0, 1.0), ..TestConfig::default() },
        TestConfig { dims: vec![9], ..TestConfig::default() },
        TestConfig { bipartite: vec![(0, 2)], ..TestConfig::default() },
    ] {
        assert!(matches!(bad.validate(), Err(Error::Config(_))), "{bad:?}");
    }
}

#[test]
fn trial_streams_are_keyed() {
    let a: u64 = trial_rng(1, "x", 0, 3).random();
    assert_eq!(a, trial_rng(1, "x", 0, 3).random::<u64>());
    assert_ne!(a, trial_rng(1, "x", 0, 4).random::<u64>());
    assert_ne!(a, trial_rng(1, "x", 1, 3).random::<u64>());
    assert_ne!(a, trial_rng(1, "y", 0, 3).random::<u64>());
    assert_ne!(a, trial_rng(2, "x", 0, 3).random::<u64>());
}

#[test]
fn indexed_map_keeps_order() {
    let serial = run_indexed(100, Some(0), |i| i * i);
    assert_eq!(run_indexed(100, None, |i| i * i), serial);
    assert_eq!(run_indexed(100, Some(3), |i| i * i), serial);
}

#[test]
fn principle1_examples() {
    let c = cfg(40);
    let o = test_principle1_concavity(&ScalarFunction::tlogt(), &c).unwrap();
    assert_eq!(o.verdict, Verdict::Pass);

    let neg = ScalarFunction::from_expression("-t^2", Some(0.0)).unwrap();
    let o = test_principle1_concavity(&neg, &c).unwrap();
    assert_sound(&neg, &o, c.tol);

    let o = test_principle1_concavity(&ScalarFunction::affine(1.0, 2.0), &c).unwrap();
    assert_eq!(o.verdict, Verdict::Pass);
    assert!(o.min_margin.unwrap().abs() < 1e-12);
}

#[test]
fn premise_failure_without_sampled_violation() {
    // concave on (0, 1), convex beyond: sampled spectra in [2, 3] never see it
    let f = ScalarFunction::from_expression("t^3 - 3*t^2", Some(0.0)).unwrap();
    let c = TestConfig { eig_range: (2.0, 3.0), ..cfg(10) };
    let o = test_principle1_concavity(&f, &c).unwrap();
    assert_eq!(o.verdict, Verdict::Fail);
    assert!(matches!(o.counterexample.unwrap().witness, Witness::ScalarConvexity { .. }));
}

#[test]
fn entropic_examples() {
    let c = cfg(40);
    assert_eq!(test_entropic(&ScalarFunction::tlogt(), &c).unwrap().verdict, Verdict::Pass);
    let sq = ScalarFunction::square();
    assert_sound(&sq, &test_entropic(&sq, &c).unwrap(), c.tol);
    let v = test_entropic(&ScalarFunction::neglog(), &c).unwrap().verdict;
    assert!(matches!(v, Verdict::Fail | Verdict::Inconclusive));
}

#[test]
fn subentropic_examples() {
    let c = cfg(30);
    for k in 2..=3 {
        assert_eq!(test_subentropic_order_k(&ScalarFunction::neglog(), k, &c).unwrap().verdict, Verdict::Pass);
    }
    for k in 2..=4 {
        assert_eq!(test_subentropic_order_k(&ScalarFunction::tlogt(), k, &c).unwrap().verdict, Verdict::Pass);
    }
    let sq = ScalarFunction::square();
    let o = test_subentropic_order_k(&sq, 2, &c).unwrap();
    assert_sound(&sq, &o, c.tol);
}

#[test]
fn square_hessian_matches_closed_form() {
    let sq = ScalarFunction::square();
    let run = run_subentropic_order_k(&sq, 2, &cfg(20)).unwrap();
    assert_eq!(run.outcome.verdict, Verdict::Fail);
    // every sampled second differential equals -4 Tr h1 h2
    let mut rng = trial_rng(5, "closed", 0, 0);
    for _ in 0..20 {
        let rhos = [crate::linalg::random_pd(3, (0.1, 10.0), &mut rng), crate::linalg::random_pd(3, (0.1, 10.0), &mut rng)];
        let h = crate::linalg::random_hermitian(3, &mut rng);
        let v = second_diff_g(&sq, &rhos, &[h.clone(), h.clone()]).unwrap();
        let closed = -4.0 * h.trace_product(&h);
        assert!((v - closed).abs() <= 1e-11 * closed.abs());
    }
    if let Some(Counterexample { witness: Witness::Hessian { rhos, hs }, .. }) = run.outcome.counterexample {
        let hs: Vec<Hermitian> = hs.iter().map(herm).collect();
        let rhos: Vec<Hermitian> = rhos.iter().map(herm).collect();
        let v = second_diff_g(&sq, &rhos, &hs).unwrap();
        let closed = -4.0 * hs[0].trace_product(&hs[1]);
        assert!((v - closed).abs() <= 1e-11 * closed.abs().max(1.0));
    }
}

#[test]
fn condition13_examples() {
    let c = cfg(30);
    for f in [ScalarFunction::neglog(), ScalarFunction::tlogt()] {
        let o = test_condition13(&f, &c).unwrap();
        assert_eq!(o.verdict, Verdict::Pass, "{}", f.name());
    }
    let sq = ScalarFunction::square();
    let run = run_condition13(&sq, &c).unwrap();
    assert_sound(&sq, &run.outcome, c.tol);
    assert_eq!(run.records.len(), 60);
    for r in &run.records {
        assert!((r.margin + 0.5).abs() <= 1e-12, "{}", r.margin);
    }
    let o = test_condition13(&ScalarFunction::affine(0.0, 1.0), &c).unwrap();
    assert_eq!(o.verdict, Verdict::Skipped);
    assert_eq!(o.trials_skipped, 60);
}

#[test]
fn neglog_condition13_difference_is_sandwich_sum() {
    let mut rng = trial_rng(3, "sandwich", 0, 0);
    let rho = crate::linalg::random_pd(2, (0.1, 10.0), &mut rng);
    let sigma = crate::linalg::random_pd(2, (0.1, 10.0), &mut rng);
    let e = witness::condition13_margin(&ScalarFunction::neglog(), &rho, &sigma).unwrap();
    // h -> ρhσ + σhρ has spectrum {λ_i μ_j + μ_i λ_j}; in general position it is PD
    assert!(e.margin > 0.0);
}

#[test]
fn equivalence_examples() {
    let c = TestConfig { dims: vec![2], ..cfg(15) };
    for f in registry() {
        let o = test_equivalence_13_vs_hessian(&f, &c).unwrap();
        assert_eq!(o.verdict, Verdict::Pass, "{}: {:?}", f.name(), o);
    }
}

#[test]
fn hermitian_basis_is_orthonormal() {
    let b = witness::hermitian_basis(3);
    assert_eq!(b.len(), 9);
    for (i, x) in b.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((x.trace_product(y) - want).abs() < 1e-15);
        }
    }
}

#[test]
fn matrix_entropy_examples() {
    let c = cfg(40);
    for f in [ScalarFunction::tlogt(), ScalarFunction::power(1.5)] {
        assert_eq!(test_matrix_entropy(&f, &c).unwrap().verdict, Verdict::Pass, "{}", f.name());
    }
    let v = test_matrix_entropy(&ScalarFunction::neglog(), &c).unwrap().verdict;
    assert!(matches!(v, Verdict::Fail | Verdict::Inconclusive));
}

#[test]
fn entropy_gain_examples() {
    let c = cfg(30);
    assert_eq!(test_entropy_gain_convexity(&ScalarFunction::tlogt(), &c).unwrap().verdict, Verdict::Pass);
    let sq = ScalarFunction::square();
    assert_sound(&sq, &test_entropy_gain_convexity(&sq, &c).unwrap(), c.tol);

    let mut rng = trial_rng(9, "identity", 0, 0);
    let ch = crate::quantum::KrausChannel::identity(3);
    for f in registry() {
        let w = Witness::EntropyGain {
            channel: (&ch).into(),
            x: (&crate::linalg::random_pd(3, (0.1, 10.0), &mut rng)).into(),
            y: (&crate::linalg::random_pd(3, (0.1, 10.0), &mut rng)).into(),
        };
        assert_eq!(evaluate(&f, &w).unwrap().margin, 0.0);
    }
}

#[test]
fn gap_examples() {
    let c = cfg(1);
    let tl = test_gap_superadditive(&ScalarFunction::tlogt(), &c).unwrap();
    assert_eq!(tl.verdict, Verdict::Pass);
    assert!(tl.min_margin.unwrap().abs() < 1e-14);
    assert_eq!(test_gap_superadditive(&ScalarFunction::neglog(), &c).unwrap().verdict, Verdict::Pass);
    let p = ScalarFunction::power(1.5);
    assert_sound(&p, &test_gap_superadditive(&p, &c).unwrap(), c.tol);
    let sq = ScalarFunction::from_expression("t^2", Some(0.0)).unwrap();
    assert_eq!(test_gap_superadditive(&sq, &c).unwrap().verdict, Verdict::Fail);

    assert_eq!(test_gap_concavity(&ScalarFunction::tlogt(), &c).unwrap().verdict, Verdict::Pass);
    assert_eq!(test_gap_concavity(&p, &c).unwrap().verdict, Verdict::Pass);
    let nl = ScalarFunction::neglog();
    assert_sound(&nl, &test_gap_concavity(&nl, &c).unwrap(), c.tol);

    assert_eq!(test_gap_concavity(&ScalarFunction::affine(1.0, 1.0), &c).unwrap().verdict, Verdict::Skipped);
}

#[test]
fn pipeline_examples() {
    let c = cfg(30);
    let r = uniqueness_pipeline(&ScalarFunction::tlogt(), &c).unwrap();
    assert_eq!(r.outcome.verdict, Verdict::Pass);
    let fit = r.fit.unwrap();
    assert!((fit.b - 1.0).abs() < 1e-12 && fit.residual < 1e-12);
    assert_eq!(r.normalization, Some([0.0, 1.0, 1.0]));
    assert_eq!(r.stopped_at, None);

    let r = uniqueness_pipeline(&ScalarFunction::power(1.5), &c).unwrap();
    assert_eq!(r.outcome.verdict, Verdict::Fail);
    assert_eq!(r.stopped_at.as_deref(), Some("gap_superadditive"));

    let r = uniqueness_pipeline(&ScalarFunction::neglog(), &c).unwrap();
    assert!(matches!(r.stopped_at.as_deref(), Some("entropic" | "matrix_entropy")));
    assert_ne!(r.outcome.verdict, Verdict::Pass);
}

#[test]
fn pipeline_fit_failure_is_reported() {
    // g(t) = t^2 has no linear fit
    let f = ScalarFunction::neglog();
    let fit = fit_gap_function(&f).unwrap();
    assert!(!fit.passes());
    let w = Witness::GapFit { b: fit.b, residual: fit.residual };
    assert_eq!(evaluate(&f, &w).unwrap().margin, fit.margin());
}

#[test]
fn cached_pipeline_reuses_outcomes() {
    let c = cfg(10);
    let f = ScalarFunction::tlogt();
    let mut cache = std::collections::BTreeMap::new();
    let a = uniqueness_pipeline_cached(&f, &c, &mut cache).unwrap();
    assert_eq!(cache.len(), 6);
    let b = uniqueness_pipeline_cached(&f, &c, &mut cache).unwrap();
    assert_eq!(a, b);
}

#[test]
fn deterministic_across_thread_counts() {
    let f = ScalarFunction::tlogt();
    let serial = TestConfig { threads: Some(0), ..cfg(20) };
    let parallel = TestConfig { threads: Some(4), ..cfg(20) };
    let a = run_matrix_entropy(&f, &serial).unwrap();
    let b = run_matrix_entropy(&f, &parallel).unwrap();
    let c = run_matrix_entropy(&f, &cfg(20)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn order_propagation() {
    let c = TestConfig { dims: vec![2], ..cfg(15) };
    for f in registry() {
        let k2 = test_subentropic_order_k(&f, 2, &c).unwrap();
        if k2.verdict == Verdict::Pass && k2.min_margin.unwrap_or(0.0) > 10.0 * c.tol {
            for k in 3..=4 {
                let o = test_subentropic_order_k(&f, k, &c).unwrap();
                assert_eq!(o.verdict, Verdict::Pass, "{} k={k}", f.name());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn larger_budget_never_clears_a_failure(seed in any::<u64>(), extra in 1usize..20) {
        let f = ScalarFunction::power(1.5);
        let small = TestConfig { seed, dims: vec![2], ..cfg(10) };
        let large = TestConfig { samples: small.samples + extra, ..small.clone() };
        let a = test_condition13(&f, &small).unwrap();
        let b = test_condition13(&f, &large).unwrap();
        if a.verdict == Verdict::Fail {
            prop_assert_eq!(b.verdict, Verdict::Fail);
        }
        prop_assert!(b.min_margin.unwrap() <= a.min_margin.unwrap());
    }

    #[test]
    fn identical_seeds_identical_outcomes(seed in any::<u64>()) {
        let f = ScalarFunction::neglog();
        let c = TestConfig { seed, dims: vec![2], ..cfg(8) };
        prop_assert_eq!(test_condition13(&f, &c).unwrap(), test_condition13(&f, &c).unwrap());
        prop_assert_eq!(test_entropic(&f, &c).unwrap(), test_entropic(&f, &c).unwrap());
    }
}
