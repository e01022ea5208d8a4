mod common;

use common::*;
use infconvex::checkers::{
    check_infinite_combination, check_jensen_discrete, check_on_pairs, check_t_convexity,
    check_ts_convexity, reduction_to_ts, sample_pairs, SampleOptions, Status, Witness,
};
use infconvex::expansion::{combination_pushforward, lambda_expand};
use infconvex::funcparse::parse_function;
use infconvex::search::{exp_condition, find_counterexample, SearchOptions};
use infconvex::series::{segment_upper_bound, weighted_function_series, weighted_point_series};
use infconvex::{convex_combination, BoundedSequence, ConvexDomain, ConvexityParams};
use rand::Rng;

#[test]
fn mean_of_distribution_lies_in_domain() {
    let mut rng = rng(11);
    for _ in 0..300 {
        let dim = rng.gen_range(1..=3);
        let domain = random_domain(&mut rng, dim, 4.0);
        let n = rng.gen_range(1..8);
        let pts = domain.sample_points(n, &mut rng).unwrap();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let dist = infconvex::DiscreteDistribution::new(
            pts.into_iter()
                .zip(raw)
                .map(|(p, w)| (p, w / total))
                .collect(),
        );
        // duplicate atoms are possible only on degenerate domains
        let Ok(dist) = dist else { continue };
        assert!(domain.contains(&dist.mean(), 1e-9).unwrap());
    }
}

#[test]
fn convexity_coherence_for_known_convex_builtins() {
    let mut rng = rng(12);
    for name in CONVEX_BUILTINS {
        for _ in 0..200 {
            let dim = rng.gen_range(1..=3);
            let domain = random_domain(&mut rng, dim, 3.0);
            let f = f(name, dim);
            let t = rng.gen_range(0.0..1.0);
            let opts = SampleOptions {
                samples: 20,
                tol: 1e-9,
                seed: rng.gen(),
            };
            let v = check_t_convexity(&f, &domain, t, opts).unwrap();
            assert_eq!(v.status, Status::HoldsOnSamples, "{name} t={t}");

            let pts = domain.sample_points(2, &mut rng).unwrap();
            let p = rng.gen_range(0.0..=1.0);
            if pts[0] != pts[1] {
                let dist = infconvex::DiscreteDistribution::new(vec![
                    (pts[0].clone(), p),
                    (pts[1].clone(), 1.0 - p),
                ])
                .unwrap();
                let v = check_jensen_discrete(&f, &domain, &dist, 1e-10).unwrap();
                assert_eq!(v.status, Status::HoldsOnSamples, "{name}");
                assert!(v.gap <= 1e-10);
            }

            let w = random_weights(&mut rng);
            let seq = random_sequence(&mut rng, &domain);
            let v = check_infinite_combination(&f, &domain, &w, &w, &seq, w.default_depth(), 1e-9)
                .unwrap();
            assert_eq!(v.status, Status::HoldsOnSamples, "{name} {}", w.family());
        }
    }
}

#[test]
fn convexity_detected_in_both_directions() {
    let unit = ConvexDomain::interval(0.0, 1.0).unwrap();
    let sym = ConvexDomain::interval(-1.0, 1.0).unwrap();
    let opts = SampleOptions::default();
    for (src, domain) in [
        ("exp(x)", &unit),
        ("x^2", &sym),
        ("abs(x)", &sym),
        ("max(x, 0)", &sym),
    ] {
        let f = parse_function(src, 1).unwrap();
        for t in [0.1, 0.5, 0.9] {
            assert_eq!(
                check_t_convexity(&f, domain, t, opts).unwrap().status,
                Status::HoldsOnSamples,
                "{src}"
            );
        }
    }
    for (src, domain) in [
        ("-(x^2)", &sym),
        ("x^3", &sym),
        ("sqrt(x)", &unit),
        ("x^4 - x^2", &sym),
    ] {
        let f = parse_function(src, 1).unwrap();
        let v = check_t_convexity(&f, domain, 0.5, opts).unwrap();
        assert_eq!(v.status, Status::Violated, "{src}");
        let replay = v.witness.unwrap().replay(&f).unwrap();
        assert!((replay - v.gap).abs() < 1e-12);
    }
}

#[test]
fn t_convexity_implies_midpoint_convexity_on_corpus() {
    let corpus = [
        ("exp(x)", 0.0, 1.0),
        ("x^2", -1.0, 1.0),
        ("abs(x - 0.2)", -1.0, 1.0),
        ("-(x^2)", -1.0, 1.0),
        ("x^3", -1.0, 1.0),
        ("sqrt(x)", 0.0, 4.0),
        ("x^4 - x^2", -1.0, 1.0),
        ("max(x, 0) + 0.5*x", -2.0, 2.0),
    ];
    let mut rng = rng(13);
    for (src, a, b) in corpus {
        let f = parse_function(src, 1).unwrap();
        let domain = ConvexDomain::interval(a, b).unwrap();
        let pool = sample_pairs(&domain, 10_000, 13).unwrap();
        let t = rng.gen_range(0.01..0.99);
        let at_t = check_on_pairs(&f, &pool, ConvexityParams::symmetric(t).unwrap(), 1e-9);
        if at_t.status == Status::HoldsOnSamples {
            let mid = check_on_pairs(&f, &pool, ConvexityParams::symmetric(0.5).unwrap(), 1e-9);
            assert_eq!(mid.status, Status::HoldsOnSamples, "{src} t={t}");
        }
    }
}

#[test]
fn two_point_violations_lift_to_sequences() {
    // (x, y, y, …) turns a (λ₁, μ₁) violation at (x, y) into a violation of the infinite inequality
    let mut rng = rng(14);
    let unit = ConvexDomain::interval(0.0, 1.0).unwrap();
    let mut lifted = 0;
    for _ in 0..100 {
        let lambda = random_weights(&mut rng);
        let mu = random_weights(&mut rng);
        let f = f("exp", 1);
        let params = reduction_to_ts(&lambda, &mu);
        let opts = SampleOptions {
            samples: 200,
            tol: 1e-9,
            seed: rng.gen(),
        };
        let v = check_ts_convexity(&f, &unit, params, opts).unwrap();
        let Some(Witness::Pair { x, y, .. }) = v.witness else {
            continue;
        };
        let seq = BoundedSequence::finite_support(vec![x], y).unwrap();
        let inf = check_infinite_combination(&f, &unit, &lambda, &mu, &seq, 5, 1e-9).unwrap();
        assert_eq!(inf.status, Status::Violated);
        assert!((inf.gap - v.gap).abs() < 1e-12);
        lifted += 1;
    }
    assert!(lifted > 10);
}

#[test]
fn monotone_refinement_of_shifted_partial_sums() {
    let mut rng = rng(15);
    for _ in 0..50 {
        let w = random_weights(&mut rng);
        let domain = ConvexDomain::interval(-2.0, 2.0).unwrap();
        let seq = random_sequence(&mut rng, &domain);
        let f = f("exp", 1);
        let bound = 0.0;
        let mut prev = f64::NEG_INFINITY;
        for n in 1..=60 {
            let s = weighted_function_series(&w, &f, &seq, n).unwrap();
            let shifted = s.partial_sum - bound * w.partial_sum(n).unwrap();
            assert!(shifted >= prev - 1e-15);
            prev = shifted;
        }
    }
}

#[test]
fn exp_stays_below_segment_bound() {
    let mut rng = rng(16);
    let f = f("exp", 1);
    for _ in 0..200 {
        let x = rng.gen_range(-3.0..3.0);
        let y = rng.gen_range(-3.0..3.0);
        let ub = segment_upper_bound(&f, &[x], &[y]).unwrap();
        for k in 0..100 {
            let t = k as f64 / 99.0;
            let z = convex_combination(&[x], &[y], t).unwrap();
            assert!(f.eval(&z).unwrap() <= ub + 1e-12);
        }
    }
}

#[test]
fn expansion_windows_and_pushforward() {
    let mut rng = rng(17);
    for _ in 0..500 {
        let w = random_weights(&mut rng);
        let t = rng.gen_range(0.0..=1.0);
        let e = lambda_expand(&w, t, 40, 4096).unwrap();
        assert!(e.windows_hold(&w).unwrap());
        let tail = w.tail_mass(41).unwrap();
        assert!((t - e.reconstruction(&w).unwrap()).abs() <= tail + 1e-12);

        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let z = combination_pushforward(&e, &x, &y).unwrap();
        let p = weighted_point_series(&w, &z, 40).unwrap();
        let target = convex_combination(&x, &y, t).unwrap();
        let k = z.bound();
        for (a, b) in p.point.iter().zip(&target) {
            assert!(
                (a - b).abs() <= k * tail + 1e-12 + p.error_radius,
                "{a} {b}"
            );
        }
    }
}

#[test]
fn search_witnesses_meet_the_analytic_gap() {
    let mut rng = rng(18);
    let unit = ConvexDomain::interval(0.0, 1.0).unwrap();
    let exp = f("exp", 1);
    let mut seen = 0;
    for _ in 0..60 {
        let lambda = random_weights(&mut rng);
        let mu = random_weights(&mut rng);
        let (l1, m1) = (lambda.first(), mu.first());
        if !exp_condition(l1, m1).unwrap() {
            continue;
        }
        let analytic = l1.exp() - 1.0 - m1 * (std::f64::consts::E - 1.0);
        if analytic <= 1e-9 {
            continue;
        }
        let opts = SearchOptions {
            budget: 2000,
            ..Default::default()
        };
        let w = find_counterexample(&exp, &unit, &lambda, &mu, opts, |_| {})
            .unwrap()
            .expect("the seeded pattern is a witness");
        assert!(w.gap >= analytic - 1e-9, "{} < {analytic}", w.gap);
        let v = check_infinite_combination(&exp, &unit, &lambda, &mu, &w.sequence, w.depth, 1e-9)
            .unwrap();
        assert_eq!(v.status, Status::Violated);
        assert!((v.gap - w.gap).abs() < 1e-10);
        let again = find_counterexample(&exp, &unit, &lambda, &mu, opts, |_| {}).unwrap();
        assert_eq!(again.as_ref(), Some(&w));
        seen += 1;
    }
    assert!(seen > 5);
}

#[test]
fn restart_witnesses_replay() {
    let unit = ConvexDomain::interval(-1.0, 1.0).unwrap();
    let f = parse_function("x^4 - x^2", 1).unwrap();
    let w = geometric(0.5);
    for seed in 0..5 {
        let opts = SearchOptions {
            support_size: 2,
            seed,
            ..Default::default()
        };
        let found = find_counterexample(&f, &unit, &w, &w, opts, |_| {})
            .unwrap()
            .unwrap();
        let v = check_infinite_combination(&f, &unit, &w, &w, &found.sequence, found.depth, 1e-9)
            .unwrap();
        assert!(v.is_violated());
        assert!((v.gap - found.gap).abs() < 1e-10);
    }
}
