mod common;

use proptest::prelude::*;

use nearfar_swipt::fresnel::fresnel;
use nearfar_swipt::geometry::channel_gain;
use nearfar_swipt::metrics::{nonlinear_eh, NonlinearEhParams};
use nearfar_swipt::solvers::{closed_form_mixed, exhaustive_search, sca_solve, SolverOptions, Status};
use nearfar_swipt::{correlation_approx, correlation_exact, ArrayConfig, PolarLocation};

use common::{random_instance, reference_array};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn correlations_are_symmetric_and_bounded(
        t1 in -0.95f64..0.95, t2 in -0.95f64..0.95, f1 in 0.03f64..1.5, f2 in 0.03f64..1.5,
    ) {
        let cfg = reference_array();
        let z = cfg.rayleigh_distance();
        let p = PolarLocation::new(t1, f1 * z).unwrap();
        let q = PolarLocation::new(t2, f2 * z).unwrap();
        let pq = correlation_exact(&cfg, &p, &q);
        prop_assert!((pq - correlation_exact(&cfg, &q, &p)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&pq));
        if let (Ok(a), Ok(b)) = (correlation_approx(&cfg, &p, &q), correlation_approx(&cfg, &q, &p)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fresnel_integrals_are_odd(x in -40.0f64..40.0) {
        let (p, n) = (fresnel(x).unwrap(), fresnel(-x).unwrap());
        prop_assert_eq!(p.c, -n.c);
        prop_assert_eq!(p.s, -n.s);
    }

    #[test]
    fn channel_gain_falls_with_range_and_grows_with_size(r in 1.0f64..500.0, n in 2usize..512) {
        let cfg = ArrayConfig::new(n, 30e9).unwrap();
        let g = channel_gain(&cfg, r).unwrap().value();
        prop_assert!(channel_gain(&cfg, r * 1.01).unwrap().value() < g);
        let twice = ArrayConfig::new(2 * n, 30e9).unwrap();
        prop_assert!((channel_gain(&twice, r).unwrap().value() - 2.0 * g).abs() <= 1e-12 * g);
    }

    #[test]
    fn nonlinear_eh_is_anchored_and_monotone(
        kappa in 1e-3f64..1.0, varpi in 0.0f64..0.05, varrho in 10.0f64..500.0, q in 0.0f64..0.1, dq in 0.0f64..0.1,
    ) {
        let p = NonlinearEhParams { kappa, varpi, varrho };
        prop_assert_eq!(nonlinear_eh(0.0, &p), 0.0);
        let (a, b) = (nonlinear_eh(q, &p), nonlinear_eh(q + dq, &p));
        prop_assert!(b >= a);
        prop_assert!(b <= kappa * (1.0 + 1e-12));
    }

    #[test]
    fn single_id_budget_identity_and_tight_rate(seed in 0u64..10_000, k in 1usize..6, rate in 0.5f64..6.0) {
        let (_, sc, mats) = random_instance(seed, k, 1, rate);
        let rep = closed_form_mixed(&mats, &sc).unwrap();
        prop_assume!(rep.status == Status::Optimal);
        let total = rep.allocation.total();
        prop_assert!((total - sc.max_power).abs() <= f64::EPSILON * sc.max_power);
        if rep.allocation.powers()[..k].iter().any(|&p| p > 0.0) {
            prop_assert!((rep.sum_rate - rate).abs() <= 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn sca_is_monotone_feasible_and_dominated_by_exhaustive(
        seed in 0u64..10_000, k in 1usize..4, m in 1usize..3, rate in 0.5f64..6.0,
    ) {
        let (_, sc, mats) = random_instance(seed, k, m, rate);
        let opts = SolverOptions::default();
        let rep = sca_solve(&mats, &sc, &opts).unwrap();
        for w in rep.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9 * w[0].abs());
        }
        let ex = exhaustive_search(&mats, &sc, &opts).unwrap();
        if rep.status == Status::Optimal {
            prop_assert!(rep.allocation.total() <= sc.max_power * (1.0 + 1e-7));
            prop_assert!(rep.allocation.powers().iter().all(|&p| p >= 0.0));
            prop_assert!(rep.sum_rate >= rate - 1e-5);
            prop_assert_eq!(ex.status, Status::Optimal);
            prop_assert!(ex.objective >= rep.objective * (1.0 - 1e-6), "{} < {}", ex.objective, rep.objective);
        } else {
            prop_assert_eq!(ex.status, Status::Infeasible);
        }
    }
}
