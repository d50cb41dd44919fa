//! Operation counts per SCA iteration against the `(K+M)^3.5` bound.

mod common;

use nearfar_swipt::solvers::{sca_solve, SolverOptions, Status};

// Least-squares slope of ln(flops per iteration) against ln(K+M).
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = points.iter().map(|(x, y)| (x.ln() - mx) * (y.ln() - my)).sum();
    let den: f64 = points.iter().map(|(x, _)| (x.ln() - mx).powi(2)).sum();
    num / den
}

#[test]
fn flops_per_iteration_scale_no_worse_than_the_bound() {
    let opts = SolverOptions::default();
    let mut points = Vec::new();
    for size in 3..=12usize {
        let m = 1 + size / 4;
        let k = size - m;
        let mut per_iter = Vec::new();
        for seed in 0..3u64 {
            let (_, sc, mats) = common::random_instance(700 + 31 * size as u64 + seed, k, m, 1.0);
            let rep = sca_solve(&mats, &sc, &opts).unwrap();
            assert_eq!(rep.status, Status::Optimal, "size {size}, seed {seed}");
            per_iter.push(rep.flops as f64 / rep.iterations as f64);
        }
        per_iter.sort_by(f64::total_cmp);
        points.push((size as f64, per_iter[1]));
    }
    let slope = log_log_slope(&points);
    assert!(slope <= 3.5, "slope {slope:.2}: {points:?}");
}
