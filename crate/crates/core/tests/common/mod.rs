//! Independent oracles and seeded instance generators shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nearfar_swipt::{
    build_matrices, dbm_to_watts, ArrayConfig, CorrelationMatrices, EhReceiver, IdReceiver, PolarLocation, Scenario,
};

pub fn reference_array() -> ArrayConfig {
    ArrayConfig::new(256, 30e9).unwrap()
}

/// Phase of element `n` for a half-wavelength array, referenced to the array centre.
fn phase(n_ant: usize, lambda: f64, theta: f64, r: f64, n: usize) -> f64 {
    let d = lambda / 2.0;
    let delta = (2.0 * n as f64 - n_ant as f64 + 1.0) / 2.0 * d;
    if r.is_infinite() {
        return PI * delta / d * theta;
    }
    let rn = (r * r + delta * delta - 2.0 * r * theta * delta).sqrt();
    -2.0 * PI / lambda * (rn - r)
}

/// `|b(p)ᴴ b(q)|` summed term by term in extended form.
pub fn correlation_oracle(n_ant: usize, lambda: f64, p: (f64, f64), q: (f64, f64)) -> f64 {
    let sum: Complex64 = (0..n_ant)
        .map(|n| Complex64::from_polar(1.0, phase(n_ant, lambda, q.0, q.1, n) - phase(n_ant, lambda, p.0, p.1, n)))
        .sum();
    sum.norm() / n_ant as f64
}

/// Maximises `cᵀx` over `{x : A x <= b}` by enumerating every basis of active rows.
///
/// Returns `None` when no vertex is feasible. Assumes the feasible set is bounded.
pub fn lp_vertex_max(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Option<(f64, DVector<f64>)> {
    let (rows, n) = a.shape();
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let sub = DMatrix::from_fn(n, n, |i, j| a[(pick[i], j)]);
        let rhs = DVector::from_fn(n, |i, _| b[pick[i]]);
        if let Some(x) = sub.lu().solve(&rhs) {
            let scale = b.amax().max(1.0);
            let feasible = (0..rows).all(|r| (a.row(r) * &x)[0] <= b[r] + tol * scale);
            if feasible && x.iter().all(|v| v.is_finite()) {
                let v = c.dot(&x);
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, x));
                }
            }
        }
        // Next n-subset of the rows in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < rows - n + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

pub fn random_eh(cfg: &ArrayConfig, rng: &mut ChaCha8Rng) -> EhReceiver {
    let z = cfg.rayleigh_distance();
    let theta = rng.random_range(-0.9..0.9);
    let r = rng.random_range(cfg.fresnel_min_distance()..0.3 * z);
    EhReceiver { location: PolarLocation::new(theta, r).unwrap(), weight: rng.random_range(0.5..2.0) }
}

pub fn random_id(cfg: &ArrayConfig, rng: &mut ChaCha8Rng) -> IdReceiver {
    let z = cfg.rayleigh_distance();
    IdReceiver {
        spatial_angle: rng.random_range(-0.9..0.9),
        distance: rng.random_range(1.05..1.3) * z,
        noise_power: dbm_to_watts(-80.0),
    }
}

/// Seeded instance with `k` EH and `m` ID receivers.
pub fn random_instance(seed: u64, k: usize, m: usize, rate_floor: f64) -> (ArrayConfig, Scenario, CorrelationMatrices) {
    let cfg = reference_array();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eh = (0..k).map(|_| random_eh(&cfg, &mut rng)).collect();
    let id = (0..m).map(|_| random_id(&cfg, &mut rng)).collect();
    let sc = Scenario {
        eh,
        id,
        max_power: dbm_to_watts(rng.random_range(20.0..40.0)),
        rate_floor,
        eh_efficiency: 0.5,
        nonlinear_eh: None,
    };
    let mats = build_matrices(&cfg, &sc).unwrap();
    (cfg, sc, mats)
}

/// Priority vector `Λ̄ᵀ c` computed from the raw matrices.
pub fn priorities(mats: &CorrelationMatrices) -> DVector<f64> {
    mats.lambda_masked().transpose() * mats.c_eh()
}

/// LP oracle for the single-ID problem in the power variables.
///
/// Rows: budget, rate floor as `a(g Σ Λ̄ y + σ²) <= g y_ID`, then `-y <= 0`.
pub fn single_id_oracle(mats: &CorrelationMatrices, sc: &Scenario) -> Option<(f64, DVector<f64>)> {
    let n = mats.n_slots();
    let slot = mats.id_slot(0);
    let g = mats.id_gain()[0];
    let a_rate = sc.rate_floor.exp2() - 1.0;
    let lm = mats.lambda_masked();
    let mut a = DMatrix::zeros(n + 2, n);
    let mut b = DVector::zeros(n + 2);
    for j in 0..n {
        a[(0, j)] = 1.0;
        a[(1, j)] = a_rate * g * lm[(slot, j)] - if j == slot { g } else { 0.0 };
        a[(2 + j, j)] = -1.0;
    }
    b[0] = sc.max_power;
    b[1] = -a_rate * sc.id[0].noise_power;
    // Rows scaled to unit size so one feasibility tolerance fits all of them.
    for r in 0..n + 2 {
        let s = a.row(r).amax();
        if s > 0.0 {
            a.row_mut(r).scale_mut(1.0 / s);
            b[r] /= s;
        }
    }
    lp_vertex_max(&priorities(mats), &a, &b, 1e-12)
}
