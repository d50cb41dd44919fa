//! Sum-rate maximisation over the ID slots by the quadratic transform.
//!
//! With `A_m = snr_m x_m` and `B_m = snr_m (Λ̄x)_m + 1` on the normalised
//! budget `Σx <= 1`, each round sets `ν_m = √A_m / B_m` and then maximises the
//! concave surrogate `Σ ln(1 + 2ν_m√A_m − ν_m² B_m)`. The surrogate step runs a
//! bisection on the budget multiplier around cyclic coordinate maximisation.

use std::f64::consts::LN_2;

use crate::correlation::CorrelationMatrices;
use crate::error::{invalid, Result};
use crate::metrics::PowerAllocation;
use crate::scenario::Scenario;

use super::{check_dimensions, SolverOptions, Status};

// Per-coordinate cap, far above the unit budget.
const X_MAX: f64 = 1e3;
const MAX_SWEEPS: usize = 400;
const BISECTION_STEPS: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct FpOutcome {
    /// Best sum-rate in bps/Hz.
    pub r_star: f64,
    /// Full-length allocation with EH slots (and inactive IDs) at zero.
    pub allocation: PowerAllocation,
    /// Auxiliary values in SINR form behind the last surrogate, one per active ID.
    pub gamma: Vec<f64>,
    /// Achieved SINR at `allocation`, one per active ID.
    pub sinr: Vec<f64>,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub r_star: f64,
    pub id_allocation: PowerAllocation,
}

/// Maximum sum-rate with every EH slot switched off.
pub fn fp_rate_max(mats: &CorrelationMatrices, sc: &Scenario, opts: &SolverOptions) -> Result<FpOutcome> {
    check_dimensions(mats, sc)?;
    if mats.n_id() == 0 {
        return Err(invalid("fp_rate_max", "needs at least one ID receiver"));
    }
    let ids: Vec<usize> = (0..mats.n_id()).collect();
    fp_rate_max_on(mats, sc, opts, &ids)
}

/// Decides whether the rate floor is reachable at all.
pub fn feasibility_check(mats: &CorrelationMatrices, sc: &Scenario, opts: &SolverOptions) -> Result<Feasibility> {
    let out = fp_rate_max(mats, sc, opts)?;
    Ok(Feasibility {
        feasible: out.r_star >= sc.rate_floor - opts.feasibility_tolerance,
        r_star: out.r_star,
        id_allocation: out.allocation,
    })
}

struct Problem {
    snr: Vec<f64>,
    // cross[a][b] = Λ̄ between active IDs a and b, zero diagonal.
    cross: Vec<Vec<f64>>,
}

impl Problem {
    fn interference(&self, x: &[f64], a: usize) -> f64 {
        self.snr[a] * self.cross[a].iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + 1.0
    }

    fn sinr(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len()).map(|a| self.snr[a] * x[a] / self.interference(x, a)).collect()
    }

    fn rate(&self, x: &[f64]) -> f64 {
        self.sinr(x).iter().map(|g| g.ln_1p()).sum::<f64>() / LN_2
    }
}

/// Same as [`fp_rate_max`] restricted to the listed IDs (the others stay off).
pub fn fp_rate_max_on(
    mats: &CorrelationMatrices,
    sc: &Scenario,
    opts: &SolverOptions,
    ids: &[usize],
) -> Result<FpOutcome> {
    check_dimensions(mats, sc)?;
    opts.validate()?;
    if let Some(&m) = ids.iter().find(|&&m| m >= mats.n_id()) {
        return Err(invalid("fp_rate_max", format!("ID index {m} out of range")));
    }
    let n_slots = mats.n_slots();
    if ids.is_empty() {
        return Ok(FpOutcome {
            r_star: 0.0,
            allocation: PowerAllocation::zeros(n_slots),
            gamma: vec![],
            sinr: vec![],
            trace: vec![0.0],
            iterations: 0,
            status: Status::Optimal,
        });
    }
    let lm = mats.lambda_masked();
    let prob = Problem {
        snr: ids.iter().map(|&m| mats.id_gain()[m] * sc.max_power / sc.id[m].noise_power).collect(),
        cross: ids.iter().map(|&a| ids.iter().map(|&b| lm[(mats.id_slot(a), mats.id_slot(b))]).collect()).collect(),
    };
    let n = ids.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut rate = prob.rate(&x);
    let mut trace = vec![rate];
    let mut gamma = prob.sinr(&x);
    let mut status = Status::IterLimit;
    let mut iterations = 0;
    for it in 1..=opts.fp_max_iters {
        iterations = it;
        let nu: Vec<f64> = (0..n).map(|a| (prob.snr[a] * x[a]).sqrt() / prob.interference(&x, a)).collect();
        let next = surrogate_max(&prob, &nu, x.clone());
        let next_rate = prob.rate(&next);
        // The surrogate is tight at the old point, so the rate cannot drop beyond round-off.
        let (x_new, r_new) = if next_rate + 1e-13 * rate.abs() >= rate { (next, next_rate) } else { (x.clone(), rate) };
        let g_new = prob.sinr(&x_new);
        let shift = g_new.iter().zip(&gamma).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
        x = x_new;
        rate = r_new;
        trace.push(rate);
        if shift < opts.fp_tolerance {
            status = Status::Optimal;
            break;
        }
        gamma = g_new;
    }
    let sinr = prob.sinr(&x);
    let mut powers = vec![0.0; n_slots];
    for (a, &m) in ids.iter().enumerate() {
        powers[mats.id_slot(m)] = x[a] * sc.max_power;
    }
    Ok(FpOutcome {
        r_star: rate,
        allocation: PowerAllocation::from_clamped(powers),
        gamma,
        sinr,
        trace,
        iterations,
        status,
    })
}

// D_b(x) = 1 + 2ν_b√(snr_b x_b) − ν_b² (snr_b (Λ̄x)_b + 1)
fn surrogate_terms(p: &Problem, nu: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|b| 1.0 + 2.0 * nu[b] * (p.snr[b] * x[b]).sqrt() - nu[b] * nu[b] * p.interference(x, b)).collect()
}

// Maximises the surrogate minus μΣx over x >= 0, in place.
fn coordinate_ascent(p: &Problem, nu: &[f64], mu: f64, x: &mut [f64]) {
    let n = x.len();
    for _ in 0..MAX_SWEEPS {
        let mut change: f64 = 0.0;
        for a in 0..n {
            let old = x[a];
            x[a] = coordinate_max(p, nu, mu, x, a);
            change = change.max((x[a] - old).abs());
        }
        let scale = x.iter().copied().fold(0.0, f64::max).max(1e-300);
        if change <= 1e-15 * scale {
            break;
        }
    }
}

fn coordinate_max(p: &Problem, nu: &[f64], mu: f64, x: &mut [f64], a: usize) -> f64 {
    x[a] = 0.0;
    let d = surrogate_terms(p, nu, x);
    // Leakage weights of x_a into every other term, which only shrink D_b.
    let pull: Vec<f64> = (0..x.len()).map(|b| nu[b] * nu[b] * p.snr[b] * p.cross[b][a]).collect();
    let mut hi = X_MAX;
    for b in 0..x.len() {
        if b != a && pull[b] > 0.0 {
            hi = hi.min(d[b] / pull[b]);
        }
    }
    let lead = nu[a] * p.snr[a].sqrt();
    if lead <= 0.0 || hi <= 0.0 {
        return 0.0;
    }
    // D_a at x_a = 0; the √x_a term lifts it above zero from `lo` on.
    let base = d[a];
    let lo = if base > 0.0 { 0.0 } else { ((-base) / (2.0 * lead)).powi(2) };
    let slope = |v: f64| {
        let da = base + 2.0 * lead * v.sqrt();
        let mut s = lead / (v.sqrt() * da) - mu;
        for b in 0..x.len() {
            if b != a && pull[b] > 0.0 {
                s -= pull[b] / (d[b] - pull[b] * v);
            }
        }
        s
    };
    if hi <= lo {
        return lo;
    }
    if hi == X_MAX && slope(hi) >= 0.0 {
        return hi;
    }
    let (mut l, mut h) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (l + h);
        if mid <= l || mid >= h {
            break;
        }
        if slope(mid) > 0.0 {
            l = mid;
        } else {
            h = mid;
        }
    }
    0.5 * (l + h)
}

// Bisection on the budget multiplier; returns a point with Σx <= 1.
fn surrogate_max(p: &Problem, nu: &[f64], start: Vec<f64>) -> Vec<f64> {
    let mut x = start;
    coordinate_ascent(p, nu, 0.0, &mut x);
    if x.iter().sum::<f64>() <= 1.0 {
        return x;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut x_hi = x.clone();
    loop {
        coordinate_ascent(p, nu, hi, &mut x_hi);
        if x_hi.iter().sum::<f64>() <= 1.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    let mut x_mid = x_hi.clone();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        coordinate_ascent(p, nu, mid, &mut x_mid);
        if x_mid.iter().sum::<f64>() <= 1.0 {
            hi = mid;
            x_hi.copy_from_slice(&x_mid);
        } else {
            lo = mid;
        }
    }
    x_hi
}
