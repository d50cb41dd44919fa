//! Successive convex approximation of the scheduling problem.
//!
//! Variables are normalised as `x = y / P₀`, `s_m = S_m σ²_m` and `i_m = I_m / σ²_m`,
//! so each ID contributes `1/s_m <= snr_m x_m` and `i_m >= snr_m (Λ̄x)_m + 1`,
//! and its rate is bounded below by the first-order expansion of
//! `log₂(1 + 1/(s_m i_m))` around the previous iterate.

use std::f64::consts::LOG2_E;

use log::{debug, warn};
use nalgebra::DVector;

use crate::correlation::CorrelationMatrices;
use crate::error::{invalid, Result};
use crate::metrics::{weighted_sum_power, PowerAllocation};
use crate::scenario::Scenario;

use super::barrier::{into_result, ConvexProgram, Inequality};
use super::fp::{fp_rate_max_on, FpOutcome};
use super::{check_dimensions, full_support, SolveReport, SolverOptions, Status};

/// Inverse-signal and interference-plus-noise slacks, in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackVars {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
}

/// SCA over every slot.
pub fn sca_solve(mats: &CorrelationMatrices, sc: &Scenario, opts: &SolverOptions) -> Result<SolveReport> {
    if mats.n_id() == 0 {
        return Err(invalid("sca_solve", "needs at least one ID receiver"));
    }
    sca_solve_on(mats, sc, opts, &full_support(mats.n_slots()))
}

/// SCA with the slots outside `support` pinned to zero power.
pub fn sca_solve_on(
    mats: &CorrelationMatrices,
    sc: &Scenario,
    opts: &SolverOptions,
    support: &[bool],
) -> Result<SolveReport> {
    check_dimensions(mats, sc)?;
    opts.validate()?;
    if support.len() != mats.n_slots() {
        return Err(invalid("support", format!("expected {} entries", mats.n_slots())));
    }
    let ids = active_ids(mats, support);
    let start = fp_rate_max_on(mats, sc, opts, &ids)?;
    sca_from(mats, sc, opts, support, &start)
}

pub(crate) fn active_ids(mats: &CorrelationMatrices, support: &[bool]) -> Vec<usize> {
    (0..mats.n_id()).filter(|&m| support[mats.id_slot(m)]).collect()
}

struct Layout {
    free: Vec<usize>,
    ids: Vec<usize>,
    snr: Vec<f64>,
}

impl Layout {
    fn n(&self) -> usize {
        self.free.len() + 2 * self.ids.len()
    }

    fn s_var(&self, a: usize) -> usize {
        self.free.len() + a
    }

    fn i_var(&self, a: usize) -> usize {
        self.free.len() + self.ids.len() + a
    }

    // Tight slack values at normalised powers `x` (full slot length).
    fn tight(&self, mats: &CorrelationMatrices, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let lm = mats.lambda_masked();
        let mut s = Vec::with_capacity(self.ids.len());
        let mut i = Vec::with_capacity(self.ids.len());
        for (a, &m) in self.ids.iter().enumerate() {
            let slot = mats.id_slot(m);
            let leak: f64 = self.free.iter().map(|&j| lm[(slot, j)] * x[j]).sum();
            s.push(1.0 / (self.snr[a] * x[slot]));
            i.push(self.snr[a] * leak + 1.0);
        }
        (s, i)
    }
}

/// Runs the outer loop from a precomputed rate-maximising start on the active IDs.
pub(crate) fn sca_from(
    mats: &CorrelationMatrices,
    sc: &Scenario,
    opts: &SolverOptions,
    support: &[bool],
    start: &FpOutcome,
) -> Result<SolveReport> {
    let n_slots = mats.n_slots();
    let p0 = sc.max_power;
    let rate_floor = sc.rate_floor;
    let rate_active = rate_floor > 0.0;
    // Without a rate floor the slacks are unbounded and play no role.
    let ids = if rate_active { active_ids(mats, support) } else { vec![] };
    if rate_active && start.r_star < rate_floor - opts.feasibility_tolerance {
        debug!("support {support:?}: best rate {:.6} below floor {rate_floor}", start.r_star);
        return Ok(SolveReport::infeasible("proposed", mats, sc));
    }
    let layout = Layout {
        free: (0..n_slots).filter(|&j| support[j]).collect(),
        snr: ids.iter().map(|&m| mats.id_gain()[m] * p0 / sc.id[m].noise_power).collect(),
        ids,
    };
    if layout.free.is_empty() {
        return Ok(SolveReport::new("proposed", Status::Optimal, mats, sc, PowerAllocation::zeros(n_slots)));
    }
    let priority: Vec<f64> = (mats.lambda_masked().transpose() * mats.c_eh()).iter().copied().collect();
    let scale = layout.free.iter().map(|&j| priority[j]).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut cost = DVector::zeros(layout.n());
    for (v, &j) in layout.free.iter().enumerate() {
        cost[v] = -priority[j] / scale;
    }

    let mut x_full: Vec<f64> = if rate_active {
        start.allocation.powers().iter().map(|p| p / p0).collect()
    } else {
        // Without a rate floor any interior point will do.
        let share = 1.0 / (layout.free.len() as f64 + 1.0);
        (0..n_slots).map(|j| if support[j] { share } else { 0.0 }).collect()
    };
    let mut report = SolveReport::new("proposed", Status::IterLimit, mats, sc, to_allocation(&x_full, p0));
    let mut best = report.objective;
    let mut newton_steps = 0;
    let mut flops = 0;
    let mut iterations = 0;
    for it in 1..=opts.max_outer_iters {
        iterations = it;
        let (s_hat, i_hat) = layout.tight(mats, &x_full);
        let mut constraints = Vec::with_capacity(2 + layout.free.len() + 3 * layout.ids.len());
        constraints.push(Inequality::affine(layout.free.iter().enumerate().map(|(v, _)| (v, 1.0)).collect(), 1.0));
        for v in 0..layout.free.len() {
            constraints.push(Inequality::affine(vec![(v, -1.0)], 0.0));
        }
        let lm = mats.lambda_masked();
        let mut rate_terms = Vec::new();
        let mut rate_rhs = -rate_floor;
        for (a, &m) in layout.ids.iter().enumerate() {
            let slot = mats.id_slot(m);
            let own = layout.free.iter().position(|&j| j == slot).expect("active ID is in the support");
            constraints.push(Inequality::with_reciprocal(vec![(own, -layout.snr[a])], 0.0, layout.s_var(a), 1.0));
            let mut terms: Vec<(usize, f64)> = layout
                .free
                .iter()
                .enumerate()
                .filter(|(_, &j)| lm[(slot, j)] > 0.0)
                .map(|(v, &j)| (v, layout.snr[a] * lm[(slot, j)]))
                .collect();
            terms.push((layout.i_var(a), -1.0));
            constraints.push(Inequality::affine(terms, -1.0));
            constraints.push(Inequality::positive(layout.s_var(a)));
            if rate_active {
                let (s0, i0) = (s_hat[a], i_hat[a]);
                let cs = LOG2_E / (s0 + s0 * s0 * i0);
                let ci = LOG2_E / (i0 + i0 * i0 * s0);
                let value = (1.0 / (s0 * i0)).ln_1p() * LOG2_E;
                rate_terms.push((layout.s_var(a), cs));
                rate_terms.push((layout.i_var(a), ci));
                rate_rhs += value + cs * s0 + ci * i0;
            }
        }
        if rate_active {
            constraints.push(Inequality::affine(rate_terms, rate_rhs));
        }
        let prog = ConvexProgram { n: layout.n(), cost: cost.clone(), constraints };
        let mut z = DVector::zeros(layout.n());
        for (v, &j) in layout.free.iter().enumerate() {
            z[v] = x_full[j];
        }
        for a in 0..layout.ids.len() {
            z[layout.s_var(a)] = s_hat[a] * (1.0 + 1e-9);
            z[layout.i_var(a)] = i_hat[a] * (1.0 + 1e-9) + 1e-12;
        }
        let outcome = match into_result(prog.solve(z, &opts.barrier))? {
            Some(o) => o,
            None => {
                warn!("outer iteration {it}: convexified problem has no strictly feasible point; keeping best iterate");
                break;
            }
        };
        newton_steps += outcome.newton_steps;
        flops += outcome.flops;
        let mut cand = vec![0.0; n_slots];
        for (v, &j) in layout.free.iter().enumerate() {
            cand[j] = outcome.x[v].max(0.0);
        }
        let total: f64 = cand.iter().sum();
        if total > 1.0 {
            cand.iter_mut().for_each(|c| *c /= total);
        }
        let y = to_allocation(&cand, p0);
        let objective = weighted_sum_power(mats, &y);
        if objective < best - 1e-12 * best.abs() {
            debug!("outer iteration {it}: objective dropped from {best} to {objective}; stopping");
            report.status = Status::Optimal;
            break;
        }
        let gain = (objective - best) / best.abs().max(f64::MIN_POSITIVE);
        x_full = cand;
        best = objective;
        report.trace.push(objective);
        if !rate_active || gain < opts.convergence_threshold {
            report.status = Status::Optimal;
            break;
        }
    }
    let status = report.status;
    let trace = std::mem::take(&mut report.trace);
    let mut out = SolveReport::new("proposed", status, mats, sc, to_allocation(&x_full, p0));
    out.trace = trace;
    out.iterations = iterations;
    out.newton_steps = newton_steps;
    out.flops = flops;
    if out.status == Status::Optimal && !out.constraints_hold(p0, 1e-5) {
        warn!("final iterate misses the constraints: {:?}", out.residuals);
    }
    Ok(out)
}

fn to_allocation(x: &[f64], p0: f64) -> PowerAllocation {
    PowerAllocation::from_clamped(x.iter().map(|v| v * p0).collect())
}
