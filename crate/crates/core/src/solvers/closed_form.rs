//! Closed-form allocations for the EH-only and single-ID special cases, with KKT residuals.

use crate::correlation::{argmax, eh_priority, CorrelationMatrices};
use crate::error::{invalid, Result};
use crate::metrics::PowerAllocation;
use crate::scenario::Scenario;

use super::{check_dimensions, SolveReport, Status};

/// Whole budget on the slot with the largest EH priority.
///
/// Applies when there are no ID receivers, or when the rate floor is zero
/// and the ID slots are left unscheduled.
pub fn closed_form_eh_only(mats: &CorrelationMatrices, sc: &Scenario) -> Result<SolveReport> {
    check_dimensions(mats, sc)?;
    if mats.n_eh() == 0 {
        return Err(invalid("closed_form_eh_only", "needs at least one EH receiver"));
    }
    if mats.n_id() > 0 && sc.rate_floor > 0.0 {
        return Err(invalid("closed_form_eh_only", "only valid without a rate floor"));
    }
    let pr = eh_priority(mats);
    let best = argmax(&pr.values, 0..mats.n_eh());
    let mut y = vec![0.0; mats.n_slots()];
    y[best] = sc.max_power;
    let mut rep =
        SolveReport::new("closed_form_eh_only", Status::Optimal, mats, sc, PowerAllocation::from_clamped(y.clone()));
    // Budget multiplier τ = ρ_best, bound multipliers μ_j = τ − ρ_j.
    let tau = pr.values[best];
    let mut kkt = 0.0;
    for (rho, yj) in pr.values.iter().zip(&y).take(mats.n_eh()) {
        let mu = tau - rho;
        kkt += mu.min(0.0).powi(2) + (mu * yj / sc.max_power).powi(2);
    }
    kkt += (tau * (y.iter().sum::<f64>() / sc.max_power - 1.0)).powi(2);
    rep.residuals.kkt_norm = Some(kkt.sqrt() / priority_scale(&pr.values));
    Ok(rep)
}

/// Optimal allocation with a single ID receiver.
pub fn closed_form_mixed(mats: &CorrelationMatrices, sc: &Scenario) -> Result<SolveReport> {
    check_dimensions(mats, sc)?;
    if mats.n_id() != 1 {
        return Err(invalid("closed_form_mixed", format!("needs exactly one ID receiver, got {}", mats.n_id())));
    }
    closed_form_single_id(mats, sc, &(0..mats.n_eh()).collect::<Vec<_>>(), 0)
}

/// Single-ID closed form over the EH candidates `eh` and ID `id`; all other slots stay off.
///
/// The scheduled EH slot maximises `(ρ_k − ρ_ID) / (1 + aΛ̄_{k,ID})` with
/// `a = 2^R − 1`, the marginal gain of the two-slot vertex where the rate
/// floor and the budget are both tight. When no EH slot beats `ρ_ID` the whole
/// budget goes to the ID.
pub fn closed_form_single_id(
    mats: &CorrelationMatrices,
    sc: &Scenario,
    eh: &[usize],
    id: usize,
) -> Result<SolveReport> {
    check_dimensions(mats, sc)?;
    if id >= mats.n_id() || eh.iter().any(|&k| k >= mats.n_eh()) {
        return Err(invalid("closed_form_single_id", "receiver index out of range"));
    }
    let p0 = sc.max_power;
    let slot = mats.id_slot(id);
    let g = mats.id_gain()[id];
    let noise = sc.id[id].noise_power;
    let a = sc.rate_floor.exp2() - 1.0;
    let need = a * noise / g;
    if need > p0 {
        return Ok(SolveReport::infeasible("closed_form_mixed", mats, sc));
    }
    let lm = mats.lambda_masked();
    let pr = eh_priority(mats).values;
    let rho_id = pr[slot];
    let value = |k: usize| (pr[k] - rho_id) / (1.0 + a * lm[(k, slot)]);
    let mut y = vec![0.0; mats.n_slots()];
    let chosen = eh.iter().copied().filter(|&k| value(k) > 0.0).fold(None, |b: Option<usize>, k| match b {
        Some(b) if value(k) <= value(b) => Some(b),
        _ => Some(k),
    });
    // Dual variables of the rate floor (ν) and budget (τ).
    let (nu, tau) = match chosen {
        Some(k) => {
            let l = lm[(k, slot)];
            y[k] = (p0 - need) / (a * l + 1.0);
            y[slot] = p0 - y[k];
            let nu = (pr[k] - rho_id) / (g * (1.0 + a * l));
            (nu, rho_id + nu * g)
        }
        None => {
            y[slot] = p0;
            (0.0, rho_id)
        }
    };
    let mut rep =
        SolveReport::new("closed_form_mixed", Status::Optimal, mats, sc, PowerAllocation::from_clamped(y.clone()));
    let candidates: Vec<usize> = eh.iter().copied().chain(std::iter::once(slot)).collect();
    let mut kkt = nu.min(0.0).powi(2) + tau.min(0.0).powi(2);
    for &j in &candidates {
        // Rate-row gradient: a g Λ̄_{ID,j} − g [j = ID].
        let rate_grad = a * g * lm[(slot, j)] - if j == slot { g } else { 0.0 };
        let mu = -pr[j] + tau + nu * rate_grad;
        kkt += mu.min(0.0).powi(2) + (mu * y[j] / p0).powi(2);
    }
    let rate_row = a * (g * candidates.iter().map(|&j| lm[(slot, j)] * y[j]).sum::<f64>() + noise) - g * y[slot];
    kkt += (nu * rate_row).powi(2);
    rep.residuals.kkt_norm = Some(kkt.sqrt() / priority_scale(&pr));
    Ok(rep)
}

// KKT residuals are reported relative to the largest priority.
fn priority_scale(pr: &[f64]) -> f64 {
    let m = pr.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}
