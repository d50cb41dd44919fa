//! Scheduling and power-allocation solvers.

pub mod barrier;
mod closed_form;
pub(crate) mod exhaustive;
mod fp;
mod sca;

use serde::Serialize;

pub use barrier::BarrierSettings;
pub use closed_form::{closed_form_eh_only, closed_form_mixed, closed_form_single_id};
pub use exhaustive::{exhaustive_search, MAX_EXHAUSTIVE_SLOTS};
pub use fp::{feasibility_check, fp_rate_max, fp_rate_max_on, Feasibility, FpOutcome};
pub use sca::{sca_solve, sca_solve_on, SlackVars};

use crate::correlation::CorrelationMatrices;
use crate::error::{invalid, Result};
use crate::metrics::{sum_rate, weighted_sum_power, PowerAllocation};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Outer-loop stop on fractional objective increase `ξ`.
    pub convergence_threshold: f64,
    pub max_outer_iters: usize,
    pub barrier: BarrierSettings,
    /// Slack allowed on the rate and budget constraints.
    pub feasibility_tolerance: f64,
    /// Relative stop on the SINR fixed point of the quadratic transform.
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            convergence_threshold: 1e-3,
            max_outer_iters: 50,
            barrier: BarrierSettings::default(),
            feasibility_tolerance: 1e-7,
            fp_tolerance: 1e-11,
            fp_max_iters: 2000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let b = &self.barrier;
        let positive = [
            self.convergence_threshold,
            self.feasibility_tolerance,
            self.fp_tolerance,
            b.initial_t,
            b.newton_tolerance,
            b.gap_tolerance,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("solver options", "thresholds and tolerances must be positive"));
        }
        if b.t_multiplier.is_nan() || b.t_multiplier <= 1.0 {
            return Err(invalid("solver options", "barrier multiplier must exceed 1"));
        }
        if self.max_outer_iters == 0 || self.fp_max_iters == 0 || b.max_newton_steps == 0 {
            return Err(invalid("solver options", "iteration limits must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    Infeasible,
    IterLimit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "Optimal",
            Status::Infeasible => "Infeasible",
            Status::IterLimit => "IterLimit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// Achieved sum-rate minus the floor.
    pub rate_slack: f64,
    /// Budget minus total transmit power.
    pub power_slack: f64,
    /// Norm of the KKT violation; closed forms only.
    pub kkt_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub scheme: String,
    pub status: Status,
    pub allocation: PowerAllocation,
    /// Weighted harvested sum-power in watts.
    pub objective: f64,
    pub sum_rate: f64,
    /// Objective after each outer iteration, starting with the initial point.
    pub trace: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: usize,
    pub newton_steps: usize,
    /// Approximate floating-point operations spent in Newton systems.
    pub flops: u64,
    /// Schedules enumerated (exhaustive and OS-EPA), otherwise 1.
    pub subproblems: usize,
}

impl SolveReport {
    pub(crate) fn new(
        scheme: &str,
        status: Status,
        mats: &CorrelationMatrices,
        sc: &Scenario,
        y: PowerAllocation,
    ) -> Self {
        let noise = sc.noise_powers();
        let rate = if mats.n_id() == 0 { 0.0 } else { sum_rate(mats, &noise, &y) };
        let objective = weighted_sum_power(mats, &y);
        Self {
            scheme: scheme.to_string(),
            status,
            residuals: Residuals {
                rate_slack: rate - sc.rate_floor,
                power_slack: sc.max_power - y.total(),
                kkt_norm: None,
            },
            allocation: y,
            objective,
            sum_rate: rate,
            trace: vec![objective],
            iterations: 0,
            newton_steps: 0,
            flops: 0,
            subproblems: 1,
        }
    }

    pub(crate) fn infeasible(scheme: &str, mats: &CorrelationMatrices, sc: &Scenario) -> Self {
        let mut r = Self::new(scheme, Status::Infeasible, mats, sc, PowerAllocation::zeros(mats.n_slots()));
        r.trace.clear();
        r
    }

    /// Slots carrying more than the scheduling threshold of the budget.
    pub fn schedule(&self, budget: f64) -> Vec<bool> {
        self.allocation.schedule(budget)
    }

    /// True when the rate and budget constraints hold within `tol` (relative on the budget).
    pub fn constraints_hold(&self, budget: f64, tol: f64) -> bool {
        self.residuals.rate_slack >= -tol && self.residuals.power_slack >= -tol * budget
    }
}

pub(crate) fn check_dimensions(mats: &CorrelationMatrices, sc: &Scenario) -> Result<()> {
    if mats.n_eh() != sc.n_eh() || mats.n_id() != sc.n_id() {
        return Err(invalid("solver input", "matrices and scenario disagree on receiver counts"));
    }
    sc.validate()
}

/// Support mask covering every slot.
pub fn full_support(n: usize) -> Vec<bool> {
    vec![true; n]
}
