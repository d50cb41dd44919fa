//! Rates, harvested powers and the logistic EH transform for a given power vector.

use std::f64::consts::LN_2;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrices;
use crate::error::{invalid, Result};

/// Relative threshold (of `P₀`) above which a slot counts as scheduled.
pub const SCHEDULING_THRESHOLD: f64 = 1e-6;

/// Per-slot transmit powers `[P̃^EH_1 .. P̃^EH_K, P̃^ID_1 .. P̃^ID_M]` in watts.
///
/// A slot is scheduled exactly when its power is positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PowerAllocation(Vec<f64>);

impl PowerAllocation {
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(invalid("power allocation", format!("entries must be finite and >= 0, got {p}")));
        }
        Ok(Self(powers))
    }

    /// Clamps tiny negative round-off to zero.
    pub fn from_clamped(powers: Vec<f64>) -> Self {
        Self(powers.into_iter().map(|p| if p > 0.0 { p } else { 0.0 }).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn powers(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// Scheduling indicators recovered from the support.
    pub fn schedule(&self, budget: f64) -> Vec<bool> {
        self.0.iter().map(|&p| p > SCHEDULING_THRESHOLD * budget).collect()
    }
}

/// Signal power `g_m y_{K+m}` and interference-plus-noise of ID `m`.
pub fn id_signal_and_interference(
    mats: &CorrelationMatrices,
    noise: &[f64],
    y: &PowerAllocation,
    m: usize,
) -> (f64, f64) {
    let slot = mats.id_slot(m);
    let g = mats.id_gain()[m];
    let lm = mats.lambda_masked();
    let leak: f64 = y.powers().iter().enumerate().map(|(j, p)| lm[(slot, j)] * p).sum();
    (g * y.powers()[slot], g * leak + noise[m])
}

pub fn id_sinr(mats: &CorrelationMatrices, noise: &[f64], y: &PowerAllocation, m: usize) -> f64 {
    let (s, i) = id_signal_and_interference(mats, noise, y, m);
    s / i
}

/// Achievable rate of ID `m` in bps/Hz.
pub fn id_rate(mats: &CorrelationMatrices, noise: &[f64], y: &PowerAllocation, m: usize) -> f64 {
    id_sinr(mats, noise, y, m).ln_1p() / LN_2
}

pub fn sum_rate(mats: &CorrelationMatrices, noise: &[f64], y: &PowerAllocation) -> f64 {
    (0..mats.n_id()).map(|m| id_sinr(mats, noise, y, m).ln_1p()).sum::<f64>() / LN_2
}

/// RF power harvested by EH receiver `k` (own beam plus leakage from every other beam).
pub fn eh_power(mats: &CorrelationMatrices, y: &PowerAllocation, k: usize) -> f64 {
    let lm = mats.lambda_masked();
    let rx: f64 = y.powers().iter().enumerate().map(|(j, p)| lm[(k, j)] * p).sum();
    mats.eh_efficiency() * mats.eh_gain()[k] * rx
}

/// Weighted harvested sum-power, `(c^EH)ᵀ Λ̄ y`.
pub fn weighted_sum_power(mats: &CorrelationMatrices, y: &PowerAllocation) -> f64 {
    mats.c_eh().dot(&(mats.lambda_masked() * y.as_vector()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub per_id_rate: Vec<f64>,
    pub sum_rate: f64,
    pub per_eh_power: Vec<f64>,
    pub weighted_sum_power: f64,
    pub total_tx_power: f64,
    /// Present when the scenario configures a nonlinear EH circuit.
    pub per_eh_dc_power: Option<Vec<f64>>,
}

pub fn evaluate(
    mats: &CorrelationMatrices,
    noise: &[f64],
    y: &PowerAllocation,
    nonlinear: Option<&NonlinearEhParams>,
) -> MetricsReport {
    let per_id_rate: Vec<f64> = (0..mats.n_id()).map(|m| id_rate(mats, noise, y, m)).collect();
    let per_eh_power: Vec<f64> = (0..mats.n_eh()).map(|k| eh_power(mats, y, k)).collect();
    let weighted = per_eh_power.iter().zip(mats.eh_weight()).map(|(q, a)| q * a).sum();
    MetricsReport {
        sum_rate: per_id_rate.iter().sum(),
        per_eh_dc_power: nonlinear.map(|p| per_eh_power.iter().map(|&q| nonlinear_eh(q, p)).collect()),
        per_id_rate,
        per_eh_power,
        weighted_sum_power: weighted,
        total_tx_power: y.total(),
    }
}

/// Logistic EH circuit parameters: saturation `κ` (W), turn-on `ϖ` (W), steepness `ϱ` (1/W).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearEhParams {
    pub kappa: f64,
    pub varpi: f64,
    pub varrho: f64,
}

impl NonlinearEhParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(invalid("nonlinear EH", "kappa must be positive"));
        }
        if !(self.varrho.is_finite() && self.varrho > 0.0) {
            return Err(invalid("nonlinear EH", "varrho must be positive"));
        }
        if !self.varpi.is_finite() {
            return Err(invalid("nonlinear EH", "varpi must be finite"));
        }
        Ok(())
    }
}

/// DC output of the logistic EH model for RF input `q_rf`, shifted so that zero input gives zero output.
pub fn nonlinear_eh(q_rf: f64, p: &NonlinearEhParams) -> f64 {
    let logistic = |z: f64| 1.0 / (1.0 + (-z).exp());
    // Same expression at q_rf = 0 on both sides, so Φ(0) is exactly zero.
    let omega = logistic(p.varrho * -p.varpi);
    let psi = p.kappa * logistic(p.varrho * (q_rf - p.varpi));
    (psi - p.kappa * omega) / (1.0 - omega)
}
