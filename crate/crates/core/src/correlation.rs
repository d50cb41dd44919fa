//! Steering-vector correlations and the matrices that turn the scheduling
//! problem into a linear objective over the per-slot power vector.
//!
//! Slots are ordered `[EH_1 .. EH_K, ID_1 .. ID_M]` everywhere.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fresnel::fresnel;
use crate::geometry::{channel_gain, near_steering, ArrayConfig, PhaseModel, PolarLocation, SteeringVector};
use crate::scenario::Scenario;

/// `|b(p)ᴴ b(q)|` by direct summation over the array.
pub fn correlation_exact(cfg: &ArrayConfig, p: &PolarLocation, q: &PolarLocation) -> f64 {
    let bp = near_steering(cfg, p, PhaseModel::Exact);
    let bq = near_steering(cfg, q, PhaseModel::Exact);
    bp.inner(&bq).norm().min(1.0)
}

/// Fresnel-integral approximation of the correlation between two locations.
///
/// Returns [`Error::DegenerateApproximation`] when both locations share the
/// same `(1-θ²)/r`, in which case only the exact summation is meaningful.
pub fn correlation_approx(cfg: &ArrayConfig, p: &PolarLocation, q: &PolarLocation) -> Result<f64> {
    let curvature = |l: &PolarLocation| {
        if l.is_far() {
            0.0
        } else {
            (1.0 - l.spatial_angle * l.spatial_angle) / l.distance
        }
    };
    let spread = (cfg.spacing() * (curvature(p) - curvature(q)).abs()).sqrt();
    if spread == 0.0 || !spread.is_finite() {
        return Err(Error::DegenerateApproximation);
    }
    let beta1 = (q.spatial_angle - p.spatial_angle) / spread;
    let beta2 = cfg.n_antennas() as f64 / 2.0 * spread;
    let hi = fresnel(beta1 + beta2)?;
    let lo = fresnel(beta1 - beta2)?;
    let (dc, ds) = (hi.c - lo.c, hi.s - lo.s);
    Ok((dc * dc + ds * ds).sqrt() / (2.0 * beta2))
}

/// Squared-correlation matrices and gain vectors of one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrices {
    n_eh: usize,
    n_id: usize,
    lambda_full: DMatrix<f64>,
    lambda_masked: DMatrix<f64>,
    c_eh: DVector<f64>,
    eh_gain: Vec<f64>,
    eh_weight: Vec<f64>,
    eh_efficiency: f64,
    id_gain: Vec<f64>,
}

impl CorrelationMatrices {
    /// Assembles matrices from an explicit squared-correlation matrix.
    ///
    /// `lambda_full` must be symmetric with unit diagonal and entries in `[0, 1]`.
    pub fn from_parts(
        lambda_full: DMatrix<f64>,
        eh_gain: Vec<f64>,
        eh_weight: Vec<f64>,
        eh_efficiency: f64,
        id_gain: Vec<f64>,
    ) -> Result<Self> {
        let n_eh = eh_gain.len();
        let n_id = id_gain.len();
        let n = n_eh + n_id;
        if n == 0 {
            return Err(invalid("correlation matrices", "need at least one slot"));
        }
        if lambda_full.nrows() != n || lambda_full.ncols() != n {
            return Err(invalid("correlation matrices", format!("expected {n}x{n} matrix")));
        }
        if eh_weight.len() != n_eh {
            return Err(invalid("correlation matrices", "one weight per EH receiver"));
        }
        for p in 0..n {
            if (lambda_full[(p, p)] - 1.0).abs() > 1e-12 {
                return Err(invalid("correlation matrices", "diagonal must be 1"));
            }
            for q in 0..n {
                let v = lambda_full[(p, q)];
                if !(-1e-12..=1.0 + 1e-12).contains(&v) || (v - lambda_full[(q, p)]).abs() > 1e-12 {
                    return Err(invalid(
                        "correlation matrices",
                        format!("entry ({p},{q}) = {v} breaks symmetry or range"),
                    ));
                }
            }
        }
        if eh_gain.iter().chain(&id_gain).any(|g| !(g.is_finite() && *g > 0.0))
            || eh_weight.iter().any(|w| !(w.is_finite() && *w >= 0.0))
        {
            return Err(invalid("correlation matrices", "gains must be positive and weights non-negative"));
        }
        let mut lambda_masked = lambda_full.clone();
        for m in 0..n_id {
            lambda_masked[(n_eh + m, n_eh + m)] = 0.0;
        }
        let mut c_eh = DVector::zeros(n);
        for k in 0..n_eh {
            c_eh[k] = eh_weight[k] * eh_efficiency * eh_gain[k];
        }
        Ok(Self { n_eh, n_id, lambda_full, lambda_masked, c_eh, eh_gain, eh_weight, eh_efficiency, id_gain })
    }

    pub fn n_eh(&self) -> usize {
        self.n_eh
    }

    pub fn n_id(&self) -> usize {
        self.n_id
    }

    pub fn n_slots(&self) -> usize {
        self.n_eh + self.n_id
    }

    pub fn lambda_full(&self) -> &DMatrix<f64> {
        &self.lambda_full
    }

    /// Λ̄: Λ with the ID diagonal zeroed.
    pub fn lambda_masked(&self) -> &DMatrix<f64> {
        &self.lambda_masked
    }

    /// `α_k ζ g_k` in the EH slots, zero in the ID slots.
    pub fn c_eh(&self) -> &DVector<f64> {
        &self.c_eh
    }

    pub fn c_id(&self, m: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.n_slots());
        v[self.n_eh + m] = self.id_gain[m];
        v
    }

    pub fn eh_gain(&self) -> &[f64] {
        &self.eh_gain
    }

    pub fn eh_weight(&self) -> &[f64] {
        &self.eh_weight
    }

    pub fn eh_efficiency(&self) -> f64 {
        self.eh_efficiency
    }

    pub fn id_gain(&self) -> &[f64] {
        &self.id_gain
    }

    pub fn id_slot(&self, m: usize) -> usize {
        self.n_eh + m
    }

    /// Copy restricted to the given EH and ID indices, in that order.
    pub fn restrict(&self, eh: &[usize], id: &[usize]) -> Result<Self> {
        let slots: Vec<usize> = eh.iter().copied().chain(id.iter().map(|&m| self.n_eh + m)).collect();
        let n = slots.len();
        let lambda = DMatrix::from_fn(n, n, |i, j| self.lambda_full[(slots[i], slots[j])]);
        Self::from_parts(
            lambda,
            eh.iter().map(|&k| self.eh_gain[k]).collect(),
            eh.iter().map(|&k| self.eh_weight[k]).collect(),
            self.eh_efficiency,
            id.iter().map(|&m| self.id_gain[m]).collect(),
        )
    }
}

/// Steering vectors of every slot; EH slots use spherical wavefronts, ID slots planar.
pub fn slot_steering(cfg: &ArrayConfig, scenario: &Scenario) -> Result<Vec<SteeringVector>> {
    let mut out = Vec::with_capacity(scenario.n_slots());
    for r in &scenario.eh {
        out.push(near_steering(cfg, &r.location, PhaseModel::Exact));
    }
    for r in &scenario.id {
        out.push(near_steering(cfg, &PolarLocation::far(r.spatial_angle)?, PhaseModel::Exact));
    }
    Ok(out)
}

/// Builds Λ, Λ̄ and the gain vectors from exact steering-vector correlations.
pub fn build_matrices(cfg: &ArrayConfig, scenario: &Scenario) -> Result<CorrelationMatrices> {
    scenario.validate()?;
    let steering = slot_steering(cfg, scenario)?;
    let n = steering.len();
    let mut lambda = DMatrix::identity(n, n);
    for p in 0..n {
        for q in (p + 1)..n {
            let eta = steering[p].inner(&steering[q]).norm().min(1.0);
            lambda[(p, q)] = eta * eta;
            lambda[(q, p)] = eta * eta;
        }
    }
    let eh_gain = scenario
        .eh
        .iter()
        .map(|r| channel_gain(cfg, r.location.distance).map(|g| g.value()))
        .collect::<Result<Vec<_>>>()?;
    let id_gain =
        scenario.id.iter().map(|r| channel_gain(cfg, r.distance).map(|g| g.value())).collect::<Result<Vec<_>>>()?;
    CorrelationMatrices::from_parts(
        lambda,
        eh_gain,
        scenario.eh.iter().map(|r| r.weight).collect(),
        scenario.eh_efficiency,
        id_gain,
    )
}

/// Marginal weighted harvested power per watt in each slot, `[(c^EH)ᵀΛ̄]_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EhPriority {
    pub values: Vec<f64>,
    /// Slot with the largest value, lowest index on ties.
    pub best: usize,
}

pub fn eh_priority(mats: &CorrelationMatrices) -> EhPriority {
    let values: Vec<f64> = (mats.lambda_masked().transpose() * mats.c_eh()).iter().copied().collect();
    let best = argmax(&values, 0..values.len());
    EhPriority { values, best }
}

pub(crate) fn argmax(values: &[f64], candidates: impl IntoIterator<Item = usize>) -> usize {
    let mut best: Option<usize> = None;
    for j in candidates {
        match best {
            Some(b) if values[j] <= values[b] => {}
            _ => best = Some(j),
        }
    }
    best.expect("argmax over an empty candidate set")
}

/// One point of an approximation-error survey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxErrorSample {
    pub theta: f64,
    pub distance: f64,
    pub exact: f64,
    pub approx: f64,
}

impl ApproxErrorSample {
    pub fn abs_error(&self) -> f64 {
        (self.approx - self.exact).abs()
    }
}

/// Exact vs approximate correlation between every grid location and `reference`.
///
/// Degenerate grid points are skipped.
pub fn approximation_error_grid(
    cfg: &ArrayConfig,
    reference: &PolarLocation,
    thetas: &[f64],
    distances: &[f64],
) -> Result<Vec<ApproxErrorSample>> {
    let mut out = Vec::with_capacity(thetas.len() * distances.len());
    for &theta in thetas {
        for &distance in distances {
            let p = PolarLocation::new(theta, distance)?;
            match correlation_approx(cfg, &p, reference) {
                Ok(approx) => out.push(ApproxErrorSample {
                    theta,
                    distance,
                    exact: correlation_exact(cfg, &p, reference),
                    approx,
                }),
                Err(Error::DegenerateApproximation) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
