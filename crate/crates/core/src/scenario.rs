//! Receiver placements and system-level parameters, in linear SI units.

use crate::error::{invalid, Result};
use crate::geometry::{ArrayConfig, PolarLocation};
use crate::metrics::NonlinearEhParams;

/// Near-field energy-harvesting receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhReceiver {
    pub location: PolarLocation,
    /// Power weight `α_k ≥ 0`.
    pub weight: f64,
}

/// Far-field information-decoding receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdReceiver {
    pub spatial_angle: f64,
    /// Range used for the path loss; the beam itself is planar.
    pub distance: f64,
    /// Noise power in watts.
    pub noise_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub eh: Vec<EhReceiver>,
    pub id: Vec<IdReceiver>,
    /// Transmit budget `P₀` in watts.
    pub max_power: f64,
    /// Sum-rate floor `R` in bps/Hz.
    pub rate_floor: f64,
    /// Linear energy-harvesting efficiency `ζ ∈ (0, 1]`.
    pub eh_efficiency: f64,
    pub nonlinear_eh: Option<NonlinearEhParams>,
}

impl Scenario {
    pub fn n_eh(&self) -> usize {
        self.eh.len()
    }

    pub fn n_id(&self) -> usize {
        self.id.len()
    }

    pub fn n_slots(&self) -> usize {
        self.eh.len() + self.id.len()
    }

    pub fn noise_powers(&self) -> Vec<f64> {
        self.id.iter().map(|r| r.noise_power).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_slots() == 0 {
            return Err(invalid("scenario", "needs at least one receiver"));
        }
        for (k, r) in self.eh.iter().enumerate() {
            PolarLocation::new(r.location.spatial_angle, r.location.distance)?;
            if r.location.is_far() {
                return Err(invalid("scenario", format!("EH receiver {k} must be at a finite distance")));
            }
            if !(r.weight.is_finite() && r.weight >= 0.0) {
                return Err(invalid("scenario", format!("EH receiver {k} weight must be >= 0")));
            }
        }
        for (m, r) in self.id.iter().enumerate() {
            PolarLocation::new(r.spatial_angle, r.distance)?;
            if !r.distance.is_finite() {
                return Err(invalid("scenario", format!("ID receiver {m} needs a finite distance for its path loss")));
            }
            if !(r.noise_power.is_finite() && r.noise_power > 0.0) {
                return Err(invalid("scenario", format!("ID receiver {m} noise power must be positive")));
            }
        }
        if !(self.max_power.is_finite() && self.max_power > 0.0) {
            return Err(invalid("scenario", "transmit budget must be positive"));
        }
        if !(self.rate_floor.is_finite() && self.rate_floor >= 0.0) {
            return Err(invalid("scenario", "rate floor must be >= 0"));
        }
        if !(self.eh_efficiency > 0.0 && self.eh_efficiency <= 1.0) {
            return Err(invalid("scenario", "EH efficiency must lie in (0, 1]"));
        }
        if let Some(p) = &self.nonlinear_eh {
            p.validate()?;
        }
        Ok(())
    }

    /// EH receivers closer than the radiative-Fresnel boundary.
    pub fn eh_inside_fresnel_boundary(&self, cfg: &ArrayConfig) -> Vec<usize> {
        let r_min = cfg.fresnel_min_distance();
        self.eh.iter().enumerate().filter(|(_, r)| r.location.distance < r_min).map(|(k, _)| k).collect()
    }
}

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts watts to dBm; zero maps to `-inf`.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// The reference deployment: 256-element array at 30 GHz, three EH receivers at
/// `(0, 0.015Z)`, `(0.1, 0.02Z)`, `(-0.05, 0.03Z)` and two ID receivers at
/// `(0, 1.05Z)`, `(0.05, 1.2Z)`, with a 30 dBm budget, -80 dBm noise, `ζ = 0.5`,
/// unit weights and a 5 bps/Hz floor.
pub fn reference_deployment() -> (ArrayConfig, Scenario) {
    let cfg = ArrayConfig::new(256, 30e9).expect("static array parameters");
    let z = cfg.rayleigh_distance();
    let eh = [(0.0, 0.015), (0.1, 0.02), (-0.05, 0.03)]
        .iter()
        .map(|&(t, f)| EhReceiver { location: PolarLocation::new(t, f * z).expect("static"), weight: 1.0 })
        .collect();
    let id = [(0.0, 1.05), (0.05, 1.2)]
        .iter()
        .map(|&(t, f)| IdReceiver { spatial_angle: t, distance: f * z, noise_power: dbm_to_watts(-80.0) })
        .collect();
    let scenario =
        Scenario { eh, id, max_power: dbm_to_watts(30.0), rate_floor: 5.0, eh_efficiency: 0.5, nonlinear_eh: None };
    (cfg, scenario)
}
