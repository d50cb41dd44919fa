//! Uniform linear XL-array geometry: apertures, near-field boundaries,
//! element distances, steering vectors and line-of-sight channel gains.
//!
//! Locations use the polar pair (spatial angle, distance) measured from the
//! array centre. The spatial angle is `θ = 2d·cos φ / λ`, so with half-wavelength
//! spacing it coincides with `cos φ`. A far-field receiver is a location whose
//! distance is `+∞`; its steering vector is the planar-wave one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Propagation speed used to derive the wavelength from the carrier.
///
/// The rounded value makes 30 GHz map to a 1 cm wavelength.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// XL-array geometry and carrier parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    n_antennas: usize,
    carrier_freq: f64,
    wavelength: f64,
    spacing: f64,
    aperture_override: Option<f64>,
}

impl ArrayConfig {
    /// Array with half-wavelength spacing.
    pub fn new(n_antennas: usize, carrier_freq: f64) -> Result<Self> {
        if n_antennas < 2 {
            return Err(invalid("array", format!("need at least 2 antennas, got {n_antennas}")));
        }
        if !(carrier_freq.is_finite() && carrier_freq > 0.0) {
            return Err(invalid("array", format!("carrier frequency must be positive, got {carrier_freq}")));
        }
        let wavelength = SPEED_OF_LIGHT / carrier_freq;
        Ok(Self { n_antennas, carrier_freq, wavelength, spacing: wavelength / 2.0, aperture_override: None })
    }

    pub fn with_spacing(mut self, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid("array", format!("spacing must be positive, got {spacing}")));
        }
        self.spacing = spacing;
        Ok(self)
    }

    /// Overrides the aperture used for the Rayleigh and Fresnel boundaries.
    ///
    /// By default the aperture is the physical extent `(N-1)·d`.
    pub fn with_aperture(mut self, aperture: f64) -> Result<Self> {
        if !(aperture.is_finite() && aperture > 0.0) {
            return Err(invalid("array", format!("aperture must be positive, got {aperture}")));
        }
        self.aperture_override = Some(aperture);
        Ok(self)
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn aperture_override(&self) -> Option<f64> {
        self.aperture_override
    }

    pub fn aperture(&self) -> f64 {
        self.aperture_override.unwrap_or((self.n_antennas - 1) as f64 * self.spacing)
    }

    /// Centred element offset `δ_n = (2n - N + 1) / 2`.
    pub fn element_offset(&self, n: usize) -> f64 {
        (2.0 * n as f64 - self.n_antennas as f64 + 1.0) / 2.0
    }

    /// Converts a physical angle of departure (radians) into a spatial angle.
    pub fn spatial_angle(&self, physical_angle: f64) -> f64 {
        2.0 * self.spacing * physical_angle.cos() / self.wavelength
    }

    fn direction_cosine(&self, spatial_angle: f64) -> f64 {
        spatial_angle * self.wavelength / (2.0 * self.spacing)
    }

    /// Rayleigh distance `2D²/λ`.
    pub fn rayleigh_distance(&self) -> f64 {
        let d = self.aperture();
        2.0 * d * d / self.wavelength
    }

    /// Inner boundary of the radiative Fresnel region, `max(½√(D³/λ), 1.2D)`.
    pub fn fresnel_min_distance(&self) -> f64 {
        let d = self.aperture();
        (0.5 * (d.powi(3) / self.wavelength).sqrt()).max(1.2 * d)
    }
}

/// Receiver position in polar coordinates around the array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarLocation {
    pub spatial_angle: f64,
    pub distance: f64,
}

impl PolarLocation {
    /// `distance` may be `f64::INFINITY` to denote a far-field direction.
    pub fn new(spatial_angle: f64, distance: f64) -> Result<Self> {
        if !(spatial_angle.is_finite() && spatial_angle.abs() <= 1.0) {
            return Err(invalid("location", format!("spatial angle must lie in [-1, 1], got {spatial_angle}")));
        }
        if distance.is_nan() || distance <= 0.0 {
            return Err(invalid("location", format!("distance must be positive, got {distance}")));
        }
        Ok(Self { spatial_angle, distance })
    }

    pub fn far(spatial_angle: f64) -> Result<Self> {
        Self::new(spatial_angle, f64::INFINITY)
    }

    pub fn is_far(&self) -> bool {
        self.distance.is_infinite()
    }
}

/// How element distances enter the near-field phase profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseModel {
    #[default]
    Exact,
    /// Second-order (Fresnel) expansion of the element distance.
    Taylor,
}

/// Exact distance between element `n` and `loc`.
pub fn element_distance(cfg: &ArrayConfig, loc: &PolarLocation, n: usize) -> f64 {
    loc.distance + element_path_difference(cfg, loc, n, PhaseModel::Exact)
}

pub fn element_distance_taylor(cfg: &ArrayConfig, loc: &PolarLocation, n: usize) -> f64 {
    loc.distance + element_path_difference(cfg, loc, n, PhaseModel::Taylor)
}

/// `r^(n) - r`, evaluated without cancellation for large `r`.
fn element_path_difference(cfg: &ArrayConfig, loc: &PolarLocation, n: usize, model: PhaseModel) -> f64 {
    let offset = cfg.element_offset(n) * cfg.spacing;
    let c = cfg.direction_cosine(loc.spatial_angle);
    let r = loc.distance;
    match model {
        PhaseModel::Exact => {
            let num = offset * offset - 2.0 * r * c * offset;
            let rn = (r * r + offset * offset - 2.0 * r * c * offset).sqrt();
            num / (rn + r)
        }
        PhaseModel::Taylor => -offset * c + offset * offset * (1.0 - c * c) / (2.0 * r),
    }
}

/// Unit-norm array response; every entry has modulus `1/√N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `selfᴴ · other`.
    pub fn inner(&self, other: &SteeringVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Spherical-wave steering vector towards `loc`, phase-referenced to the array centre.
///
/// Falls back to [`far_steering`] when `loc` is a far-field direction.
pub fn near_steering(cfg: &ArrayConfig, loc: &PolarLocation, model: PhaseModel) -> SteeringVector {
    if loc.is_far() {
        return far_steering(cfg, loc.spatial_angle);
    }
    let scale = 1.0 / (cfg.n_antennas as f64).sqrt();
    let k = 2.0 * PI / cfg.wavelength;
    SteeringVector(
        (0..cfg.n_antennas)
            .map(|n| Complex64::from_polar(scale, -k * element_path_difference(cfg, loc, n, model)))
            .collect(),
    )
}

/// Planar-wave steering vector with entries `exp(jπnθ)/√N`.
pub fn far_steering(cfg: &ArrayConfig, spatial_angle: f64) -> SteeringVector {
    let scale = 1.0 / (cfg.n_antennas as f64).sqrt();
    SteeringVector((0..cfg.n_antennas).map(|n| Complex64::from_polar(scale, PI * n as f64 * spatial_angle)).collect())
}

/// Array power gain `N·|λ/(4πr)|²` of a line-of-sight link.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChannelGain(pub f64);

impl ChannelGain {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn channel_gain(cfg: &ArrayConfig, distance: f64) -> Result<ChannelGain> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(invalid("distance", format!("channel gain needs a finite positive distance, got {distance}")));
    }
    let h = cfg.wavelength / (4.0 * PI * distance);
    Ok(ChannelGain(cfg.n_antennas as f64 * h * h))
}
