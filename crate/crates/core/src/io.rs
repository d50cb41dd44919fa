//! Scenario files and result tables.
//!
//! Scenario files are TOML. Units are spelled out in the key names and
//! converted to linear SI units once, when the file is resolved.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::benchmarks::SweepRow;
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, PolarLocation};
use crate::metrics::NonlinearEhParams;
use crate::scenario::{dbm_to_watts, EhReceiver, IdReceiver, Scenario};
use crate::solvers::SolverOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub array: ArraySection,
    #[serde(default)]
    pub eh: Vec<EhEntry>,
    #[serde(default)]
    pub id: Vec<IdEntry>,
    pub power: PowerSection,
    pub constraints: ConstraintSection,
    pub eh_model: EhModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "f_GHz")]
    pub f_ghz: f64,
    /// Element spacing; half a wavelength when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_m: Option<f64>,
    /// Aperture used for the Rayleigh and Fresnel boundaries; `(N-1)d` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aperture_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EhEntry {
    pub theta: f64,
    #[serde(rename = "r_over_Z", default, skip_serializing_if = "Option::is_none")]
    pub r_over_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_m: Option<f64>,
    #[serde(default = "one")]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdEntry {
    pub theta: f64,
    #[serde(rename = "r_over_Z", default, skip_serializing_if = "Option::is_none")]
    pub r_over_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_m: Option<f64>,
    /// Overrides the shared noise power for this receiver.
    #[serde(rename = "sigma2_dBm", default, skip_serializing_if = "Option::is_none")]
    pub sigma2_dbm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    #[serde(rename = "P0_dBm")]
    pub p0_dbm: f64,
    #[serde(rename = "sigma2_dBm")]
    pub sigma2_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    #[serde(rename = "R_bpshz")]
    pub r_bpshz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EhModelSection {
    pub zeta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<NonlinearEhParams>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_outer_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasibility_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_initial_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub newton_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_newton_steps: Option<usize>,
}

fn one() -> f64 {
    1.0
}

fn key_error(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Scenario { key: key.into(), reason: reason.into() }
}

fn resolve_distance(key: &str, r_over_z: Option<f64>, r_m: Option<f64>, z: f64) -> Result<f64> {
    let r = match (r_over_z, r_m) {
        (Some(f), None) => f * z,
        (None, Some(r)) => r,
        (Some(_), Some(_)) => return Err(key_error(key, "give either r_over_Z or r_m, not both")),
        (None, None) => return Err(key_error(key, "missing distance (r_over_Z or r_m)")),
    };
    if !(r.is_finite() && r > 0.0) {
        return Err(key_error(key, format!("distance must be positive and finite, got {r}")));
    }
    Ok(r)
}

fn check_theta(key: &str, theta: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(key_error(key, format!("spatial angle must lie in [-1, 1], got {theta}")));
    }
    Ok(())
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| key_error(describe_toml_error(&e, text), e.message().to_string()))
    }

    /// Canonical text: fixed key order, shortest round-trip float formatting.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario file serialises")
    }

    /// SHA-256 of the canonical text, in hex.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Converts to SI units and validates every value, naming the offending key on failure.
    pub fn resolve(&self) -> Result<(ArrayConfig, Scenario)> {
        let a = &self.array;
        let mut cfg = ArrayConfig::new(a.n, a.f_ghz * 1e9).map_err(|e| key_error("array", e.to_string()))?;
        if let Some(d) = a.spacing_m {
            cfg = cfg.with_spacing(d).map_err(|e| key_error("array.spacing_m", e.to_string()))?;
        }
        if let Some(ap) = a.aperture_m {
            cfg = cfg.with_aperture(ap).map_err(|e| key_error("array.aperture_m", e.to_string()))?;
        }
        let z = cfg.rayleigh_distance();
        let mut eh = Vec::with_capacity(self.eh.len());
        for (k, e) in self.eh.iter().enumerate() {
            let key = format!("eh[{k}]");
            check_theta(&format!("{key}.theta"), e.theta)?;
            let r = resolve_distance(&key, e.r_over_z, e.r_m, z)?;
            if !(e.alpha.is_finite() && e.alpha >= 0.0) {
                return Err(key_error(format!("{key}.alpha"), "weight must be >= 0"));
            }
            let location = PolarLocation::new(e.theta, r).map_err(|err| key_error(key.clone(), err.to_string()))?;
            eh.push(EhReceiver { location, weight: e.alpha });
        }
        let mut id = Vec::with_capacity(self.id.len());
        for (m, e) in self.id.iter().enumerate() {
            let key = format!("id[{m}]");
            check_theta(&format!("{key}.theta"), e.theta)?;
            let r = resolve_distance(&key, e.r_over_z, e.r_m, z)?;
            let noise_dbm = e.sigma2_dbm.unwrap_or(self.power.sigma2_dbm);
            if !noise_dbm.is_finite() {
                return Err(key_error(format!("{key}.sigma2_dBm"), "must be finite"));
            }
            id.push(IdReceiver { spatial_angle: e.theta, distance: r, noise_power: dbm_to_watts(noise_dbm) });
        }
        if !self.power.p0_dbm.is_finite() {
            return Err(key_error("power.P0_dBm", "must be finite"));
        }
        if !self.power.sigma2_dbm.is_finite() {
            return Err(key_error("power.sigma2_dBm", "must be finite"));
        }
        if !(self.constraints.r_bpshz.is_finite() && self.constraints.r_bpshz >= 0.0) {
            return Err(key_error("constraints.R_bpshz", "rate floor must be finite and >= 0"));
        }
        if !(self.eh_model.zeta > 0.0 && self.eh_model.zeta <= 1.0) {
            return Err(key_error("eh_model.zeta", "efficiency must lie in (0, 1]"));
        }
        if let Some(p) = &self.eh_model.nonlinear {
            p.validate().map_err(|e| key_error("eh_model.nonlinear", e.to_string()))?;
        }
        let scenario = Scenario {
            eh,
            id,
            max_power: dbm_to_watts(self.power.p0_dbm),
            rate_floor: self.constraints.r_bpshz,
            eh_efficiency: self.eh_model.zeta,
            nonlinear_eh: self.eh_model.nonlinear,
        };
        scenario.validate().map_err(|e| key_error("scenario", e.to_string()))?;
        Ok((cfg, scenario))
    }

    /// Defaults overridden by the optional `[solver]` table.
    pub fn solver_options(&self) -> Result<SolverOptions> {
        let mut o = SolverOptions::default();
        if let Some(s) = &self.solver {
            if let Some(v) = s.xi {
                o.convergence_threshold = v;
            }
            if let Some(v) = s.max_outer_iters {
                o.max_outer_iters = v;
            }
            if let Some(v) = s.feasibility_tolerance {
                o.feasibility_tolerance = v;
            }
            if let Some(v) = s.barrier_initial_t {
                o.barrier.initial_t = v;
            }
            if let Some(v) = s.barrier_multiplier {
                o.barrier.t_multiplier = v;
            }
            if let Some(v) = s.newton_tolerance {
                o.barrier.newton_tolerance = v;
            }
            if let Some(v) = s.max_newton_steps {
                o.barrier.max_newton_steps = v;
            }
        }
        o.validate().map_err(|e| key_error("solver", e.to_string()))?;
        Ok(o)
    }
}

// Best-effort dotted key for a TOML error: the line the error points at.
fn describe_toml_error(e: &toml::de::Error, text: &str) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            let snippet = text.lines().nth(line - 1).unwrap_or("").trim();
            format!("line {line} `{snippet}`")
        }
        None => "<file>".to_string(),
    }
}

pub fn load_scenario_file(path: &Path) -> Result<ScenarioFile> {
    let text = fs::read_to_string(path)?;
    ScenarioFile::from_toml(&text)
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<(ArrayConfig, Scenario)> {
    load_scenario_file(path)?.resolve()
}

/// The reference deployment as a scenario file (the contents of `scenarios/reference.scenario`).
pub fn reference_scenario_file() -> ScenarioFile {
    ScenarioFile::from_toml(include_str!("../scenarios/reference.scenario")).expect("bundled scenario parses")
}

/// Column order of the CSV written by [`write_sweep_csv`].
pub const CSV_COLUMNS: [&str; 12] = [
    "sweep_var",
    "sweep_value",
    "scheme",
    "objective_W",
    "objective_dBm",
    "sum_rate_bpshz",
    "scheduled_mask",
    "iterations",
    "status",
    "wall_ms",
    "seed",
    "draw",
];

/// Writes `#`-prefixed provenance lines followed by the CSV table.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow], seed: u64, scenario_sha256: &str) -> Result<()> {
    writeln!(out, "# nearfar-swipt {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# seed {seed}")?;
    writeln!(out, "# scenario_sha256 {scenario_sha256}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
