//! Comparison schemes and parameter sweeps.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{argmax, build_matrices, eh_priority, CorrelationMatrices};
use crate::error::{invalid, Result};
use crate::geometry::{ArrayConfig, PolarLocation};
use crate::metrics::{sum_rate, PowerAllocation};
use crate::scenario::{dbm_to_watts, watts_to_dbm, EhReceiver, IdReceiver, Scenario};
use crate::solvers::{
    closed_form_single_id, exhaustive_search, sca_solve, sca_solve_on, SolveReport, SolverOptions, Status,
    MAX_EXHAUSTIVE_SLOTS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    Proposed,
    Exhaustive,
    FarFieldSwipt,
    GsOpa,
    OsEpa,
    AsEpa,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Proposed,
        SchemeId::Exhaustive,
        SchemeId::FarFieldSwipt,
        SchemeId::GsOpa,
        SchemeId::OsEpa,
        SchemeId::AsEpa,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchemeId::Proposed => "proposed",
            SchemeId::Exhaustive => "exhaustive",
            SchemeId::FarFieldSwipt => "far_field_swipt",
            SchemeId::GsOpa => "gs_opa",
            SchemeId::OsEpa => "os_epa",
            SchemeId::AsEpa => "as_epa",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeId {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        SchemeId::ALL
            .into_iter()
            .find(|id| id.label() == norm)
            .ok_or_else(|| invalid("scheme", format!("unknown scheme `{s}`")))
    }
}

/// Runs one scheme on one instance.
pub fn run_scheme(
    scheme: SchemeId,
    mats: &CorrelationMatrices,
    sc: &Scenario,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let mut rep = match scheme {
        SchemeId::Proposed => sca_solve(mats, sc, opts)?,
        SchemeId::Exhaustive => exhaustive_search(mats, sc, opts)?,
        SchemeId::FarFieldSwipt => {
            if mats.n_id() == 0 {
                return Err(invalid("far_field_swipt", "needs at least one ID receiver"));
            }
            let support: Vec<bool> = (0..mats.n_slots()).map(|j| j >= mats.n_eh()).collect();
            sca_solve_on(mats, sc, opts, &support)?
        }
        SchemeId::GsOpa => greedy_schedule(mats, sc)?,
        SchemeId::OsEpa => best_equal_split(mats, sc, opts)?,
        SchemeId::AsEpa => {
            let support = vec![true; mats.n_slots()];
            equal_split(mats, sc, opts, &support).unwrap_or_else(|| SolveReport::infeasible("as_epa", mats, sc))
        }
    };
    rep.scheme = scheme.label().to_string();
    Ok(rep)
}

// Highest-priority EH slot plus the strongest ID, then the single-ID closed form.
fn greedy_schedule(mats: &CorrelationMatrices, sc: &Scenario) -> Result<SolveReport> {
    if mats.n_eh() == 0 || mats.n_id() == 0 {
        return Err(invalid("gs_opa", "needs at least one EH and one ID receiver"));
    }
    let pr = eh_priority(mats);
    let k = argmax(&pr.values, 0..mats.n_eh());
    let m = argmax(mats.id_gain(), 0..mats.n_id());
    closed_form_single_id(mats, sc, &[k], m)
}

fn equal_split(
    mats: &CorrelationMatrices,
    sc: &Scenario,
    opts: &SolverOptions,
    support: &[bool],
) -> Option<SolveReport> {
    let count = support.iter().filter(|&&b| b).count();
    if count == 0 {
        return None;
    }
    let share = sc.max_power / count as f64;
    let y = PowerAllocation::from_clamped(support.iter().map(|&b| if b { share } else { 0.0 }).collect());
    let rate = if mats.n_id() == 0 { 0.0 } else { sum_rate(mats, &sc.noise_powers(), &y) };
    if rate < sc.rate_floor - opts.feasibility_tolerance {
        return None;
    }
    Some(SolveReport::new("as_epa", Status::Optimal, mats, sc, y))
}

fn best_equal_split(mats: &CorrelationMatrices, sc: &Scenario, opts: &SolverOptions) -> Result<SolveReport> {
    let n = mats.n_slots();
    if n > MAX_EXHAUSTIVE_SLOTS {
        return Err(invalid("os_epa", format!("{n} slots exceeds the limit of {MAX_EXHAUSTIVE_SLOTS}")));
    }
    let count = 1u64 << n;
    let mut best: Option<SolveReport> = None;
    for index in 1..count {
        let support = crate::solvers::exhaustive::mask(index, n);
        if let Some(rep) = equal_split(mats, sc, opts, &support) {
            if best.as_ref().is_none_or(|b| rep.objective > b.objective) {
                best = Some(rep);
            }
        }
    }
    let mut rep = best.unwrap_or_else(|| SolveReport::infeasible("os_epa", mats, sc));
    rep.subproblems = count as usize;
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Transmit budget in dBm.
    P0Dbm,
    /// Sum-rate floor in bps/Hz.
    Rate,
    /// Number of EH receivers.
    NumEh,
    /// Number of ID receivers.
    NumId,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::P0Dbm => "P0_dBm",
            SweepVariable::Rate => "R_bpshz",
            SweepVariable::NumEh => "K",
            SweepVariable::NumId => "M",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p0" | "p0_dbm" | "p0-dbm" => Ok(SweepVariable::P0Dbm),
            "r" | "rate" | "r_bpshz" => Ok(SweepVariable::Rate),
            "k" => Ok(SweepVariable::NumEh),
            "m" => Ok(SweepVariable::NumId),
            _ => Err(invalid("sweep variable", format!("unknown variable `{s}` (expected p0, r, k or m)"))),
        }
    }
}

/// Random annulus placement for receivers added by K/M sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementRule {
    /// EH radius range as multiples of the Rayleigh distance.
    pub eh_radius: (f64, f64),
    /// ID radius range as multiples of the Rayleigh distance.
    pub id_radius: (f64, f64),
    /// Half-width of the physical angle range around broadside, in radians.
    pub angle_half_width: f64,
    pub eh_weight: f64,
    pub id_noise_power: f64,
}

impl Default for PlacementRule {
    fn default() -> Self {
        Self {
            eh_radius: (0.015, 0.3),
            id_radius: (1.05, 1.3),
            angle_half_width: FRAC_PI_3,
            eh_weight: 1.0,
            id_noise_power: dbm_to_watts(-80.0),
        }
    }
}

impl PlacementRule {
    fn spatial_angle(&self, cfg: &ArrayConfig, rng: &mut ChaCha8Rng) -> f64 {
        let offset = rng.random_range(-self.angle_half_width..=self.angle_half_width);
        cfg.spatial_angle(FRAC_PI_2 - offset).clamp(-1.0, 1.0)
    }

    fn draw_eh(&self, cfg: &ArrayConfig, rng: &mut ChaCha8Rng) -> Result<EhReceiver> {
        let z = cfg.rayleigh_distance();
        let theta = self.spatial_angle(cfg, rng);
        let r = rng.random_range(self.eh_radius.0..=self.eh_radius.1) * z;
        Ok(EhReceiver { location: PolarLocation::new(theta, r)?, weight: self.eh_weight })
    }

    fn draw_id(&self, cfg: &ArrayConfig, rng: &mut ChaCha8Rng) -> IdReceiver {
        let z = cfg.rayleigh_distance();
        let theta = self.spatial_angle(cfg, rng);
        let r = rng.random_range(self.id_radius.0..=self.id_radius.1) * z;
        IdReceiver { spatial_angle: theta, distance: r, noise_power: self.id_noise_power }
    }

    fn validate(&self) -> Result<()> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && 0.0 < a && a <= b;
        if !ok(self.eh_radius) || !ok(self.id_radius) {
            return Err(invalid("placement rule", "radius ranges must be positive and ordered"));
        }
        if !(self.angle_half_width >= 0.0 && self.angle_half_width <= FRAC_PI_2) {
            return Err(invalid("placement rule", "angle half-width must lie in [0, pi/2]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub placement: PlacementRule,
    pub seed: u64,
    /// Independent placement draws per grid point (only used by K and M sweeps).
    pub draws: usize,
    /// Measure wall-clock time per row; off by default so outputs are reproducible.
    pub record_timing: bool,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, grid: Vec<f64>, seed: u64) -> Self {
        Self { variable, grid, placement: PlacementRule::default(), seed, draws: 1, record_timing: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(invalid("sweep grid", "must not be empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) || self.grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("sweep grid", "must be finite and sorted ascending"));
        }
        if matches!(self.variable, SweepVariable::NumEh | SweepVariable::NumId)
            && self.grid.iter().any(|v| v.fract() != 0.0 || *v < 0.0)
        {
            return Err(invalid("sweep grid", "receiver counts must be non-negative integers"));
        }
        if self.variable == SweepVariable::NumId && self.grid[0] < 1.0 {
            return Err(invalid("sweep grid", "needs at least one ID receiver"));
        }
        if self.draws == 0 {
            return Err(invalid("sweep draws", "must be at least 1"));
        }
        self.placement.validate()
    }
}

/// One `(point, scheme)` result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_var: String,
    pub sweep_value: f64,
    pub scheme: String,
    #[serde(rename = "objective_W")]
    pub objective_w: f64,
    #[serde(rename = "objective_dBm")]
    pub objective_dbm: Option<f64>,
    pub sum_rate_bpshz: f64,
    pub scheduled_mask: String,
    pub iterations: usize,
    pub status: String,
    pub wall_ms: f64,
    pub seed: u64,
    pub draw: usize,
}

impl SweepRow {
    pub fn from_report(
        var: &str,
        value: f64,
        rep: &SolveReport,
        budget: f64,
        wall_ms: f64,
        seed: u64,
        draw: usize,
    ) -> Self {
        Self {
            sweep_var: var.to_string(),
            sweep_value: value,
            scheme: rep.scheme.clone(),
            objective_w: rep.objective,
            objective_dbm: (rep.objective > 0.0).then(|| watts_to_dbm(rep.objective)),
            sum_rate_bpshz: rep.sum_rate,
            scheduled_mask: rep.schedule(budget).iter().map(|&b| if b { '1' } else { '0' }).collect(),
            iterations: rep.iterations,
            status: rep.status.as_str().to_string(),
            wall_ms,
            seed,
            draw,
        }
    }
}

/// Instance at one grid point; `extra` holds the pre-drawn receivers for K/M sweeps.
fn point_scenario(
    spec: &SweepSpec,
    base: &Scenario,
    value: f64,
    extra_eh: &[EhReceiver],
    extra_id: &[IdReceiver],
) -> Scenario {
    let mut sc = base.clone();
    match spec.variable {
        SweepVariable::P0Dbm => sc.max_power = dbm_to_watts(value),
        SweepVariable::Rate => sc.rate_floor = value,
        SweepVariable::NumEh => {
            let k = value as usize;
            sc.eh = base.eh.iter().chain(extra_eh).take(k).copied().collect();
        }
        SweepVariable::NumId => {
            let m = value as usize;
            sc.id = base.id.iter().chain(extra_id).take(m).copied().collect();
        }
    }
    sc
}

/// Runs every scheme at every grid point. Rows come back in grid order, then
/// draw order, then scheme order, whatever order they were computed in.
pub fn run_sweep(
    spec: &SweepSpec,
    cfg: &ArrayConfig,
    base: &Scenario,
    schemes: &[SchemeId],
    opts: &SolverOptions,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    opts.validate()?;
    let max_k = spec.grid.iter().fold(0.0, |a: f64, b| a.max(*b)) as usize;
    let draws: Vec<(Vec<EhReceiver>, Vec<IdReceiver>)> = (0..spec.draws)
        .map(|d| {
            // Receivers are added in a fixed order, so larger counts extend smaller ones.
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(d as u64));
            let (mut eh, mut id) = (Vec::new(), Vec::new());
            match spec.variable {
                SweepVariable::NumEh => {
                    for _ in base.eh.len()..max_k {
                        eh.push(spec.placement.draw_eh(cfg, &mut rng)?);
                    }
                }
                SweepVariable::NumId => {
                    for _ in base.id.len()..max_k {
                        id.push(spec.placement.draw_id(cfg, &mut rng));
                    }
                }
                _ => {}
            }
            Ok((eh, id))
        })
        .collect::<Result<_>>()?;
    let n_draws = if matches!(spec.variable, SweepVariable::NumEh | SweepVariable::NumId) { spec.draws } else { 1 };

    let jobs: Vec<(f64, usize, SchemeId)> = spec
        .grid
        .iter()
        .flat_map(|&v| (0..n_draws).flat_map(move |d| schemes.iter().map(move |&s| (v, d, s))))
        .collect();
    let var = spec.variable.label();
    let rows = jobs
        .par_iter()
        .map(|&(value, draw, scheme)| {
            let sc = point_scenario(spec, base, value, &draws[draw].0, &draws[draw].1);
            let started = Instant::now();
            let result = build_matrices(cfg, &sc).and_then(|mats| run_scheme(scheme, &mats, &sc, opts));
            let wall_ms = if spec.record_timing { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            match result {
                Ok(rep) => SweepRow::from_report(var, value, &rep, sc.max_power, wall_ms, spec.seed, draw),
                Err(e) => {
                    warn!("{var} = {value}, {scheme}: {e}");
                    SweepRow {
                        sweep_var: var.to_string(),
                        sweep_value: value,
                        scheme: scheme.label().to_string(),
                        objective_w: 0.0,
                        objective_dbm: None,
                        sum_rate_bpshz: 0.0,
                        scheduled_mask: String::new(),
                        iterations: 0,
                        status: "Error".to_string(),
                        wall_ms,
                        seed: spec.seed,
                        draw,
                    }
                }
            }
        })
        .collect();
    Ok(rows)
}
