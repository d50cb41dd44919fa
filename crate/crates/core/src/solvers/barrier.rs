//! Log-barrier interior-point method for small convex programs of the form
//!
//! ```text
//! minimise  cᵀx   subject to   aᵢᵀx - bᵢ + wᵢ / x_{jᵢ} <= 0
//! ```
//!
//! where the reciprocal term is optional (`wᵢ > 0`). That family covers the
//! convexified scheduling problem: affine budget/rate/interference rows plus
//! the `1/S <= g·y` signal rows. Infeasible starts go through a phase-I
//! problem with one extra slack variable.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Inequality {
    terms: Vec<(usize, f64)>,
    rhs: f64,
    reciprocal: Option<(usize, f64)>,
    /// Domain constraints keep their barrier in phase I (no slack).
    hard: bool,
}

impl Inequality {
    /// `Σ coef·x - rhs <= 0`.
    pub fn affine(terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { terms, rhs, reciprocal: None, hard: false }
    }

    /// `weight / x_var + Σ coef·x - rhs <= 0`, requires `x_var > 0`.
    pub fn with_reciprocal(terms: Vec<(usize, f64)>, rhs: f64, var: usize, weight: f64) -> Self {
        Self { terms, rhs, reciprocal: Some((var, weight)), hard: false }
    }

    /// `x_var > 0` kept strict throughout, including phase I.
    pub fn positive(var: usize) -> Self {
        Self { terms: vec![(var, -1.0)], rhs: 0.0, reciprocal: None, hard: true }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let mut v = -self.rhs;
        for &(i, c) in &self.terms {
            v += c * x[i];
        }
        if let Some((i, w)) = self.reciprocal {
            v += w / x[i];
        }
        v
    }

    fn gradient_into(&self, x: &DVector<f64>, g: &mut DVector<f64>) {
        g.fill(0.0);
        for &(i, c) in &self.terms {
            g[i] += c;
        }
        if let Some((i, w)) = self.reciprocal {
            g[i] -= w / (x[i] * x[i]);
        }
    }

    fn curvature(&self, x: &DVector<f64>) -> Option<(usize, f64)> {
        self.reciprocal.map(|(i, w)| (i, 2.0 * w / x[i].powi(3)))
    }
}

#[derive(Debug, Clone)]
pub struct ConvexProgram {
    pub n: usize,
    pub cost: DVector<f64>,
    pub constraints: Vec<Inequality>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSettings {
    pub initial_t: f64,
    pub t_multiplier: f64,
    pub newton_tolerance: f64,
    pub max_newton_steps: usize,
    /// Stop once the duality-gap bound `m/t` falls below this.
    pub gap_tolerance: f64,
}

impl Default for BarrierSettings {
    fn default() -> Self {
        Self { initial_t: 1.0, t_multiplier: 20.0, newton_tolerance: 1e-9, max_newton_steps: 200, gap_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct BarrierOutcome {
    pub x: DVector<f64>,
    pub objective: f64,
    pub newton_steps: usize,
    /// Rough floating-point operation count of all Newton systems.
    pub flops: u64,
}

#[derive(Debug)]
pub enum BarrierError {
    /// Phase I could not find a strictly feasible point.
    Infeasible {
        best_slack: f64,
    },
    Failed(Error),
}

impl From<Error> for BarrierError {
    fn from(e: Error) -> Self {
        BarrierError::Failed(e)
    }
}

impl ConvexProgram {
    fn strictly_feasible(&self, x: &DVector<f64>) -> bool {
        self.constraints.iter().all(|c| {
            let v = c.value(x);
            v < 0.0 && v.is_finite()
        })
    }

    fn max_violation(&self, x: &DVector<f64>) -> f64 {
        self.constraints.iter().map(|c| c.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Solves from `start`, running phase I first if `start` is not strictly feasible.
    ///
    /// Hard (domain) constraints must already hold strictly at `start`.
    pub fn solve(
        &self,
        start: DVector<f64>,
        settings: &BarrierSettings,
    ) -> std::result::Result<BarrierOutcome, BarrierError> {
        let mut steps = 0;
        let mut flops = 0;
        let x0 = if self.strictly_feasible(&start) {
            start
        } else {
            let (x, s1, f1) = self.phase_one(start, settings)?;
            steps += s1;
            flops += f1;
            x
        };
        let (x, s2, f2) = centre_path(self, x0, settings, None)?;
        Ok(BarrierOutcome { objective: self.cost.dot(&x), x, newton_steps: steps + s2, flops: flops + f2 })
    }

    fn phase_one(
        &self,
        start: DVector<f64>,
        settings: &BarrierSettings,
    ) -> std::result::Result<(DVector<f64>, usize, u64), BarrierError> {
        let n = self.n;
        let slack = n;
        let mut constraints: Vec<Inequality> = self
            .constraints
            .iter()
            .map(|c| {
                let mut c = c.clone();
                if !c.hard {
                    c.terms.push((slack, -1.0));
                }
                c
            })
            .collect();
        // Keeps the slack bounded below so phase I always has a finite optimum.
        constraints.push(Inequality::affine(vec![(slack, -1.0)], 1.0));
        let mut cost = DVector::zeros(n + 1);
        cost[slack] = 1.0;
        let aux = ConvexProgram { n: n + 1, cost, constraints };

        let s0 = self.constraints.iter().filter(|c| !c.hard).map(|c| c.value(&start)).fold(f64::NEG_INFINITY, f64::max);
        if !s0.is_finite() {
            return Err(BarrierError::Failed(Error::Numerical {
                stage: "phase I",
                reason: "start point outside the constraint domain".into(),
                last_iterate: start.iter().copied().collect(),
            }));
        }
        let mut x = DVector::zeros(n + 1);
        x.rows_mut(0, n).copy_from(&start);
        x[slack] = s0.max(0.0) + 1.0;
        let (z, steps, flops) = centre_path(&aux, x, settings, Some(slack))?;
        if z[slack] < 0.0 {
            let x = z.rows(0, n).into_owned();
            if self.strictly_feasible(&x) {
                return Ok((x, steps, flops));
            }
        }
        Err(BarrierError::Infeasible { best_slack: z[slack] })
    }
}

/// Barrier path following. With `stop_on_negative`, returns as soon as that
/// coordinate drops below zero (phase I).
fn centre_path(
    prog: &ConvexProgram,
    mut x: DVector<f64>,
    settings: &BarrierSettings,
    stop_on_negative: Option<usize>,
) -> std::result::Result<(DVector<f64>, usize, u64), BarrierError> {
    let m = prog.constraints.len() as f64;
    let n = prog.n;
    let mut t = settings.initial_t;
    let mut steps = 0usize;
    let mut flops = 0u64;
    let mut grad_i = DVector::zeros(n);
    loop {
        // Newton centring for the current t.
        let mut converged = false;
        for _ in 0..settings.max_newton_steps {
            let mut grad = &prog.cost * t;
            let mut hess = DMatrix::<f64>::zeros(n, n);
            for c in &prog.constraints {
                let f = c.value(&x);
                c.gradient_into(&x, &mut grad_i);
                grad.axpy(-1.0 / f, &grad_i, 1.0);
                hess.ger(1.0 / (f * f), &grad_i, &grad_i, 1.0);
                if let Some((i, curv)) = c.curvature(&x) {
                    hess[(i, i)] -= curv / f;
                }
            }
            steps += 1;
            flops += (prog.constraints.len() * n * n + n * n * n / 3) as u64;
            let step = newton_direction(&hess, &grad).ok_or_else(|| Error::Numerical {
                stage: "barrier Newton step",
                reason: "Hessian not positive definite".into(),
                last_iterate: x.iter().copied().collect(),
            })?;
            let decrement = -grad.dot(&step);
            if decrement / 2.0 <= settings.newton_tolerance {
                converged = true;
                break;
            }
            let phi0 = barrier_value(prog, &x, t);
            let mut alpha = 1.0;
            let mut accepted = false;
            let mut stalled = false;
            for _ in 0..80 {
                let trial = &x + &step * alpha;
                if prog.strictly_feasible(&trial) {
                    let phi = barrier_value(prog, &trial, t);
                    if phi <= phi0 - 0.01 * alpha * decrement {
                        x = trial;
                        accepted = true;
                        // Decrease lost in the rounding noise of the barrier value.
                        stalled = phi0 - phi <= 8.0 * f64::EPSILON * phi0.abs().max(1.0);
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if let Some(s) = stop_on_negative {
                if x[s] < 0.0 {
                    return Ok((x, steps, flops));
                }
            }
            if !accepted || stalled {
                // No further progress representable in floating point.
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(BarrierError::Failed(Error::Numerical {
                stage: "barrier centring",
                reason: format!("Newton did not converge within {} steps", settings.max_newton_steps),
                last_iterate: x.iter().copied().collect(),
            }));
        }
        if let Some(s) = stop_on_negative {
            if x[s] < 0.0 {
                return Ok((x, steps, flops));
            }
        }
        if m / t < settings.gap_tolerance {
            return Ok((x, steps, flops));
        }
        t *= settings.t_multiplier;
    }
}

fn barrier_value(prog: &ConvexProgram, x: &DVector<f64>, t: f64) -> f64 {
    t * prog.cost.dot(x) - prog.constraints.iter().map(|c| (-c.value(x)).ln()).sum::<f64>()
}

fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = (0..hess.nrows()).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut h = hess.clone();
        if reg > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += reg * scale;
            }
        }
        if let Some(ch) = h.cholesky() {
            return Some(-ch.solve(grad));
        }
        reg = if reg == 0.0 { 1e-14 } else { reg * 100.0 };
    }
    None
}

impl ConvexProgram {
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        self.max_violation(x)
    }
}

pub(crate) fn into_result<T>(r: std::result::Result<T, BarrierError>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(BarrierError::Infeasible { .. }) => Ok(None),
        Err(BarrierError::Failed(e)) => Err(e),
    }
}
