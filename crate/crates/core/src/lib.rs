//! Beam scheduling and power allocation for mixed near-/far-field SWIPT with
//! extremely large antenna arrays.
//!
//! Energy-harvesting (EH) receivers sit in the array's near field and are
//! served by focused beams; information-decoding (ID) receivers sit in the far
//! field and are served by planar beams. The solvers pick which beams to turn
//! on and how much power each gets, maximising the weighted harvested power
//! under a sum-rate floor and a transmit budget.
//!
//! ```
//! use nearfar_swipt::{build_matrices, reference_deployment, sca_solve, SolverOptions};
//!
//! let (cfg, scenario) = reference_deployment();
//! let mats = build_matrices(&cfg, &scenario).unwrap();
//! let report = sca_solve(&mats, &scenario, &SolverOptions::default()).unwrap();
//! assert!(report.sum_rate >= scenario.rate_floor - 1e-5);
//! ```

pub mod benchmarks;
pub mod correlation;
pub mod error;
pub mod fresnel;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod scenario;
pub mod solvers;

pub use benchmarks::{run_scheme, run_sweep, SchemeId, SweepRow, SweepSpec, SweepVariable};
pub use correlation::{
    approximation_error_grid, build_matrices, correlation_approx, correlation_exact, eh_priority, CorrelationMatrices,
    EhPriority,
};
pub use error::{Error, Result};
pub use geometry::{channel_gain, far_steering, near_steering, ArrayConfig, PhaseModel, PolarLocation, SteeringVector};
pub use metrics::{
    evaluate, nonlinear_eh, sum_rate, weighted_sum_power, MetricsReport, NonlinearEhParams, PowerAllocation,
};
pub use scenario::{dbm_to_watts, reference_deployment, watts_to_dbm, EhReceiver, IdReceiver, Scenario};
pub use solvers::{
    closed_form_eh_only, closed_form_mixed, exhaustive_search, feasibility_check, fp_rate_max, sca_solve, SolveReport,
    SolverOptions, Status,
};
