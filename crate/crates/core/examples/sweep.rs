//! Transmit-power sweep over all schemes, written as CSV to stdout.
//!
//! Run with `cargo run --release --example sweep > p0.csv`.

use std::io;

use nearfar_swipt::io::{reference_scenario_file, write_sweep_csv};
use nearfar_swipt::{run_sweep, SchemeId, SweepSpec, SweepVariable};

fn main() -> nearfar_swipt::Result<()> {
    let file = reference_scenario_file();
    let (cfg, scenario) = file.resolve()?;
    let opts = file.solver_options()?;
    let grid = (0..7).map(|i| 20.0 + 4.0 * i as f64).collect();
    let spec = SweepSpec::new(SweepVariable::P0Dbm, grid, 0);
    let rows = run_sweep(&spec, &cfg, &scenario, &SchemeId::ALL, &opts)?;
    write_sweep_csv(io::stdout().lock(), &rows, spec.seed, &file.sha256())
}
