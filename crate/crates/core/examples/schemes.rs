//! Every scheme on one instance.
//!
//! Run with `cargo run --release --example schemes`.

use nearfar_swipt::{build_matrices, reference_deployment, run_scheme, watts_to_dbm, SchemeId, SolverOptions};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, scenario) = reference_deployment();
    let mats = build_matrices(&cfg, &scenario)?;
    let opts = SolverOptions::default();
    println!("{:<16} {:<10} {:>14} {:>10}", "scheme", "status", "harvest (dBm)", "rate");
    for scheme in SchemeId::ALL {
        let rep = run_scheme(scheme, &mats, &scenario, &opts)?;
        println!(
            "{:<16} {:<10} {:>14.3} {:>10.3}",
            scheme.label(),
            rep.status.as_str(),
            watts_to_dbm(rep.objective),
            rep.sum_rate
        );
    }
    Ok(())
}
