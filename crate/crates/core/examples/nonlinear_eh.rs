//! Logistic rectifier model applied to the harvested RF power of an optimised allocation.
//!
//! Run with `cargo run --release --example nonlinear_eh`.

use nearfar_swipt::{
    build_matrices, evaluate, nonlinear_eh, reference_deployment, sca_solve, NonlinearEhParams, SolverOptions,
};

fn main() -> nearfar_swipt::Result<()> {
    // Circuit sized for microwatt inputs.
    let params = NonlinearEhParams { kappa: 2e-6, varpi: 1e-6, varrho: 3e6 };
    for q in [0.0, 0.5e-6, 1e-6, 2e-6, 4e-6, 8e-6] {
        println!("RF {q:.1e} W -> DC {:.3e} W", nonlinear_eh(q, &params));
    }

    let (cfg, scenario) = reference_deployment();
    let mats = build_matrices(&cfg, &scenario)?;
    let rep = sca_solve(&mats, &scenario, &SolverOptions::default())?;
    let m = evaluate(&mats, &scenario.noise_powers(), &rep.allocation, Some(&params));
    let sci = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ");
    println!("\nRF per EH {} W", sci(&m.per_eh_power));
    println!("DC per EH {} W", sci(&m.per_eh_dc_power.unwrap_or_default()));
    Ok(())
}
