//! Largest achievable sum-rate with every EH beam off, and the water-filling-like
//! power split behind it.
//!
//! Run with `cargo run --example rate_feasibility`.

use nearfar_swipt::{build_matrices, feasibility_check, fp_rate_max, reference_deployment, SolverOptions};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, mut scenario) = reference_deployment();
    let mats = build_matrices(&cfg, &scenario)?;
    let opts = SolverOptions::default();

    let out = fp_rate_max(&mats, &scenario, &opts)?;
    println!("R* = {:.4} bps/Hz after {} iterations", out.r_star, out.iterations);
    println!("ID powers {:?} W", &out.allocation.powers()[mats.n_eh()..]);
    println!("SINR {:?}", out.sinr);

    for r in [5.0, 10.0, 15.0] {
        scenario.rate_floor = r;
        let f = feasibility_check(&mats, &scenario, &opts)?;
        println!("R = {r:>4}: {}", if f.feasible { "feasible" } else { "infeasible" });
    }
    Ok(())
}
