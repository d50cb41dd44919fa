//! Joint scheduling and power allocation on the reference deployment.
//!
//! Run with `cargo run --release --example sca`.

use nearfar_swipt::{build_matrices, evaluate, reference_deployment, sca_solve, watts_to_dbm, SolverOptions};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, mut scenario) = reference_deployment();
    let opts = SolverOptions::default();
    for r in [2.0, 5.0, 10.0] {
        scenario.rate_floor = r;
        let mats = build_matrices(&cfg, &scenario)?;
        let rep = sca_solve(&mats, &scenario, &opts)?;
        let m = evaluate(&mats, &scenario.noise_powers(), &rep.allocation, None);
        println!("R = {r}: {} after {} iterations", rep.status.as_str(), rep.iterations);
        let trace: Vec<String> = rep.trace.iter().map(|v| format!("{:.3}", watts_to_dbm(*v))).collect();
        println!("  trace (dBm)  {}", trace.join(" -> "));
        println!("  powers (W)   {}", sci(rep.allocation.powers()));
        println!("  EH powers    {}", sci(&m.per_eh_power));
        println!("  ID rates     {:.3?} (sum {:.3})", m.per_id_rate, m.sum_rate);
    }
    Ok(())
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}
