//! Brute force over all 2^(K+M) schedules, compared with the SCA result.
//!
//! Run with `cargo run --release --example exhaustive`.

use std::time::Instant;

use nearfar_swipt::{build_matrices, exhaustive_search, reference_deployment, sca_solve, SolverOptions};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, scenario) = reference_deployment();
    let mats = build_matrices(&cfg, &scenario)?;
    let opts = SolverOptions::default();

    let t = Instant::now();
    let ex = exhaustive_search(&mats, &scenario, &opts)?;
    let t_ex = t.elapsed();
    let t = Instant::now();
    let sca = sca_solve(&mats, &scenario, &opts)?;
    let t_sca = t.elapsed();

    let mask = |s: Vec<bool>| s.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    println!(
        "exhaustive: {:.6e} W, schedule {}, {} schedules, {t_ex:.2?}",
        ex.objective,
        mask(ex.schedule(scenario.max_power)),
        ex.subproblems
    );
    println!("SCA:        {:.6e} W, schedule {}, {t_sca:.2?}", sca.objective, mask(sca.schedule(scenario.max_power)));
    println!("relative gap {:.2e}", (ex.objective - sca.objective) / ex.objective);
    Ok(())
}
