//! One ID receiver and two EH receivers: how the optimal split reacts as the
//! first EH receiver slides towards the ID's direction.
//!
//! Run with `cargo run --example single_id`.

use nearfar_swipt::{build_matrices, closed_form_mixed, reference_deployment, PolarLocation};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, base) = reference_deployment();
    let z = cfg.rayleigh_distance();
    println!("{:>7} {:>14} {:>12} {:>12} {:>12}", "theta", "Lambda(EH1,ID)", "y_EH1 (W)", "y_EH2 (W)", "y_ID (W)");
    for step in 0..=10 {
        let theta = 0.2 - 0.02 * step as f64;
        let mut sc = base.clone();
        sc.eh.truncate(2);
        sc.id.truncate(1);
        sc.eh[0].location = PolarLocation::new(theta, 0.015 * z)?;
        let mats = build_matrices(&cfg, &sc)?;
        let rep = closed_form_mixed(&mats, &sc)?;
        let y = rep.allocation.powers();
        println!(
            "{theta:>7.2} {:>14.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            mats.lambda_masked()[(0, 2)],
            y[0],
            y[1],
            y[2]
        );
    }
    Ok(())
}
