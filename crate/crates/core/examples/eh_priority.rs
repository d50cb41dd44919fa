//! Without a rate floor the whole budget goes to the slot with the largest EH priority.
//!
//! Run with `cargo run --example eh_priority`.

use nearfar_swipt::{build_matrices, closed_form_eh_only, eh_priority, reference_deployment, watts_to_dbm};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, mut scenario) = reference_deployment();
    scenario.rate_floor = 0.0;
    let mats = build_matrices(&cfg, &scenario)?;

    let pr = eh_priority(&mats);
    for (j, v) in pr.values.iter().enumerate() {
        let name = if j < mats.n_eh() { format!("EH{}", j + 1) } else { format!("ID{}", j - mats.n_eh() + 1) };
        println!("{name:<4} priority {v:.4e} W/W{}", if j == pr.best { "  <- best" } else { "" });
    }

    let rep = closed_form_eh_only(&mats, &scenario)?;
    println!("\nallocation {:?} W", rep.allocation.powers());
    println!(
        "harvested {:.4e} W ({:.2} dBm), KKT residual {:.1e}",
        rep.objective,
        watts_to_dbm(rep.objective),
        rep.residuals.kkt_norm.unwrap_or(0.0)
    );
    Ok(())
}
