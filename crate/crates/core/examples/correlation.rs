//! Near-field vs far-field beam correlation, exact and Fresnel-approximated.
//!
//! Run with `cargo run --example correlation`.

use nearfar_swipt::{build_matrices, correlation_approx, correlation_exact, reference_deployment, PolarLocation};

fn main() -> nearfar_swipt::Result<()> {
    let (cfg, scenario) = reference_deployment();
    let z = cfg.rayleigh_distance();
    println!(
        "N = {}, lambda = {} m, Z = {z:.3} m, Fresnel boundary = {:.3} m",
        cfg.n_antennas(),
        cfg.wavelength(),
        cfg.fresnel_min_distance()
    );

    // A far-field beam towards broadside, seen by near-field points at growing range.
    let far = PolarLocation::far(0.0)?;
    println!("\n{:>8} {:>10} {:>10} {:>10}", "r/Z", "theta", "exact", "approx");
    for frac in [0.02, 0.05, 0.1, 0.3, 1.0] {
        for theta in [0.0, 0.05, 0.2] {
            let p = PolarLocation::new(theta, frac * z)?;
            let exact = correlation_exact(&cfg, &p, &far);
            let approx = correlation_approx(&cfg, &p, &far)?;
            println!("{frac:>8} {theta:>10} {exact:>10.5} {approx:>10.5}");
        }
    }

    let mats = build_matrices(&cfg, &scenario)?;
    println!("\nsquared correlations (EH1..EH3, ID1, ID2):\n{:.4}", mats.lambda_full());
    Ok(())
}
