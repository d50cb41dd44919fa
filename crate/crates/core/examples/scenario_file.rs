//! Scenario files: parsing, validation errors and the canonical hash.
//!
//! Run with `cargo run --example scenario_file`.

use nearfar_swipt::io::ScenarioFile;

const TEXT: &str = r#"
[array]
N = 128
f_GHz = 28.0

[[eh]]
theta = 0.1
r_m = 4.0

[[id]]
theta = -0.3
r_over_Z = 1.2
sigma2_dBm = -85.0

[power]
P0_dBm = 33.0
sigma2_dBm = -80.0

[constraints]
R_bpshz = 3.0

[eh_model]
zeta = 0.6
nonlinear = { kappa = 0.024, varpi = 0.014, varrho = 150.0 }
"#;

fn main() -> nearfar_swipt::Result<()> {
    let file = ScenarioFile::from_toml(TEXT)?;
    let (cfg, sc) = file.resolve()?;
    println!("Z = {:.3} m, K = {}, M = {}, P0 = {} W", cfg.rayleigh_distance(), sc.n_eh(), sc.n_id(), sc.max_power);
    println!("ID noise {:e} W, sha256 {}", sc.id[0].noise_power, file.sha256());

    let canonical = file.to_toml();
    let again = ScenarioFile::from_toml(&canonical)?;
    println!("round trip keeps the hash: {}", again.sha256() == file.sha256());

    let broken = TEXT.replace("r_m = 4.0", "r_m = 0.0");
    match ScenarioFile::from_toml(&broken).and_then(|f| f.resolve()) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
