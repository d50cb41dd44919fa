use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use nearfar_swipt::benchmarks::{run_scheme, run_sweep, SchemeId, SweepRow, SweepSpec, SweepVariable};
use nearfar_swipt::correlation::{approximation_error_grid, build_matrices, eh_priority};
use nearfar_swipt::geometry::PolarLocation;
use nearfar_swipt::io::{load_scenario_file, write_sweep_csv, ScenarioFile};
use nearfar_swipt::metrics::{evaluate, MetricsReport};
use nearfar_swipt::solvers::{SolveReport, Status};
use nearfar_swipt::Error;

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_ITER_LIMIT: u8 = 3;
const EXIT_BAD_INPUT: u8 = 4;

/// Beam scheduling and power allocation for mixed near-/far-field SWIPT.
///
/// Set NEARFAR_LOG (error, warn, info, debug, trace) for log output on stderr.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scheme and write the result as JSON.
    Solve {
        scenario: PathBuf,
        #[arg(long, default_value = "proposed")]
        scheme: String,
        #[command(flatten)]
        out: Output,
    },
    /// Sweep one parameter over a grid and write a CSV table.
    Sweep(SweepArgs),
    /// Dump the correlation matrices and the approximation-error grid as JSON.
    Correlate {
        scenario: PathBuf,
        /// Points per axis of the error grid.
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Validate a scenario file and print a summary.
    Check { scenario: PathBuf },
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    scenario: PathBuf,
    /// Swept parameter: p0 (dBm), r (bps/Hz), k or m.
    #[arg(long)]
    var: String,
    /// Comma-separated grid values.
    #[arg(long, conflicts_with = "range")]
    grid: Option<String>,
    /// Inclusive range as start:stop:step.
    #[arg(long)]
    range: Option<String>,
    /// Comma-separated schemes, or `all`.
    #[arg(long, default_value = "all")]
    schemes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Placement draws per point for k and m sweeps.
    #[arg(long, default_value_t = 1)]
    draws: usize,
    /// Fill the wall_ms column (makes the output run-dependent).
    #[arg(long)]
    record_timing: bool,
    #[command(flatten)]
    out: Output,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NEARFAR_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { scenario, scheme, out } => solve(&scenario, &scheme, out.output.as_deref()),
        Command::Sweep(args) => sweep(args),
        Command::Correlate { scenario, grid, out } => correlate(&scenario, grid, out.output.as_deref()),
        Command::Check { scenario } => check(&scenario),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput { .. } | Error::Scenario { .. } => ExitCode::from(EXIT_BAD_INPUT),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn open_output(path: Option<&Path>) -> nearfar_swipt::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> nearfar_swipt::Result<ScenarioFile> {
    load_scenario_file(path).map_err(|e| match e {
        Error::Io(io) => Error::Scenario { key: path.display().to_string(), reason: io.to_string() },
        other => other,
    })
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    scenario_sha256: String,
    row: SweepRow,
    #[serde(rename = "allocation_W")]
    allocation_w: &'a [f64],
    metrics: MetricsReport,
    report: &'a SolveReport,
}

fn solve(path: &Path, scheme: &str, output: Option<&Path>) -> nearfar_swipt::Result<u8> {
    let file = load(path)?;
    let (cfg, sc) = file.resolve()?;
    let opts = file.solver_options()?;
    let scheme: SchemeId = scheme.parse()?;
    for k in sc.eh_inside_fresnel_boundary(&cfg) {
        warn!("EH receiver {k} is closer than the Fresnel-region boundary; the channel model is less accurate there");
    }
    let mats = build_matrices(&cfg, &sc)?;
    let rep = run_scheme(scheme, &mats, &sc, &opts)?;
    info!("{scheme}: {} objective {:.6e} W after {} iterations", rep.status.as_str(), rep.objective, rep.iterations);
    let out = SolveOutput {
        scenario_sha256: file.sha256(),
        row: SweepRow::from_report("none", 0.0, &rep, sc.max_power, 0.0, 0, 0),
        allocation_w: rep.allocation.powers(),
        metrics: evaluate(&mats, &sc.noise_powers(), &rep.allocation, sc.nonlinear_eh.as_ref()),
        report: &rep,
    };
    let mut w = open_output(output)?;
    serde_json::to_writer_pretty(&mut w, &out).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(match rep.status {
        Status::Optimal => 0,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::IterLimit => EXIT_ITER_LIMIT,
    })
}

fn parse_grid(args: &SweepArgs) -> nearfar_swipt::Result<Vec<f64>> {
    let bad = |reason: String| Error::InvalidInput { what: "sweep grid", reason };
    if let Some(list) = &args.grid {
        return list.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")))).collect();
    }
    let Some(range) = &args.range else {
        return Err(bad("give --grid or --range".into()));
    };
    let parts: Vec<f64> = range
        .split(':')
        .map(|v| v.trim().parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}"))))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad(format!("range `{range}` must be start:stop:step")));
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(bad(format!("range `{range}` needs step > 0 and stop >= start")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn sweep(args: SweepArgs) -> nearfar_swipt::Result<u8> {
    let file = load(&args.scenario)?;
    let (cfg, sc) = file.resolve()?;
    let opts = file.solver_options()?;
    let variable: SweepVariable = args.var.parse()?;
    let schemes: Vec<SchemeId> = if args.schemes.trim() == "all" {
        SchemeId::ALL.to_vec()
    } else {
        args.schemes.split(',').map(str::parse).collect::<Result<_, _>>()?
    };
    let mut spec = SweepSpec::new(variable, parse_grid(&args)?, args.seed);
    spec.draws = args.draws;
    spec.record_timing = args.record_timing;
    let rows = run_sweep(&spec, &cfg, &sc, &schemes, &opts)?;
    write_sweep_csv(open_output(args.out.output.as_deref())?, &rows, args.seed, &file.sha256())?;
    Ok(if rows.iter().any(|r| r.status == "Optimal") { 0 } else { EXIT_INFEASIBLE })
}

#[derive(Serialize)]
struct CorrelateOutput {
    lambda: Vec<Vec<f64>>,
    lambda_masked: Vec<Vec<f64>>,
    eh_priority: Vec<f64>,
    approx_reference_theta: f64,
    approx_max_abs_error: f64,
    approx_median_abs_error: f64,
    approx_grid: Vec<nearfar_swipt::correlation::ApproxErrorSample>,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn correlate(path: &Path, grid: usize, output: Option<&Path>) -> nearfar_swipt::Result<u8> {
    let file = load(path)?;
    let (cfg, sc) = file.resolve()?;
    let mats = build_matrices(&cfg, &sc)?;
    let n = grid.max(2);
    let (r_lo, r_hi) = (cfg.fresnel_min_distance(), cfg.rayleigh_distance().max(cfg.fresnel_min_distance() * 2.0));
    let thetas: Vec<f64> = (0..n).map(|i| -0.99 + 1.98 * i as f64 / (n - 1) as f64).collect();
    let distances: Vec<f64> = (0..n).map(|i| r_lo * (r_hi / r_lo).powf(i as f64 / (n - 1) as f64)).collect();
    let reference_theta = sc.id.first().map_or(0.0, |r| r.spatial_angle);
    let samples = approximation_error_grid(&cfg, &PolarLocation::far(reference_theta)?, &thetas, &distances)?;
    let mut errors: Vec<f64> = samples.iter().map(|s| s.abs_error()).collect();
    errors.sort_by(f64::total_cmp);
    let out = CorrelateOutput {
        lambda: rows(mats.lambda_full()),
        lambda_masked: rows(mats.lambda_masked()),
        eh_priority: eh_priority(&mats).values,
        approx_reference_theta: reference_theta,
        approx_max_abs_error: errors.last().copied().unwrap_or(0.0),
        approx_median_abs_error: errors.get(errors.len() / 2).copied().unwrap_or(0.0),
        approx_grid: samples,
    };
    let mut w = open_output(output)?;
    serde_json::to_writer_pretty(&mut w, &out).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(0)
}

fn check(path: &Path) -> nearfar_swipt::Result<u8> {
    let file = load(path)?;
    let (cfg, sc) = file.resolve()?;
    file.solver_options()?;
    println!("ok: {}", path.display());
    println!("array: N = {}, f = {} GHz, lambda = {} m", cfg.n_antennas(), cfg.carrier_freq() / 1e9, cfg.wavelength());
    println!("rayleigh distance: {} m, fresnel boundary: {} m", cfg.rayleigh_distance(), cfg.fresnel_min_distance());
    println!("receivers: K = {}, M = {}", sc.n_eh(), sc.n_id());
    println!("budget: {} W, rate floor: {} bps/Hz", sc.max_power, sc.rate_floor);
    for k in sc.eh_inside_fresnel_boundary(&cfg) {
        println!("warning: EH receiver {k} at {} m is inside the Fresnel-region boundary", sc.eh[k].location.distance);
    }
    println!("sha256: {}", file.sha256());
    Ok(0)
}
