//! `freeplate`: fundamental tones of free plates under tension.
//!
//! Exit codes: 0 success, 1 a checked inequality failed, 2 bad input or a
//! solver/quadrature failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use freeplate::ball::{self, BallError, RESIDUAL_TOL};
use freeplate::geom::{self, QuadratureSpec};
use freeplate::report::{Check, CSV_HEADER};
use freeplate::verify::{run_suite, SuiteOptions};

#[derive(Parser, Debug)]
#[command(name = "freeplate", version, about = "Free plate fundamental tones, bounds and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance override (meaning depends on the command).
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the fundamental mode of a ball.
    Tone {
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        radius: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate ω(τ) for the unit ball with its linear bounds.
    Sweep {
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, allow_negative_numbers = true)]
        tau_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        tau_max: f64,
        #[arg(long, default_value_t = 50)]
        tau_steps: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the inequality suite for each listed dimension.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        dims: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Quotient bound on a domain read from a config file.
    Quotient {
        #[arg(long)]
        domain: PathBuf,
        /// Must match the `dim` in the config when given.
        #[arg(long)]
        dim: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, value_enum)]
        quad: Option<Quad>,
        /// Cells per axis (grid) or sample count (mc).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Quad {
    Radial,
    Grid,
    Mc,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(out: &Option<PathBuf>) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).map_err(|e| input_error(format!("cannot create {}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn write_rows(out: &Option<PathBuf>, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = writer(out)?;
    let io_err = |e: csv::Error| input_error(format!("cannot write CSV: {e}"));
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    w.flush().map_err(|e| input_error(format!("cannot write CSV: {e}")))
}

fn ball_failure(e: BallError) -> Failure {
    input_error(e.to_string())
}

fn tone(dim: u32, tau: f64, radius: f64, common: &Common) -> Result<(), Failure> {
    let mode = ball::fundamental_tone(tau, dim, radius).map_err(ball_failure)?;
    let res = mode.residuals().map_err(ball_failure)?;
    let tol = common.tol.unwrap_or(RESIDUAL_TOL);
    let row = vec![
        dim.to_string(),
        f17(tau),
        f17(radius),
        f17(mode.a),
        f17(mode.b),
        f17(mode.gamma),
        f17(mode.omega),
        f17(res.scaled_m()),
        f17(res.scaled_v()),
    ];
    write_rows(
        &common.out,
        &["d", "tau", "radius", "a", "b", "gamma", "omega", "residual_m", "residual_v"],
        &[row],
    )?;
    if !res.within(tol) {
        return Err(input_error(format!(
            "boundary residuals ({:.3e}, {:.3e}) exceed {tol:.1e}",
            res.scaled_m(),
            res.scaled_v()
        )));
    }
    Ok(())
}

fn tau_grid(min: f64, max: f64, steps: usize, log: bool) -> Result<Vec<f64>, Failure> {
    if steps < 2 {
        return Err(input_error(format!("--tau-steps must be at least 2, got {steps}")));
    }
    if !(min > 0.0) || !min.is_finite() {
        return Err(input_error(format!("tau must be positive, got {min}")));
    }
    if !(max > min) || !max.is_finite() {
        return Err(input_error(format!("--tau-max must exceed --tau-min, got {max}")));
    }
    let t = |k: usize| k as f64 / (steps - 1) as f64;
    let mut g: Vec<f64> = if log {
        (0..steps).map(|k| 10f64.powf(min.log10() + (max.log10() - min.log10()) * t(k))).collect()
    } else {
        (0..steps).map(|k| min + (max - min) * t(k)).collect()
    };
    g[0] = min;
    g[steps - 1] = max;
    Ok(g)
}

fn sweep(dim: u32, taus: &[f64], common: &Common) -> Result<(), Failure> {
    let results: Vec<(f64, Result<f64, BallError>, Result<ball::ToneBounds, BallError>)> = taus
        .par_iter()
        .map(|&t| (t, ball::fundamental_tone(t, dim, 1.0).map(|m| m.omega), ball::tone_bounds(t, dim)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut solver_failures = Vec::new();
    let mut sandwich_failures = Vec::new();
    for (tau, omega, bounds) in &results {
        let mut row = vec![f17(*tau)];
        match omega {
            Ok(w) => row.push(f17(*w)),
            Err(e) => {
                solver_failures.push(format!("tau={tau}: {e}"));
                row.push(String::new());
            }
        }
        match bounds {
            Ok(b) => row.extend([f17(b.lower), f17(b.upper_coord), f17(b.upper_membrane)]),
            Err(e) => {
                solver_failures.push(format!("tau={tau}: {e}"));
                row.extend([String::new(), String::new(), String::new()]);
            }
        }
        match omega {
            Ok(w) => row.push(f17(w / tau)),
            Err(_) => row.push(String::new()),
        }
        if let (Ok(w), Ok(b)) = (omega, bounds) {
            if !(b.lower < *w && *w < b.upper_coord.min(b.upper_membrane)) {
                sandwich_failures.push(format!("tau={tau}: omega={w} outside ({}, {})", b.lower, b.upper_coord.min(b.upper_membrane)));
            }
        }
        rows.push(row);
    }
    write_rows(
        &common.out,
        &["tau", "omega", "lower", "upper_coord", "upper_membrane", "ratio"],
        &rows,
    )?;
    if !solver_failures.is_empty() {
        return Err(input_error(solver_failures.join("\n")));
    }
    if !sandwich_failures.is_empty() {
        return Err(Failure {
            code: 1,
            message: sandwich_failures.join("\n"),
        });
    }
    Ok(())
}

fn verify(dims: &[u32], common: &Common) -> Result<(), Failure> {
    if dims.is_empty() {
        return Err(input_error("--dims is empty"));
    }
    if let Some(d) = dims.iter().find(|d| !(2..=30).contains(*d)) {
        return Err(input_error(format!("dimension {d} outside [2, 30]")));
    }
    let reports = run_suite(dims, &SuiteOptions::default()).map_err(ball_failure)?;
    let reports: Vec<_> = match common.tol {
        // exact integer identities keep their zero tolerance
        Some(tol) => reports
            .into_iter()
            .map(|r| if r.check == Check::Zero { r } else { r.with_tolerance(tol) })
            .collect(),
        None => reports,
    };
    let rows: Vec<Vec<String>> = reports.iter().map(|r| r.csv_fields().to_vec()).collect();
    write_rows(&common.out, &CSV_HEADER, &rows)?;
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| match r.d {
            Some(d) => format!("{} (d={d})", r.lemma_id),
            None => r.lemma_id.clone(),
        })
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("failing checks: {}", failing.join(", ")),
        })
    }
}

const STRICT_SIGMAS: f64 = 5.0;

fn quotient(
    path: &PathBuf,
    dim: Option<u32>,
    tau: f64,
    quad: Option<Quad>,
    samples: Option<u64>,
    seed: u64,
    common: &Common,
) -> Result<(), Failure> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(input_error(format!("tau must be positive, got {tau}")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let domain = geom::parse_domain(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if let Some(d) = dim {
        if d != domain.d {
            return Err(input_error(format!("--dim {d} disagrees with dim={} in {}", domain.d, path.display())));
        }
    }
    let spec = match quad {
        None => geom::default_quadrature(domain.d),
        Some(Quad::Radial) => QuadratureSpec::Radial1D,
        Some(Quad::Grid) => QuadratureSpec::TensorGrid {
            cells: u32::try_from(samples.unwrap_or(1024)).map_err(|_| input_error("--samples too large for a grid"))?,
        },
        Some(Quad::Mc) => QuadratureSpec::MonteCarlo {
            samples: samples.unwrap_or(10_000_000),
            seed,
        },
    };
    let r = geom::quotient_bound(&domain, tau, &spec).map_err(|e| input_error(e.to_string()))?;
    let needed = common.tol.unwrap_or(STRICT_SIGMAS);
    let sigmas = r.sigmas();
    let verdict = if sigmas > needed {
        "strict"
    } else if sigmas >= -needed || r.margin().abs() <= 1e-8 * r.omega {
        "equal_within_error"
    } else {
        "violated"
    };
    let center: Vec<String> = r.centering.v.iter().map(|x| f17(*x)).collect();
    let row = vec![
        domain.shape_name().to_string(),
        domain.d.to_string(),
        f17(tau),
        spec.to_string(),
        f17(r.scale),
        center.join(";"),
        f17(r.centering.residual),
        f17(r.q.value),
        f17(r.q.error),
        f17(r.omega),
        f17(r.margin()),
        f17(sigmas),
        verdict.to_string(),
    ];
    write_rows(
        &common.out,
        &[
            "shape", "d", "tau", "quadrature", "scale", "center", "center_residual", "q", "q_error", "omega", "margin",
            "sigmas", "verdict",
        ],
        &[row],
    )?;
    if verdict == "violated" {
        return Err(Failure {
            code: 1,
            message: format!("Q = {} exceeds omega = {} by {:.1} error bars", r.q.value, r.omega, -sigmas),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Tone { dim, tau, radius, common } => tone(dim, tau, radius, &common),
        Command::Sweep {
            dim,
            tau_min,
            tau_max,
            tau_steps,
            log,
            common,
        } => sweep(dim, &tau_grid(tau_min, tau_max, tau_steps, log)?, &common),
        Command::Verify { dims, common } => verify(&dims, &common),
        Command::Quotient {
            domain,
            dim,
            tau,
            quad,
            samples,
            seed,
            common,
        } => quotient(&domain, dim, tau, quad, samples, seed, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
