//! `fracsphere`: experiment runner for fractional Nirenberg problems on spheres.

mod config;
mod verify;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsphere_core::conformal::{pull_to_plane, ConformalSpectrum};
use fracsphere_core::functionals::{index_count_check, test_function_slope};
use fracsphere_core::local_estimates::{run_ensemble, write_ensemble_csv};
use fracsphere_core::solver::{
    continuation_to_critical, euler_lagrange_residual, spherical_average_profile, subcritical_minimize,
    write_trajectory_csv,
};
use fracsphere_core::sphere::{Grid, Mode};
use fracsphere_core::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use config::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(name = "fracsphere", version, about = "Fractional Nirenberg problem experiments on S^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Eigenvalue table of P_σ up to degree L.
    Spectrum,
    /// Identity suite: bubbles, sharp constants, Funk–Hecke, Pohozaev, Kazdan–Warner.
    Verify,
    /// Minimize the subcritical quotient at the first τ of the schedule.
    Solve,
    /// Follow minimizers along the τ schedule and classify the limit.
    Continue,
    /// Fit the β → 1 slope of the quotient of the antipodal test function.
    Testfn,
    /// Random-potential ensemble for the linear integral equation.
    Harnack,
    /// Index-count hypothesis from the declared critical points of K.
    Index,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Spectral degree cap.
    #[arg(long = "L", global = true)]
    degree_cap: Option<usize>,
    /// K profile: JSON, a path to a JSON profile, or an inline form such as
    /// `2+height`, `const:1`, `zonal:1,0,-0.5`, `file:coeffs.json`.
    #[arg(long = "K", global = true)]
    k: Option<String>,
    /// `a:b:steps`.
    #[arg(long, global = true)]
    tau_schedule: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Zonal,
    FullS2,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Zonal => Mode::Zonal,
            ModeArg::FullS2 => Mode::FullS2,
        }
    }
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Verify => "verify",
            Command::Solve => "solve",
            Command::Continue => "continue",
            Command::Testfn => "testfn",
            Command::Harnack => "harnack",
            Command::Index => "index",
        }
    }
}

/// Exit status of a completed run.
enum Outcome {
    Success,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("usage", &e.to_string());
            return ExitCode::from(2);
        }
    };
    if let Some(threads) = std::env::var("FRACSPHERE_THREADS").ok().and_then(|t| t.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global().ok();
    }
    let result = ExperimentConfig::resolve(cli.command.name(), &cli.common).and_then(|config| run(cli.command, &config));
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            let (kind, code) = classify(&e);
            report_error(kind, &e.to_string());
            ExitCode::from(code)
        }
    }
}

fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Divergence(_) => ("divergence", 3),
        Error::Positivity(_) => ("positivity", 3),
        Error::NonConvergence(_) => ("non_convergence", 3),
        Error::NearSingular(_) => ("near_singular", 3),
        Error::Io(_) => ("io", 2),
        Error::Json(_) => ("config", 2),
        _ => ("validation", 2),
    }
}

fn report_error(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message.trim() }));
}

fn run(command: Command, config: &ExperimentConfig) -> Result<Outcome> {
    fs::create_dir_all(&config.out)?;
    let mut outcome = Outcome::Success;
    let result: Value = match command {
        Command::Spectrum => {
            let spec = ConformalSpectrum::new(config.n, config.sigma, config.degree_cap)?;
            println!("k,e_k");
            for (k, e) in spec.eigenvalues().iter().enumerate() {
                println!("{k},{e:.16e}");
            }
            json!({
                "eigenvalues": spec.eigenvalues(),
                "c_n_sigma": spec.c_n_sigma(),
                "riesz_constant": spec.riesz_constant(),
                "critical_exponent": spec.critical_exponent(),
            })
        }
        Command::Verify => {
            let checks = verify::run(config.solver.geometry()?, config.sigma)?;
            for c in &checks {
                let status = match (&c.note, c.passed) {
                    (Some(_), _) => "SKIP",
                    (None, true) => "PASS",
                    (None, false) => "FAIL",
                };
                println!("{status} {} value={:.6e}", c.name, c.value);
            }
            let all = checks.iter().all(|c| c.passed);
            if !all {
                outcome = Outcome::ChecksFailed;
            }
            json!({ "all_passed": all, "checks": checks })
        }
        Command::Solve => {
            let m = subcritical_minimize(&config.k, &config.solver, None)?;
            let grid = Grid::with_rings(config.solver.geometry()?, config.solver.ring_count())?;
            let spec = ConformalSpectrum::new(config.n, config.sigma, config.degree_cap)?;
            let (residual, _) = euler_lagrange_residual(&m.coeffs, &config.k, config.solver.exponent(), &grid, &spec)?;
            println!("lambda_p = {:.16e} after {} iterations", m.lambda, m.state.iterations);
            json!({
                "lambda_p": m.lambda,
                "euler_lagrange_residual": residual,
                "state": m.state,
                "coefficients": m.coeffs.to_json(),
            })
        }
        Command::Continue => {
            let schedule = config.tau_schedule.values()?;
            let c = continuation_to_critical(&config.k, &schedule, &config.solver)?;
            write_csv(config, "trajectory.csv", |w| write_trajectory_csv(&c.rows, w))?;
            if let Some(last) = c.reports.last() {
                let u = pull_to_plane(&c.last.coeffs, config.sigma).centered_at(&last.center);
                let rho = config.solver.rho;
                let radii: Vec<f64> = (0..400).map(|j| rho * 10f64.powf(-8.0 * (1.0 - j as f64 / 399.0))).collect();
                let p = critical_exponent_minus(config, last.tau);
                let (ubar, wbar) = spherical_average_profile(&|x: &[f64]| u.eval(x), config.n, &radii, p, config.sigma)?;
                write_csv(config, "profile.csv", |w| {
                    writeln!(w, "r,ubar,wbar")?;
                    for ((r, a), b) in radii.iter().zip(&ubar).zip(&wbar) {
                        writeln!(w, "{r:.16e},{a:.16e},{b:.16e}")?;
                    }
                    Ok(())
                })?;
            }
            println!("verdict: {}", serde_json::to_value(c.verdict)?.as_str().unwrap_or_default());
            json!({
                "verdict": c.verdict,
                "critical_residual": c.critical_residual,
                "final_lambda": c.last.lambda,
                "reports": c.reports,
            })
        }
        Command::Testfn => {
            let spec = ConformalSpectrum::new(config.n, config.sigma, 0)?;
            let s = &config.testfn;
            let fit = test_function_slope(&config.k, &spec, s.beta_lo, s.beta_hi, s.samples)?;
            println!("slope {:.6} expected {:.6} relative error {:.3e}", fit.slope, fit.expected, fit.relative_error());
            json!({ "fit": fit, "relative_error": fit.relative_error() })
        }
        Command::Harnack => {
            let report = run_ensemble(&config.ensemble)?;
            write_csv(config, "ensemble.csv", |w| Ok(write_ensemble_csv(&report.rows, w)?))?;
            println!(
                "max Harnack ratio {:.6}, min u − h {:.3e}",
                report.max_harnack_ratio, report.min_positivity_margin
            );
            serde_json::to_value(&report)?
        }
        Command::Index => {
            let count = index_count_check(&config.k, config.n)?;
            println!("index sum {} (hypothesis holds: {})", count.sum, count.hypothesis_holds);
            serde_json::to_value(count)?
        }
    };
    let summary = Summary { config, result };
    let text = serde_json::to_string_pretty(&summary)?;
    fs::write(config.out.join("summary.json"), text + "\n")?;
    Ok(outcome)
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    result: Value,
}

fn critical_exponent_minus(config: &ExperimentConfig, tau: f64) -> f64 {
    fracsphere_core::conformal::critical_exponent(config.n, config.sigma) - tau
}

/// Write a CSV report whose first line is the resolved config as a
/// `#`-prefixed JSON comment.
fn write_csv(config: &ExperimentConfig, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = format!("# config: {}\n", serde_json::to_string(config)?).into_bytes();
    body(&mut buf)?;
    fs::write(config.out.join(name), buf)?;
    Ok(())
}
