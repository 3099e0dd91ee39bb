use std::io::Write;

use serde::Serialize;

use super::config::SolverConfig;
use super::minimize::{euler_lagrange_residual, minimize_in, Minimizer, Workspace};
use super::report::{blowup_report_spectral, BlowupReport};
use crate::error::{domain, Error, Result};
use crate::functionals::{kazdan_warner_all, KProfile};

/// Relative growth of successive increments of `max v` that counts as
/// superlinear.
const SUPERLINEAR_FACTOR: f64 = 1.1;
/// Consecutive superlinear increments that trigger a blow-up verdict.
const SUPERLINEAR_RUN: usize = 3;
/// Increments below this fraction of `max v` are treated as stationary.
const STATIONARY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Blowup,
    /// Neither the blow-up trigger nor the critical residual test fired.
    Inconclusive,
}

/// One row of the continuation trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub tau: f64,
    pub iterations: usize,
    pub lambda_p: f64,
    pub max_v: f64,
    pub grad_norm: f64,
    pub hs_norm: f64,
    pub kw_residual_max: f64,
    pub profile_error: f64,
    pub tphi_error: f64,
    pub wbar_critpts: usize,
}

#[derive(Debug, Clone)]
pub struct Continuation {
    pub rows: Vec<TrajectoryRow>,
    pub reports: Vec<BlowupReport>,
    pub verdict: Verdict,
    /// `‖P_σ v − λ K v^{p★}‖/‖P_σ v‖` of the last solution at the critical
    /// exponent `p★`.
    pub critical_residual: f64,
    pub last: Minimizer,
}

/// A decreasing τ schedule: geometric from `a` to `b` when `b > 0`, linear
/// otherwise.
pub fn tau_schedule(a: f64, b: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(a > b) || !(b >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "τ schedule needs a > b ≥ 0 and at least two steps, got {a}:{b}:{steps}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let s = i as f64 / last;
            if b > 0.0 {
                a * (b / a).powf(s)
            } else {
                a + (b - a) * s
            }
        })
        .collect())
}

/// Does the tail of `maxima` end in [`SUPERLINEAR_RUN`] consecutive
/// superlinear increases?
pub fn superlinear_growth(maxima: &[f64]) -> bool {
    if maxima.len() < SUPERLINEAR_RUN + 2 {
        return false;
    }
    let d: Vec<f64> = maxima.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &d[d.len() - SUPERLINEAR_RUN - 1..];
    let base = &maxima[maxima.len() - SUPERLINEAR_RUN - 2..];
    tail.windows(2).enumerate().all(|(i, w)| {
        w[0] > STATIONARY * base[i] && w[1] > SUPERLINEAR_FACTOR * w[0]
    })
}

/// Warm-started minimization along a decreasing τ schedule, with a blow-up
/// report at each step.
pub fn continuation_to_critical(k: &KProfile, schedule: &[f64], config: &SolverConfig) -> Result<Continuation> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] >= w[0]) || schedule[schedule.len() - 1] < 0.0 {
        return domain("τ schedule must decrease strictly to a value ≥ 0");
    }
    let n = config.n;
    let nf = n as f64;
    let q = 2.0 * nf / (nf - 2.0 * config.sigma);
    let grad_sup = {
        let probe = Workspace::new(k, &SolverConfig { tau: schedule[0], ..config.clone() })?;
        k.gradient_sup(&probe.grid)
    };
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut maxima = Vec::new();
    let mut warm = None;
    let mut last = None;
    let mut verdict = Verdict::Inconclusive;
    for &tau in schedule {
        let step = SolverConfig { tau, ..config.clone() };
        let ws = Workspace::new(k, &step)?;
        let min = minimize_in(&ws, &step, warm.as_ref())?;
        let p = step.exponent();
        let report = blowup_report_spectral(&min.coeffs, p, k, min.lambda, &step)?;
        let nodal = min.nodal();
        let weight: f64 = nodal.values().iter().zip(ws.grid.weights()).map(|(v, w)| w * v.abs().powf(q)).sum();
        let kw = kazdan_warner_all(nodal, k, config.sigma)?;
        let kw_max = if grad_sup > 0.0 {
            kw.iter().fold(0.0f64, |a, x| a.max(x.abs())) / (grad_sup * weight)
        } else {
            0.0
        };
        rows.push(TrajectoryRow {
            tau,
            iterations: min.state.iterations,
            lambda_p: min.lambda,
            max_v: report.m,
            grad_norm: min.state.gradient_norm,
            hs_norm: report.hs_norm.unwrap_or(f64::NAN),
            kw_residual_max: kw_max,
            profile_error: report.profile_error,
            tphi_error: report.tphi_error,
            wbar_critpts: report.wbar_critical_points,
        });
        maxima.push(report.m);
        let blown = report.blowup || superlinear_growth(&maxima);
        reports.push(report);
        warm = Some(min.coeffs.clone());
        last = Some(min);
        if blown {
            verdict = Verdict::Blowup;
            break;
        }
    }
    let last = last.expect("schedule is non-empty");
    let ws = Workspace::new(k, &SolverConfig { tau: 0.0, ..config.clone() })?;
    let (critical_residual, _) =
        euler_lagrange_residual(&last.coeffs, k, crate::conformal::critical_exponent(n, config.sigma), &ws.grid, &ws.spec)?;
    if verdict != Verdict::Blowup && critical_residual <= config.critical_tolerance {
        verdict = Verdict::Converged;
    }
    Ok(Continuation { rows, reports, verdict, critical_residual, last })
}

const TRAJECTORY_HEADER: &str =
    "tau,iterations,lambda_p,max_v,grad_norm,hs_norm,kw_residual_max,profile_error,tphi_error,wbar_critpts";

/// Write the trajectory as CSV, floats in `{:.16e}`.
pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], mut w: W) -> Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.tau,
            r.iterations,
            r.lambda_p,
            r.max_v,
            r.grad_norm,
            r.hs_norm,
            r.kw_residual_max,
            r.profile_error,
            r.tphi_error,
            r.wbar_critpts
        )?;
    }
    Ok(())
}
