//! Subcritical minimization of `Q_p`, continuation `p ↗ (n+2σ)/(n−2σ)` and
//! blow-up diagnostics.

mod config;
mod continuation;
mod minimize;
mod report;

pub use config::{ArgmaxMethod, SolverConfig, Symmetry};
pub use continuation::{
    continuation_to_critical, superlinear_growth, tau_schedule, write_trajectory_csv, Continuation,
    TrajectoryRow, Verdict,
};
pub use minimize::{euler_lagrange_residual, random_initial_field, subcritical_minimize, Minimizer, SolverState};
pub use report::{
    blowup_report, blowup_report_spectral, count_critical_points, spherical_average_profile, BlowupReport,
};
