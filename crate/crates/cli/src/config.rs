use std::path::{Path, PathBuf};

use fracsphere_core::functionals::{KKind, KProfile};
use fracsphere_core::local_estimates::EnsembleConfig;
use fracsphere_core::solver::{tau_schedule, SolverConfig};
use fracsphere_core::sphere::Mode;
use fracsphere_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CommonArgs;

/// `a:b:steps`, geometric from `a` to `b` when `b > 0` and linear otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSchedule {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Default for TauSchedule {
    fn default() -> Self {
        Self { start: 1.0, end: 1e-3, steps: 16 }
    }
}

impl TauSchedule {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::InvalidConfig(format!("τ schedule must read a:b:steps, got {text:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Self {
            start: parts[0].trim().parse().map_err(|_| bad())?,
            end: parts[1].trim().parse().map_err(|_| bad())?,
            steps: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        tau_schedule(self.start, self.end, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestFnSettings {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub samples: usize,
}

impl Default for TestFnSettings {
    fn default() -> Self {
        Self { beta_lo: 1.00001, beta_hi: 1.0001, samples: 12 }
    }
}

/// The config file as written by the user. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    n: Option<usize>,
    sigma: Option<f64>,
    mode: Option<Mode>,
    #[serde(rename = "L")]
    degree_cap: Option<usize>,
    #[serde(rename = "K")]
    k: Option<Value>,
    tau_schedule: Option<Value>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    solver: Option<Value>,
    ensemble: Option<Value>,
    testfn: Option<TestFnSettings>,
}

/// The fully resolved experiment, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub n: usize,
    pub sigma: f64,
    pub mode: Mode,
    #[serde(rename = "L")]
    pub degree_cap: usize,
    #[serde(rename = "K")]
    pub k: KProfile,
    pub tau_schedule: TauSchedule,
    pub seed: u64,
    pub out: PathBuf,
    pub solver: SolverConfig,
    pub ensemble: EnsembleConfig,
    pub testfn: TestFnSettings,
}

impl ExperimentConfig {
    pub fn resolve(subcommand: &str, args: &CommonArgs) -> Result<Self> {
        let (file, base) = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let file: ConfigFile = serde_json::from_str(&text)?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let (default_n, default_sigma) = if subcommand == "harnack" { (2, 0.5) } else { (3, 1.0) };
        let n = args.n.or(file.n).unwrap_or(default_n);
        let sigma = args.sigma.or(file.sigma).unwrap_or(default_sigma);
        let mode = args.mode.map(Mode::from).or(file.mode).unwrap_or(Mode::Zonal);
        let degree_cap = args.degree_cap.or(file.degree_cap).unwrap_or(64);
        let seed = args.seed.or(file.seed).unwrap_or(0);
        let out = args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out"));

        let mut k = match (&args.k, &file.k) {
            (Some(text), _) => parse_k(text, n, Path::new(""))?,
            (None, Some(Value::String(text))) => parse_k(text, n, &base)?,
            (None, Some(value)) => relative_to(serde_json::from_value(value.clone())?, &base),
            (None, None) => KProfile::constant(1.0),
        };
        k.resolve(n)?;

        let tau_schedule = match (&args.tau_schedule, &file.tau_schedule) {
            (Some(text), _) => TauSchedule::parse(text)?,
            (None, Some(Value::String(text))) => TauSchedule::parse(text)?,
            (None, Some(value)) => serde_json::from_value(value.clone())?,
            (None, None) => TauSchedule::default(),
        };

        let mut solver: SolverConfig = match file.solver {
            Some(v) => serde_json::from_value(v)?,
            None => SolverConfig::default(),
        };
        solver.n = n;
        solver.sigma = sigma;
        solver.mode = mode;
        solver.degree_cap = degree_cap;
        solver.tau = tau_schedule.start;
        solver.seed = seed;
        if matches!(subcommand, "solve" | "continue") {
            solver.validate()?;
        }

        let mut ensemble: EnsembleConfig = match file.ensemble {
            Some(v) => serde_json::from_value(v)?,
            None => EnsembleConfig::default(),
        };
        ensemble.first_seed = seed;
        if subcommand == "harnack" {
            ensemble.n = n;
            ensemble.sigma = sigma;
        }

        Ok(Self {
            subcommand: subcommand.to_string(),
            n,
            sigma,
            mode,
            degree_cap,
            k,
            tau_schedule,
            seed,
            out,
            solver,
            ensemble,
            testfn: file.testfn.unwrap_or_default(),
        })
    }
}

/// Inline forms, JSON text, or a path to a JSON profile.
fn parse_k(text: &str, n: usize, base: &Path) -> Result<KProfile> {
    let trimmed = text.trim();
    if trimmed.ends_with(".json") && !trimmed.contains(':') {
        return KProfile::from_file(&base.join(trimmed), n);
    }
    Ok(relative_to(KProfile::parse(trimmed)?, base))
}

fn relative_to(mut k: KProfile, base: &Path) -> KProfile {
    if let KKind::SpectralFile { path, .. } = &mut k.kind {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
    k
}
