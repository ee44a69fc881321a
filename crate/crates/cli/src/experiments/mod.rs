//! Seeded reproduction experiments, selectable by name.
//!
//! Trials run on the rayon pool; trial `t` draws only from
//! `stream_rng(seed, trial_stream(t, purpose))`, and results are collected in
//! trial order before any statistic is taken, so reports do not depend on
//! scheduling or thread count.

pub mod classify;
mod intro_angles;
mod noise_recovery;
mod subgroups;

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::report::ExperimentReport;

pub use intro_angles::IntroAngles;
pub use noise_recovery::{MatrixKind, NoiseRecovery};
pub use subgroups::Subgroups;

/// Options shared by all experiments; `None` selects the experiment default.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentParams {
    pub ranks: Option<Vec<usize>>,
    pub eps: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub rho: f64,
    pub inexact_chol: bool,
    pub paper_scale: bool,
    pub matrix: Option<MatrixKind>,
    pub rows: Option<usize>,
    /// Record the timestamp and wall-clock times.
    pub timing: bool,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            ranks: None,
            eps: None,
            trials: None,
            seed: 0,
            rho: 0.99,
            inexact_chol: false,
            paper_scale: false,
            matrix: None,
            rows: None,
            timing: false,
        }
    }
}

/// An SVG written next to the report.
#[derive(Clone, Debug)]
pub struct PlotFile {
    pub name: String,
    pub svg: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub plots: Vec<PlotFile>,
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, params: &ExperimentParams) -> CliResult<ExperimentOutput>;
}

pub struct ExperimentRegistry {
    experiments: Vec<Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn standard() -> Self {
        ExperimentRegistry {
            experiments: vec![
                Box::new(IntroAngles),
                Box::new(NoiseRecovery { inexact: false }),
                Box::new(NoiseRecovery { inexact: true }),
                Box::new(Subgroups),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.experiments.iter().find(|e| e.name() == name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.experiments.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.experiments.iter().map(|e| e.as_ref())
    }
}

/// Looks up and runs `name`.
pub fn run_experiment(name: &str, params: &ExperimentParams) -> CliResult<ExperimentOutput> {
    let reg = ExperimentRegistry::standard();
    let exp = reg.get(name).ok_or_else(|| {
        CliError::Usage(format!("unknown experiment '{name}'; expected one of {}", reg.names().join(", ")))
    })?;
    exp.run(params)
}

/// Runs `f` for trials `0..n` on the current pool, returning results in trial order.
pub fn run_trials<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// `f()` and its duration in milliseconds.
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

pub(crate) fn require_trials(trials: usize) -> CliResult<usize> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(trials)
}

pub(crate) fn require_eps(eps: &[f64]) -> CliResult<()> {
    if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(CliError::Usage(format!("noise levels must be finite and nonnegative, got {eps:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        assert_eq!(
            ExperimentRegistry::standard().names(),
            vec!["intro-angles", "noise-recovery", "noise-recovery-inexact", "subgroups"]
        );
        assert!(matches!(
            run_experiment("nope", &ExperimentParams::default()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn trials_come_back_in_order() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let v = pool.install(|| run_trials(100, |t| t * 2));
        assert_eq!(v, (0..100).map(|t| t * 2).collect::<Vec<_>>());
    }
}
