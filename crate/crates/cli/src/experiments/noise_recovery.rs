//! Recovery of a low-rank matrix from a colored-noise perturbation: relative
//! spectral error `‖A − Ã_k‖/‖A‖` of TSVD, TGSVD, CUR and GCUR over a grid of
//! ranks and noise levels. The inexact variant hands TGSVD and GCUR a
//! perturbed Cholesky factor, redrawn for every trial.

use gcurkit::matkit::spectral_norm;
use gcurkit::method::MethodRegistry;
use gcurkit::synth::{
    lowrank_gapped, lowrank_sparse, perturb_chol_with, scaled_noise, stream_rng, toeplitz_chol, trial_stream,
    NoiseScaling,
};
use gcurkit::DenseMatrix;
use rand::Rng;
use serde_json::json;

use super::{require_eps, require_trials, run_trials, timed, Experiment, ExperimentOutput, ExperimentParams, PlotFile};
use crate::error::{CliError, CliResult};
use crate::plot::{Plot, Series, Style};
use crate::report::{Cell, ExperimentReport};

pub const COLS: usize = 300;
pub const DESK_ROWS: usize = 2000;
pub const DESK_TRIALS: usize = 20;
pub const PAPER_TRIALS: usize = 100;
pub const DEFAULT_EPS: [f64; 4] = [0.05, 0.1, 0.15, 0.2];
pub const GAPPED_RANKS: [usize; 4] = [10, 15, 20, 30];
pub const SPARSE_RANKS: [usize; 9] = [5, 10, 15, 20, 25, 30, 35, 40, 45];
pub const METRIC: &str = "relative_error";

// stream purposes; noise levels use NOISE_BASE + index
const MATRIX: u8 = 0;
const CHOL: u8 = 1;
const NOISE_BASE: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MatrixKind {
    /// Dominant rank-10 part with a large gap.
    #[default]
    Gapped,
    Sparse,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Gapped => "gapped",
            MatrixKind::Sparse => "sparse",
        }
    }

    pub fn paper_rows(self) -> usize {
        match self {
            MatrixKind::Gapped => 10_000,
            MatrixKind::Sparse => 100_000,
        }
    }

    pub fn default_ranks(self) -> &'static [usize] {
        match self {
            MatrixKind::Gapped => &GAPPED_RANKS,
            MatrixKind::Sparse => &SPARSE_RANKS,
        }
    }

    fn generate(self, m: usize, n: usize, seed: u64) -> gcurkit::Result<DenseMatrix> {
        match self {
            MatrixKind::Gapped => lowrank_gapped(m, n, seed),
            MatrixKind::Sparse => lowrank_sparse(m, n, seed),
        }
    }
}

pub struct NoiseRecovery {
    pub inexact: bool,
}

/// Resolved grid for one run.
struct Setup {
    kind: MatrixKind,
    rows: usize,
    ranks: Vec<usize>,
    eps: Vec<f64>,
    trials: usize,
    seed: u64,
    inexact: bool,
}

/// Per trial: `values[e][m][k]` and `millis[e][m][k]`.
struct TrialOutcome {
    values: Vec<Vec<Vec<Result<f64, String>>>>,
    millis: Vec<Vec<Vec<f64>>>,
}

impl TrialOutcome {
    fn failed(setup: &Setup, methods: usize, msg: &str) -> Self {
        TrialOutcome {
            values: vec![vec![vec![Err(msg.to_string()); setup.ranks.len()]; methods]; setup.eps.len()],
            millis: vec![vec![vec![0.0; setup.ranks.len()]; methods]; setup.eps.len()],
        }
    }
}

fn one_trial(setup: &Setup, registry: &MethodRegistry, rchol: &DenseMatrix, t: usize) -> TrialOutcome {
    let methods: Vec<_> = registry.iter().collect();
    let matrix_seed = stream_rng(setup.seed, trial_stream(t, MATRIX)).random::<u64>();
    let a = match setup.kind.generate(setup.rows, COLS, matrix_seed) {
        Ok(a) => a,
        Err(e) => return TrialOutcome::failed(setup, methods.len(), &e.to_string()),
    };
    let norm_a = match spectral_norm(&a) {
        Ok(n) => n,
        Err(e) => return TrialOutcome::failed(setup, methods.len(), &e.to_string()),
    };
    let reference = if setup.inexact {
        perturb_chol_with(rchol, &mut stream_rng(setup.seed, trial_stream(t, CHOL)))
    } else {
        rchol.clone()
    };

    let mut values = Vec::with_capacity(setup.eps.len());
    let mut millis = Vec::with_capacity(setup.eps.len());
    for (e, &epsilon) in setup.eps.iter().enumerate() {
        let mut rng = stream_rng(setup.seed, trial_stream(t, NOISE_BASE + e as u8));
        let a_e = match scaled_noise(&a, rchol, epsilon, NoiseScaling::Relative, &mut rng) {
            Ok(noise) => a.add(&noise),
            Err(err) => {
                let f = TrialOutcome::failed(setup, methods.len(), &err.to_string());
                values.push(f.values.into_iter().next().unwrap_or_default());
                millis.push(f.millis.into_iter().next().unwrap_or_default());
                continue;
            }
        };
        let mut per_method = Vec::with_capacity(methods.len());
        let mut per_method_ms = Vec::with_capacity(methods.len());
        for method in &methods {
            let (prepared, prep_ms) = timed(|| method.prepare(&a_e, Some(&reference)));
            let (row, row_ms): (Vec<_>, Vec<_>) = setup
                .ranks
                .iter()
                .map(|&k| {
                    let (r, ms) = timed(|| {
                        let prepared = prepared.as_ref().map_err(|e| e.to_string())?;
                        let approx = prepared.approximate(k).map_err(|e| e.to_string())?;
                        spectral_norm(&a.sub(&approx)).map(|d| d / norm_a).map_err(|e| e.to_string())
                    });
                    (r, ms + prep_ms)
                })
                .unzip();
            per_method.push(row);
            per_method_ms.push(row_ms);
        }
        values.push(per_method);
        millis.push(per_method_ms);
    }
    TrialOutcome { values, millis }
}

impl NoiseRecovery {
    fn setup(&self, params: &ExperimentParams) -> CliResult<Setup> {
        let kind = params.matrix.unwrap_or_default();
        let rows = match (params.rows, params.paper_scale) {
            (Some(r), _) => r,
            (None, true) => kind.paper_rows(),
            (None, false) => DESK_ROWS,
        };
        if rows < COLS {
            return Err(CliError::Usage(format!("--rows must be at least {COLS}, got {rows}")));
        }
        let ranks = params.ranks.clone().unwrap_or_else(|| kind.default_ranks().to_vec());
        if ranks.is_empty() || ranks.iter().any(|&k| k == 0 || k >= COLS) {
            return Err(CliError::Usage(format!("ranks must lie in 1..{COLS}, got {ranks:?}")));
        }
        let eps = params.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
        require_eps(&eps)?;
        if eps.len() > usize::from(u8::MAX - NOISE_BASE) {
            return Err(CliError::Usage("too many noise levels".into()));
        }
        let default_trials = if params.paper_scale { PAPER_TRIALS } else { DESK_TRIALS };
        let trials = require_trials(params.trials.unwrap_or(default_trials))?;
        Ok(Setup {
            kind,
            rows,
            ranks,
            eps,
            trials,
            seed: params.seed,
            inexact: self.inexact || params.inexact_chol,
        })
    }
}

impl Experiment for NoiseRecovery {
    fn name(&self) -> &'static str {
        if self.inexact {
            "noise-recovery-inexact"
        } else {
            "noise-recovery"
        }
    }

    fn description(&self) -> &'static str {
        if self.inexact {
            "noise-recovery with a perturbed Cholesky factor of the noise covariance"
        } else {
            "relative error of TSVD, TGSVD, CUR and GCUR on a low-rank matrix plus colored noise"
        }
    }

    fn run(&self, params: &ExperimentParams) -> CliResult<ExperimentOutput> {
        let setup = self.setup(params)?;
        if !(params.rho > 0.0 && params.rho < 1.0) {
            return Err(CliError::Usage(format!("--rho must lie in (0, 1), got {}", params.rho)));
        }
        let rchol = toeplitz_chol(COLS, params.rho)?;
        let registry = MethodRegistry::standard();
        let outcomes = run_trials(setup.trials, |t| one_trial(&setup, &registry, &rchol, t));

        let parameters = json!({
            "matrix": setup.kind.as_str(),
            "rows": setup.rows,
            "cols": COLS,
            "ranks": setup.ranks,
            "eps": setup.eps,
            "trials": setup.trials,
            "seed": setup.seed,
            "rho": params.rho,
            "inexact_chol": setup.inexact,
            "paper_scale": params.paper_scale,
            "noise_scaling": "relative",
            "norm": "spectral",
        });
        let mut report = ExperimentReport::new(self.name(), parameters, params.timing);
        let names = registry.names();
        for (e, &epsilon) in setup.eps.iter().enumerate() {
            for (m, method) in names.iter().enumerate() {
                for (ki, &k) in setup.ranks.iter().enumerate() {
                    let values: Vec<_> = outcomes.iter().map(|o| o.values[e][m][ki].clone()).collect();
                    let mut cell = Cell::from_outcomes(method, Some(k), Some(epsilon), METRIC, &values);
                    if params.timing {
                        cell.wall_clock_ms = Some(outcomes.iter().map(|o| o.millis[e][m][ki]).sum());
                    }
                    report.cells.push(cell);
                }
            }
        }

        let plots = setup
            .eps
            .iter()
            .map(|&epsilon| {
                let series: Vec<Series> = names
                    .iter()
                    .map(|method| Series {
                        name: method.to_string(),
                        points: setup
                            .ranks
                            .iter()
                            .map(|&k| {
                                let c = report.cell(method, Some(k), Some(epsilon), METRIC);
                                (k as f64, c.map_or(f64::NAN, |c| c.mean))
                            })
                            .collect(),
                    })
                    .collect();
                let title = format!("{} ({}, eps = {epsilon})", self.name(), setup.kind.as_str());
                PlotFile {
                    name: format!("{}_{}_eps{epsilon}.svg", self.name(), setup.kind.as_str()),
                    svg: Plot {
                        title: &title,
                        x_label: "k",
                        y_label: "relative error",
                        style: Style::Line,
                        log_y: true,
                    }
                    .render(&series),
                }
            })
            .collect();
        Ok(ExperimentOutput { report, plots })
    }
}
