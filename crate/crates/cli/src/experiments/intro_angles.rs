//! Subspace recovery on the 3×3 motivating example: largest principal angle
//! between the rank-2 left subspace of `A` and the subspace estimated from
//! `A + E`, by the SVD of `A + E` and by its GSVD with the noise Cholesky factor.

use gcurkit::gsvd::gsvd;
use gcurkit::matkit::{cholesky_upper, max_principal_angle, svd};
use gcurkit::synth::{scaled_noise, stream_rng, trial_stream, NoiseScaling};
use gcurkit::DenseMatrix;
use serde_json::json;

use super::{require_eps, require_trials, run_trials, timed, Experiment, ExperimentOutput, ExperimentParams, PlotFile};
use crate::error::{CliError, CliResult};
use crate::plot::{Plot, Series, Style};
use crate::report::{Cell, ExperimentReport};

pub const DEFAULT_EPS: [f64; 3] = [5e-2, 5e-3, 5e-4];
pub const DEFAULT_TRIALS: usize = 1000;
const RANK: usize = 2;
const METHODS: [&str; 2] = ["svd", "gsvd"];

pub fn fixture_a() -> DenseMatrix {
    DenseMatrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 2.0, 2.0], [1.0, 1.0, 2.0]]).expect("fixture")
}

pub fn fixture_covariance() -> DenseMatrix {
    DenseMatrix::from_rows(&[[1.0, 0.8, 0.3], [0.8, 1.0, 0.8], [0.3, 0.8, 1.0]]).expect("fixture")
}

pub struct IntroAngles;

struct TrialOutcome {
    /// `[eps][method]`
    angles: Vec<[Result<f64, String>; 2]>,
    millis: Vec<[f64; 2]>,
}

fn one_trial(
    a: &DenseMatrix,
    rchol: &DenseMatrix,
    exact: &DenseMatrix,
    eps: &[f64],
    seed: u64,
    t: usize,
) -> TrialOutcome {
    let mut angles = Vec::with_capacity(eps.len());
    let mut millis = Vec::with_capacity(eps.len());
    for (e, &epsilon) in eps.iter().enumerate() {
        let mut rng = stream_rng(seed, trial_stream(t, e as u8));
        let a_e = match scaled_noise(a, rchol, epsilon, NoiseScaling::Literal, &mut rng) {
            Ok(noise) => a.add(&noise),
            Err(err) => {
                angles.push([Err(err.to_string()), Err(err.to_string())]);
                millis.push([0.0, 0.0]);
                continue;
            }
        };
        let (by_svd, t_svd) = timed(|| {
            svd(&a_e).and_then(|f| max_principal_angle(exact, &f.w.leading_cols(RANK)))
        });
        let (by_gsvd, t_gsvd) = timed(|| {
            gsvd(&a_e, rchol).and_then(|f| max_principal_angle(exact, &f.u.leading_cols(RANK)))
        });
        angles.push([by_svd.map_err(|e| e.to_string()), by_gsvd.map_err(|e| e.to_string())]);
        millis.push([t_svd, t_gsvd]);
    }
    TrialOutcome { angles, millis }
}

impl Experiment for IntroAngles {
    fn name(&self) -> &'static str {
        "intro-angles"
    }

    fn description(&self) -> &'static str {
        "largest principal angle of the recovered rank-2 subspace, SVD vs GSVD, 3x3 example"
    }

    fn run(&self, params: &ExperimentParams) -> CliResult<ExperimentOutput> {
        let eps = params.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
        require_eps(&eps)?;
        if eps.len() > 256 {
            return Err(CliError::Usage("at most 256 noise levels".into()));
        }
        if let Some(ranks) = &params.ranks {
            if ranks.as_slice() != [RANK] {
                return Err(CliError::Usage(format!("intro-angles is defined for k = {RANK} only")));
            }
        }
        let trials = require_trials(params.trials.unwrap_or(DEFAULT_TRIALS))?;

        let a = fixture_a();
        let rchol = cholesky_upper(&fixture_covariance())?;
        let exact = svd(&a)?.w.leading_cols(RANK);
        let outcomes = run_trials(trials, |t| one_trial(&a, &rchol, &exact, &eps, params.seed, t));

        let parameters = json!({
            "k": RANK,
            "eps": eps,
            "trials": trials,
            "seed": params.seed,
            "noise_scaling": "literal",
            "norm": "spectral",
        });
        let mut report = ExperimentReport::new(self.name(), parameters, params.timing);
        for (e, &epsilon) in eps.iter().enumerate() {
            for (m, method) in METHODS.iter().enumerate() {
                let values: Vec<Result<f64, String>> = outcomes.iter().map(|o| o.angles[e][m].clone()).collect();
                let mut cell = Cell::from_outcomes(method, Some(RANK), Some(epsilon), "max_principal_angle", &values);
                if params.timing {
                    cell.wall_clock_ms = Some(outcomes.iter().map(|o| o.millis[e][m]).sum());
                }
                report.cells.push(cell);
            }
        }

        let series: Vec<Series> = METHODS
            .iter()
            .map(|method| Series {
                name: method.to_string(),
                points: eps
                    .iter()
                    .map(|&epsilon| {
                        let c = report.cell(method, Some(RANK), Some(epsilon), "max_principal_angle");
                        (epsilon.max(f64::MIN_POSITIVE).log10(), c.map_or(f64::NAN, |c| c.mean))
                    })
                    .collect(),
            })
            .collect();
        let svg = Plot {
            title: "intro-angles: mean largest principal angle",
            x_label: "log10 eps",
            y_label: "angle (rad)",
            style: Style::Line,
            log_y: true,
        }
        .render(&series);
        Ok(ExperimentOutput {
            report,
            plots: vec![PlotFile {
                name: "intro-angles.svg".into(),
                svg,
            }],
        })
    }
}
