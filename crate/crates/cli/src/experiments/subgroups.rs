//! Subgroup discovery on the contrastive four-group dataset: columns chosen
//! by CUR (on the target alone) and GCUR (target relative to background),
//! scored by nearest-centroid cross-validation and cluster separation.
//! TSVD and TGSVD projections are scored the same way for reference.

use gcurkit::deim::deim_select;
use gcurkit::gsvd::gsvd;
use gcurkit::matkit::svd;
use gcurkit::synth::{stream_rng, subgroup_data, trial_stream, SubgroupSpec, GROUPS};
use gcurkit::DenseMatrix;
use rand::Rng;
use serde_json::{json, Value};

use super::classify::{cv_error, separation};
use super::{require_trials, run_trials, timed, Experiment, ExperimentOutput, ExperimentParams, PlotFile};
use crate::error::{CliError, CliResult};
use crate::plot::{Plot, Series, Style};
use crate::report::{Cell, ExperimentReport};

pub const DEFAULT_RANKS: [usize; 3] = [2, 5, 10];
pub const DEFAULT_TRIALS: usize = 10;
pub const FOLDS: usize = 10;
pub const METHODS: [&str; 4] = ["tsvd", "tgsvd", "cur", "gcur"];

// stream purposes
const DATA: u8 = 0;
const FOLD_BASE: u8 = 1;

/// Rank-independent factorizations of one dataset.
struct Bases {
    /// Right singular vectors of the target.
    z: DenseMatrix,
    /// Target scores `A·Z`.
    svd_scores: DenseMatrix,
    y: DenseMatrix,
    /// `U·Γ`, the target in generalized coordinates.
    gsvd_scores: DenseMatrix,
}

impl Bases {
    fn new(a: &DenseMatrix, b: &DenseMatrix) -> gcurkit::Result<Self> {
        let s = svd(a)?;
        let g = gsvd(a, b)?;
        Ok(Bases {
            svd_scores: s.w.scale_cols(&s.psi),
            z: s.z,
            gsvd_scores: g.u.scale_cols(&g.gamma),
            y: g.y,
        })
    }

    /// Reduced data for `method` at rank `k`, with the selected columns for CUR/GCUR.
    fn reduce(&self, a: &DenseMatrix, method: &str, k: usize) -> gcurkit::Result<(DenseMatrix, Option<Vec<usize>>)> {
        match method {
            "tsvd" => Ok((self.svd_scores.leading_cols(k), None)),
            "tgsvd" => Ok((self.gsvd_scores.leading_cols(k), None)),
            "cur" | "gcur" => {
                let basis = if method == "cur" { &self.z } else { &self.y };
                let p = deim_select(&basis.leading_cols(k), k)?;
                Ok((a.select_cols(p.as_slice()), Some(p.as_slice().to_vec())))
            }
            other => unreachable!("unknown method {other}"),
        }
    }
}

/// Per trial, `[k][method]` for the error and `[method]` for separation.
struct TrialOutcome {
    cv: Vec<Vec<Result<f64, String>>>,
    millis: Vec<Vec<f64>>,
    separation: Vec<Result<f64, String>>,
    /// Extras from trial 0 only.
    extras: Option<Value>,
}

fn one_trial(ranks: &[usize], seed: u64, t: usize) -> TrialOutcome {
    let fail = |msg: String| TrialOutcome {
        cv: vec![vec![Err(msg.clone()); METHODS.len()]; ranks.len()],
        millis: vec![vec![0.0; METHODS.len()]; ranks.len()],
        separation: vec![Err(msg.clone()); METHODS.len()],
        extras: None,
    };
    let spec = SubgroupSpec {
        center: true,
        seed: stream_rng(seed, trial_stream(t, DATA)).random::<u64>(),
        ..Default::default()
    };
    let data = match subgroup_data(&spec) {
        Ok(d) => d,
        Err(e) => return fail(e.to_string()),
    };
    let (bases, prep_ms) = timed(|| Bases::new(&data.a, &data.b));
    let bases = match bases {
        Ok(b) => b,
        Err(e) => return fail(e.to_string()),
    };

    let mut cv = Vec::with_capacity(ranks.len());
    let mut millis = Vec::with_capacity(ranks.len());
    for (ki, &k) in ranks.iter().enumerate() {
        let mut row = Vec::with_capacity(METHODS.len());
        let mut row_ms = Vec::with_capacity(METHODS.len());
        for (m, method) in METHODS.iter().enumerate() {
            let purpose = FOLD_BASE + (ki * METHODS.len() + m) as u8;
            let (r, ms) = timed(|| {
                let (x, _) = bases.reduce(&data.a, method, k).map_err(|e| e.to_string())?;
                Ok(cv_error(&x, &data.labels, FOLDS, &mut stream_rng(seed, trial_stream(t, purpose))))
            });
            row.push(r);
            row_ms.push(ms + prep_ms);
        }
        cv.push(row);
        millis.push(row_ms);
    }

    let mut sep = Vec::with_capacity(METHODS.len());
    let mut coords = serde_json::Map::new();
    for method in METHODS {
        match bases.reduce(&data.a, method, 2) {
            Ok((x, cols)) => {
                sep.push(Ok(separation(&x, &data.labels)));
                if t == 0 {
                    coords.insert(
                        method.to_string(),
                        json!({
                            "columns": cols.map(|c| c.iter().map(|i| i + 1).collect::<Vec<_>>()),
                            "x": x.col(0),
                            "y": x.col(1),
                        }),
                    );
                }
            }
            Err(e) => sep.push(Err(e.to_string())),
        }
    }
    let extras = (t == 0).then(|| {
        json!({
            "labels": data.labels.iter().map(|&g| GROUPS[g]).collect::<Vec<_>>(),
            "coordinates": coords,
        })
    });
    TrialOutcome {
        cv,
        millis,
        separation: sep,
        extras,
    }
}

fn scatter(method: &str, projection: &Value) -> Option<PlotFile> {
    let labels: Vec<&str> = projection["labels"].as_array()?.iter().filter_map(|v| v.as_str()).collect();
    let coords = &projection["coordinates"][method];
    let xs: Vec<f64> = coords["x"].as_array()?.iter().filter_map(|v| v.as_f64()).collect();
    let ys: Vec<f64> = coords["y"].as_array()?.iter().filter_map(|v| v.as_f64()).collect();
    let series: Vec<Series> = GROUPS
        .iter()
        .map(|g| Series {
            name: g.to_string(),
            points: labels
                .iter()
                .zip(xs.iter().zip(&ys))
                .filter(|(l, _)| *l == g)
                .map(|(_, (&x, &y))| (x, y))
                .collect(),
        })
        .collect();
    let title = format!("subgroups: {method}, two leading coordinates");
    Some(PlotFile {
        name: format!("subgroups_{method}.svg"),
        svg: Plot {
            title: &title,
            x_label: "coordinate 1",
            y_label: "coordinate 2",
            style: Style::Scatter,
            log_y: false,
        }
        .render(&series),
    })
}

pub struct Subgroups;

impl Experiment for Subgroups {
    fn name(&self) -> &'static str {
        "subgroups"
    }

    fn description(&self) -> &'static str {
        "column selection by CUR vs GCUR on four planted subgroups, nearest-centroid CV error and separation"
    }

    fn run(&self, params: &ExperimentParams) -> CliResult<ExperimentOutput> {
        let ranks = params.ranks.clone().unwrap_or_else(|| DEFAULT_RANKS.to_vec());
        let width = 3 * gcurkit::synth::BLOCK_WIDTH;
        if ranks.is_empty() || ranks.iter().any(|&k| k < 2 || k > width) {
            return Err(CliError::Usage(format!("ranks must lie in 2..={width}, got {ranks:?}")));
        }
        if ranks.len() * METHODS.len() + usize::from(FOLD_BASE) > 256 {
            return Err(CliError::Usage("too many ranks".into()));
        }
        let trials = require_trials(params.trials.unwrap_or(DEFAULT_TRIALS))?;
        let outcomes = run_trials(trials, |t| one_trial(&ranks, params.seed, t));

        let parameters = json!({
            "ranks": ranks,
            "trials": trials,
            "seed": params.seed,
            "points_per_group": SubgroupSpec::default().points_per_group,
            "folds": FOLDS,
            "centered": true,
            "classifier": "nearest_centroid_pooled_std",
        });
        let mut report = ExperimentReport::new(self.name(), parameters, params.timing);
        for (ki, &k) in ranks.iter().enumerate() {
            for (m, method) in METHODS.iter().enumerate() {
                let values: Vec<_> = outcomes.iter().map(|o| o.cv[ki][m].clone()).collect();
                let mut cell = Cell::from_outcomes(method, Some(k), None, "cv_error", &values);
                if params.timing {
                    cell.wall_clock_ms = Some(outcomes.iter().map(|o| o.millis[ki][m]).sum());
                }
                report.cells.push(cell);
            }
        }
        for (m, method) in METHODS.iter().enumerate() {
            let values: Vec<_> = outcomes.iter().map(|o| o.separation[m].clone()).collect();
            report.cells.push(Cell::from_outcomes(method, Some(2), None, "separation", &values));
        }

        let mut plots = Vec::new();
        if let Some(projection) = outcomes.first().and_then(|o| o.extras.clone()) {
            plots = METHODS.iter().filter_map(|m| scatter(m, &projection)).collect();
            report.extras.insert("projection".into(), projection);
        }
        Ok(ExperimentOutput { report, plots })
    }
}
