//! Decomposition subcommands and the experiment driver.

use std::fs;
use std::path::Path;

use gcurkit::curfac::{deim_cur, interpolative, IdMode, Interpolative};
use gcurkit::gcur::{evaluate_bounds_with, gcur_from_gsvd, gcur_interpolative, BoundReport, GcurConfig};
use gcurkit::gsvd::gsvd;
use gcurkit::matkit::{orthonormality_error, smallest_singular_value, spectral_norm};
use gcurkit::DenseMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CurArgs, ExperimentArgs, GcurArgs, GsvdArgs, OutputArgs};
use crate::error::{CliError, CliResult};
use crate::experiments::{run_experiment, ExperimentParams};
use crate::io::{read_matrix, write_matrix};
use crate::report::{emit, render_value};

fn rows_of(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

/// `‖X‖/‖A‖`, or `‖X‖` when `A = 0`.
fn relative(err: f64, norm: f64) -> f64 {
    if norm > 0.0 {
        err / norm
    } else {
        err
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_factors(dir: &Path, factors: &[(&str, &DenseMatrix)]) -> CliResult<Vec<String>> {
    ensure_dir(dir)?;
    factors
        .iter()
        .map(|(name, m)| {
            let path = dir.join(format!("{name}.mtx"));
            write_matrix(&path, m)?;
            Ok(path.display().to_string())
        })
        .collect()
}

fn finish<T: Serialize>(value: &T, out: &OutputArgs) -> CliResult<()> {
    emit(&render_value(value, out.format)?, out.out.as_deref())
}

#[derive(Serialize)]
struct Truncation {
    k: usize,
    error: f64,
    /// `γ_{k+1}·ψ_min(Ŷ)`.
    lower: f64,
    /// `γ_{k+1}·‖Ŷ‖`.
    upper: f64,
    holds: bool,
}

#[derive(Serialize)]
struct GsvdSummary {
    command: &'static str,
    shape_a: (usize, usize),
    shape_b: (usize, usize),
    gamma: Vec<f64>,
    sigma: Vec<f64>,
    /// `γᵢ/σᵢ`; `null` stands for an infinite ratio.
    ratios: Vec<Option<f64>>,
    residual_a: f64,
    residual_b: f64,
    orthonormality_u: f64,
    orthonormality_v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<Truncation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    factor_files: Vec<String>,
}

pub fn cmd_gsvd(args: &GsvdArgs, out: &OutputArgs) -> CliResult<()> {
    let a = read_matrix(&args.a, out.csv_header)?;
    let b = read_matrix(&args.b, out.csv_header)?;
    let f = gsvd(&a, &b)?;
    let truncation = match args.rank {
        Some(k) => {
            let t = f.truncate(k)?;
            let error = spectral_norm(&a.sub(&t.a_k()))?;
            let lower = t.gamma_next() * smallest_singular_value(&t.y_hat)?;
            let upper = t.gamma_next() * spectral_norm(&t.y_hat)?;
            let tol = 1e-9 * spectral_norm(&a)?;
            Some(Truncation {
                k,
                error,
                lower,
                upper,
                holds: lower <= error + tol && error <= upper + tol,
            })
        }
        None => None,
    };
    let factor_files = match &args.factors_dir {
        Some(dir) => {
            let x = f.x()?;
            write_factors(dir, &[("U", &f.u), ("V", &f.v), ("Y", &f.y), ("X", &x)])?
        }
        None => Vec::new(),
    };
    let summary = GsvdSummary {
        command: "gsvd",
        shape_a: a.shape(),
        shape_b: b.shape(),
        ratios: f.ratios().into_iter().map(|r| r.is_finite().then_some(r)).collect(),
        residual_a: relative(spectral_norm(&a.sub(&f.reconstruct_a()))?, spectral_norm(&a)?),
        residual_b: relative(spectral_norm(&b.sub(&f.reconstruct_b()))?, spectral_norm(&b)?),
        orthonormality_u: orthonormality_error(&f.u),
        orthonormality_v: orthonormality_error(&f.v),
        gamma: f.gamma,
        sigma: f.sigma,
        truncation,
        factor_files,
    };
    finish(&summary, out)
}

fn mode_name(mode: IdMode) -> &'static str {
    match mode {
        IdMode::Column => "column",
        IdMode::Row => "row",
    }
}

fn id_summary(a: &DenseMatrix, id: &Interpolative) -> CliResult<Value> {
    Ok(json!({
        "mode": mode_name(id.mode),
        "indices": id.indices.one_based(),
        "relative_error": relative(id.error(a)?, spectral_norm(a)?),
    }))
}

#[derive(Serialize)]
struct CurSummary {
    command: &'static str,
    k: usize,
    p: Vec<usize>,
    s: Vec<usize>,
    relative_error: f64,
    m: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interpolative: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    factor_files: Vec<String>,
}

pub fn cmd_cur(args: &CurArgs, out: &OutputArgs) -> CliResult<()> {
    let a = read_matrix(&args.a, out.csv_header)?;
    let f = deim_cur(&a, args.rank)?;
    let interpolative = match args.id_mode {
        Some(mode) => Some(id_summary(&a, &interpolative(&a, args.rank, mode.into())?)?),
        None => None,
    };
    let factor_files = match &args.factors_dir {
        Some(dir) => write_factors(dir, &[("C", &f.c(&a)), ("M", &f.m), ("R", &f.r(&a))])?,
        None => Vec::new(),
    };
    let summary = CurSummary {
        command: "cur",
        k: args.rank,
        p: f.p.one_based(),
        s: f.s.one_based(),
        relative_error: relative(f.error(&a)?, spectral_norm(&a)?),
        m: rows_of(&f.m),
        interpolative,
        factor_files,
    };
    finish(&summary, out)
}

fn bounds_summary(r: &BoundReport) -> Value {
    json!({
        "k": r.k,
        "gamma_next": r.gamma_next,
        "eta_p": r.eta_p,
        "eta_s": r.eta_s,
        "norm_t22": r.norm_t22,
        "norm_t_hat": r.norm_t_hat,
        "psi_min_t22": r.psi_min_t22,
        "psi_min_t_hat": r.psi_min_t_hat,
        "observed_error": r.observed_error,
        "bound": r.bound,
        "coarse_bound": r.coarse_bound,
        "tolerance": r.tolerance,
        "all_hold": r.all_hold(),
        "checks": r.checks.iter().map(|c| json!({
            "name": c.name,
            "lhs": c.lhs,
            "rhs": c.rhs,
            "holds": c.holds,
        })).collect::<Vec<_>>(),
    })
}

#[derive(Serialize)]
struct GcurSummary {
    command: &'static str,
    k: usize,
    only_a: bool,
    p: Vec<usize>,
    s_a: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_b: Option<Vec<usize>>,
    relative_error_a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_error_b: Option<f64>,
    m_a: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_b: Option<Vec<Vec<f64>>>,
    ratio_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interpolative: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    factor_files: Vec<String>,
}

pub fn cmd_gcur(args: &GcurArgs, out: &OutputArgs) -> CliResult<()> {
    let a = read_matrix(&args.a, out.csv_header)?;
    let b = read_matrix(&args.b, out.csv_header)?;
    let mut config = GcurConfig::rank(args.rank);
    if args.only_a {
        config = config.only_a();
    }
    let g = gsvd(&a, &b)?;
    let f = gcur_from_gsvd(&a, &b, &g, &config)?;
    let bounds = if args.bounds {
        Some(bounds_summary(&evaluate_bounds_with(&a, &g, &f)?))
    } else {
        None
    };
    let interpolative = match args.id_mode {
        Some(mode) => Some(id_summary(&a, &gcur_interpolative(&a, &b, args.rank, mode.into())?)?),
        None => None,
    };
    let factor_files = match &args.factors_dir {
        Some(dir) => {
            let (c_a, r_a) = (f.c_a(&a), f.r_a(&a));
            let mut list: Vec<(&str, &DenseMatrix)> = vec![("C_A", &c_a), ("M_A", &f.m_a), ("R_A", &r_a)];
            let c_b = f.c_b(&b);
            let r_b = f.r_b(&b);
            if let (Some(m_b), Some(r_b)) = (&f.m_b, &r_b) {
                list.extend([("C_B", &c_b), ("M_B", m_b), ("R_B", r_b)]);
            }
            write_factors(dir, &list)?
        }
        None => Vec::new(),
    };
    let relative_error_b = match f.error_b(&b)? {
        Some(e) => Some(relative(e, spectral_norm(&b)?)),
        None => None,
    };
    let summary = GcurSummary {
        command: "gcur",
        k: args.rank,
        only_a: args.only_a,
        p: f.p.one_based(),
        s_a: f.s_a.one_based(),
        s_b: f.s_b.as_ref().map(|s| s.one_based()),
        relative_error_a: relative(f.error_a(&a)?, spectral_norm(&a)?),
        relative_error_b,
        m_a: rows_of(&f.m_a),
        m_b: f.m_b.as_ref().map(rows_of),
        ratio_gap: f.ratio_gap.is_finite().then_some(f.ratio_gap),
        bounds,
        interpolative,
        factor_files,
    };
    finish(&summary, out)
}

pub fn cmd_experiment(args: &ExperimentArgs, out: &OutputArgs) -> CliResult<()> {
    let params = ExperimentParams {
        ranks: args.rank.clone(),
        eps: args.eps.clone(),
        trials: args.trials,
        seed: args.seed,
        rho: args.rho,
        inexact_chol: args.inexact_chol,
        paper_scale: args.paper_scale,
        matrix: args.matrix.map(Into::into),
        rows: args.rows,
        timing: !out.no_timestamp,
    };
    let output = run_experiment(&args.name, &params)?;
    if let Some(dir) = &args.plot_dir {
        ensure_dir(dir)?;
        for plot in &output.plots {
            let path = dir.join(&plot.name);
            fs::write(&path, &plot.svg).map_err(|e| CliError::io(&path, e))?;
        }
    }
    emit(&output.report.render(out.format)?, out.out.as_deref())
}
