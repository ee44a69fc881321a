//! Error bounds for GCUR in terms of the truncated GSVD.
//!
//! With `Y = Q·T` (thin QR, `T = [T_k T₁₂; 0 T₂₂]`, `T̂ = [T₁₂; T₂₂]`) and
//! `η_p = ‖Q_k(p,:)⁻¹‖`, `η_s = ‖U_k(s_A,:)⁻¹‖`:
//!
//! ```text
//! γ_{k+1}·ψ_min(T₂₂)·η_p ≤ ‖A − A𝕡‖  ≤ γ_{k+1}·‖T₂₂‖·η_p
//! γ_{k+1}·ψ_min(T̂)·η_s  ≤ ‖A − 𝕊A‖  ≤ γ_{k+1}·‖T̂‖·η_s
//! ‖(I − CC⁺)A‖ ≤ γ_{k+1}·‖T₂₂‖·η_p
//! ‖A(I − R⁺R)‖ ≤ γ_{k+1}·‖T̂‖·η_s
//! ‖A − CMR‖    ≤ γ_{k+1}·(η_p·‖T₂₂‖ + η_s·‖T̂‖) ≤ γ_{k+1}·(η_p + η_s)·‖T̂‖
//! ```

use crate::deim::{eta, interp_project};
use crate::error::{Error, Result};
use crate::gsvd::{gsvd, GsvdFactors};
use crate::matkit::{pinv_apply, singular_values, spectral_norm, svd, thin_qr, DenseMatrix, Side};

use super::GcurFactors;

/// Checks are `lhs ≤ rhs + tolerance` with `tolerance = 1e-9·‖A‖`.
pub const BOUND_TOL: f64 = 1e-9;

/// One inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    pub gamma_next: f64,
    pub eta_p: f64,
    pub eta_s: f64,
    pub norm_t22: f64,
    pub norm_t_hat: f64,
    pub psi_min_t22: f64,
    pub psi_min_t_hat: f64,
    /// `‖A − C·M_A·R_A‖`.
    pub observed_error: f64,
    /// `γ_{k+1}·(η_p·‖T₂₂‖ + η_s·‖T̂‖)`.
    pub bound: f64,
    /// `γ_{k+1}·(η_p + η_s)·‖T̂‖`.
    pub coarse_bound: f64,
    /// `‖A − A𝕡‖`.
    pub column_interpolation_error: f64,
    /// `‖A − 𝕊A‖`.
    pub row_interpolation_error: f64,
    /// `‖(I − CC⁺)A‖`.
    pub column_projection_error: f64,
    /// `‖A(I − R⁺R)‖`.
    pub row_projection_error: f64,
    pub tolerance: f64,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Evaluates every bound for `f`, recomputing `gsvd(a, b)`.
pub fn evaluate_bounds(a: &DenseMatrix, b: &DenseMatrix, f: &GcurFactors) -> Result<BoundReport> {
    let g = gsvd(a, b)?;
    evaluate_bounds_with(a, &g, f)
}

/// Evaluates every bound for `f` against precomputed GSVD factors of the pair.
pub fn evaluate_bounds_with(a: &DenseMatrix, g: &GsvdFactors, f: &GcurFactors) -> Result<BoundReport> {
    let k = f.p.len();
    if f.s_a.len() != k {
        return Err(Error::InvalidParameter(format!(
            "bounds need equal row and column counts, got {} rows and {k} columns",
            f.s_a.len()
        )));
    }
    let n = g.n();
    if a.shape() != (g.u.rows(), n) {
        return Err(Error::dimension(
            "evaluate_bounds",
            format!("A is {}x{}, factors are for {}x{n}", a.rows(), a.cols(), g.u.rows()),
        ));
    }
    let t = g.truncate(k)?;
    let qr = thin_qr(&g.y)?;
    let q_k = qr.q.col_range(0..k);
    let t_hat = qr.t.col_range(k..n);
    let t22 = t_hat.row_range(k..n);

    let gamma_next = t.gamma_next();
    let eta_p = eta(&q_k, &f.p).map_err(|e| e.naming("Q_k(p,:)"))?;
    let eta_s = eta(&t.u_k, &f.s_a).map_err(|e| e.naming("U_k(s_A,:)"))?;
    let sv_t22 = singular_values(&t22)?;
    let sv_t_hat = singular_values(&t_hat)?;
    let (norm_t22, psi_min_t22) = (sv_t22[0], *sv_t22.last().unwrap());
    let (norm_t_hat, psi_min_t_hat) = (sv_t_hat[0], *sv_t_hat.last().unwrap());

    let a_pp = interp_project(&q_k, &f.p, a, Side::Right).map_err(|e| e.naming("Q_k(p,:)"))?;
    let ss_a = interp_project(&t.u_k, &f.s_a, a, Side::Left).map_err(|e| e.naming("U_k(s_A,:)"))?;
    let column_interpolation_error = spectral_norm(&a.sub(&a_pp))?;
    let row_interpolation_error = spectral_norm(&a.sub(&ss_a))?;

    let c = f.c_a(a);
    let r = f.r_a(a);
    let cc_a = c.matmul(&pinv_apply(&c, a, Side::Left).map_err(|e| e.naming("C_A"))?);
    let a_rr = pinv_apply(&r, a, Side::Right).map_err(|e| e.naming("R_A"))?.matmul(&r);
    let column_projection_error = spectral_norm(&a.sub(&cc_a))?;
    let row_projection_error = spectral_norm(&a.sub(&a_rr))?;

    let observed_error = f.error_a(a)?;
    let bound = gamma_next * (eta_p * norm_t22 + eta_s * norm_t_hat);
    let coarse_bound = gamma_next * (eta_p + eta_s) * norm_t_hat;
    let tolerance = BOUND_TOL * spectral_norm(a)?;

    let mk = |name, lhs: f64, rhs: f64| BoundCheck {
        name,
        lhs,
        rhs,
        holds: lhs <= rhs + tolerance,
    };
    let checks = vec![
        mk("column_interpolation_lower", gamma_next * psi_min_t22 * eta_p, column_interpolation_error),
        mk("column_interpolation_upper", column_interpolation_error, gamma_next * norm_t22 * eta_p),
        mk("row_interpolation_lower", gamma_next * psi_min_t_hat * eta_s, row_interpolation_error),
        mk("row_interpolation_upper", row_interpolation_error, gamma_next * norm_t_hat * eta_s),
        mk("column_projection", column_projection_error, gamma_next * norm_t22 * eta_p),
        mk("row_projection", row_projection_error, gamma_next * norm_t_hat * eta_s),
        mk("cur_error", observed_error, bound),
        mk("cur_error_coarse", observed_error, coarse_bound),
    ];
    Ok(BoundReport {
        k,
        gamma_next,
        eta_p,
        eta_s,
        norm_t22,
        norm_t_hat,
        psi_min_t22,
        psi_min_t_hat,
        observed_error,
        bound,
        coarse_bound,
        column_interpolation_error,
        row_interpolation_error,
        column_projection_error,
        row_projection_error,
        tolerance,
        checks,
    })
}

/// Quantities comparing `‖A(I − Q_k·Q_kᵀ)‖²` with the SVD truncation error.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceGap {
    /// `ψ_{k+1}(A)²`.
    pub lower: f64,
    /// `‖A(I − Q_k·Q_kᵀ)‖²`.
    pub value: f64,
    /// `ψ_{k+1}² + ‖A‖²·sin²(Z_k, Q_k)`.
    pub upper: f64,
    /// `ψ_{k+1}² + Σ_{j≤k} ψ_j²·sin²(z_j, Q_k)`.
    pub upper_refined: f64,
    /// `sin(Z_k, Q_k)`, the sine of the largest principal angle.
    pub sin_angle: f64,
}

fn residual_after(q: &DenseMatrix, x: &DenseMatrix) -> DenseMatrix {
    x.sub(&q.matmul(&q.t_matmul(x)))
}

/// Compares the subspace `Range(Q_k)` with the dominant right singular
/// subspace `Z_k` of `A`.
pub fn svd_subspace_gap(a: &DenseMatrix, q_k: &DenseMatrix) -> Result<SubspaceGap> {
    let n = a.cols();
    let k = q_k.cols();
    if q_k.rows() != n {
        return Err(Error::dimension(
            "svd_subspace_gap",
            format!("A has {n} columns but Q_k has {} rows", q_k.rows()),
        ));
    }
    if k == 0 || k >= n {
        return Err(Error::bounds("k", k, format!("1 <= k < n = {n}")));
    }
    let f = svd(a)?;
    let psi = |i: usize| f.psi.get(i).copied().unwrap_or(0.0);
    let z_k = f.z.col_range(0..k);
    let lower = psi(k).powi(2);
    let value = spectral_norm(&residual_after(q_k, &a.transpose()).transpose())?.powi(2);
    let sin_angle = spectral_norm(&residual_after(q_k, &z_k))?.min(1.0);
    let upper = lower + psi(0).powi(2) * sin_angle.powi(2);
    let per_direction = residual_after(q_k, &z_k);
    let upper_refined = lower
        + (0..k)
            .map(|j| psi(j).powi(2) * per_direction.col(j).iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>();
    Ok(SubspaceGap {
        lower,
        value,
        upper,
        upper_refined,
        sin_angle,
    })
}
