//! Reduced generalized SVD of a pair `(A, B)` in the form
//! `A = U·Γ·Yᵀ`, `B = V·Σ·Yᵀ`, with `γᵢ² + σᵢ² = 1` and the ratios `γᵢ/σᵢ`
//! sorted nonincreasing.
//!
//! The pair is stacked and orthogonalized, `[A; B] = [Q₁; Q₂]·T₀`, and the
//! CS decomposition of `[Q₁; Q₂]` supplies `U, V, Γ, Σ` and `W`; then
//! `Y = T₀ᵀ·W`. Cross products `AᵀA`, `BᵀB` are never formed.
//!
//! The CS step uses two SVDs. Directions with `γ > 1/√2` (small `σ`) take
//! their `V` columns and `σ` from the SVD of `Q₂·W_top`, the rest take `U`
//! and `γ` from the SVD of `Q₁`, so each small cosine or sine is computed by
//! an SVD rather than by a norm of a nearly-cancelled vector.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::matkit::{singular_values, solve_square, svd, thin_qr, DenseMatrix, RANK_TOL};

#[derive(Clone, Debug)]
pub struct GsvdFactors {
    /// `m×n`, orthonormal columns.
    pub u: DenseMatrix,
    /// `d×n`, orthonormal columns.
    pub v: DenseMatrix,
    /// `n×n`, nonsingular; `X = Y⁻ᵀ` is available through [`GsvdFactors::x`].
    pub y: DenseMatrix,
    pub gamma: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Leading-`k` slices of a GSVD and their complements.
#[derive(Clone, Debug)]
pub struct TruncatedGsvd {
    pub k: usize,
    pub u_k: DenseMatrix,
    pub v_k: DenseMatrix,
    pub y_k: DenseMatrix,
    pub gamma_k: Vec<f64>,
    pub sigma_k: Vec<f64>,
    pub u_hat: DenseMatrix,
    pub v_hat: DenseMatrix,
    pub y_hat: DenseMatrix,
    pub gamma_hat: Vec<f64>,
    pub sigma_hat: Vec<f64>,
}

impl TruncatedGsvd {
    /// `A_k = U_k·Γ_k·Y_kᵀ`.
    pub fn a_k(&self) -> DenseMatrix {
        self.u_k.scale_cols(&self.gamma_k).matmul_t(&self.y_k)
    }

    /// `B_k = V_k·Σ_k·Y_kᵀ`.
    pub fn b_k(&self) -> DenseMatrix {
        self.v_k.scale_cols(&self.sigma_k).matmul_t(&self.y_k)
    }

    /// `A − A_k = Û·Γ̂·Ŷᵀ`.
    pub fn a_residual(&self) -> DenseMatrix {
        self.u_hat.scale_cols(&self.gamma_hat).matmul_t(&self.y_hat)
    }

    /// `γ_{k+1}`.
    pub fn gamma_next(&self) -> f64 {
        self.gamma_hat[0]
    }
}

impl GsvdFactors {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    /// `γᵢ/σᵢ`, with `+∞` where `σᵢ = 0`.
    pub fn ratios(&self) -> Vec<f64> {
        self.gamma
            .iter()
            .zip(&self.sigma)
            .map(|(&g, &s)| ratio(g, s))
            .collect()
    }

    /// Right generalized singular vectors `X = Y⁻ᵀ`, computed on demand.
    pub fn x(&self) -> Result<DenseMatrix> {
        let n = self.n();
        solve_square(&self.y.transpose(), &DenseMatrix::identity(n))
    }

    pub fn reconstruct_a(&self) -> DenseMatrix {
        self.u.scale_cols(&self.gamma).matmul_t(&self.y)
    }

    pub fn reconstruct_b(&self) -> DenseMatrix {
        self.v.scale_cols(&self.sigma).matmul_t(&self.y)
    }

    pub fn truncate(&self, k: usize) -> Result<TruncatedGsvd> {
        let n = self.n();
        if k < 1 || k >= n {
            return Err(Error::bounds("k", k, format!("1 <= k < n = {n}")));
        }
        Ok(TruncatedGsvd {
            k,
            u_k: self.u.col_range(0..k),
            v_k: self.v.col_range(0..k),
            y_k: self.y.col_range(0..k),
            gamma_k: self.gamma[..k].to_vec(),
            sigma_k: self.sigma[..k].to_vec(),
            u_hat: self.u.col_range(k..n),
            v_hat: self.v.col_range(k..n),
            y_hat: self.y.col_range(k..n),
            gamma_hat: self.gamma[k..].to_vec(),
            sigma_hat: self.sigma[k..].to_vec(),
        })
    }
}

fn ratio(g: f64, s: f64) -> f64 {
    if s == 0.0 {
        f64::INFINITY
    } else {
        g / s
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Direction {
    u: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
    gamma: f64,
    sigma: f64,
}

impl Direction {
    fn new(u: Vec<f64>, v: Vec<f64>, w: Vec<f64>, gamma: f64, sigma: f64) -> Self {
        let h = gamma.hypot(sigma);
        Direction {
            u,
            v,
            w,
            gamma: gamma / h,
            sigma: sigma / h,
        }
    }
}

/// Reduced GSVD of `A` (`m×n`, `m ≥ n`) and `B` (`d×n`, `d ≥ n`).
pub fn gsvd(a: &DenseMatrix, b: &DenseMatrix) -> Result<GsvdFactors> {
    let (m, n) = a.shape();
    let d = b.rows();
    if a.is_empty() || b.is_empty() {
        return Err(Error::dimension("gsvd", "empty input"));
    }
    if b.cols() != n {
        return Err(Error::dimension(
            "gsvd",
            format!("A has {n} columns but B has {}", b.cols()),
        ));
    }
    if m < n {
        return Err(Error::dimension("gsvd", format!("A is {m}x{n}, need m >= n")));
    }
    if d < n {
        return Err(Error::dimension("gsvd", format!("B is {d}x{n}, need d >= n")));
    }
    a.check_finite()?;
    b.check_finite()?;

    let qr = thin_qr(&a.vstack(b))?;
    let t0 = qr.t;
    let tsv = singular_values(&t0)?;
    let tol = RANK_TOL * tsv[0];
    if tsv[n - 1] <= tol {
        return Err(Error::Singular {
            factor: "B (stacked [A; B] is rank-deficient)".into(),
            smallest: tsv[n - 1],
            tolerance: tol,
        });
    }
    let q1 = qr.q.row_range(0..m);
    let q2 = qr.q.row_range(m..m + d);

    let f1 = svd(&q1)?;
    let split = f1.psi.iter().take_while(|&&c| c > FRAC_1_SQRT_2).count();
    let mut dirs: Vec<Direction> = Vec::with_capacity(n);

    if split > 0 {
        let w_top = f1.z.col_range(0..split);
        let fz = svd(&q2.matmul(&w_top))?;
        let w_rot = w_top.matmul(&fz.z);
        let q1w = q1.matmul(&w_rot);
        // fz.psi is nonincreasing in σ; walk it backwards for nonincreasing γ/σ
        for j in (0..split).rev() {
            let col = q1w.col(j);
            let g = norm(col);
            let u = col.iter().map(|x| x / g).collect();
            dirs.push(Direction::new(
                u,
                fz.w.col(j).to_vec(),
                w_rot.col(j).to_vec(),
                g,
                fz.psi[j],
            ));
        }
    }
    for j in split..n {
        let w = f1.z.col(j).to_vec();
        let zcol = q2.matmul(&DenseMatrix::column(&w));
        let s = norm(zcol.col(0));
        let v = zcol.col(0).iter().map(|x| x / s).collect();
        dirs.push(Direction::new(f1.w.col(j).to_vec(), v, w, f1.psi[j], s));
    }

    complete_null_directions(&mut dirs, d);

    // stable: exact ties keep the SVD output order
    dirs.sort_by(|x, y| {
        ratio(y.gamma, y.sigma)
            .partial_cmp(&ratio(x.gamma, x.sigma))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let u = DenseMatrix::from_columns(&dirs.iter().map(|x| x.u.clone()).collect::<Vec<_>>(), m);
    let v = DenseMatrix::from_columns(&dirs.iter().map(|x| x.v.clone()).collect::<Vec<_>>(), d);
    let w = DenseMatrix::from_columns(&dirs.iter().map(|x| x.w.clone()).collect::<Vec<_>>(), n);
    let y = t0.t_matmul(&w);
    Ok(GsvdFactors {
        u,
        v,
        y,
        gamma: dirs.iter().map(|x| x.gamma).collect(),
        sigma: dirs.iter().map(|x| x.sigma).collect(),
    })
}

/// Directions with `σ = 0` carry no information about `V`; replace their
/// `V` columns by unit vectors orthogonal to all the others.
fn complete_null_directions(dirs: &mut [Direction], d: usize) {
    let null: Vec<usize> = (0..dirs.len())
        .filter(|&i| dirs[i].sigma <= RANK_TOL)
        .collect();
    if null.is_empty() {
        return;
    }
    log::debug!("gsvd: completing {} V columns with zero sigma", null.len());
    for &i in &null {
        dirs[i].sigma = 0.0;
        dirs[i].gamma = 1.0;
        let mut candidates = std::iter::once(dirs[i].v.clone()).chain((0..d).map(|e| {
            let mut c = vec![0.0; d];
            c[e] = 1.0;
            c
        }));
        loop {
            let mut c = candidates.next().expect("R^d has an orthogonal complement");
            for (j, other) in dirs.iter().enumerate() {
                if j == i || (null.contains(&j) && j > i) {
                    continue;
                }
                // two passes of Gram–Schmidt
                for _ in 0..2 {
                    let dot: f64 = c.iter().zip(&other.v).map(|(a, b)| a * b).sum();
                    c.iter_mut().zip(&other.v).for_each(|(a, b)| *a -= dot * b);
                }
            }
            let nc = norm(&c);
            if nc > 0.5 {
                dirs[i].v = c.iter().map(|x| x / nc).collect();
                break;
            }
        }
    }
}
