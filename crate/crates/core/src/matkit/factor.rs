use faer::linalg::solvers::Solve;
use faer::Side as TriangleSide;

use super::dense::{from_faer, DenseMatrix};
use crate::error::{Error, Result};

/// Relative cutoff below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Thin SVD `A = W·diag(psi)·Zᵀ`, `psi` nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub w: DenseMatrix,
    pub psi: Vec<f64>,
    pub z: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        let cutoff = RANK_TOL * self.psi.first().copied().unwrap_or(0.0);
        self.psi.iter().filter(|&&p| p > cutoff).count()
    }

    /// `W_k·Ψ_k·Z_kᵀ`.
    pub fn truncated(&self, k: usize) -> DenseMatrix {
        let k = k.min(self.psi.len());
        self.w
            .leading_cols(k)
            .scale_cols(&self.psi[..k])
            .matmul_t(&self.z.leading_cols(k))
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.truncated(self.psi.len())
    }
}

/// Thin QR `A = Q·T` with `diag(T) ≥ 0`.
#[derive(Clone, Debug)]
pub struct QrFactors {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `A⁺·B`
    Left,
    /// `B·A⁺`
    Right,
}

fn require_nonempty(op: &'static str, a: &DenseMatrix) -> Result<()> {
    if a.is_empty() {
        return Err(Error::dimension(op, format!("empty {}x{} input", a.rows(), a.cols())));
    }
    Ok(())
}

pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    require_nonempty("svd", a)?;
    let f = a.as_faer().thin_svd().map_err(|_| Error::NoConvergence {
        op: "svd",
        rows: a.rows(),
        cols: a.cols(),
    })?;
    let psi: Vec<f64> = f.S().column_vector().iter().copied().collect();
    Ok(SvdFactors {
        w: from_faer(f.U()),
        psi,
        z: from_faer(f.V()),
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    require_nonempty("singular_values", a)?;
    a.as_faer()
        .singular_values()
        .map_err(|_| Error::NoConvergence {
            op: "singular_values",
            rows: a.rows(),
            cols: a.cols(),
        })
}

pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Smallest of the `min(m, n)` singular values.
pub fn smallest_singular_value(a: &DenseMatrix) -> Result<f64> {
    Ok(*singular_values(a)?.last().unwrap())
}

pub fn thin_qr(a: &DenseMatrix) -> Result<QrFactors> {
    require_nonempty("thin_qr", a)?;
    if a.rows() < a.cols() {
        return Err(Error::dimension(
            "thin_qr",
            format!("need rows >= cols, got {}x{}", a.rows(), a.cols()),
        ));
    }
    let f = a.as_faer().qr();
    let mut q = from_faer(f.compute_thin_Q());
    let mut t = from_faer(f.thin_R());
    let n = a.cols();
    for j in 0..n {
        if t[(j, j)] < 0.0 {
            for c in j..n {
                t[(j, c)] = -t[(j, c)];
            }
            q.col_mut(j).iter_mut().for_each(|v| *v = -*v);
        }
        // faer leaves exact zeros below the diagonal, but make it structural
        for i in j + 1..n {
            t[(i, j)] = 0.0;
        }
    }
    Ok(QrFactors { q, t })
}

/// Minimum-norm least-squares solution of `A·X ≈ B`, column by column,
/// through the SVD of `A`.
pub fn lstsq(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::dimension(
            "lstsq",
            format!("A is {}x{} but B has {} rows", a.rows(), a.cols(), b.rows()),
        ));
    }
    let f = svd(a)?;
    Ok(svd_solve(&f, b))
}

fn svd_solve(f: &SvdFactors, b: &DenseMatrix) -> DenseMatrix {
    let cutoff = RANK_TOL * f.psi[0];
    let inv: Vec<f64> = f
        .psi
        .iter()
        .map(|&p| if p > cutoff { 1.0 / p } else { 0.0 })
        .collect();
    // Z · Ψ⁺ · (Wᵀ B)
    let wtb = f.w.t_matmul(b);
    let mut scaled = wtb;
    for i in 0..scaled.rows() {
        for j in 0..scaled.cols() {
            scaled[(i, j)] *= inv[i];
        }
    }
    f.z.matmul(&scaled)
}

/// `A⁺·B` (left) or `B·A⁺` (right), requiring `A` to have full rank in the
/// dimension the pseudoinverse acts on.
pub fn pinv_apply(a: &DenseMatrix, b: &DenseMatrix, side: Side) -> Result<DenseMatrix> {
    match side {
        Side::Left => {
            if a.rows() != b.rows() {
                return Err(Error::dimension(
                    "pinv_apply",
                    format!("A⁺ is {}x{} but B has {} rows", a.cols(), a.rows(), b.rows()),
                ));
            }
            let f = full_rank_svd(a, a.cols())?;
            Ok(svd_solve(&f, b))
        }
        Side::Right => {
            if a.cols() != b.cols() {
                return Err(Error::dimension(
                    "pinv_apply",
                    format!("B has {} cols but A⁺ is {}x{}", b.cols(), a.cols(), a.rows()),
                ));
            }
            let at = a.transpose();
            let f = full_rank_svd(&at, at.cols())?;
            Ok(svd_solve(&f, &b.transpose()).transpose())
        }
    }
}

fn full_rank_svd(a: &DenseMatrix, needed: usize) -> Result<SvdFactors> {
    let f = svd(a)?;
    let tol = RANK_TOL * f.psi[0];
    let smallest = if f.psi.len() < needed {
        0.0
    } else {
        *f.psi.last().unwrap()
    };
    if smallest <= tol || f.psi[0] == 0.0 {
        return Err(Error::Singular {
            factor: "A".into(),
            smallest,
            tolerance: tol,
        });
    }
    Ok(f)
}

/// Largest principal angle between `Range(U1)` and `Range(U2)`, computed as
/// `asin ‖(I − U1·U1ᵀ)·U2‖`, accurate for small angles.
pub fn max_principal_angle(u1: &DenseMatrix, u2: &DenseMatrix) -> Result<f64> {
    if u1.rows() != u2.rows() || u1.cols() != u2.cols() {
        return Err(Error::dimension(
            "max_principal_angle",
            format!("{}x{} vs {}x{}", u1.rows(), u1.cols(), u2.rows(), u2.cols()),
        ));
    }
    for (name, u) in [("U1", u1), ("U2", u2)] {
        let dev = orthonormality_error(u);
        if dev > 1e-8 {
            return Err(Error::Contract {
                op: "max_principal_angle",
                detail: format!("{name} columns are not orthonormal (max |UᵀU − I| = {dev:.3e})"),
            });
        }
    }
    let resid = u2.sub(&u1.matmul(&u1.t_matmul(u2)));
    let s = spectral_norm(&resid)?;
    Ok(s.min(1.0).asin())
}

/// `max |UᵀU − I|` entrywise.
pub fn orthonormality_error(u: &DenseMatrix) -> f64 {
    let g = u.t_matmul(u);
    g.sub(&DenseMatrix::identity(u.cols())).max_abs()
}

/// Upper-triangular `R` with `RᵀR = S` for symmetric positive definite `S`.
pub fn cholesky_upper(s: &DenseMatrix) -> Result<DenseMatrix> {
    if s.rows() != s.cols() || s.is_empty() {
        return Err(Error::dimension(
            "cholesky_upper",
            format!("need a square matrix, got {}x{}", s.rows(), s.cols()),
        ));
    }
    let asym = s.sub(&s.transpose()).max_abs();
    if asym > 1e-12 * s.max_abs().max(1.0) {
        return Err(Error::Contract {
            op: "cholesky_upper",
            detail: format!("matrix is not symmetric (max asymmetry {asym:.3e})"),
        });
    }
    let llt = s.as_faer().llt(TriangleSide::Lower).map_err(|_| Error::Contract {
        op: "cholesky_upper",
        detail: "matrix is not positive definite".into(),
    })?;
    let l = from_faer(llt.L());
    let n = s.rows();
    Ok(DenseMatrix::from_fn(n, n, |i, j| if i <= j { l[(j, i)] } else { 0.0 }))
}

/// 2-norm condition number; `inf` for a singular matrix.
pub fn condition_number(a: &DenseMatrix) -> Result<f64> {
    let s = singular_values(a)?;
    let min = *s.last().unwrap();
    Ok(if min == 0.0 { f64::INFINITY } else { s[0] / min })
}

/// Solves the square system `A·X = B` by LU with partial pivoting.
/// Callers are responsible for checking conditioning first.
pub fn solve_square(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != a.cols() || a.rows() != b.rows() {
        return Err(Error::dimension(
            "solve_square",
            format!("A is {}x{}, B has {} rows", a.rows(), a.cols(), b.rows()),
        ));
    }
    let lu = a.as_faer().partial_piv_lu();
    Ok(from_faer(lu.solve(b.as_faer())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn svd_examples() {
        let f = svd(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f.psi.len(), 3);
        f.psi.iter().for_each(|&p| assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15));

        let f = svd(&DenseMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        for (p, want) in f.psi.iter().zip([3.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-14);
        }
        // singular vectors are signed axes: e1, e3, e2
        for (col, axis) in [(0, 0), (1, 2), (2, 1)] {
            assert_abs_diff_eq!(f.w[(axis, col)].abs(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(f.z[(axis, col)].abs(), 1.0, epsilon = 1e-14);
        }

        // AᵀA = [[20,10],[10,5]] has eigenvalues 25 and 0
        let f = svd(&m(&[&[4.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert_abs_diff_eq!(f.psi[0], 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.psi[1], 0.0, epsilon = 1e-14);
        assert_eq!(f.rank(), 1);
    }

    #[test]
    fn svd_rejects_empty() {
        assert!(matches!(
            svd(&DenseMatrix::zeros(0, 3)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn qr_examples() {
        let f = thin_qr(&m(&[&[3.0], &[4.0]])).unwrap();
        assert_abs_diff_eq!(f.q[(0, 0)], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(f.q[(1, 0)], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(f.t[(0, 0)], 5.0, epsilon = 1e-14);

        let upper = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let f = thin_qr(&upper).unwrap();
        assert!(f.t.max_abs_diff(&upper) < 1e-15);
        assert!(f.q.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);

        // orthonormal input with a negative column: Q = Q0·D, T = D with D = diag(±1)
        let q0 = m(&[&[FRAC_1_SQRT_2, 0.0], &[-FRAC_1_SQRT_2, 0.0], &[0.0, -1.0]]);
        let f = thin_qr(&q0).unwrap();
        assert!(f.t.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
        assert!(f.q.max_abs_diff(&q0) < 1e-15);

        assert!(thin_qr(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn lstsq_examples() {
        let b = m(&[&[1.0, -2.0], &[0.5, 3.0]]);
        let x = lstsq(&DenseMatrix::identity(2), &b).unwrap();
        assert!(x.max_abs_diff(&b) < 1e-15);

        let x = lstsq(&m(&[&[1.0], &[1.0]]), &m(&[&[0.0], &[2.0]])).unwrap();
        assert_abs_diff_eq!(x[(0, 0)], 1.0, epsilon = 1e-15);

        let q = m(&[&[0.6, 0.0], &[0.8, 0.0], &[0.0, 1.0]]);
        let b = m(&[&[1.0], &[2.0], &[3.0]]);
        let x = lstsq(&q, &b).unwrap();
        assert!(x.max_abs_diff(&q.t_matmul(&b)) < 1e-12);

        assert!(lstsq(&q, &DenseMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn lstsq_minimum_norm_on_rank_deficient() {
        // A = [1 1], b = 2: minimum-norm solution is (1, 1)
        let x = lstsq(&m(&[&[1.0, 1.0]]), &m(&[&[2.0]])).unwrap();
        assert_abs_diff_eq!(x[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(1, 0)], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn pinv_examples() {
        let s = FRAC_1_SQRT_2;
        let rot = m(&[&[s, -s], &[s, s]]);
        let b = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let got = pinv_apply(&rot, &b, Side::Left).unwrap();
        assert!(got.max_abs_diff(&rot.t_matmul(&b)) < 1e-14);

        let got = pinv_apply(&m(&[&[2.0]]), &m(&[&[6.0]]), Side::Left).unwrap();
        assert_abs_diff_eq!(got[(0, 0)], 3.0, epsilon = 1e-15);

        let got = pinv_apply(&m(&[&[1.0], &[1.0]]), &DenseMatrix::identity(2), Side::Left).unwrap();
        assert_eq!(got.shape(), (1, 2));
        assert_abs_diff_eq!(got[(0, 0)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(got[(0, 1)], 0.5, epsilon = 1e-15);

        // right side: B·A⁺ with A = [1 1] (1x2) gives B·[0.5; 0.5]
        let got = pinv_apply(&m(&[&[1.0, 1.0]]), &m(&[&[4.0, 2.0]]), Side::Right).unwrap();
        assert_abs_diff_eq!(got[(0, 0)], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn pinv_rejects_rank_deficient() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0], &[0.0, 0.0]]);
        let err = pinv_apply(&a, &DenseMatrix::identity(3), Side::Left).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
        assert!(err.naming("C_A").to_string().contains("C_A"));
        // a wide matrix cannot have full column rank
        let wide = m(&[&[1.0, 0.0]]);
        assert!(pinv_apply(&wide, &m(&[&[1.0]]), Side::Left).is_err());
    }

    #[test]
    fn principal_angle_examples() {
        let e1 = m(&[&[1.0], &[0.0]]);
        let e2 = m(&[&[0.0], &[1.0]]);
        let d = m(&[&[FRAC_1_SQRT_2], &[FRAC_1_SQRT_2]]);
        assert_abs_diff_eq!(max_principal_angle(&e1, &e1).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max_principal_angle(&e1, &e2).unwrap(), FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(max_principal_angle(&e1, &d).unwrap(), FRAC_PI_4, epsilon = 1e-12);
        let bad = m(&[&[2.0], &[0.0]]);
        assert!(matches!(
            max_principal_angle(&bad, &e1),
            Err(Error::Contract { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        assert_abs_diff_eq!(spectral_norm(&DenseMatrix::identity(4)).unwrap(), 1.0, epsilon = 1e-15);
        let d = DenseMatrix::diag(&[3.0, 1.0]);
        assert_abs_diff_eq!(spectral_norm(&d).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(smallest_singular_value(&d).unwrap(), 1.0, epsilon = 1e-15);
        let row = m(&[&[0.2, -0.9, 0.1]]);
        let want = (0.04f64 + 0.81 + 0.01).sqrt();
        assert_abs_diff_eq!(spectral_norm(&row).unwrap(), want, epsilon = 1e-15);
        assert_abs_diff_eq!(smallest_singular_value(&row).unwrap(), want, epsilon = 1e-15);
    }

    #[test]
    fn cholesky_two_by_two() {
        let s = m(&[&[1.0, 0.8], &[0.8, 1.0]]);
        let r = cholesky_upper(&s).unwrap();
        assert!(r.max_abs_diff(&m(&[&[1.0, 0.8], &[0.0, 0.6]])) < 1e-15);
        assert!(cholesky_upper(&m(&[&[1.0, 2.0], &[2.0, 1.0]])).is_err());
        assert!(cholesky_upper(&m(&[&[1.0, 0.5], &[0.0, 1.0]])).is_err());
    }

    #[test]
    fn solve_square_matches() {
        let a = m(&[&[0.0, 2.0], &[1.0, 1.0]]);
        let x = solve_square(&a, &m(&[&[4.0], &[3.0]])).unwrap();
        assert_abs_diff_eq!(x[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[(1, 0)], 2.0, epsilon = 1e-15);
        assert!(condition_number(&m(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap() > 1e15);
    }
}
