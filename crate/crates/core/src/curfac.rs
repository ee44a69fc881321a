//! DEIM-induced CUR factorization `A ≈ C·M·R` of a single matrix and its
//! one-sided interpolative variants.

use log::warn;

use crate::deim::{deim_select, IndexVector};
use crate::error::{Error, Result};
use crate::matkit::{pinv_apply, spectral_norm, svd, DenseMatrix, Side, SvdFactors, RANK_TOL};

/// Column indices `p`, row indices `s` and the middle matrix `M`.
///
/// `C = A(:,p)` and `R = A(s,:)` are gathered on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct CurFactors {
    pub p: IndexVector,
    pub s: IndexVector,
    pub m: DenseMatrix,
}

impl CurFactors {
    pub fn c(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_cols(self.p.as_slice())
    }

    pub fn r(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_rows(self.s.as_slice())
    }

    pub fn reconstruct(&self, a: &DenseMatrix) -> DenseMatrix {
        self.c(a).matmul(&self.m).matmul(&self.r(a))
    }

    /// `‖A − CMR‖`.
    pub fn error(&self, a: &DenseMatrix) -> Result<f64> {
        spectral_norm(&a.sub(&self.reconstruct(a)))
    }
}

/// Stewart's middle matrix `C⁺·A·R⁺`, as a left then a right least-squares
/// pass. `names` label `C` and `R` in rank-deficiency errors.
pub(crate) fn middle_matrix_named(
    a: &DenseMatrix,
    p: &IndexVector,
    s: &IndexVector,
    names: (&str, &str),
) -> Result<DenseMatrix> {
    let c = a.select_cols(p.as_slice());
    let r = a.select_rows(s.as_slice());
    let ca = pinv_apply(&c, a, Side::Left).map_err(|e| e.naming(names.0))?;
    pinv_apply(&r, &ca, Side::Right).map_err(|e| e.naming(names.1))
}

/// `M = C⁺·A·R⁺` for `C = A(:,p)`, `R = A(s,:)`.
pub fn middle_matrix(a: &DenseMatrix, p: &IndexVector, s: &IndexVector) -> Result<DenseMatrix> {
    middle_matrix_named(a, p, s, ("C", "R"))
}

/// Relative gap `(ψ_k − ψ_{k+1})/ψ_1` at the truncation point; logs a warning
/// when the cut falls inside a numerically repeated singular value.
pub fn cut_gap(values: &[f64], k: usize) -> f64 {
    if k == 0 || k >= values.len() || values[0] == 0.0 {
        return f64::INFINITY;
    }
    let gap = (values[k - 1] - values[k]) / values[0].abs();
    if gap <= RANK_TOL {
        warn!("values {k} and {} coincide at the truncation point (relative gap {gap:.3e}); index selection depends on backend ordering", k + 1);
    }
    gap
}

fn check_rank(a: &DenseMatrix, k: usize, what: &'static str) -> Result<()> {
    let lim = a.rows().min(a.cols());
    if k == 0 || k >= lim {
        return Err(Error::bounds(what, k, format!("1 <= {what} < min(m, n) = {lim}")));
    }
    Ok(())
}

/// Rank-`k` DEIM-CUR: `p` from the leading right singular vectors, `s` from
/// the leading left singular vectors.
pub fn deim_cur(a: &DenseMatrix, k: usize) -> Result<CurFactors> {
    deim_cur_rect(a, k, k)
}

/// DEIM-CUR with `k_row` rows and `k_col` columns; `M` is `k_col × k_row`.
pub fn deim_cur_rect(a: &DenseMatrix, k_row: usize, k_col: usize) -> Result<CurFactors> {
    check_rank(a, k_row, "k_row")?;
    check_rank(a, k_col, "k_col")?;
    deim_cur_from_svd(a, &svd(a)?, k_row, k_col)
}

/// DEIM-CUR from a precomputed `svd(a)`.
pub fn deim_cur_from_svd(a: &DenseMatrix, f: &SvdFactors, k_row: usize, k_col: usize) -> Result<CurFactors> {
    check_rank(a, k_row, "k_row")?;
    check_rank(a, k_col, "k_col")?;
    cut_gap(&f.psi, k_row.max(k_col));
    if k_row != k_col {
        cut_gap(&f.psi, k_row.min(k_col));
    }
    let (p, s) = rayon::join(|| deim_select(&f.z, k_col), || deim_select(&f.w, k_row));
    let (p, s) = (p?, s?);
    let m = middle_matrix(a, &p, &s)?;
    Ok(CurFactors { p, s, m })
}

/// Which side of `A` an interpolative decomposition keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdMode {
    /// `A ≈ C·M̃`, `M̃ = C⁺A`.
    Column,
    /// `A ≈ M̂·R`, `M̂ = AR⁺`.
    Row,
}

/// One-sided interpolative decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Interpolative {
    pub mode: IdMode,
    pub indices: IndexVector,
    pub factor: DenseMatrix,
}

impl Interpolative {
    pub fn reconstruct(&self, a: &DenseMatrix) -> DenseMatrix {
        match self.mode {
            IdMode::Column => a.select_cols(self.indices.as_slice()).matmul(&self.factor),
            IdMode::Row => self.factor.matmul(&a.select_rows(self.indices.as_slice())),
        }
    }

    pub fn error(&self, a: &DenseMatrix) -> Result<f64> {
        spectral_norm(&a.sub(&self.reconstruct(a)))
    }
}

/// Builds the interpolative factor for already selected indices.
pub(crate) fn interpolative_from(
    a: &DenseMatrix,
    indices: IndexVector,
    mode: IdMode,
    name: &str,
) -> Result<Interpolative> {
    let factor = match mode {
        IdMode::Column => pinv_apply(&a.select_cols(indices.as_slice()), a, Side::Left),
        IdMode::Row => pinv_apply(&a.select_rows(indices.as_slice()), a, Side::Right),
    }
    .map_err(|e| e.naming(name))?;
    Ok(Interpolative { mode, indices, factor })
}

/// DEIM interpolative decomposition keeping `k` columns or rows of `A`.
pub fn interpolative(a: &DenseMatrix, k: usize, mode: IdMode) -> Result<Interpolative> {
    check_rank(a, k, "k")?;
    let f = svd(a)?;
    cut_gap(&f.psi, k);
    let (basis, name) = match mode {
        IdMode::Column => (&f.z, "C"),
        IdMode::Row => (&f.w, "R"),
    };
    let idx = deim_select(basis, k)?;
    interpolative_from(a, idx, mode, name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gaussian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_case() {
        let a = DenseMatrix::diag(&[3.0, 2.0, 1.0]);
        let f = deim_cur(&a, 2).unwrap();
        assert_eq!(f.p.one_based(), vec![1, 2]);
        assert_eq!(f.s.one_based(), vec![1, 2]);
        assert!((f.error(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_is_exact() {
        let a = DenseMatrix::from_rows(&[[8.0, 4.0], [4.0, 2.0]]).unwrap();
        let f = deim_cur(&a, 1).unwrap();
        assert_eq!(f.p.one_based(), vec![1]);
        assert_eq!(f.s.one_based(), vec![1]);
        assert!(f.error(&a).unwrap() <= 1e-12);
    }

    #[test]
    fn rank_precondition() {
        let a = DenseMatrix::diag(&[3.0, 2.0, 1.0]);
        assert!(matches!(deim_cur(&a, 3), Err(Error::Bounds { .. })));
        assert!(matches!(deim_cur(&a, 0), Err(Error::Bounds { .. })));
    }

    #[test]
    fn rectangular_middle_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = gaussian(9, 7, &mut rng);
        let f = deim_cur_rect(&a, 4, 2).unwrap();
        assert_eq!((f.p.len(), f.s.len()), (2, 4));
        assert_eq!(f.m.shape(), (2, 4));
    }

    #[test]
    fn middle_matrix_is_stewart_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = gaussian(12, 8, &mut rng);
            let f = deim_cur(&a, 3).unwrap();
            // Frobenius: in the 2-norm C⁺AR⁺ need not be a minimizer
            let base = a.sub(&f.reconstruct(&a)).fro_norm();
            let (c, r) = (f.c(&a), f.r(&a));
            for _ in 0..100 {
                let delta = gaussian(3, 3, &mut rng).scale(rng.random_range(1e-6..1e-1));
                let other = c.matmul(&f.m.add(&delta)).matmul(&r);
                let e = a.sub(&other).fro_norm();
                assert!(base <= e + 1e-12, "{base} > {e}");
            }
        }
    }

    #[test]
    fn error_splits_into_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = gaussian(15, 10, &mut rng);
            let f = deim_cur(&a, 4).unwrap();
            let c = f.c(&a);
            let r = f.r(&a);
            let col = a.sub(&c.matmul(&pinv_apply(&c, &a, Side::Left).unwrap()));
            let row = a.sub(&pinv_apply(&r, &a, Side::Right).unwrap().matmul(&r));
            let rhs = spectral_norm(&col).unwrap() + spectral_norm(&row).unwrap();
            assert!(f.error(&a).unwrap() <= rhs + 1e-12);
        }
    }

    #[test]
    fn interpolative_column_mode_on_diagonal() {
        let a = DenseMatrix::diag(&[3.0, 2.0, 1.0]);
        let id = interpolative(&a, 2, IdMode::Column).unwrap();
        assert_eq!(id.indices.one_based(), vec![1, 2]);
        let want = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!(id.factor.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn interpolative_spanning_case_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = gaussian(10, 3, &mut rng).matmul(&gaussian(3, 8, &mut rng));
        for mode in [IdMode::Column, IdMode::Row] {
            let id = interpolative(&a, 3, mode).unwrap();
            assert!(id.error(&a).unwrap() <= 1e-10 * spectral_norm(&a).unwrap());
        }
    }

    #[test]
    fn row_mode_is_column_mode_of_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let a = gaussian(11, 7, &mut rng);
            let row = interpolative(&a, 3, IdMode::Row).unwrap();
            let col = interpolative(&a.transpose(), 3, IdMode::Column).unwrap();
            assert_eq!(row.indices, col.indices);
        }
    }

    #[test]
    fn rank_deficient_factor_is_named() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let p = IndexVector::new(vec![0, 1], 3).unwrap();
        let s = IndexVector::new(vec![0, 2], 3).unwrap();
        match middle_matrix(&a, &p, &s) {
            Err(Error::Singular { factor, .. }) => assert_eq!(factor, "C"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cut_gap_flags_ties() {
        assert!(cut_gap(&[2.0, 1.0, 1.0], 2) <= RANK_TOL);
        assert_eq!(cut_gap(&[2.0, 1.0, 0.5], 1), 0.5);
    }
}
