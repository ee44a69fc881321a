//! Generalized CUR of a pair `(A, B)`.
//!
//! DEIM on the GSVD factors picks one shared column index vector `p` (from
//! `Y_k`) and separate row index vectors `s_A` (from `U_k`) and `s_B` (from
//! `V_k`):
//!
//! ```text
//! A ≈ C_A·M_A·R_A = A(:,p)·M_A·A(s_A,:)
//! B ≈ C_B·M_B·R_B = B(:,p)·M_B·B(s_B,:)
//! ```

mod bounds;

pub use bounds::{evaluate_bounds, evaluate_bounds_with, svd_subspace_gap, BoundCheck, BoundReport, SubspaceGap};

use log::warn;

use crate::curfac::{interpolative_from, middle_matrix_named, IdMode, Interpolative};
use crate::deim::{deim_select, IndexVector};
use crate::error::{Error, Result};
use crate::gsvd::{gsvd, GsvdFactors};
use crate::matkit::{spectral_norm, DenseMatrix, RANK_TOL};

/// Ranks and which sides to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GcurConfig {
    /// Rows selected from `A` (and `B`).
    pub k_row: usize,
    /// Shared columns.
    pub k_col: usize,
    /// Skip `s_B` and `M_B`.
    pub only_a: bool,
}

impl GcurConfig {
    pub fn rank(k: usize) -> Self {
        GcurConfig {
            k_row: k,
            k_col: k,
            only_a: false,
        }
    }

    pub fn only_a(mut self) -> Self {
        self.only_a = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcurFactors {
    pub p: IndexVector,
    pub s_a: IndexVector,
    pub s_b: Option<IndexVector>,
    pub m_a: DenseMatrix,
    pub m_b: Option<DenseMatrix>,
    /// `γ_k/σ_k − γ_{k+1}/σ_{k+1}` at the column cut.
    pub ratio_gap: f64,
}

impl GcurFactors {
    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn c_a(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_cols(self.p.as_slice())
    }

    pub fn r_a(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_rows(self.s_a.as_slice())
    }

    pub fn c_b(&self, b: &DenseMatrix) -> DenseMatrix {
        b.select_cols(self.p.as_slice())
    }

    pub fn r_b(&self, b: &DenseMatrix) -> Option<DenseMatrix> {
        self.s_b.as_ref().map(|s| b.select_rows(s.as_slice()))
    }

    /// `C_A·M_A·R_A`.
    pub fn reconstruct_a(&self, a: &DenseMatrix) -> DenseMatrix {
        self.c_a(a).matmul(&self.m_a).matmul(&self.r_a(a))
    }

    /// `C_B·M_B·R_B`, when the `B` side was built.
    pub fn reconstruct_b(&self, b: &DenseMatrix) -> Option<DenseMatrix> {
        let m_b = self.m_b.as_ref()?;
        Some(self.c_b(b).matmul(m_b).matmul(&self.r_b(b)?))
    }

    /// `‖A − C_A·M_A·R_A‖`.
    pub fn error_a(&self, a: &DenseMatrix) -> Result<f64> {
        spectral_norm(&a.sub(&self.reconstruct_a(a)))
    }

    pub fn error_b(&self, b: &DenseMatrix) -> Result<Option<f64>> {
        self.reconstruct_b(b)
            .map(|r| spectral_norm(&b.sub(&r)))
            .transpose()
    }
}

/// Gap between consecutive generalized singular value ratios at `k`,
/// warning when it vanishes.
pub fn ratio_gap(f: &GsvdFactors, k: usize) -> f64 {
    let r = f.ratios();
    if k == 0 || k >= r.len() {
        return f64::INFINITY;
    }
    let gap = if r[k - 1] == r[k] { 0.0 } else { r[k - 1] - r[k] };
    if gap <= RANK_TOL * r[k - 1].abs().min(f64::MAX) {
        warn!(
            "generalized singular value ratios {k} and {} coincide (gap {gap:.3e}); selection follows the stable GSVD order",
            k + 1
        );
    }
    gap
}

fn check_config(f: &GsvdFactors, config: &GcurConfig) -> Result<()> {
    let n = f.n();
    for (what, k) in [("k_row", config.k_row), ("k_col", config.k_col)] {
        if k == 0 || k >= n {
            return Err(Error::bounds(what, k, format!("1 <= {what} < n = {n}")));
        }
    }
    Ok(())
}

/// Rank-`k` GCUR of `(A, B)`.
pub fn gcur(a: &DenseMatrix, b: &DenseMatrix, k: usize) -> Result<GcurFactors> {
    gcur_with(a, b, &GcurConfig::rank(k))
}

/// GCUR of `A` only: `s_B` and `M_B` are not computed.
pub fn gcur_only_a(a: &DenseMatrix, b: &DenseMatrix, k: usize) -> Result<GcurFactors> {
    gcur_with(a, b, &GcurConfig::rank(k).only_a())
}

pub fn gcur_with(a: &DenseMatrix, b: &DenseMatrix, config: &GcurConfig) -> Result<GcurFactors> {
    let f = gsvd(a, b)?;
    gcur_from_gsvd(a, b, &f, config)
}

/// GCUR from a precomputed `gsvd(a, b)`.
pub fn gcur_from_gsvd(a: &DenseMatrix, b: &DenseMatrix, f: &GsvdFactors, config: &GcurConfig) -> Result<GcurFactors> {
    if a.shape() != (f.u.rows(), f.n()) || b.shape() != (f.v.rows(), f.n()) {
        return Err(Error::dimension(
            "gcur",
            format!(
                "factors describe a {}x{} / {}x{} pair, got {}x{} / {}x{}",
                f.u.rows(),
                f.n(),
                f.v.rows(),
                f.n(),
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            ),
        ));
    }
    check_config(f, config)?;
    let ratio_gap = ratio_gap(f, config.k_col);
    if config.k_row != config.k_col {
        self::ratio_gap(f, config.k_row);
    }
    let (p, (s_a, s_b)) = rayon::join(
        || deim_select(&f.y, config.k_col),
        || {
            rayon::join(
                || deim_select(&f.u, config.k_row),
                || (!config.only_a).then(|| deim_select(&f.v, config.k_row)),
            )
        },
    );
    let (p, s_a, s_b) = (p?, s_a?, s_b.transpose()?);
    let m_a = middle_matrix_named(a, &p, &s_a, ("C_A", "R_A"))?;
    let m_b = s_b
        .as_ref()
        .map(|s| middle_matrix_named(b, &p, s, ("C_B", "R_B")))
        .transpose()?;
    Ok(GcurFactors {
        p,
        s_a,
        s_b,
        m_a,
        m_b,
        ratio_gap,
    })
}

/// Generalized interpolative decomposition of `A`: column mode keeps
/// `A(:,p)` with `p` from `Y_k`, row mode keeps `A(s_A,:)` with `s_A` from `U_k`.
pub fn gcur_interpolative(a: &DenseMatrix, b: &DenseMatrix, k: usize, mode: IdMode) -> Result<Interpolative> {
    let f = gsvd(a, b)?;
    check_config(&f, &GcurConfig::rank(k))?;
    ratio_gap(&f, k);
    match mode {
        IdMode::Column => interpolative_from(a, deim_select(&f.y, k)?, mode, "C_A"),
        IdMode::Row => interpolative_from(a, deim_select(&f.u, k)?, mode, "R_A"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curfac::deim_cur;
    use crate::synth::gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_pair() -> (DenseMatrix, DenseMatrix) {
        (DenseMatrix::diag(&[1.0, 2.0, 3.0]), DenseMatrix::diag(&[1.0, 20.0, 300.0]))
    }

    #[test]
    fn diagonal_pair_rank_one() {
        let (a, b) = diag_pair();
        let f = gcur(&a, &b, 1).unwrap();
        assert_eq!(f.p.one_based(), vec![1]);
        assert_eq!(f.s_a.one_based(), vec![1]);
        assert_eq!(f.s_b.as_ref().unwrap().one_based(), vec![1]);
        assert_eq!(f.m_a.shape(), (1, 1));
    }

    #[test]
    fn identity_b_matches_cur() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = gaussian(14, 9, &mut rng);
        let g = gcur(&a, &DenseMatrix::identity(9), 4).unwrap();
        let c = deim_cur(&a, 4).unwrap();
        assert_eq!(g.p, c.p);
        assert_eq!(g.s_a, c.s);
        assert!(g.m_a.max_abs_diff(&c.m) < 1e-8 * c.m.max_abs());
    }

    #[test]
    fn only_a_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = gaussian(20, 8, &mut rng);
        let b = gaussian(15, 8, &mut rng);
        let full = gcur(&a, &b, 3).unwrap();
        let half = gcur_only_a(&a, &b, 3).unwrap();
        assert_eq!(full.p, half.p);
        assert_eq!(full.s_a, half.s_a);
        assert_eq!(full.m_a, half.m_a);
        assert!(half.s_b.is_none() && half.m_b.is_none());
        assert!(full.error_b(&b).unwrap().is_some());
    }

    #[test]
    fn rank_bounds() {
        let (a, b) = diag_pair();
        assert!(matches!(gcur(&a, &b, 3), Err(Error::Bounds { .. })));
        assert!(matches!(gcur(&a, &b, 0), Err(Error::Bounds { .. })));
    }

    #[test]
    fn rank_deficient_columns_are_named() {
        // columns 1 and 2 coincide
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [2.0, 2.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 3.0]]).unwrap();
        let p = IndexVector::new(vec![0, 1], 3).unwrap();
        let s = IndexVector::new(vec![0, 3], 4).unwrap();
        match middle_matrix_named(&a, &p, &s, ("C_A", "R_A")) {
            Err(Error::Singular { factor, .. }) => assert_eq!(factor, "C_A"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interpolative_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = gaussian(12, 3, &mut rng).matmul(&gaussian(3, 7, &mut rng));
        let b = gaussian(9, 7, &mut rng);
        for mode in [IdMode::Column, IdMode::Row] {
            let id = gcur_interpolative(&a, &b, 3, mode).unwrap();
            assert!(id.error(&a).unwrap() < 1e-9 * spectral_norm(&a).unwrap());
        }
    }

    #[test]
    fn distinct_row_and_column_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = gaussian(20, 8, &mut rng);
        let b = gaussian(10, 8, &mut rng);
        let cfg = GcurConfig {
            k_row: 5,
            k_col: 3,
            only_a: false,
        };
        let f = gcur_with(&a, &b, &cfg).unwrap();
        assert_eq!(f.m_a.shape(), (3, 5));
        assert_eq!(f.m_b.as_ref().unwrap().shape(), (3, 5));
    }
}
