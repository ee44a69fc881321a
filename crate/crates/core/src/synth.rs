//! Seeded generators for the synthetic test problems: structured low-rank
//! matrices, Toeplitz-covariance colored noise, exact and perturbed Cholesky
//! factors, and the four-subgroup contrastive dataset.
//!
//! Every generator draws from [`ChaCha8Rng`]. A run is identified by a `u64`
//! seed; independent substreams (one per trial and purpose) are obtained with
//! [`stream_rng`], which sets the ChaCha stream id on top of the seed. The
//! stream layout is `trial << 8 | purpose`, see [`trial_stream`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::matkit::{cholesky_upper, spectral_norm, DenseMatrix};

/// Rank of the low-rank test matrices.
pub const LOWRANK_TERMS: usize = 50;
/// Expected density of the sparse factor vectors.
pub const SPARSE_DENSITY: f64 = 0.025;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for `purpose` (< 256) within trial `trial`.
pub fn trial_stream(trial: usize, purpose: u8) -> u64 {
    ((trial as u64) << 8) | purpose as u64
}

/// Standard normal `rows × cols` matrix, filled column by column.
pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    DenseMatrix::from_col_major(rows, cols, data).expect("finite gaussian samples")
}

fn check_lowrank_dims(op: &'static str, m: usize, n: usize) -> Result<()> {
    if m.min(n) < LOWRANK_TERMS {
        return Err(Error::dimension(
            op,
            format!("{m}x{n} is too small for {LOWRANK_TERMS} rank-one terms"),
        ));
    }
    Ok(())
}

/// `Σ_j w_j·x_j·y_jᵀ` with `x_j`, `y_j` the columns of `x`, `y`.
fn weighted_outer(x: &DenseMatrix, y: &DenseMatrix, weights: &[f64]) -> DenseMatrix {
    x.scale_cols(weights).matmul_t(y)
}

/// `sprand`-style vector: each entry nonzero with probability `density`,
/// nonzeros uniform on `[0, 1)`, at least one nonzero.
fn sparse_vector<R: Rng + ?Sized>(len: usize, density: f64, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| if rng.random_bool(density) { rng.random::<f64>() } else { 0.0 })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        let i = rng.random_range(0..len);
        v[i] = rng.random::<f64>();
    }
    v
}

/// Nonnegative rank-50 matrix `Σ_{j≤10} (2/j)·x_j y_jᵀ + Σ_{10<j≤50} (1/j)·x_j y_jᵀ`
/// with sparse factor vectors.
pub fn lowrank_sparse(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    check_lowrank_dims("lowrank_sparse", m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec<f64>> = (0..LOWRANK_TERMS)
        .map(|_| sparse_vector(m, SPARSE_DENSITY, &mut rng))
        .collect();
    let ys: Vec<Vec<f64>> = (0..LOWRANK_TERMS)
        .map(|_| sparse_vector(n, SPARSE_DENSITY, &mut rng))
        .collect();
    let w: Vec<f64> = (1..=LOWRANK_TERMS)
        .map(|j| if j <= 10 { 2.0 / j as f64 } else { 1.0 / j as f64 })
        .collect();
    Ok(weighted_outer(
        &DenseMatrix::from_columns(&xs, m),
        &DenseMatrix::from_columns(&ys, n),
        &w,
    ))
}

/// Dense rank-50 matrix `Σ_{j≤10} (1000/j)·x_j y_jᵀ + Σ_{10<j≤50} (1/j)·x_j y_jᵀ`
/// with standard normal factors, giving a large drop after the 10th
/// singular value.
pub fn lowrank_gapped(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    check_lowrank_dims("lowrank_gapped", m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = gaussian(m, LOWRANK_TERMS, &mut rng);
    let y = gaussian(n, LOWRANK_TERMS, &mut rng);
    let w: Vec<f64> = (1..=LOWRANK_TERMS)
        .map(|j| if j <= 10 { 1000.0 / j as f64 } else { 1.0 / j as f64 })
        .collect();
    Ok(weighted_outer(&x, &y, &w))
}

/// Symmetric Toeplitz matrix with entries `ρ^|i−j|`.
pub fn toeplitz(n: usize, rho: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| rho.powi(i.abs_diff(j) as i32))
}

/// Upper-triangular `Rchol` with `Rcholᵀ·Rchol = toeplitz(ρ^0, …, ρ^{n−1})`.
pub fn toeplitz_chol(n: usize, rho: f64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("toeplitz dimension must be positive".into()));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must lie in (0, 1)")));
    }
    cholesky_upper(&toeplitz(n, rho))
}

/// Noise covariance structure.
#[derive(Clone, Debug, PartialEq)]
pub enum Covariance {
    Toeplitz(f64),
    Explicit(DenseMatrix),
}

impl Covariance {
    /// Upper Cholesky factor of the covariance, for `n` columns.
    pub fn chol(&self, n: usize) -> Result<DenseMatrix> {
        match self {
            Covariance::Toeplitz(rho) => toeplitz_chol(n, *rho),
            Covariance::Explicit(c) => {
                if c.shape() != (n, n) {
                    return Err(Error::dimension(
                        "colored_noise",
                        format!("covariance is {}x{}, data has {n} columns", c.rows(), c.cols()),
                    ));
                }
                cholesky_upper(c)
            }
        }
    }
}

/// How the raw noise `F` is scaled into `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NoiseScaling {
    /// `E = ε·(‖A‖/‖F‖)·F`, so that `‖E‖ = ε·‖A‖`.
    #[default]
    Relative,
    /// `E = ε·(‖F‖/‖A‖)·F`, the formula as printed for the experiments.
    Literal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub covariance: Covariance,
    pub epsilon: f64,
    pub scaling: NoiseScaling,
    pub seed: u64,
}

/// Output of [`colored_noise`].
#[derive(Clone, Debug)]
pub struct NoisyMatrix {
    pub a_e: DenseMatrix,
    pub e: DenseMatrix,
    pub rchol: DenseMatrix,
}

/// `A_E = A + E` with `E` a scaled copy of `F = G·Rchol`, `G` standard normal.
pub fn colored_noise(a: &DenseMatrix, model: &NoiseModel) -> Result<NoisyMatrix> {
    let rchol = model.covariance.chol(a.cols())?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let e = scaled_noise(a, &rchol, model.epsilon, model.scaling, &mut rng)?;
    Ok(NoisyMatrix {
        a_e: a.add(&e),
        e,
        rchol,
    })
}

/// Noise term `E` for a given Cholesky factor, drawing `G` from `rng`.
/// Norms are spectral.
pub fn scaled_noise<R: Rng + ?Sized>(
    a: &DenseMatrix,
    rchol: &DenseMatrix,
    epsilon: f64,
    scaling: NoiseScaling,
    rng: &mut R,
) -> Result<DenseMatrix> {
    if rchol.shape() != (a.cols(), a.cols()) {
        return Err(Error::dimension(
            "colored_noise",
            format!("Rchol is {}x{}, data has {} columns", rchol.rows(), rchol.cols(), a.cols()),
        ));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level {epsilon} must be >= 0")));
    }
    let f = gaussian(a.rows(), a.cols(), rng).matmul(rchol);
    if epsilon == 0.0 {
        return Ok(DenseMatrix::zeros(a.rows(), a.cols()));
    }
    let norm_a = spectral_norm(a)?;
    let norm_f = spectral_norm(&f)?;
    let c = match scaling {
        NoiseScaling::Relative => epsilon * norm_a / norm_f,
        NoiseScaling::Literal => epsilon * norm_f / norm_a,
    };
    Ok(f.scale(c))
}

/// Multiplies every strictly upper entry of `rchol` by an independent
/// uniform `[0.9, 1.1]` factor.
pub fn perturb_chol(rchol: &DenseMatrix, seed: u64) -> DenseMatrix {
    perturb_chol_with(rchol, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn perturb_chol_with<R: Rng + ?Sized>(rchol: &DenseMatrix, rng: &mut R) -> DenseMatrix {
    let mut out = rchol.clone();
    for j in 0..out.cols() {
        for i in 0..j.min(out.rows()) {
            out[(i, j)] *= rng.random_range(0.9..=1.1);
        }
    }
    out
}

/// Subgroup names, in label order.
pub const GROUPS: [&str; 4] = ["blue", "yellow", "orange", "purple"];
/// Features per block; the data has three blocks.
pub const BLOCK_WIDTH: usize = 10;

/// One block of features: per-group means and a common standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSpec {
    pub means: [f64; 4],
    pub std_dev: f64,
}

impl BlockSpec {
    pub const fn centered(std_dev: f64) -> Self {
        BlockSpec {
            means: [0.0; 4],
            std_dev,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupSpec {
    pub points_per_group: usize,
    pub target: [BlockSpec; 3],
    pub background: [BlockSpec; 3],
    /// Subtract each column's mean from both matrices.
    pub center: bool,
    pub seed: u64,
}

impl Default for SubgroupSpec {
    fn default() -> Self {
        SubgroupSpec {
            points_per_group: 100,
            target: [
                BlockSpec::centered(10.0),
                BlockSpec {
                    means: [0.0, 6.0, 0.0, 6.0],
                    std_dev: 1.0,
                },
                BlockSpec {
                    means: [0.0, 0.0, 3.0, 3.0],
                    std_dev: 1.0,
                },
            ],
            background: [BlockSpec::centered(10.0), BlockSpec::centered(3.0), BlockSpec::centered(1.0)],
            center: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubgroupData {
    /// Target, `4·points_per_group × 30`.
    pub a: DenseMatrix,
    /// Background, same shape.
    pub b: DenseMatrix,
    /// Group index of each target row (into [`GROUPS`]).
    pub labels: Vec<usize>,
}

fn block_matrix<R: Rng + ?Sized>(blocks: &[BlockSpec; 3], labels: &[usize], rng: &mut R) -> Result<DenseMatrix> {
    let rows = labels.len();
    let mut out = DenseMatrix::zeros(rows, 3 * BLOCK_WIDTH);
    for (b, spec) in blocks.iter().enumerate() {
        let noise = Normal::new(0.0, spec.std_dev)
            .map_err(|e| Error::InvalidParameter(format!("block {}: {e}", b + 1)))?;
        for j in b * BLOCK_WIDTH..(b + 1) * BLOCK_WIDTH {
            for (i, &g) in labels.iter().enumerate() {
                out[(i, j)] = spec.means[g] + noise.sample(rng);
            }
        }
    }
    Ok(out)
}

fn center_columns(a: &DenseMatrix) -> DenseMatrix {
    let mut out = a.clone();
    for j in 0..out.cols() {
        let col = out.col_mut(j);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        col.iter_mut().for_each(|x| *x -= mean);
    }
    out
}

/// Target and background matrices with four planted subgroups in the target.
pub fn subgroup_data(spec: &SubgroupSpec) -> Result<SubgroupData> {
    if spec.points_per_group == 0 {
        return Err(Error::InvalidParameter("points_per_group must be positive".into()));
    }
    let labels: Vec<usize> = (0..GROUPS.len())
        .flat_map(|g| std::iter::repeat_n(g, spec.points_per_group))
        .collect();
    let mut a = block_matrix(&spec.target, &labels, &mut stream_rng(spec.seed, 0))?;
    let mut b = block_matrix(&spec.background, &labels, &mut stream_rng(spec.seed, 1))?;
    if spec.center {
        a = center_columns(&a);
        b = center_columns(&b);
    }
    Ok(SubgroupData { a, b, labels })
}
