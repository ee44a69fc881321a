//! Greedy DEIM index selection and the interpolatory projector it induces.
//!
//! Selection matrices `S = I(:, s)` are never formed; every `Sᵀ·A` is a row
//! gather and every `A·P` a column gather.

use std::fmt;

use crate::error::{Error, Result};
use crate::matkit::{condition_number, singular_values, solve_square, DenseMatrix, Side, RANK_TOL};

/// Largest condition number accepted for `U(s, 1:j)` during selection.
pub const MAX_CONDITION: f64 = 1e12;

/// Ordered, duplicate-free indices. Stored 0-based; [`fmt::Display`] and
/// [`IndexVector::one_based`] give the 1-based form used in reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexVector(Vec<usize>);

impl IndexVector {
    /// Validates distinctness and range against `bound`.
    pub fn new(indices: Vec<usize>, bound: usize) -> Result<Self> {
        for (pos, &i) in indices.iter().enumerate() {
            if i >= bound {
                return Err(Error::bounds("index", i, format!("< {bound}")));
            }
            if indices[..pos].contains(&i) {
                return Err(Error::InvalidParameter(format!("duplicate index {i}")));
            }
        }
        Ok(IndexVector(indices))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// First `j` entries.
    pub fn prefix(&self, j: usize) -> IndexVector {
        IndexVector(self.0[..j].to_vec())
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, ")")
    }
}

/// First index of the largest magnitude.
fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = -1.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_val {
            best = i;
            best_val = x.abs();
        }
    }
    best
}

/// Selects `k` row indices from the leading `k` columns of `u`.
pub fn deim_select(u: &DenseMatrix, k: usize) -> Result<IndexVector> {
    let (m, cols) = u.shape();
    if k == 0 || k > cols {
        return Err(Error::bounds("k", k, format!("1 <= k <= {cols} (basis columns)")));
    }
    if k > m {
        return Err(Error::bounds("k", k, format!("<= {m} (basis rows)")));
    }
    let mut s = Vec::with_capacity(k);
    if u.col(0).iter().all(|&x| x == 0.0) {
        return Err(Error::DependentBasis {
            step: 1,
            condition: f64::INFINITY,
        });
    }
    s.push(argmax_abs(u.col(0)));
    for j in 1..k {
        let basis = u.col_range(0..j);
        let sub = basis.select_rows(&s);
        let cond = condition_number(&sub)?;
        if !(cond <= MAX_CONDITION) {
            return Err(Error::DependentBasis {
                step: j + 1,
                condition: cond,
            });
        }
        let uj = DenseMatrix::column(u.col(j));
        let c = solve_square(&sub, &uj.select_rows(&s))?;
        let r = uj.sub(&basis.matmul(&c));
        if r.col(0).iter().all(|&x| x == 0.0) {
            return Err(Error::DependentBasis {
                step: j + 1,
                condition: f64::INFINITY,
            });
        }
        s.push(argmax_abs(r.col(0)));
    }
    Ok(IndexVector(s))
}

fn check_square_nonsingular(sub: &DenseMatrix, name: &str) -> Result<()> {
    if sub.rows() != sub.cols() {
        return Err(Error::dimension(
            "deim",
            format!("{name} must be square, got {}x{}", sub.rows(), sub.cols()),
        ));
    }
    let sv = singular_values(sub)?;
    let tol = RANK_TOL * sv[0];
    let smallest = *sv.last().unwrap();
    if smallest <= tol || sv[0] == 0.0 {
        return Err(Error::Singular {
            factor: name.to_string(),
            smallest,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Applies the interpolatory projector built from basis `u` and indices `s`.
///
/// * `Side::Left`: `𝕊·X = U·(U(s,:)⁻¹·X(s,:))`, `X` has `rows(u)` rows.
/// * `Side::Right`: `X·𝕡` with `𝕡 = P·(UᵀP)⁻¹·Uᵀ`, i.e.
///   `X(:,s)·U(s,:)⁻ᵀ·Uᵀ`, `X` has `rows(u)` columns.
pub fn interp_project(u: &DenseMatrix, s: &IndexVector, x: &DenseMatrix, side: Side) -> Result<DenseMatrix> {
    let idx = s.as_slice();
    if let Some(&bad) = idx.iter().find(|&&i| i >= u.rows()) {
        return Err(Error::bounds("index", bad, format!("< {}", u.rows())));
    }
    let sub = u.select_rows(idx);
    check_square_nonsingular(&sub, "U(s,:)")?;
    match side {
        Side::Left => {
            if x.rows() != u.rows() {
                return Err(Error::dimension(
                    "interp_project",
                    format!("basis has {} rows, X has {}", u.rows(), x.rows()),
                ));
            }
            let coef = solve_square(&sub, &x.select_rows(idx))?;
            Ok(u.matmul(&coef))
        }
        Side::Right => {
            if x.cols() != u.rows() {
                return Err(Error::dimension(
                    "interp_project",
                    format!("basis has {} rows, X has {} columns", u.rows(), x.cols()),
                ));
            }
            // (X(:,s)·U(s,:)⁻ᵀ)ᵀ = U(s,:)⁻¹·X(:,s)ᵀ
            let coef_t = solve_square(&sub, &x.select_cols(idx).transpose())?;
            Ok(coef_t.t_matmul(&u.transpose()))
        }
    }
}

/// Error constant `‖U(s,:)⁻¹‖`.
pub fn eta(u: &DenseMatrix, s: &IndexVector) -> Result<f64> {
    let sub = u.select_rows(s.as_slice());
    check_square_nonsingular(&sub, "U(s,:)")?;
    let sv = singular_values(&sub)?;
    Ok(1.0 / sv.last().unwrap())
}
