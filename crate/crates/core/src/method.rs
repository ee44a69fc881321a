//! Low-rank approximation strategies behind one trait, looked up by name.
//!
//! A [`LowRankMethod`] does the rank-independent work once in
//! [`LowRankMethod::prepare`] (an SVD or GSVD); the returned [`Prepared`]
//! then produces rank-`k` approximations cheaply for any `k`.

use std::fmt;

use crate::curfac::deim_cur_from_svd;
use crate::error::{Error, Result};
use crate::gcur::{gcur_from_gsvd, GcurConfig};
use crate::gsvd::{gsvd, GsvdFactors};
use crate::matkit::{svd, DenseMatrix, SvdFactors};

/// A rank-`k` approximation of a data matrix, optionally relative to a
/// reference matrix with the same number of columns.
pub trait LowRankMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Whether [`LowRankMethod::prepare`] needs the reference matrix.
    fn needs_reference(&self) -> bool;

    fn prepare(&self, data: &DenseMatrix, reference: Option<&DenseMatrix>) -> Result<Box<dyn Prepared>>;
}

/// Factorized state from which approximations of any admissible rank follow.
pub trait Prepared: Send + Sync {
    fn approximate(&self, k: usize) -> Result<DenseMatrix>;
}

fn reference<'a>(name: &str, r: Option<&'a DenseMatrix>) -> Result<&'a DenseMatrix> {
    r.ok_or_else(|| Error::InvalidParameter(format!("method {name} needs a reference matrix")))
}

fn check_k(k: usize, limit: usize) -> Result<()> {
    if k == 0 || k >= limit {
        return Err(Error::bounds("k", k, format!("1 <= k < {limit}")));
    }
    Ok(())
}

/// Truncated SVD of the data.
pub struct Tsvd;

struct PreparedSvd(SvdFactors);

impl Prepared for PreparedSvd {
    fn approximate(&self, k: usize) -> Result<DenseMatrix> {
        check_k(k, self.0.psi.len() + 1)?;
        Ok(self.0.truncated(k))
    }
}

impl LowRankMethod for Tsvd {
    fn name(&self) -> &'static str {
        "tsvd"
    }

    fn description(&self) -> &'static str {
        "truncated SVD W_k Ψ_k Z_kᵀ"
    }

    fn needs_reference(&self) -> bool {
        false
    }

    fn prepare(&self, data: &DenseMatrix, _: Option<&DenseMatrix>) -> Result<Box<dyn Prepared>> {
        Ok(Box::new(PreparedSvd(svd(data)?)))
    }
}

/// Truncated GSVD `U_k Γ_k Y_kᵀ` of the pair.
pub struct Tgsvd;

struct PreparedGsvd(GsvdFactors);

impl Prepared for PreparedGsvd {
    fn approximate(&self, k: usize) -> Result<DenseMatrix> {
        Ok(self.0.truncate(k)?.a_k())
    }
}

impl LowRankMethod for Tgsvd {
    fn name(&self) -> &'static str {
        "tgsvd"
    }

    fn description(&self) -> &'static str {
        "truncated GSVD U_k Γ_k Y_kᵀ relative to the reference"
    }

    fn needs_reference(&self) -> bool {
        true
    }

    fn prepare(&self, data: &DenseMatrix, r: Option<&DenseMatrix>) -> Result<Box<dyn Prepared>> {
        Ok(Box::new(PreparedGsvd(gsvd(data, reference(self.name(), r)?)?)))
    }
}

/// DEIM-CUR of the data.
pub struct Cur;

struct PreparedCur {
    data: DenseMatrix,
    svd: SvdFactors,
}

impl Prepared for PreparedCur {
    fn approximate(&self, k: usize) -> Result<DenseMatrix> {
        Ok(deim_cur_from_svd(&self.data, &self.svd, k, k)?.reconstruct(&self.data))
    }
}

impl LowRankMethod for Cur {
    fn name(&self) -> &'static str {
        "cur"
    }

    fn description(&self) -> &'static str {
        "DEIM-CUR on the singular vectors"
    }

    fn needs_reference(&self) -> bool {
        false
    }

    fn prepare(&self, data: &DenseMatrix, _: Option<&DenseMatrix>) -> Result<Box<dyn Prepared>> {
        Ok(Box::new(PreparedCur {
            data: data.clone(),
            svd: svd(data)?,
        }))
    }
}

/// DEIM-GCUR of the data relative to the reference.
pub struct Gcur;

struct PreparedGcur {
    data: DenseMatrix,
    reference: DenseMatrix,
    gsvd: GsvdFactors,
}

impl Prepared for PreparedGcur {
    fn approximate(&self, k: usize) -> Result<DenseMatrix> {
        let f = gcur_from_gsvd(&self.data, &self.reference, &self.gsvd, &GcurConfig::rank(k).only_a())?;
        Ok(f.reconstruct_a(&self.data))
    }
}

impl LowRankMethod for Gcur {
    fn name(&self) -> &'static str {
        "gcur"
    }

    fn description(&self) -> &'static str {
        "DEIM-GCUR on the generalized singular vectors"
    }

    fn needs_reference(&self) -> bool {
        true
    }

    fn prepare(&self, data: &DenseMatrix, r: Option<&DenseMatrix>) -> Result<Box<dyn Prepared>> {
        let reference = reference(self.name(), r)?;
        Ok(Box::new(PreparedGcur {
            data: data.clone(),
            reference: reference.clone(),
            gsvd: gsvd(data, reference)?,
        }))
    }
}

/// Named collection of methods, in registration order.
#[derive(Default)]
pub struct MethodRegistry {
    methods: Vec<Box<dyn LowRankMethod>>,
}

impl fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `tsvd`, `tgsvd`, `cur`, `gcur`.
    pub fn standard() -> Self {
        Self::new().with(Tsvd).with(Tgsvd).with(Cur).with(Gcur)
    }

    /// Builder form of [`MethodRegistry::register`]; panics on a duplicate name.
    pub fn with(mut self, method: impl LowRankMethod + 'static) -> Self {
        if let Err(e) = self.register(Box::new(method)) {
            panic!("{e}");
        }
        self
    }

    pub fn register(&mut self, method: Box<dyn LowRankMethod>) -> Result<()> {
        if self.get(method.name()).is_some() {
            return Err(Error::InvalidParameter(format!(
                "method {} is already registered",
                method.name()
            )));
        }
        self.methods.push(method);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn LowRankMethod> {
        self.methods.iter().find(|m| m.name() == name).map(|m| m.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn LowRankMethod> {
        self.methods.iter().map(|m| m.as_ref())
    }
}
