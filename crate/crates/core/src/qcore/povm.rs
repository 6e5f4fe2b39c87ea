use super::linalg::{hermiticity_error, identity, max_abs_diff, spectral_decompose, CMatrix};
use super::{COMPLETENESS_TOL, HERMITIAN_TOL, POSITIVITY_TOL};
use crate::error::{dim_err, invalid, Error, Result};

/// Finite POVM; outcome `i` is `effects[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| invalid("POVM with no effects"))?;
        let d = first.nrows();
        let mut total = CMatrix::zeros(d, d);
        for e in &effects {
            if e.nrows() != d || e.ncols() != d {
                return Err(dim_err("POVM effects differ in dimension"));
            }
            let herm = hermiticity_error(e);
            if herm > HERMITIAN_TOL {
                return Err(Error::NotHermitian(herm));
            }
            let min = spectral_decompose(e)?.min();
            if min < -POSITIVITY_TOL {
                return Err(Error::NotPositive(min));
            }
            total += e;
        }
        let dev = max_abs_diff(&total, &identity(d));
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self { effects })
    }

    /// Projective measurement in the basis given by the columns of `basis`;
    /// column `k` is assigned to outcome `labels[k]`.
    pub fn from_basis(basis: &CMatrix, labels: &[usize], outcomes: usize) -> Result<Self> {
        let d = basis.nrows();
        if labels.len() != basis.ncols() || labels.iter().any(|&l| l >= outcomes) {
            return Err(invalid("basis labels do not match outcomes"));
        }
        let mut effects = vec![CMatrix::zeros(d, d); outcomes];
        for (k, &l) in labels.iter().enumerate() {
            let v = basis.column(k);
            effects[l] += v * v.adjoint();
        }
        Self::new(effects)
    }

    /// `{1, 0, …, 0}` with `outcomes` entries.
    pub fn trivial(d: usize, outcomes: usize) -> Self {
        let mut effects = vec![CMatrix::zeros(d, d); outcomes.max(1)];
        effects[0] = identity(d);
        Self { effects }
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &CMatrix {
        &self.effects[i]
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    pub fn into_effects(self) -> Vec<CMatrix> {
        self.effects
    }
}
