use super::linalg::{
    hermiticity_error, max_abs_diff, projector, spectral_decompose, tensor, CMatrix, CVector,
};
use super::{HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};
use crate::error::{dim_err, Error, Result};

/// A validated density operator together with its subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let herm = hermiticity_error(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::Trace(tr.re));
        }
        let min = spectral_decompose(&matrix)?.min();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix, dims })
    }

    /// Builds `|ψ⟩⟨ψ|` after normalizing `psi`.
    pub fn from_pure(psi: &CVector, dims: Vec<usize>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::Invalid("zero state vector".into()));
        }
        Self::new(projector(&psi.unscale(n)), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
            dims,
        }
    }

    /// The trivial one-dimensional state, used as a placeholder shared
    /// resource when parties hold nothing.
    pub fn trivial() -> Self {
        Self {
            matrix: CMatrix::identity(1, 1),
            dims: vec![1, 1],
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Same operator, different subsystem split.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&self.matrix, &dims)?;
        Ok(Self {
            matrix: self.matrix.clone(),
            dims,
        })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: tensor(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// Returns `(dA, dB)` for a bipartite operator.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims[..] {
            [a, b] => Ok((a, b)),
            _ => Err(dim_err(format!(
                "expected a bipartite state, got dims {:?}",
                self.dims
            ))),
        }
    }

    pub fn purity(&self) -> f64 {
        super::linalg::trace_product(&self.matrix, &self.matrix).re
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let m = super::linalg::partial_trace(&self.matrix, &self.dims, keep)?;
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { matrix: m, dims })
    }

    /// Convex combination `Σ w_i ρ_i`; all inputs must share dims.
    pub fn mixture(terms: &[(f64, &Self)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Invalid("empty mixture".into()))?
            .1;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            if rho.dims != first.dims {
                return Err(dim_err("mixture components have different dims"));
            }
            m += rho.matrix.scale(*w);
        }
        Self::new(m, first.dims.clone())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dims == other.dims && max_abs_diff(&self.matrix, &other.matrix) <= tol
    }
}

fn check_dims(m: &CMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(dim_err(format!(
            "density matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(dim_err(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != m.nrows() {
        return Err(dim_err(format!(
            "dims {dims:?} do not match matrix dimension {}",
            m.nrows()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{c, from_real_diagonal, identity};

    #[test]
    fn rejects_invalid_operators() {
        let not_herm =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(not_herm, vec![2]),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            DensityOperator::new(from_real_diagonal(&[1.2, -0.2]), vec![2]),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            DensityOperator::new(identity(2), vec![2]),
            Err(Error::Trace(_))
        ));
        assert!(DensityOperator::new(identity(4).unscale(4.0), vec![2, 3]).is_err());
    }

    #[test]
    fn maximally_mixed_reduces_to_maximally_mixed() {
        let rho = DensityOperator::maximally_mixed(vec![2, 3]);
        let red = rho.reduced(&[1]).unwrap();
        assert!(red.approx_eq(&DensityOperator::maximally_mixed(vec![3]), 1e-15));
    }
}
