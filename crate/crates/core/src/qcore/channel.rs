use super::density::DensityOperator;
use super::linalg::{c, identity, max_abs_diff, spectral_decompose, tensor, CMatrix, ZERO};
use super::COMPLETENESS_TOL;
use crate::error::{dim_err, invalid, Error, Result};

/// CPTP map in Kraus form; each operator maps `d_in → d_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| invalid("channel with no Kraus operators"))?;
        let (d_out, d_in) = first.shape();
        let mut total = CMatrix::zeros(d_in, d_in);
        for k in &ops {
            if k.shape() != (d_out, d_in) {
                return Err(dim_err("Kraus operators differ in shape"));
            }
            total += k.adjoint() * k;
        }
        let dev = max_abs_diff(&total, &identity(d_in));
        if dev > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { ops })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            ops: vec![identity(d)],
        }
    }

    pub fn unitary(u: &CMatrix) -> Result<Self> {
        Self::new(vec![u.clone()])
    }

    /// Discard-and-prepare map `X ↦ Tr(X)·state`.
    pub fn constant(d_in: usize, state: &CMatrix) -> Result<Self> {
        let spec = spectral_decompose(state)?;
        let d_out = state.nrows();
        let mut ops = Vec::new();
        for (k, &lam) in spec.values.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let v = spec.vectors.column(k) * c(lam.sqrt(), 0.0);
            for i in 0..d_in {
                let mut op = CMatrix::zeros(d_out, d_in);
                op.set_column(i, &v);
                ops.push(op);
            }
        }
        Self::new(ops)
    }

    /// Fully depolarizing qubit channel from the four Paulis weighted by 1/2.
    pub fn depolarizing_qubit() -> Self {
        let h = 0.5;
        let i = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), ZERO, ZERO, c(h, 0.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, c(h, 0.0), c(h, 0.0), ZERO]);
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -h), c(0.0, h), ZERO]);
        let z = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), ZERO, ZERO, c(-h, 0.0)]);
        Self {
            ops: vec![i, x, y, z],
        }
    }

    /// `E ⊗ F` as a single channel on the joint system.
    pub fn tensor(&self, other: &Self) -> Self {
        let ops = self
            .ops
            .iter()
            .flat_map(|a| other.ops.iter().map(move |b| tensor(a, b)))
            .collect();
        Self { ops }
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn d_in(&self) -> usize {
        self.ops[0].ncols()
    }

    pub fn d_out(&self) -> usize {
        self.ops[0].nrows()
    }

    /// `Σ K ρ K†` on a raw operator.
    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.d_in() || rho.ncols() != self.d_in() {
            return Err(dim_err(format!(
                "channel input dimension {} does not match operator {}x{}",
                self.d_in(),
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut out = CMatrix::zeros(self.d_out(), self.d_out());
        for k in &self.ops {
            out += k * rho * k.adjoint();
        }
        Ok(out)
    }

    /// Dual (Heisenberg-picture) map `Σ K† E K`.
    pub fn dual_matrix(&self, effect: &CMatrix) -> Result<CMatrix> {
        if effect.nrows() != self.d_out() || effect.ncols() != self.d_out() {
            return Err(dim_err(format!(
                "dual map expects a {}x{} effect, got {}x{}",
                self.d_out(),
                self.d_out(),
                effect.nrows(),
                effect.ncols()
            )));
        }
        let mut out = CMatrix::zeros(self.d_in(), self.d_in());
        for k in &self.ops {
            out += k.adjoint() * effect * k;
        }
        Ok(out)
    }
}

/// Applies `ch` to `rho`. Subsystem structure is kept when the channel is
/// dimension preserving; otherwise the output is a single system.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    let out = ch.apply_matrix(rho.matrix())?;
    let dims = if ch.d_in() == ch.d_out() {
        rho.dims().to_vec()
    } else {
        vec![ch.d_out()]
    };
    DensityOperator::new(out, dims)
}

pub fn dual_apply(ch: &KrausChannel, effect: &CMatrix) -> Result<CMatrix> {
    ch.dual_matrix(effect)
}
