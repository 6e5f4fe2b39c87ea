//! Named two-party state families and separability helpers.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{dim_err, invalid, Result};
use crate::qcore::linalg::{
    c, identity, ket, projector, spectral_decompose, tensor, tensor_vec, CMatrix, CVector, ONE,
};
use crate::qcore::random::{random_distribution_with, random_ket_with, rng_for};
use crate::qcore::DensityOperator;

/// Bell basis vector: 0 = Φ⁺, 1 = Φ⁻, 2 = Ψ⁺, 3 = Ψ⁻ (singlet).
pub fn bell_vector(k: usize) -> Result<CVector> {
    let s = FRAC_1_SQRT_2;
    let amps = match k {
        0 => [s, 0.0, 0.0, s],
        1 => [s, 0.0, 0.0, -s],
        2 => [0.0, s, s, 0.0],
        3 => [0.0, s, -s, 0.0],
        _ => return Err(invalid(format!("Bell state index {k} outside 0..=3"))),
    };
    Ok(CVector::from_iterator(4, amps.iter().map(|&a| c(a, 0.0))))
}

pub fn bell_state(k: usize) -> Result<DensityOperator> {
    DensityOperator::new(projector(&bell_vector(k)?), vec![2, 2])
}

pub fn singlet() -> DensityOperator {
    bell_state(3).expect("index 3 is a Bell state")
}

/// `Σ_i |ii⟩/√d`.
pub fn maximally_entangled_vector(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

pub fn maximally_entangled(d: usize) -> Result<DensityOperator> {
    if d < 2 {
        return Err(invalid(format!(
            "maximally entangled state needs d >= 2, got {d}"
        )));
    }
    DensityOperator::new(projector(&maximally_entangled_vector(d)), vec![d, d])
}

/// `w·|Ψ⁻⟩⟨Ψ⁻| + (1−w)·1/4`.
pub fn werner_state(w: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&w) {
        return Err(invalid(format!("Werner parameter {w} outside [0, 1]")));
    }
    let singlet = projector(&bell_vector(3)?);
    let m = singlet.scale(w) + identity(4).scale((1.0 - w) / 4.0);
    DensityOperator::new(m, vec![2, 2])
}

/// Which side of a bipartite operator to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

pub fn partial_transpose_matrix(m: &CMatrix, da: usize, db: usize, side: Side) -> Result<CMatrix> {
    if m.nrows() != da * db || !m.is_square() {
        return Err(dim_err("partial transpose dims do not match operator"));
    }
    let mut out = CMatrix::zeros(da * db, da * db);
    for a in 0..da {
        for b in 0..db {
            for ap in 0..da {
                for bp in 0..db {
                    let (i, j) = match side {
                        Side::B => (a * db + bp, ap * db + b),
                        Side::A => (ap * db + b, a * db + bp),
                    };
                    out[(a * db + b, ap * db + bp)] = m[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

pub fn partial_transpose(rho: &DensityOperator, side: Side) -> Result<CMatrix> {
    let (da, db) = rho.bipartite_dims()?;
    partial_transpose_matrix(rho.matrix(), da, db, side)
}

/// Smallest eigenvalue of the partial transpose on B.
pub fn ppt_min_eigenvalue(rho: &DensityOperator) -> Result<f64> {
    Ok(spectral_decompose(&partial_transpose(rho, Side::B)?)?.min())
}

/// Sum of the moduli of the negative partial-transpose eigenvalues.
pub fn negativity(rho: &DensityOperator) -> Result<f64> {
    crate::qcore::linalg::negative_mass(&partial_transpose(rho, Side::B)?)
}

/// One term `ν |a⟩⟨a| ⊗ |b⟩⟨b|` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub alice: CVector,
    pub bob: CVector,
}

impl ProductTerm {
    pub fn operator(&self) -> CMatrix {
        tensor(&projector(&self.alice), &projector(&self.bob)).scale(self.weight)
    }
}

/// Random separable two-qubit state with its certificate.
pub fn random_separable(seed: u64, n_terms: usize) -> Result<(DensityOperator, Vec<ProductTerm>)> {
    random_separable_dims(seed, n_terms, 2, 2)
}

pub fn random_separable_dims(
    seed: u64,
    n_terms: usize,
    da: usize,
    db: usize,
) -> Result<(DensityOperator, Vec<ProductTerm>)> {
    if n_terms == 0 {
        return Err(invalid("separable state needs at least one term"));
    }
    let mut rng = rng_for(seed, 0);
    let weights = random_distribution_with(&mut rng, n_terms);
    let terms: Vec<ProductTerm> = weights
        .into_iter()
        .map(|weight| ProductTerm {
            weight,
            alice: random_ket_with(&mut rng, da),
            bob: random_ket_with(&mut rng, db),
        })
        .collect();
    let m = terms
        .iter()
        .fold(CMatrix::zeros(da * db, da * db), |acc, t| {
            acc + t.operator()
        });
    Ok((DensityOperator::new(m, vec![da, db])?, terms))
}

pub fn product_state(a: &CVector, b: &CVector) -> Result<DensityOperator> {
    DensityOperator::from_pure(&tensor_vec(a, b), vec![a.len(), b.len()])
}

/// Qubit eigenstates used as question states.
pub mod qubit {
    use super::*;

    pub fn zero() -> CVector {
        ket(2, 0)
    }

    pub fn one() -> CVector {
        ket(2, 1)
    }

    pub fn plus() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
    }

    pub fn minus() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)])
    }

    pub fn plus_i() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)])
    }

    pub fn minus_i() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)])
    }

    /// `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`, the +1 eigenvector of `cos θ Z + sin θ X`.
    pub fn real_angle(theta: f64) -> CVector {
        CVector::from_vec(vec![
            c((theta / 2.0).cos(), 0.0),
            c((theta / 2.0).sin(), 0.0),
        ])
    }

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), ONE, ONE, c(0.0, 0.0)])
    }

    pub fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }
}
