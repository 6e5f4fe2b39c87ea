//! Seeded test-input generators.
//!
//! Every generator draws from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded
//! with `seed_from_u64(seed)` and switched to stream `stream`. Uniform
//! doubles are the top 53 bits of a `u64` scaled by 2^-53, and standard
//! normals come from the Box–Muller transform applied to a pair of uniforms
//! (`sqrt(-2 ln(1-u1)) * cos(2π u2)`, one normal per pair). Complex Ginibre
//! entries are `(n1 + i n2)/√2` with the real part drawn first, and matrices
//! are filled row by row.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::channel::KrausChannel;
use super::density::DensityOperator;
use super::linalg::{c, spectral_decompose, CMatrix, CVector};
use super::povm::Povm;
use crate::error::{invalid, Result};

pub type QRng = ChaCha20Rng;

pub fn rng_for(seed: u64, stream: u64) -> QRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn normal<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn index<R: RngCore>(rng: &mut R, n: usize) -> usize {
    ((uniform(rng) * n as f64) as usize).min(n - 1)
}

pub fn ginibre_with<R: RngCore>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re = normal(rng);
            let im = normal(rng);
            m[(i, j)] = c(re * s, im * s);
        }
    }
    m
}

pub fn random_hermitian_with<R: RngCore>(rng: &mut R, d: usize) -> CMatrix {
    let g = ginibre_with(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-random pure state.
pub fn random_ket_with<R: RngCore>(rng: &mut R, d: usize) -> CVector {
    let g = ginibre_with(rng, d, 1);
    let v = g.column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}

/// Orthonormalizes the columns of `g` by modified Gram–Schmidt. Applied to a
/// Ginibre matrix this yields a Haar-distributed isometry.
fn orthonormal_columns(mut g: CMatrix) -> CMatrix {
    for j in 0..g.ncols() {
        for k in 0..j {
            let qk = g.column(k).into_owned();
            let proj = qk.dotc(&g.column(j));
            let mut col = g.column_mut(j);
            col -= qk * proj;
        }
        let n = g.column(j).norm();
        let mut col = g.column_mut(j);
        col.unscale_mut(n);
    }
    g
}

pub fn random_unitary_with<R: RngCore>(rng: &mut R, d: usize) -> CMatrix {
    orthonormal_columns(ginibre_with(rng, d, d))
}

pub fn random_density_with<R: RngCore>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    let g = ginibre_with(rng, dim, rank);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

pub fn random_povm_with<R: RngCore>(rng: &mut R, dim: usize, outcomes: usize) -> Result<Povm> {
    let parts: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre_with(rng, dim, dim);
            &g * g.adjoint()
        })
        .collect();
    let total = parts
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
    let inv_sqrt = spectral_decompose(&total)?.rebuild(|l| 1.0 / l.sqrt());
    let effects = parts.iter().map(|p| &inv_sqrt * p * &inv_sqrt).collect();
    Povm::new(effects)
}

/// Random CPTP map from a Haar isometry `d_in → d_out·n_kraus`, cut into
/// `n_kraus` blocks.
pub fn random_channel_with<R: RngCore>(
    rng: &mut R,
    d_in: usize,
    d_out: usize,
    n_kraus: usize,
) -> Result<KrausChannel> {
    if d_in == 0 || d_out == 0 || n_kraus == 0 || d_out * n_kraus < d_in {
        return Err(invalid(format!(
            "cannot build a channel {d_in} -> {d_out} with {n_kraus} Kraus operators"
        )));
    }
    let v = orthonormal_columns(ginibre_with(rng, d_out * n_kraus, d_in));
    let ops = (0..n_kraus)
        .map(|k| v.rows(k * d_out, d_out).into_owned())
        .collect();
    KrausChannel::new(ops)
}

pub fn random_density(seed: u64, dim: usize, rank: usize) -> Result<DensityOperator> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(invalid(format!("rank {rank} invalid for dimension {dim}")));
    }
    let mut rng = rng_for(seed, 0);
    DensityOperator::new(random_density_with(&mut rng, dim, rank), vec![dim])
}

pub fn random_unitary(seed: u64, dim: usize) -> Result<CMatrix> {
    if dim == 0 {
        return Err(invalid("unitary dimension must be positive"));
    }
    let mut rng = rng_for(seed, 0);
    Ok(random_unitary_with(&mut rng, dim))
}

pub fn random_povm(seed: u64, dim: usize, outcomes: usize) -> Result<Povm> {
    if dim == 0 || outcomes < 2 {
        return Err(invalid(format!(
            "random POVM needs dim >= 1 and outcomes >= 2 (got {dim}, {outcomes})"
        )));
    }
    let mut rng = rng_for(seed, 0);
    random_povm_with(&mut rng, dim, outcomes)
}

pub fn random_channel(
    seed: u64,
    d_in: usize,
    d_out: usize,
    n_kraus: usize,
) -> Result<KrausChannel> {
    let mut rng = rng_for(seed, 0);
    random_channel_with(&mut rng, d_in, d_out, n_kraus)
}

/// Random probability vector (normalized exponentials, strictly positive).
pub fn random_distribution_with<R: RngCore>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - uniform(rng)).ln() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{identity, max_abs_diff, trace_product};

    #[test]
    fn rank_one_density_is_pure() {
        for seed in 0..5 {
            let rho = random_density(seed, 2, 1).unwrap();
            let purity = trace_product(rho.matrix(), rho.matrix()).re;
            assert!((purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_is_unitary() {
        for d in 1..6 {
            let u = random_unitary(d as u64, d).unwrap();
            assert!(max_abs_diff(&(u.adjoint() * &u), &identity(d)) <= 1e-12);
        }
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        assert_eq!(
            random_unitary(42, 3).unwrap(),
            random_unitary(42, 3).unwrap()
        );
        assert_eq!(
            random_density(42, 4, 2).unwrap().matrix(),
            random_density(42, 4, 2).unwrap().matrix()
        );
        let a = random_povm(42, 2, 3).unwrap();
        let b = random_povm(42, 2, 3).unwrap();
        assert_eq!(a.effects(), b.effects());
        assert_ne!(
            random_unitary(42, 3).unwrap(),
            random_unitary(43, 3).unwrap()
        );
    }

    #[test]
    fn streams_are_independent() {
        let mut a = rng_for(7, 0);
        let mut b = rng_for(7, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(random_density(0, 2, 3).is_err());
        assert!(random_povm(0, 2, 1).is_err());
        assert!(random_channel(0, 4, 1, 2).is_err());
    }

    #[test]
    fn random_channel_is_cptp() {
        let ch = random_channel(3, 2, 3, 2).unwrap();
        assert_eq!((ch.d_in(), ch.d_out()), (2, 3));
    }
}
