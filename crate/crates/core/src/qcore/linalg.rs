//! Dense complex linear algebra on small operators.
//!
//! Multipartite operators are stored with the first subsystem varying
//! slowest, so `tensor(a, b)[(i*db + k, j*db + l)] = a[(i, j)] * b[(k, l)]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance used by [`spectral_decompose`].
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> CMatrix {
    CMatrix::zeros(d, d)
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let mut m = zeros(diag.len());
    for (i, &v) in diag.iter().enumerate() {
        m[(i, i)] = c(v, 0.0);
    }
    m
}

/// Computational basis vector `|i⟩` of dimension `d`.
pub fn ket(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = ONE;
    v
}

/// Rank-one operator `|v⟩⟨v|`.
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Kronecker product, left factor varying slowest.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_all(factors: &[&CMatrix]) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, ONE);
    for f in factors {
        out = out.kronecker(*f);
    }
    out
}

pub fn tensor_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// `Tr(a·b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `‖m − m†‖_max`; infinite for non-square input.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut err = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn checked_total(dims: &[usize], n: usize) -> Result<()> {
    if dims.contains(&0) {
        return Err(dim_err(format!("zero subsystem dimension in {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != n {
        return Err(dim_err(format!(
            "subsystem dims {dims:?} multiply to {total}, operator has dimension {n}"
        )));
    }
    Ok(())
}

/// Splits a flat index into per-subsystem digits (first subsystem slowest).
fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn flat(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Re-expresses `m` in a permuted tensor order: position `k` of the output
/// holds old subsystem `perm[k]`.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(dim_err("permute_subsystems needs a square operator"));
    }
    checked_total(dims, m.nrows())?;
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
    {
        return Err(dim_err(format!(
            "{perm:?} is not a permutation of {n} subsystems"
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total = m.nrows();
    // map[old_flat] = new_flat
    let mut map = vec![0usize; total];
    let mut old = vec![0usize; n];
    let mut new = vec![0usize; n];
    for (i, slot) in map.iter_mut().enumerate() {
        digits(i, dims, &mut old);
        for k in 0..n {
            new[k] = old[perm[k]];
        }
        *slot = flat(&new, &new_dims);
    }
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Inverse of a permutation as used by [`permute_subsystems`].
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original relative order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(dim_err("partial_trace needs a square operator"));
    }
    checked_total(dims, m.nrows())?;
    let n = dims.len();
    let mut keep_mask = vec![false; n];
    for &k in keep {
        if k >= n || keep_mask[k] {
            return Err(dim_err(format!(
                "invalid keep set {keep:?} for {n} subsystems"
            )));
        }
        keep_mask[k] = true;
    }
    let kept_dims: Vec<usize> = (0..n).filter(|&k| keep_mask[k]).map(|k| dims[k]).collect();
    let traced_dims: Vec<usize> = (0..n).filter(|&k| !keep_mask[k]).map(|k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let total = m.nrows();
    let mut kept_idx = vec![0usize; total];
    let mut traced_idx = vec![0usize; total];
    let mut dig = vec![0usize; n];
    let mut kd = Vec::with_capacity(n);
    let mut td = Vec::with_capacity(n);
    for i in 0..total {
        digits(i, dims, &mut dig);
        kd.clear();
        td.clear();
        for k in 0..n {
            if keep_mask[k] {
                kd.push(dig[k]);
            } else {
                td.push(dig[k]);
            }
        }
        kept_idx[i] = flat(&kd, &kept_dims);
        traced_idx[i] = flat(&td, &traced_dims);
    }
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..total {
        for j in 0..total {
            if traced_idx[i] == traced_idx[j] {
                out[(kept_idx[i], kept_idx[j])] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `Tr_R[joint · (1_L ⊗ op)]` for a bipartite operator on `L ⊗ R`.
pub fn contract_right(joint: &CMatrix, dl: usize, dr: usize, op: &CMatrix) -> CMatrix {
    debug_assert_eq!(joint.nrows(), dl * dr);
    debug_assert_eq!(op.nrows(), dr);
    let mut out = CMatrix::zeros(dl, dl);
    for a in 0..dl {
        for ap in 0..dl {
            let mut acc = ZERO;
            for b in 0..dr {
                for bp in 0..dr {
                    acc += joint[(a * dr + b, ap * dr + bp)] * op[(bp, b)];
                }
            }
            out[(a, ap)] = acc;
        }
    }
    out
}

/// `Tr_L[joint · (op ⊗ 1_R)]` for a bipartite operator on `L ⊗ R`.
pub fn contract_left(joint: &CMatrix, dl: usize, dr: usize, op: &CMatrix) -> CMatrix {
    debug_assert_eq!(joint.nrows(), dl * dr);
    debug_assert_eq!(op.nrows(), dl);
    let mut out = CMatrix::zeros(dr, dr);
    for b in 0..dr {
        for bp in 0..dr {
            let mut acc = ZERO;
            for a in 0..dl {
                for ap in 0..dl {
                    acc += joint[(a * dr + b, ap * dr + bp)] * op[(ap, a)];
                }
            }
            out[(b, bp)] = acc;
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            out += (v * v.adjoint()).scale(w);
        }
        out
    }
}

pub fn spectral_decompose(h: &CMatrix) -> Result<Spectrum> {
    let err = hermiticity_error(h);
    if err > EIGEN_HERMITIAN_TOL {
        return Err(Error::NotHermitian(err));
    }
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(h.nrows(), h.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum { values, vectors })
}

pub fn min_eigenvalue(h: &CMatrix) -> Result<f64> {
    Ok(spectral_decompose(h)?.min())
}

/// Square root of a PSD operator (negative eigenvalues clipped to zero).
pub fn sqrt_psd(h: &CMatrix) -> Result<CMatrix> {
    Ok(spectral_decompose(h)?.rebuild(|l| l.max(0.0).sqrt()))
}

/// Projection onto the PSD cone in Hilbert–Schmidt norm.
pub fn psd_part(h: &CMatrix) -> Result<CMatrix> {
    Ok(spectral_decompose(h)?.rebuild(|l| l.max(0.0)))
}

/// Sum of absolute values of the negative eigenvalues.
pub fn negative_mass(h: &CMatrix) -> Result<f64> {
    Ok(spectral_decompose(h)?
        .values
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum())
}
