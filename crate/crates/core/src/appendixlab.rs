//! Teleportation and informationally complete measurements at qudit scale,
//! and the two-path reconstruction of a steering assemblage.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;

use crate::engine::lift_settings;
use crate::error::{dim_err, invalid, Result};
use crate::games::QuestionEnsemble;
use crate::maps::Assemblage;
use crate::qcore::linalg::{
    c, contract_left, hermitian_part, identity, ket, partial_trace, projector, tensor, tensor_all,
    CMatrix, CVector, C64, ONE,
};
use crate::qcore::{DensityOperator, Povm};
use crate::states::maximally_entangled_vector;

/// Smallest singular value the stacked effects must reach to count as
/// spanning the operator space.
pub const SPAN_TOL: f64 = 1e-8;

/// Joint effects `Z^{x,y} = Σ_i ν(i) P^x(i) ⊗ Q^y(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexLocalPovm {
    branches: Vec<(f64, Povm, Povm)>,
    joint: Povm,
}

impl ConvexLocalPovm {
    pub fn new(branches: Vec<(f64, Povm, Povm)>) -> Result<Self> {
        let (_, p0, q0) = branches.first().ok_or_else(|| invalid("no branches"))?;
        let shape = |p: &Povm, q: &Povm| (p.dim(), p.len(), q.dim(), q.len());
        let want = shape(p0, q0);
        if branches.iter().any(|(_, p, q)| shape(p, q) != want) {
            return Err(dim_err("branches differ in dimensions or outcome counts"));
        }
        let total: f64 = branches.iter().map(|b| b.0).sum();
        if branches.iter().any(|b| !(b.0 > 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(invalid("branch weights must be positive and sum to 1"));
        }
        let (nx, ny) = (want.1, want.3);
        let d = want.0 * want.2;
        let mut effects = vec![CMatrix::zeros(d, d); nx * ny];
        for (w, p, q) in &branches {
            for x in 0..nx {
                for y in 0..ny {
                    effects[x * ny + y] += tensor(p.effect(x), q.effect(y)).scale(*w);
                }
            }
        }
        let joint = Povm::new(effects)?;
        Ok(Self { branches, joint })
    }

    pub fn branches(&self) -> &[(f64, Povm, Povm)] {
        &self.branches
    }

    /// Indexed `x·|Y| + y`.
    pub fn joint(&self) -> &Povm {
        &self.joint
    }
}

/// Shift `X|k⟩ = |k+1⟩` and clock `Z|k⟩ = ω^k |k⟩`.
fn shift_clock(d: usize) -> (CMatrix, CMatrix) {
    let mut x = CMatrix::zeros(d, d);
    let mut z = CMatrix::zeros(d, d);
    for k in 0..d {
        x[((k + 1) % d, k)] = ONE;
        z[(k, k)] = C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
    }
    (x, z)
}

/// Weyl operators `W_y = X^m Z^n`, `y = m·d + n`.
pub fn weyl_operators(d: usize) -> Result<Vec<CMatrix>> {
    if d < 2 {
        return Err(invalid(format!("Weyl operators need d >= 2, got {d}")));
    }
    let (x, z) = shift_clock(d);
    let pow = |m: &CMatrix, k: usize| (0..k).fold(identity(d), |acc, _| acc * m);
    Ok((0..d * d)
        .map(|y| pow(&x, y / d) * pow(&z, y % d))
        .collect())
}

/// Projectors onto `(1 ⊗ W_y)|Ψ⁺⟩`.
pub fn generalized_bell_povm(d: usize) -> Result<Povm> {
    let psi = maximally_entangled_vector(d);
    let effects = weyl_operators(d)?
        .iter()
        .map(|w| projector(&(tensor(&identity(d), w) * &psi)))
        .collect();
    Povm::new(effects)
}

/// Unitaries that undo the Weyl twist on the receiving side: outcome `y`
/// leaves `W̄_y w W_yᵀ / d²` there, so `V^y = W_yᵀ`.
pub fn teleport_corrections(d: usize) -> Result<Vec<CMatrix>> {
    Ok(weyl_operators(d)?.iter().map(|w| w.transpose()).collect())
}

/// `Σ_y V^y Tr_{BB0}[(Q^y ⊗ 1)(w ⊗ Ψ⁺)] V^y†` for measurement `bell` on
/// `B B0` and corrections `v`.
fn teleport_with(w: &CMatrix, bell: &Povm, v: &[CMatrix]) -> CMatrix {
    let d = w.nrows();
    let psi = projector(&maximally_entangled_vector(d));
    let joint = tensor(w, &psi);
    let mut out = CMatrix::zeros(d, d);
    for (q, vy) in bell.effects().iter().zip(v) {
        let left = contract_left(&joint, d * d, d, q);
        out += vy * left * vy.adjoint();
    }
    hermitian_part(&out)
}

/// Runs `w` through Bell measurement and correction; the result equals `w`.
pub fn teleport_identity(w: &DensityOperator) -> Result<DensityOperator> {
    if w.dims().len() != 1 {
        return Err(dim_err("teleportation takes a single-system state"));
    }
    let d = w.dim();
    let out = teleport_with(
        w.matrix(),
        &generalized_bell_povm(d)?,
        &teleport_corrections(d)?,
    );
    DensityOperator::new(out, vec![d])
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcPovm {
    povm: Povm,
    frame: DMatrix<C64>,
}

impl IcPovm {
    /// Fails unless the effects span all `d × d` operators.
    pub fn new(povm: Povm) -> Result<Self> {
        let d = povm.dim();
        let frame = DMatrix::from_fn(povm.len(), d * d, |t, k| {
            povm.effect(t)[(k / d, k % d)].conj()
        });
        let sv = frame.clone().singular_values();
        let smallest = if povm.len() < d * d {
            0.0
        } else {
            sv.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        if smallest < SPAN_TOL {
            return Err(invalid(format!(
                "effects do not span the operator space (smallest singular value {smallest:e})"
            )));
        }
        Ok(Self { povm, frame })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    /// Rows are `vec(Υ^t)*`, so that `frame · vec(ρ)` gives `Tr[Υ^t ρ]`.
    pub fn frame(&self) -> &DMatrix<C64> {
        &self.frame
    }

    pub fn probabilities(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        if rho.nrows() != self.dim() || !rho.is_square() {
            return Err(dim_err("state does not match the POVM dimension"));
        }
        Ok(self
            .povm
            .effects()
            .iter()
            .map(|e| crate::qcore::linalg::trace_product(e, rho).re)
            .collect())
    }

    /// Least-squares inversion of the frame.
    pub fn reconstruct(&self, probs: &[f64]) -> Result<CMatrix> {
        if probs.len() != self.povm.len() {
            return Err(dim_err("one probability per effect is required"));
        }
        let d = self.dim();
        let p = DMatrix::from_iterator(probs.len(), 1, probs.iter().map(|&v| c(v, 0.0)));
        let v = self
            .frame
            .clone()
            .svd(true, true)
            .solve(&p, 1e-14)
            .map_err(|e| invalid(format!("frame inversion failed: {e}")))?;
        Ok(hermitian_part(&CMatrix::from_fn(d, d, |i, j| {
            v[(i * d + j, 0)]
        })))
    }
}

fn mub_qutrit() -> Vec<CVector> {
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let r = 1.0 / 3f64.sqrt();
    let mut out: Vec<CVector> = (0..3).map(|k| ket(3, k)).collect();
    for b in 0..3usize {
        for k in 0..3usize {
            let amps = (0..3usize).map(|j| w.powu(((k * j + b * j * j) % 3) as u32) * r);
            out.push(CVector::from_iterator(3, amps));
        }
    }
    out
}

/// Eigenstates of `±x, ±y, ±z` weighted `1/3` for qubits; the twelve states
/// of four mutually unbiased bases weighted `1/4` for qutrits.
pub fn ic_povm(d: usize) -> Result<IcPovm> {
    let (kets, weight) = match d {
        2 => {
            let s = FRAC_1_SQRT_2;
            let kets = vec![
                CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
                CVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)]),
                CVector::from_vec(vec![c(s, 0.0), c(0.0, s)]),
                CVector::from_vec(vec![c(s, 0.0), c(0.0, -s)]),
                ket(2, 0),
                ket(2, 1),
            ];
            (kets, 1.0 / 3.0)
        }
        3 => (mub_qutrit(), 0.25),
        _ => {
            return Err(invalid(format!(
                "informationally complete POVM only for d = 2 or 3, got {d}"
            )))
        }
    };
    IcPovm::new(Povm::new(
        kets.iter().map(|k| projector(k).scale(weight)).collect(),
    )?)
}

/// `ω^t = Tr_{B1}[(1 ⊗ Υ^t) Ψ⁺] / q(t)` with `q(t) = Tr Υ^t / d`.
pub fn omega_from_ic(ic: &IcPovm) -> Result<(Vec<DensityOperator>, Vec<f64>)> {
    let d = ic.dim();
    let psi = projector(&maximally_entangled_vector(d));
    let mut states = Vec::new();
    let mut weights = Vec::new();
    for u in ic.povm().effects() {
        let unnorm = hermitian_part(&crate::qcore::linalg::contract_right(&psi, d, d, u));
        let q = unnorm.trace().re;
        if !(q > 0.0) {
            return Err(invalid("effect with zero trace"));
        }
        states.push(DensityOperator::new(unnorm.unscale(q), vec![d])?);
        weights.push(q);
    }
    Ok((states, weights))
}

/// The `ω^t` ensemble as Bob's questions.
pub fn omega_ensemble(ic: &IcPovm) -> Result<QuestionEnsemble> {
    let (states, weights) = omega_from_ic(ic)?;
    QuestionEnsemble::new(states, weights)
}

/// Both sides of the reconstruction identity for `ρ = σ` on `A' B'`:
/// the teleportation path `Tr_A[(P̄^{x|s} ⊗ 1)(I ⊗ F)(σ)]` with
/// `P̄^{x|s} = Tr_{A0}[P^x (π^s ⊗ 1)]` and `F` Bell measurement plus
/// correction, and the direct path `Tr_{A0 A'}[(P^x ⊗ 1)(π^s ⊗ σ)]`.
/// `P^x = Σ_s π^s ⊗ P^{x|s}` is Alice's lifted measurement; `π^s` are
/// computational states of `A0 ≅ A'`.
pub fn reconstruct_assemblage(
    sigma: &DensityOperator,
    alice_povms: &[Povm],
) -> Result<(Assemblage, Assemblage)> {
    let (da, db) = sigma.bipartite_dims()?;
    let n_s = alice_povms.len();
    if n_s == 0 || n_s > da {
        return Err(dim_err(format!(
            "{n_s} settings do not fit a question system of dimension {da}"
        )));
    }
    let n_x = alice_povms[0].len();
    if alice_povms.iter().any(|p| p.dim() != da || p.len() != n_x) {
        return Err(dim_err(
            "settings must be POVMs on Alice's system with equal outcome counts",
        ));
    }
    let mut probs = vec![0.0; da];
    probs[..n_s].iter_mut().for_each(|p| *p = 1.0 / n_s as f64);
    let questions = QuestionEnsemble::new(
        (0..n_s)
            .map(|s| DensityOperator::new(projector(&ket(da, s)), vec![da]))
            .collect::<Result<Vec<_>>>()?,
        probs[..n_s].to_vec(),
    )?;
    let lifted = lift_settings(&questions, alice_povms, true)?;
    let bell = generalized_bell_povm(db)?;
    let z = ConvexLocalPovm::new(vec![(1.0, lifted, bell)])?;

    let pis: Vec<CMatrix> = (0..n_s).map(|s| projector(&ket(da, s))).collect();
    let mut direct = Vec::with_capacity(n_s * n_x);
    for pi in &pis {
        let full = tensor(pi, sigma.matrix());
        for x in 0..n_x {
            let op = tensor(z.branches()[0].1.effect(x), &identity(db));
            direct.push(hermitian_part(&partial_trace(
                &(op * &full),
                &[da, da, db],
                &[2],
            )?));
        }
    }

    let v = teleport_corrections(db)?;
    let psi = projector(&maximally_entangled_vector(db));
    let mut teleported = vec![CMatrix::zeros(db, db); n_s * n_x];
    for (nu, p_bar, q_bar) in z.branches() {
        let full = tensor(sigma.matrix(), &psi);
        let dims = [da, db, db, db];
        let mut processed = CMatrix::zeros(da * db, da * db);
        for (q, vy) in q_bar.effects().iter().zip(&v) {
            let op = tensor_all(&[&identity(da), q, &identity(db)]);
            let kept = partial_trace(&(op * &full), &dims, &[0, 3])?;
            let corr = tensor(&identity(da), vy);
            processed += &corr * kept * corr.adjoint();
        }
        for (s, pi) in pis.iter().enumerate() {
            for x in 0..n_x {
                let pxs = contract_left(p_bar.effect(x), da, da, pi);
                teleported[s * n_x + x] += contract_left(&processed, da, db, &pxs).scale(*nu);
            }
        }
    }
    let teleported = Assemblage::new(n_s, n_x, teleported.iter().map(hermitian_part).collect())?;
    let direct = Assemblage::new(n_s, n_x, direct)?;
    Ok((teleported, direct))
}
