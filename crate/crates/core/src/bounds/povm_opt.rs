//! Measurement optimization for fixed reward operators: maximize
//! `Σ_x Tr[P^x R^x]` over POVMs `{P^x}`.

use crate::error::{dim_err, invalid, Error, Result};
use crate::qcore::linalg::{
    hermitian_part, hermiticity_error, identity, max_abs, spectral_decompose, sqrt_psd,
    trace_product,
};
use crate::qcore::{CMatrix, Povm};

use super::BoundMethod;

/// Pairwise refinements stop once no pair improves by more than this.
pub const REFINE_TOL: f64 = 1e-10;
const MAX_REFINE_SWEEPS: usize = 1000;

fn check_rewards(rewards: &[CMatrix]) -> Result<usize> {
    let first = rewards
        .first()
        .ok_or_else(|| invalid("no reward operators"))?;
    let d = first.nrows();
    for r in rewards {
        if r.nrows() != d || r.ncols() != d {
            return Err(dim_err("reward operators differ in dimension"));
        }
        let herm = hermiticity_error(r);
        if herm > crate::qcore::linalg::EIGEN_HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
    }
    Ok(d)
}

fn zero_threshold(m: &CMatrix) -> f64 {
    1e-12 * max_abs(m).max(1.0)
}

pub fn povm_value(povm: &Povm, rewards: &[CMatrix]) -> f64 {
    povm.effects()
        .iter()
        .zip(rewards)
        .map(|(p, r)| trace_product(p, r).re)
        .sum()
}

/// Exact two-outcome optimum: project onto the positive eigenspace of
/// `R¹ − R⁰`; numerically zero eigenvalues go to outcome 0.
pub fn optimal_binary_povm(r0: &CMatrix, r1: &CMatrix) -> Result<(Povm, f64)> {
    let d = check_rewards(&[r0.clone(), r1.clone()])?;
    let diff = hermitian_part(&(r1 - r0));
    let spec = spectral_decompose(&diff)?;
    let eps = zero_threshold(&diff);
    let p1 = spec.rebuild(|l| if l > eps { 1.0 } else { 0.0 });
    let p0 = identity(d) - &p1;
    let gain: f64 = spec.values.iter().filter(|&&l| l > eps).sum();
    let value = r0.trace().re + gain;
    Ok((Povm::new(vec![p0, p1])?, value))
}

/// Optimal split of `E = P^a + P^b` between outcomes `a` and `b`.
fn refine_pair(
    pa: &CMatrix,
    pb: &CMatrix,
    ra: &CMatrix,
    rb: &CMatrix,
) -> Result<(CMatrix, CMatrix)> {
    let e = pa + pb;
    let root = sqrt_psd(&hermitian_part(&e))?;
    let w = hermitian_part(&(&root * (ra - rb) * &root));
    let eps = zero_threshold(&w);
    let proj = spectral_decompose(&w)?.rebuild(|l| if l >= -eps { 1.0 } else { 0.0 });
    let new_a = hermitian_part(&(&root * proj * &root));
    let new_b = hermitian_part(&(e - &new_a));
    Ok((new_a, new_b))
}

/// Block-coordinate ascent over outcome pairs starting from `init`. The
/// objective never decreases.
pub fn refine_povm(rewards: &[CMatrix], init: &Povm) -> Result<(Povm, f64)> {
    check_rewards(rewards)?;
    if init.len() != rewards.len() || init.dim() != rewards[0].nrows() {
        return Err(dim_err("initial POVM does not match rewards"));
    }
    let m = rewards.len();
    let mut effects: Vec<CMatrix> = init.effects().to_vec();
    for _ in 0..MAX_REFINE_SWEEPS {
        let mut improved = false;
        for a in 0..m {
            for b in a + 1..m {
                let before = trace_product(&effects[a], &rewards[a]).re
                    + trace_product(&effects[b], &rewards[b]).re;
                let (na, nb) = refine_pair(&effects[a], &effects[b], &rewards[a], &rewards[b])?;
                let after = trace_product(&na, &rewards[a]).re + trace_product(&nb, &rewards[b]).re;
                if after > before + REFINE_TOL {
                    effects[a] = na;
                    effects[b] = nb;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let povm = Povm::new(effects)?;
    let value = povm_value(&povm, rewards);
    Ok((povm, value))
}

/// Best POVM for `rewards`. Exact for one or two outcomes; for more, a
/// certified lower bound from pairwise refinement starting with all weight
/// on the outcome of largest trace.
pub fn optimal_povm(rewards: &[CMatrix]) -> Result<(Povm, f64, BoundMethod)> {
    let d = check_rewards(rewards)?;
    match rewards.len() {
        1 => Ok((
            Povm::trivial(d, 1),
            rewards[0].trace().re,
            BoundMethod::EnumerationExact,
        )),
        2 => {
            let (p, v) = optimal_binary_povm(&rewards[0], &rewards[1])?;
            Ok((p, v, BoundMethod::EnumerationExact))
        }
        m => {
            let best = (0..m)
                .max_by(|&a, &b| {
                    rewards[a]
                        .trace()
                        .re
                        .total_cmp(&rewards[b].trace().re)
                        .then(b.cmp(&a))
                })
                .expect("nonempty");
            let mut init = vec![CMatrix::zeros(d, d); m];
            init[best] = identity(d);
            let (p, v) = refine_povm(rewards, &Povm::new(init)?)?;
            Ok((p, v, BoundMethod::SearchLowerBound))
        }
    }
}

/// Improves `current` for the given rewards: exact re-solve for two
/// outcomes, pairwise refinement from `current` otherwise.
pub(crate) fn improve_povm(rewards: &[CMatrix], current: &Povm) -> Result<(Povm, f64)> {
    match rewards.len() {
        1 | 2 => {
            let (p, v, _) = optimal_povm(rewards)?;
            Ok((p, v))
        }
        _ => refine_povm(rewards, current),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{from_real_diagonal, max_abs_diff};
    use crate::qcore::random::{random_hermitian_with, rng_for};

    #[test]
    fn degenerate_rewards_give_trivial_povm() {
        let mut rng = rng_for(1, 0);
        let r = random_hermitian_with(&mut rng, 3);
        let (p, v) = optimal_binary_povm(&r, &r).unwrap();
        assert!((v - r.trace().re).abs() < 1e-12);
        assert!(max_abs_diff(p.effect(0), &identity(3)) < 1e-14);
        assert!(max_abs(p.effect(1)) < 1e-14);
    }

    #[test]
    fn commuting_binary_case() {
        let (p, v) = optimal_binary_povm(
            &from_real_diagonal(&[1.0, 0.0]),
            &from_real_diagonal(&[0.0, 1.0]),
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        assert!(max_abs_diff(p.effect(0), &from_real_diagonal(&[1.0, 0.0])) < 1e-14);
        assert!(max_abs_diff(p.effect(1), &from_real_diagonal(&[0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn reported_value_matches_povm() {
        for seed in 0..20 {
            let mut rng = rng_for(seed, 1);
            let r0 = random_hermitian_with(&mut rng, 4);
            let r1 = random_hermitian_with(&mut rng, 4);
            let (p, v) = optimal_binary_povm(&r0, &r1).unwrap();
            assert!((povm_value(&p, &[r0, r1]) - v).abs() < 1e-10);
        }
    }

    #[test]
    fn multi_outcome_equal_rewards_and_delegation() {
        let mut rng = rng_for(2, 0);
        let r = random_hermitian_with(&mut rng, 3);
        let (_, v, method) = optimal_povm(&[r.clone(), r.clone(), r.clone()]).unwrap();
        assert!((v - r.trace().re).abs() < 1e-12);
        assert_eq!(method, BoundMethod::SearchLowerBound);

        let r2 = random_hermitian_with(&mut rng, 3);
        let (p2, v2, m2) = optimal_povm(&[r.clone(), r2.clone()]).unwrap();
        let (p_exact, v_exact) = optimal_binary_povm(&r, &r2).unwrap();
        assert_eq!(v2, v_exact);
        assert_eq!(p2, p_exact);
        assert_eq!(m2, BoundMethod::EnumerationExact);
    }

    #[test]
    fn diagonal_rewards_reach_pointwise_max() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 5);
            let m = 4;
            let d = 5;
            let diags: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    (0..d)
                        .map(|_| crate::qcore::random::normal(&mut rng))
                        .collect()
                })
                .collect();
            let rewards: Vec<CMatrix> = diags.iter().map(|v| from_real_diagonal(v)).collect();
            let oracle: f64 = (0..d)
                .map(|k| diags.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max))
                .sum();
            let (_, v, _) = optimal_povm(&rewards).unwrap();
            assert!((v - oracle).abs() < 1e-12, "seed {seed}: {v} vs {oracle}");
        }
    }

    #[test]
    fn rejects_bad_rewards() {
        assert!(optimal_povm(&[]).is_err());
        let nh = CMatrix::from_row_slice(
            2,
            2,
            &[
                crate::qcore::linalg::ONE,
                crate::qcore::linalg::ONE,
                crate::qcore::linalg::ZERO,
                crate::qcore::linalg::ONE,
            ],
        );
        assert!(matches!(
            optimal_binary_povm(&nh, &identity(2)),
            Err(Error::NotHermitian(_))
        ));
    }
}
