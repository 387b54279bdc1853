//! Entanglement quantities: pure-state concurrence, the computable tangle
//! bounds `τ` (lower) and `τ′` (upper), Wootters' two-qubit concurrence, and
//! the η factors built from Schmidt weights.
//!
//! For a density matrix `ρ` on `A ⊗ B`:
//!
//! * `τ(ρ)  = max_S 2 (tr ρ² − tr ρ_S²)`, which may be negative;
//! * `τ′(ρ) = min_S 2 (1 − tr ρ_S²)`.
//!
//! Both equal `C²` on pure states and satisfy `τ <= C² <= τ′`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, sigma_y, svd, ComplexMatrix, Subsystem};
use crate::scalar::Real;
use crate::states::{BipartitePureState, DensityMatrix, SCHMIDT_ZERO};

/// `pair_sum` at or below this is a product state.
pub const PRODUCT_PAIR_SUM: f64 = 1e-14;

/// `C = √(2 (1 − tr ρ_A²))`.
pub fn concurrence_pure<T: Real>(psi: &BipartitePureState<T>) -> Result<T> {
    let norm_sq: T = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::NotNormalized(norm_sq.to_f64().unwrap_or(f64::NAN)));
    }
    let purity = psi.reduced(Subsystem::A).trace_of_square();
    Ok((T::lit(2.0) * (T::one() - purity)).max(T::zero()).sqrt())
}

pub fn tau_lower<T: Real>(rho: &DensityMatrix<T>) -> T {
    let total = rho.purity();
    let two = T::lit(2.0);
    let a = two * (total - rho.reduced(Subsystem::A).trace_of_square());
    let b = two * (total - rho.reduced(Subsystem::B).trace_of_square());
    a.max(b)
}

pub fn tau_upper<T: Real>(rho: &DensityMatrix<T>) -> T {
    let two = T::lit(2.0);
    let a = two * (T::one() - rho.reduced(Subsystem::A).trace_of_square());
    let b = two * (T::one() - rho.reduced(Subsystem::B).trace_of_square());
    a.min(b).max(T::zero())
}

/// Exact concurrence of a two-qubit state.
///
/// With `ρ = W W†` (eigenvectors scaled by the square roots of the nonzero
/// eigenvalues), the square roots of the eigenvalues of `ρ ρ̃` are the
/// singular values of `W† (σy⊗σy) W*`. Working with the factor avoids
/// taking square roots of roundoff-level eigenvalues.
pub fn wootters_concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    if rho.dim_a() != 2 || rho.dim_b() != 2 {
        return Err(Error::UnsupportedDimension(rho.dim_a().max(rho.dim_b())));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let cutoff = T::epsilon() * T::lit(64.0);
    let kept: Vec<usize> = (0..4).filter(|&k| eig.eigenvalues[k] > cutoff).collect();
    if kept.is_empty() {
        return Ok(T::zero());
    }
    let w = ComplexMatrix::from_fn(4, kept.len(), |i, c| {
        let k = kept[c];
        eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt()
    });
    let yy = sigma_y::<T>().kron(&sigma_y());
    let t = &(&w.adjoint() * &yy) * &w.conj();
    let mut s = svd(&t).s;
    s.resize(4, T::zero());
    Ok((s[0] - s[1] - s[2] - s[3]).max(T::zero()))
}

/// η factors of a set of Schmidt weights.
///
/// `eta` is the smallest pair product `ω_p ω_r` over all `p < r` (so any zero
/// weight forces `eta = 0`), `pair_sum = Σ_{i<j} ω_i ω_j`, and `eta_min`,
/// `eta_max` are the smallest and largest pair products divided by
/// `pair_sum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaFactors<T> {
    pub eta: T,
    pub pair_sum: T,
    pub eta_min: T,
    pub eta_max: T,
}

/// Smallest, largest, and summed pair products `ω_p ω_r`, `p < r`, with
/// weights below the Schmidt zero threshold replaced by 0.
pub fn pair_products<T: Real>(weights: &[T]) -> (T, T, T) {
    let zero = T::lit(SCHMIDT_ZERO);
    let w: Vec<T> = weights.iter().map(|&x| if x < zero { T::zero() } else { x }).collect();
    let mut lo = T::infinity();
    let mut hi = T::zero();
    let mut sum = T::zero();
    for p in 0..w.len() {
        for r in p + 1..w.len() {
            let prod = w[p] * w[r];
            lo = lo.min(prod);
            hi = hi.max(prod);
            sum = sum + prod;
        }
    }
    (lo, hi, sum)
}

pub fn pair_count(d: usize) -> usize {
    d * (d - 1) / 2
}

pub fn eta_factors<T: Real>(weights: &[T]) -> Result<EtaFactors<T>> {
    if weights.len() < 2 {
        return Err(Error::BadWeights(format!("need at least 2 weights, got {}", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
        return Err(Error::BadWeights(format!("invalid weight {w}")));
    }
    let total: T = weights.iter().copied().sum();
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let (lo, hi, pair_sum) = pair_products(weights);
    if pair_sum <= T::lit(PRODUCT_PAIR_SUM) {
        return Err(Error::ProductState);
    }
    Ok(EtaFactors {
        eta: lo,
        pair_sum,
        eta_min: lo / pair_sum,
        eta_max: hi / pair_sum,
    })
}

/// `2 (1 − tr σ²)` for a single reduced operator.
pub fn linear_entropy_tangle<T: Real>(reduced: &ComplexMatrix<T>) -> T {
    T::lit(2.0) * (T::one() - reduced.trace_of_square())
}

/// Independent two-qubit concurrence, used only to confirm suspected
/// violations: singular values of `√ρ (σy⊗σy) √ρ*` with the square root
/// taken by eigendecomposition.
pub fn wootters_concurrence_via_sqrt<T: Real>(rho: &ComplexMatrix<T>) -> Result<T> {
    if rho.shape() != (4, 4) {
        return Err(Error::UnsupportedDimension(rho.rows()));
    }
    let eig = hermitian_eig(rho)?;
    let root = eig.apply_fn(|l| Complex::new(l.max(T::zero()).sqrt(), T::zero()));
    let yy = sigma_y::<T>().kron(&sigma_y());
    let m = &(&root * &yy) * &root.conj();
    let s = svd(&m).s;
    Ok((s[0] - s[1] - s[2] - s[3]).max(T::zero()))
}
