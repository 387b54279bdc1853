//! Independent two-qubit recomputation of concurrence-entry slacks.
//!
//! Nothing here goes through `measures`: the mixed-state concurrence uses
//! the eigenvalues of `R = √ρ ρ̃ √ρ` with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`, and the
//! pure-state concurrence uses `2|a₀₀a₁₁ − a₀₁a₁₀|`.

use num_complex::Complex;

use crate::bounds::{BoundEntry, BoundKind, CONC_UPPER, CONC_UPPER_SURROGATE, CONC_WINDOW_LOWER, CONC_WINDOW_UPPER, LEGACY_LOWER_CONCURRENCE};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, sigma_y, sqrt_psd, ComplexMatrix};
use crate::states::BipartitePureState;

/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λᵢ² ` the eigenvalues of `√ρ ρ̃ √ρ`.
pub fn wootters_by_root_eigenvalues(rho: &ComplexMatrix<f64>) -> Result<f64> {
    if rho.shape() != (4, 4) {
        return Err(Error::UnsupportedDimension(rho.rows()));
    }
    let yy = sigma_y::<f64>().kron(&sigma_y());
    let flipped = &(&yy * &rho.conj()) * &yy;
    let root = sqrt_psd(&rho.symmetrized())?;
    let r = (&(&root * &flipped) * &root).symmetrized();
    let mut lambda: Vec<f64> = hermitian_eig(&r)?
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

fn pure_qubit_concurrence(a: &[Complex<f64>]) -> f64 {
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

/// Recomputes the slack of a concurrence entry at `d = 2`, where every
/// η-factor equals one and `d/2 = 1`. Returns `None` for entries the oracle
/// does not cover.
pub fn oracle_slack_two_qubit(
    entry: &BoundEntry,
    e: &QuantumChannel<f64>,
    psi: &BipartitePureState<f64>,
) -> Result<Option<f64>> {
    if e.dim() != 2 || !entry.applicable {
        return Ok(None);
    }
    let c_psi = pure_qubit_concurrence(psi.amplitudes());
    let out = e.apply_to_pure(psi)?;
    let c_out = wootters_by_root_eigenvalues(out.matrix())?;
    let choi = e.choi();
    let c_choi = wootters_by_root_eigenvalues(choi.state().matrix())?;
    let rhs = match entry.name.as_str() {
        CONC_WINDOW_LOWER | CONC_WINDOW_UPPER | CONC_UPPER => c_choi * c_psi,
        // the surrogate factor is not a concurrence; keep the stored one
        CONC_UPPER_SURROGATE => match entry.rhs {
            Some(r) => r,
            None => return Ok(None),
        },
        // (d/2)·√(2dη/(d−1)) = 2√(ω₀ω₁) = C(ψ) at d = 2
        LEGACY_LOWER_CONCURRENCE => {
            if entry.trivial {
                0.0
            } else {
                c_choi * c_psi * c_psi
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(match entry.kind {
        BoundKind::Lower => c_out - rhs,
        BoundKind::Upper => rhs - c_out,
    }))
}
