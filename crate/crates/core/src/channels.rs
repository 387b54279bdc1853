//! Channels in Kraus form acting on subsystem B, their Choi states, and the
//! standard and random channel families.
//!
//! The Choi state of `E` is `(1 ⊗ E)|φ⁺⟩⟨φ⁺|` with `|φ⁺⟩ = Σ_i |ii⟩ / √d`.
//! Under this convention Kraus operator entry `K(b, a)` corresponds to the
//! Choi vector component `a * d + b`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{expm_i_hermitian, haar_isometry, hermitian_eig, ComplexMatrix, Subsystem};
use crate::scalar::Real;
use crate::states::{BipartitePureState, DensityMatrix};

/// Eigenvalues of `d·J` at or below this are dropped when extracting Kraus
/// operators.
pub const KRAUS_EIGEN_CUTOFF: f64 = 1e-12;

/// Trace-preserving completely positive map on `C^d` in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel<T: Real> {
    dim: usize,
    kraus: Vec<ComplexMatrix<T>>,
}

impl<T: Real> QuantumChannel<T> {
    /// Validates shapes, the Kraus count, and `‖Σ K†K − I‖_max <= 1e-9`.
    pub fn new(dim: usize, kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if kraus.is_empty() || kraus.len() > dim * dim {
            return Err(Error::InvariantViolation(format!(
                "{} Kraus operators for dimension {dim}",
                kraus.len()
            )));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Kraus operator for dimension {dim}",
                k.rows(),
                k.cols()
            )));
        }
        let channel = Self { dim, kraus };
        let dev = channel.completeness_deviation();
        if dev.is_nan() || dev > T::tol(1e-9) {
            return Err(Error::InvariantViolation(format!(
                "Kraus completeness deviates from identity by {dev:e}"
            )));
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, vec![ComplexMatrix::identity(dim)])
    }

    /// Single-Kraus channel `ρ ↦ U ρ U†`.
    pub fn unitary(u: ComplexMatrix<T>) -> Result<Self> {
        let d = u.rows();
        Self::new(d, vec![u])
    }

    /// Kraus operators are the consecutive `d x d` row blocks of an isometry
    /// `C^d -> C^(d·k)`.
    pub fn from_stinespring(dim: usize, isometry: &ComplexMatrix<T>) -> Result<Self> {
        if isometry.cols() != dim || !isometry.rows().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} isometry for dimension {dim}",
                isometry.rows(),
                isometry.cols()
            )));
        }
        let k = isometry.rows() / dim;
        let kraus = (0..k)
            .map(|m| ComplexMatrix::from_fn(dim, dim, |r, c| isometry[(m * dim + r, c)]))
            .collect();
        Self::new(dim, kraus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn completeness_deviation(&self) -> T {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `E(ρ)` for an operator on `C^d` alone.
    pub fn apply_local(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        out
    }

    /// `(1 ⊗ E)(ρ) = Σ_m (I ⊗ K_m) ρ (I ⊗ K_m)†`.
    pub fn apply_one_sided(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.dim_a() != self.dim || rho.dim_b() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel of dimension {} applied to a {}x{} state",
                self.dim,
                rho.dim_a(),
                rho.dim_b()
            )));
        }
        let id = ComplexMatrix::identity(self.dim);
        let n = self.dim * self.dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let lifted = id.kron(k);
            out = &out + &(&(&lifted * rho.matrix()) * &lifted.adjoint());
        }
        Ok(DensityMatrix::from_trusted(self.dim, self.dim, out))
    }

    pub fn apply_to_pure(&self, psi: &BipartitePureState<T>) -> Result<DensityMatrix<T>> {
        self.apply_one_sided(&psi.density())
    }

    pub fn choi(&self) -> ChoiState<T> {
        choi_of(self)
    }

    pub fn cast<U: Real>(&self) -> QuantumChannel<U> {
        QuantumChannel {
            dim: self.dim,
            kraus: self.kraus.iter().map(|k| k.cast()).collect(),
        }
    }
}

/// `(1 ⊗ E)|φ⁺⟩⟨φ⁺|` together with its local dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState<T: Real> {
    dim: usize,
    state: DensityMatrix<T>,
}

impl<T: Real> ChoiState<T> {
    /// Accepts a density matrix whose A-marginal is `I/d` within 1e-6.
    pub fn new(state: DensityMatrix<T>) -> Result<Self> {
        let d = state.dim_a();
        if state.dim_b() != d {
            return Err(Error::DimensionMismatch("Choi state must live on d x d".into()));
        }
        let dev = a_marginal_deviation(&state);
        if dev > T::tol(1e-6) {
            return Err(Error::NotAChoiState(dev.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { dim: d, state })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn purity(&self) -> T {
        self.state.purity()
    }

    /// `‖tr_B J − I/d‖_max`.
    pub fn a_marginal_deviation(&self) -> T {
        a_marginal_deviation(&self.state)
    }
}

fn a_marginal_deviation<T: Real>(state: &DensityMatrix<T>) -> T {
    let d = state.dim_a();
    let target = ComplexMatrix::identity(d).scale_real(T::one() / T::lit(d as f64));
    state.reduced(Subsystem::A).max_abs_diff(&target)
}

pub fn choi_of<T: Real>(e: &QuantumChannel<T>) -> ChoiState<T> {
    let phi = BipartitePureState::phi_plus(e.dim).expect("dim >= 2");
    let state = e.apply_to_pure(&phi).expect("dimensions match");
    ChoiState { dim: e.dim, state }
}

/// Kraus operators from the spectral decomposition of `d·J`, largest
/// eigenvalue first.
pub fn kraus_from_choi<T: Real>(c: &ChoiState<T>) -> Result<QuantumChannel<T>> {
    let dev = c.a_marginal_deviation();
    if dev > T::tol(1e-6) {
        return Err(Error::NotAChoiState(dev.to_f64().unwrap_or(f64::NAN)));
    }
    let d = c.dim;
    let scaled = c.state.matrix().scale_real(T::lit(d as f64));
    let eig = hermitian_eig(&scaled)?;
    let cutoff = T::lit(KRAUS_EIGEN_CUTOFF);
    let mut kraus = Vec::new();
    for k in (0..d * d).rev() {
        let lambda = eig.eigenvalues[k];
        if lambda <= cutoff {
            break;
        }
        let s = lambda.sqrt();
        kraus.push(ComplexMatrix::from_fn(d, d, |b, a| eig.eigenvectors[(a * d + b, k)] * s));
    }
    QuantumChannel::new(d, kraus)
}

/// `tr(J²) >= 1 − tol`.
pub fn choi_is_pure<T: Real>(c: &ChoiState<T>, tol: T) -> bool {
    c.purity() >= T::one() - tol
}

/// Named channel families accepted by [`make_standard`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelFamily {
    Identity,
    Unitary,
    Depolarizing,
    Dephasing,
    AmplitudeDamping,
}

impl ChannelFamily {
    pub const ALL: [ChannelFamily; 5] = [
        ChannelFamily::Identity,
        ChannelFamily::Unitary,
        ChannelFamily::Depolarizing,
        ChannelFamily::Dephasing,
        ChannelFamily::AmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelFamily::Identity => "identity",
            ChannelFamily::Unitary => "unitary",
            ChannelFamily::Depolarizing => "depolarizing",
            ChannelFamily::Dephasing => "dephasing",
            ChannelFamily::AmplitudeDamping => "amplitude_damping",
        }
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::BadParameter(format!("unknown channel family '{s}'")))
    }
}

fn probability<T: Real>(params: &[T], what: &str) -> Result<T> {
    match params {
        [p] if *p >= T::zero() && *p <= T::one() => Ok(*p),
        [p] => Err(Error::BadParameter(format!("{what} must lie in [0, 1], got {p}"))),
        _ => Err(Error::BadParameter(format!("{what} takes exactly one parameter"))),
    }
}

/// Hermitian matrix from `d²` reals: `H_ii = p[i d + i]` and, for `i < j`,
/// `H_ij = p[i d + j] + i p[j d + i]`.
pub fn hermitian_from_params<T: Real>(dim: usize, params: &[T]) -> Result<ComplexMatrix<T>> {
    if params.len() != dim * dim {
        return Err(Error::BadParameter(format!(
            "unitary generator needs {} parameters, got {}",
            dim * dim,
            params.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Complex::new(params[i * dim + i], T::zero()),
        std::cmp::Ordering::Less => Complex::new(params[i * dim + j], params[j * dim + i]),
        std::cmp::Ordering::Greater => Complex::new(params[j * dim + i], -params[i * dim + j]),
    }))
}

/// Weyl operator `X^a Z^b` on `C^d`.
fn weyl<T: Real>(d: usize, a: usize, b: usize) -> ComplexMatrix<T> {
    let mut w = ComplexMatrix::zeros(d, d);
    for c in 0..d {
        let angle = T::lit(2.0 * std::f64::consts::PI * ((b * c) % d) as f64 / d as f64);
        w[((c + a) % d, c)] = Complex::new(angle.cos(), angle.sin());
    }
    w
}

/// Builds a member of a standard family.
///
/// * `depolarizing:p` is `(1−p)ρ + p·I/d`, realized with Weyl operators.
/// * `dephasing:p` is `(1−p)ρ + p·diag(ρ)` in the computational basis.
/// * `amplitude_damping:γ` (qubits only) has `K₀ = diag(1, √(1−γ))` and
///   `K₁ = √γ |0⟩⟨1|`.
/// * `unitary:h...` is `exp(i H)` with `H` from [`hermitian_from_params`].
pub fn make_standard<T: Real>(family: ChannelFamily, dim: usize, params: &[T]) -> Result<QuantumChannel<T>> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    match family {
        ChannelFamily::Identity => {
            if !params.is_empty() {
                return Err(Error::BadParameter("identity takes no parameters".into()));
            }
            QuantumChannel::identity(dim)
        }
        ChannelFamily::Unitary => {
            let h = hermitian_from_params(dim, params)?;
            QuantumChannel::unitary(expm_i_hermitian(&h)?)
        }
        ChannelFamily::Depolarizing => {
            let p = probability(params, "depolarizing probability")?;
            let d2 = T::lit((dim * dim) as f64);
            let mut kraus = vec![ComplexMatrix::identity(dim).scale_real((T::one() - p + p / d2).sqrt())];
            if p > T::zero() {
                let w = (p / d2).sqrt();
                for a in 0..dim {
                    for b in 0..dim {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        kraus.push(weyl::<T>(dim, a, b).scale_real(w));
                    }
                }
            }
            QuantumChannel::new(dim, kraus)
        }
        ChannelFamily::Dephasing => {
            let p = probability(params, "dephasing strength")?;
            let mut kraus = vec![ComplexMatrix::identity(dim).scale_real((T::one() - p).sqrt())];
            if p > T::zero() {
                for i in 0..dim {
                    let mut proj = ComplexMatrix::zeros(dim, dim);
                    proj[(i, i)] = Complex::new(p.sqrt(), T::zero());
                    kraus.push(proj);
                }
            }
            QuantumChannel::new(dim, kraus)
        }
        ChannelFamily::AmplitudeDamping => {
            if dim != 2 {
                return Err(Error::UnsupportedDimension(dim));
            }
            let g = probability(params, "damping rate")?;
            let k0 = ComplexMatrix::diag_real(&[T::one(), (T::one() - g).sqrt()]);
            let mut k1 = ComplexMatrix::zeros(2, 2);
            k1[(0, 1)] = Complex::new(g.sqrt(), T::zero());
            let kraus = if g > T::zero() { vec![k0, k1] } else { vec![k0] };
            QuantumChannel::new(2, kraus)
        }
    }
}

/// Channel from a Haar-random Stinespring isometry `C^d -> C^(d·k)`.
pub fn random_channel<T: Real>(dim: usize, kraus_count: usize, seed: u64) -> Result<QuantumChannel<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_channel_with(&mut rng, dim, kraus_count)
}

pub fn random_channel_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    kraus_count: usize,
) -> Result<QuantumChannel<T>> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if kraus_count == 0 || kraus_count > dim * dim {
        return Err(Error::BadParameter(format!(
            "Kraus count {kraus_count} outside 1..={}",
            dim * dim
        )));
    }
    let w = haar_isometry::<T, R>(rng, dim * kraus_count, dim);
    QuantumChannel::from_stinespring(dim, &w)
}
