//! Bipartite pure and mixed states, Schmidt decomposition, and seeded random
//! state generation.
//!
//! Amplitudes of a state on `C^dim_a ⊗ C^dim_b` are stored flat with index
//! `i * dim_b + j` for the product basis vector `|i⟩|j⟩`.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, haar_unitary, hermitian_eig, svd, ComplexMatrix, Subsystem};
use crate::scalar::Real;

/// Schmidt weights below this are treated as exactly zero.
pub const SCHMIDT_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePureState<T: Real> {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<Complex<T>>,
}

fn check_dims(dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a < 2 || dim_b < 2 {
        return Err(Error::DimensionMismatch(format!(
            "bipartite dimensions must be >= 2, got {dim_a}x{dim_b}"
        )));
    }
    Ok(())
}

impl<T: Real> BipartitePureState<T> {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        // reuse the matrix constructor for length and finiteness checks
        let amplitudes = ComplexMatrix::new(dim_a, dim_b, amplitudes)?.into_data();
        let norm_sq: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::NotNormalized(norm_sq.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm: T = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm.is_nan() || norm <= T::zero() {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(dim_a, dim_b, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// `|φ⁺⟩ = Σ_i |ii⟩ / √d`.
    pub fn phi_plus(d: usize) -> Result<Self> {
        let w = vec![T::one() / T::lit(d as f64); d];
        state_from_schmidt_weights(&w, d)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex<T> {
        self.amplitudes[i * self.dim_b + j]
    }

    /// The `dim_a x dim_b` coefficient matrix `a_ij`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim_a, self.dim_b, |i, j| self.amplitude(i, j))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// `(u ⊗ v)|ψ⟩`.
    pub fn apply_local(&self, u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> Result<Self> {
        if u.shape() != (self.dim_a, self.dim_a) || v.shape() != (self.dim_b, self.dim_b) {
            return Err(Error::DimensionMismatch("local unitary shape".into()));
        }
        // (u ⊗ v)|ψ⟩ has coefficient matrix u M vᵀ
        let m = &(u * &self.coefficient_matrix()) * &v.transpose();
        Self::normalized(self.dim_a, self.dim_b, m.into_data())
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix<T> {
        let m = self.coefficient_matrix();
        match keep {
            Subsystem::A => &m * &m.adjoint(),
            Subsystem::B => &m.transpose() * &m.conj(),
        }
    }

    pub fn cast<U: Real>(&self) -> BipartitePureState<U> {
        BipartitePureState {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            amplitudes: ComplexMatrix::column(self.amplitudes.clone()).cast::<U>().into_data(),
        }
    }
}

/// Schmidt weights `ω_i` (squared Schmidt coefficients, descending) and the
/// local unitaries carrying `|i⟩|i⟩` to the Schmidt vectors.
#[derive(Debug, Clone)]
pub struct SchmidtForm<T: Real> {
    pub weights: Vec<T>,
    pub u_local: ComplexMatrix<T>,
    pub v_local: ComplexMatrix<T>,
}

impl<T: Real> SchmidtForm<T> {
    /// Number of weights that are not treated as zero.
    pub fn rank(&self) -> usize {
        self.weights.iter().filter(|&&w| w > T::zero()).count()
    }

    /// `Σ_i √ω_i (U|i⟩) ⊗ (V|i⟩)`.
    pub fn reconstruct(&self) -> Result<BipartitePureState<T>> {
        let (da, db) = (self.u_local.rows(), self.v_local.rows());
        let mut amps = vec![Complex::zero(); da * db];
        for (k, &w) in self.weights.iter().enumerate() {
            let s = w.sqrt();
            for i in 0..da {
                for j in 0..db {
                    amps[i * db + j] = amps[i * db + j] + self.u_local[(i, k)] * self.v_local[(j, k)] * s;
                }
            }
        }
        BipartitePureState::normalized(da, db, amps)
    }
}

pub fn schmidt_decompose<T: Real>(psi: &BipartitePureState<T>) -> Result<SchmidtForm<T>> {
    let norm_sq: T = psi.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::NotNormalized(norm_sq.to_f64().unwrap_or(f64::NAN)));
    }
    // M = U S V†  =>  ψ = Σ_k s_k (U e_k) ⊗ (conj(V) e_k)
    let dec = svd(&psi.coefficient_matrix());
    let zero = T::lit(SCHMIDT_ZERO);
    let weights = dec
        .s
        .iter()
        .map(|&s| {
            let w = s * s;
            if w < zero {
                T::zero()
            } else {
                w
            }
        })
        .collect();
    Ok(SchmidtForm {
        weights,
        u_local: dec.u,
        v_local: dec.v.conj(),
    })
}

/// `Σ_i √ω_i |ii⟩` on `C^dim ⊗ C^dim`, zero-padding missing weights.
pub fn state_from_schmidt_weights<T: Real>(weights: &[T], dim: usize) -> Result<BipartitePureState<T>> {
    check_dims(dim, dim)?;
    if weights.is_empty() || weights.len() > dim {
        return Err(Error::BadWeights(format!("{} weights for dimension {dim}", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
        return Err(Error::BadWeights(format!("invalid weight {w}")));
    }
    let sum: T = weights.iter().copied().sum();
    if (sum - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::BadWeights(format!("weights sum to {sum}")));
    }
    let mut amps = vec![Complex::zero(); dim * dim];
    for (i, &w) in weights.iter().enumerate() {
        amps[i * dim + i] = Complex::new(w.sqrt(), T::zero());
    }
    BipartitePureState::new(dim, dim, amps)
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_pure<T: Real>(dim_a: usize, dim_b: usize, seed: u64) -> Result<BipartitePureState<T>> {
    check_dims(dim_a, dim_b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_with(&mut rng, dim_a, dim_b)
}

pub fn random_pure_with<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
) -> Result<BipartitePureState<T>> {
    let g = complex_gaussian::<T, R>(rng, dim_a * dim_b, 1);
    BipartitePureState::normalized(dim_a, dim_b, g.into_data())
}

/// Uniform point on the probability simplex (flat Dirichlet), sorted
/// descending.
pub fn random_simplex_weights<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<T> {
    let mut raw: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter_mut().for_each(|x| *x /= total);
    raw.sort_by(|a, b| b.partial_cmp(a).unwrap());
    raw.into_iter().map(T::lit).collect()
}

/// Random local unitaries `(U_A, U_B)`, Haar on each factor.
pub fn random_local_unitaries<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    (haar_unitary(rng, dim_a), haar_unitary(rng, dim_b))
}

/// Density matrix on `C^dim_a ⊗ C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dim_a: usize, dim_b: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let n = dim_a * dim_b;
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {dim_a}x{dim_b} system",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > T::tol(1e-10) {
            return Err(Error::NotADensityMatrix(format!("Hermiticity deviation {dev:e}")));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
            return Err(Error::NotADensityMatrix(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let min_eig = hermitian_eig(&matrix)?.eigenvalues[0];
        if min_eig < -T::tol(1e-9) {
            return Err(Error::NotADensityMatrix(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    /// For outputs of trace-preserving maps applied to valid states.
    pub(crate) fn from_trusted(dim_a: usize, dim_b: usize, matrix: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(matrix.shape(), (dim_a * dim_b, dim_a * dim_b));
        Self {
            dim_a,
            dim_b,
            matrix: matrix.symmetrized(),
        }
    }

    /// `I / (dim_a dim_b)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let n = dim_a * dim_b;
        Ok(Self {
            dim_a,
            dim_b,
            matrix: ComplexMatrix::identity(n).scale_real(T::one() / T::lit(n as f64)),
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn purity(&self) -> T {
        self.matrix.trace_of_square()
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix<T> {
        self.matrix
            .partial_trace(self.dim_a, self.dim_b, keep.other())
            .expect("shape checked at construction")
    }

    /// Eigenvector of the largest eigenvalue, as a pure state.
    pub fn dominant_state(&self) -> Result<BipartitePureState<T>> {
        let eig = hermitian_eig(&self.matrix)?;
        let n = self.matrix.rows();
        BipartitePureState::normalized(self.dim_a, self.dim_b, eig.eigenvectors.col(n - 1))
    }

    /// `(u ⊗ v) ρ (u ⊗ v)†`.
    pub fn conjugate_local(&self, u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> Self {
        let w = u.kron(v);
        Self::from_trusted(self.dim_a, self.dim_b, &(&w * &self.matrix) * &w.adjoint())
    }
}

/// States whose reduced density operators can be taken.
pub trait Bipartite<T: Real> {
    fn reduced_on(&self, keep: Subsystem) -> ComplexMatrix<T>;
}

impl<T: Real> Bipartite<T> for BipartitePureState<T> {
    fn reduced_on(&self, keep: Subsystem) -> ComplexMatrix<T> {
        self.reduced(keep)
    }
}

impl<T: Real> Bipartite<T> for DensityMatrix<T> {
    fn reduced_on(&self, keep: Subsystem) -> ComplexMatrix<T> {
        self.reduced(keep)
    }
}

/// Reduced density operator on `keep`.
pub fn reduced_density<T: Real, S: Bipartite<T> + ?Sized>(state: &S, keep: Subsystem) -> ComplexMatrix<T> {
    state.reduced_on(keep)
}

/// Random mixed state `G G† / tr(G G†)` with `G` a complex Gaussian
/// `n x rank` matrix (induced measure).
pub fn random_mixed<T: Real>(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    check_dims(dim_a, dim_b)?;
    if rank == 0 {
        return Err(Error::BadParameter("rank must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = complex_gaussian::<T, _>(&mut rng, dim_a * dim_b, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_trusted(dim_a, dim_b, m.scale_real(T::one() / tr)))
}
