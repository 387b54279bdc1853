//! Hermitian eigendecomposition and SVD by Jacobi rotations, thin QR by
//! re-orthogonalized Gram-Schmidt, and Haar sampling built on QR.
//!
//! All matrices in this crate are at most a few dozen rows, where cyclic
//! Jacobi converges in a handful of sweeps and gives residuals near machine
//! precision.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending; eigenvector `k` is column `k`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        let weights: Vec<Complex<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex::zero();
            for (k, w) in weights.iter().enumerate() {
                acc = acc + v[(i, k)] * *w * v[(j, k)].conj();
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply_fn(|l| Complex::new(l, T::zero()))
    }
}

fn jacobi_tangent<T: Real>(zeta: T) -> (T, T) {
    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
    let t = sign / (zeta.abs() + T::one().hypot(zeta));
    let c = T::one() / T::one().hypot(t);
    (c, c * t)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before rotation; inputs further than
/// `Real::tol(1e-10)` from Hermitian are rejected.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > T::tol(1e-10) {
        return Err(Error::NotHermitian(dev.to_f64().unwrap_or(f64::NAN)));
    }
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let threshold = T::epsilon() * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let phase_conj = (apq / mag).conj();
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (T::lit(2.0) * mag);
                let (c, s) = jacobi_tangent(zeta);
                let g_pp = Complex::new(c, T::zero());
                let g_pq = Complex::new(s, T::zero());
                let g_qp = phase_conj * (-s);
                let g_qq = phase_conj * c;

                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Full singular value decomposition `m = U diag(s) V†`.
///
/// `u` is `rows x rows`, `v` is `cols x cols`, and `s` holds
/// `min(rows, cols)` values in descending order.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: ComplexMatrix<T>,
    pub s: Vec<T>,
    pub v: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let (m, n) = (self.u.rows(), self.v.rows());
        ComplexMatrix::from_fn(m, n, |i, j| {
            let mut acc = Complex::zero();
            for (k, &sk) in self.s.iter().enumerate() {
                acc = acc + self.u[(i, k)] * self.v[(j, k)].conj() * sk;
            }
            acc
        })
    }

    /// Number of singular values above `tol * max(s)`.
    pub fn rank(&self, tol: T) -> usize {
        let top = self.s.first().copied().unwrap_or_else(T::zero);
        self.s.iter().filter(|&&x| x > tol * top.max(T::one())).count()
    }
}

pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Svd<T> {
    if m.rows() < m.cols() {
        let Svd { u, s, v } = svd_tall(&m.adjoint());
        return Svd { u: v, s, v: u };
    }
    svd_tall(m)
}

/// One-sided (Hestenes) Jacobi on the columns of a matrix with rows >= cols.
fn svd_tall<T: Real>(m: &ComplexMatrix<T>) -> Svd<T> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = ComplexMatrix::<T>::identity(cols);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Complex::<T>::zero();
                for k in 0..rows {
                    alpha = alpha + a[(k, p)].norm_sqr();
                    beta = beta + a[(k, q)].norm_sqr();
                    gamma = gamma + a[(k, p)].conj() * a[(k, q)];
                }
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let (c, s) = jacobi_tangent((beta - alpha) / (T::lit(2.0) * g));
                for k in 0..rows {
                    let ap = a[(k, p)];
                    let aq = a[(k, q)] * phase_conj;
                    a[(k, p)] = ap * c - aq * s;
                    a[(k, q)] = ap * s + aq * c;
                }
                for k in 0..cols {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)] * phase_conj;
                    v[(k, p)] = vp * c - vq * s;
                    v[(k, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..cols)
        .map(|j| (0..rows).map(|k| a[(k, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let s: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let v_sorted = ComplexMatrix::from_fn(cols, cols, |i, k| v[(i, order[k])]);

    let top = s.first().copied().unwrap_or_else(T::zero);
    let cutoff = top * eps * T::lit(rows as f64);
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(rows);
    for (k, &j) in order.iter().enumerate() {
        if s[k] > cutoff && s[k] > T::min_positive_value() {
            basis.push((0..rows).map(|r| a[(r, j)] / s[k]).collect());
        } else {
            break;
        }
    }
    complete_orthonormal(&mut basis, rows);
    let u = ComplexMatrix::from_fn(rows, rows, |i, k| basis[k][i]);
    Svd { u, s, v: v_sorted }
}

fn dot<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

fn project_out<T: Real>(basis: &[Vec<Complex<T>>], w: &mut [Complex<T>]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi = *wi - c * bi;
            }
        }
    }
}

/// Extends an orthonormal list of vectors to a basis of `C^dim`, picking at
/// each step the standard basis vector with the largest residual.
fn complete_orthonormal<T: Real>(basis: &mut Vec<Vec<Complex<T>>>, dim: usize) {
    while basis.len() < dim {
        let mut best: Option<(T, Vec<Complex<T>>)> = None;
        for e in 0..dim {
            let mut w = vec![Complex::zero(); dim];
            w[e] = Complex::one();
            project_out(basis, &mut w);
            let n = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, w));
            }
        }
        let (n, w) = best.expect("dim > 0");
        basis.push(w.into_iter().map(|z| z / n).collect());
    }
}

/// Thin QR of a matrix with rows >= cols: `Q` has orthonormal columns and `R`
/// is upper triangular with real nonnegative diagonal.
pub fn qr_thin<T: Real>(m: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::DimensionMismatch(format!("thin QR needs rows >= cols, got {rows}x{cols}")));
    }
    let mut q_cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(cols);
    let mut r = ComplexMatrix::<T>::zeros(cols, cols);
    for j in 0..cols {
        let mut w = m.col(j);
        for _ in 0..2 {
            for (i, qi) in q_cols.iter().enumerate() {
                let c = dot(qi, &w);
                r[(i, j)] = r[(i, j)] + c;
                for (wk, qk) in w.iter_mut().zip(qi) {
                    *wk = *wk - c * qk;
                }
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if n <= T::epsilon() * T::lit(rows as f64) * m.max_abs() {
            return Err(Error::BadParameter("rank-deficient input to QR".into()));
        }
        r[(j, j)] = Complex::new(n, T::zero());
        q_cols.push(w.into_iter().map(|z| z / n).collect());
    }
    let q = ComplexMatrix::from_fn(rows, cols, |i, j| q_cols[j][i]);
    Ok((q, r))
}

/// Standard complex Gaussian entries (independent real and imaginary parts of
/// variance 1/2).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * s), T::lit(im * s))
    })
}

/// Haar-distributed isometry `C^cols -> C^rows` from QR of a complex Gaussian
/// matrix. The diagonal of `R` is real positive by construction, which is the
/// phase fix that makes the distribution exactly Haar.
pub fn haar_isometry<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<T> {
    loop {
        let g = complex_gaussian::<T, R>(rng, rows, cols);
        if let Ok((q, _)) = qr_thin(&g) {
            return q;
        }
    }
}

pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    haar_isometry(rng, n, n)
}

/// `exp(i H)` for Hermitian `H`.
pub fn expm_i_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(h)?;
    Ok(eig.apply_fn(|l| Complex::new(l.cos(), l.sin())))
}

/// Principal square root of a positive semidefinite matrix; negative
/// eigenvalues from roundoff are clamped to zero.
pub fn sqrt_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(m)?;
    Ok(eig.apply_fn(|l| Complex::new(l.max(T::zero()).sqrt(), T::zero())))
}
