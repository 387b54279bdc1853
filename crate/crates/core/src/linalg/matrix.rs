use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Which factor of a bipartite `A ⊗ B` space an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(idx) = data
            .iter()
            .position(|z| !(z.re.is_finite_value() && z.im.is_finite_value()))
        {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose entries are all real.
    pub fn from_real(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        Self::new(rows, cols, data.into_iter().map(|x| Complex::new(x, T::zero())).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    /// Diagonal matrix with the given real entries.
    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(values[i].clone(), T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    /// Column vector.
    pub fn column(values: Vec<Complex<T>>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    /// `|v⟩⟨w|` for column data `v`, `w`.
    pub fn outer(v: &[Complex<T>], w: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i].clone() * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_col(&mut self, j: usize, values: &[Complex<T>]) {
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = v.clone();
        }
    }

    pub fn map(&self, f: impl Fn(&Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: &Complex<T>) -> Self {
        self.map(|z| z.clone() * k.clone())
    }

    pub fn scale_real(&self, k: T) -> Self {
        self.map(|z| z.clone() * k.clone())
    }

    pub fn trace(&self) -> Complex<T> {
        let n = self.rows.min(self.cols);
        let mut acc = Complex::zero();
        for i in 0..n {
            acc = acc + self[(i, i)].clone();
        }
        acc
    }

    /// Matrix product; `None` when the inner dimensions differ.
    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = &self.data[i * self.cols + k];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].clone() + aik.clone() * rhs.data[k * rhs.cols + j].clone();
                }
            }
        }
        Some(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&Complex<T>, &Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in elementwise op");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (br, bc) = rhs.shape();
        Self::from_fn(self.rows * br, self.cols * bc, |r, c| {
            self[(r / br, c / bc)].clone() * rhs[(r % br, c % bc)].clone()
        })
    }

    /// Traces out one factor of a square operator on `C^dim_a ⊗ C^dim_b`.
    pub fn partial_trace(&self, dim_a: usize, dim_b: usize, traced: Subsystem) -> Result<Self> {
        let n = dim_a * dim_b;
        if !self.is_square() || self.rows != n {
            return Err(Error::DimensionMismatch(format!(
                "partial trace of a {}x{} matrix over {dim_a}x{dim_b}",
                self.rows, self.cols
            )));
        }
        let out = match traced {
            Subsystem::B => Self::from_fn(dim_a, dim_a, |i, j| {
                let mut acc = Complex::zero();
                for k in 0..dim_b {
                    acc = acc + self[(i * dim_b + k, j * dim_b + k)].clone();
                }
                acc
            }),
            Subsystem::A => Self::from_fn(dim_b, dim_b, |i, j| {
                let mut acc = Complex::zero();
                for k in 0..dim_a {
                    acc = acc + self[(k * dim_b + i, k * dim_b + j)].clone();
                }
                acc
            }),
        };
        Ok(out)
    }
}

impl<T: Real> ComplexMatrix<T> {
    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖m − m†‖_max`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m†) / 2`.
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// `‖m†m − I‖_max`.
    pub fn unitarity_deviation(&self) -> T {
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    /// `Re tr(m²)`, the purity when `m` is a density matrix.
    pub fn trace_of_square(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc = acc + (self[(i, j)] * self[(j, i)]).re;
            }
        }
        acc
    }

    /// Euclidean norm of the row-major data as a vector.
    pub fn vec_norm(&self) -> T {
        self.frobenius_norm()
    }

    /// Lossy conversion between floating-point scalar types.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64().unwrap()), U::lit(z.im.to_f64().unwrap())))
                .collect(),
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.checked_mul(rhs).unwrap_or_else(|| {
            panic!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )
        })
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }
}

impl<T: Scalar + fmt::Display> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self[(i, j)];
                write!(f, "({}, {}) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli X.
pub fn sigma_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, vec![T::zero(), T::one(), T::one(), T::zero()]).unwrap()
}

/// Pauli Y.
pub fn sigma_y<T: Real>() -> ComplexMatrix<T> {
    let i = Complex::i();
    ComplexMatrix::new(2, 2, vec![Complex::zero(), -i, i, Complex::zero()]).unwrap()
}

/// Pauli Z.
pub fn sigma_z<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, vec![T::one(), T::zero(), T::zero(), -T::one()]).unwrap()
}
