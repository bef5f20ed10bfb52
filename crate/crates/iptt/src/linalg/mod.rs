//! Dense complex matrix kernels sized for spot checks, not for scale.
//!
//! Everything is built around the square [`CMatrix`] with row-major storage.
//! Decompositions are Jacobi-based (Hermitian eigenproblem, one-sided SVD)
//! plus a shifted Hessenberg QR iteration for general spectra; all of them
//! live in submodules and are re-exported here.

mod jacobi;
mod qr_eig;
pub mod random;
mod spectral;

pub use jacobi::{hermitian_eig, normal_eig, singular_values, svd, Svd};
pub use qr_eig::general_eigenvalues;
pub use spectral::{abs_op, dist_boundary_disk, is_normal, psd_power, Spectrum};

use crate::error::Error;
use crate::Result;
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Square complex matrix, row-major. Entries are always finite.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        CMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Diagonal matrix from finite entries.
    pub fn diag(entries: &[Complex64]) -> Self {
        assert!(entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        let mut m = CMatrix::zeros(entries.len());
        for (i, z) in entries.iter().enumerate() {
            m.set(i, i, *z);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag_re(entries: &[f64]) -> Self {
        let zs: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::diag(&zs)
    }

    /// Builds a matrix from row slices, validating shape and finiteness.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, len: row.len() * dim });
            }
            data.extend_from_slice(row);
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix { dim, data })
    }

    /// Builds a matrix entrywise, validating finiteness.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = f(i, j);
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
                m.set(i, j, z);
            }
        }
        Ok(m)
    }

    /// Real matrix literal, handy in tests.
    pub fn from_re_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        CMatrix::from_rows(&lifted)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        let mut m = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm, computed entrywise without a decomposition.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value. Jacobi SVD under the hood.
    pub fn operator_norm(&self) -> Result<f64> {
        let sv = jacobi::singular_values(self)?;
        Ok(sv.first().copied().unwrap_or(0.0))
    }

    /// Frobenius norm of `A - A*`; zero for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        &(self * other) - &(other * self)
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> CMatrix {
        let data = self.data.iter().map(|z| z * c).collect();
        CMatrix { dim: self.dim, data }
    }

    /// Real scalar multiple.
    pub fn scale_re(&self, c: f64) -> CMatrix {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Hilbert-Schmidt inner product `tr(A* B)`.
    pub fn hs_inner(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Inverse via LU with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.dim;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = lu[i * n + k].norm();
                if mag > best {
                    best = mag;
                    pivot = i;
                }
            }
            if best == 0.0 {
                return Err(Error::DecompositionFailure("LU inverse (singular matrix)"));
            }
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
            }
            let pk = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pk;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        let mut inv = CMatrix::zeros(n);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for e in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if perm[i] == e { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            }
            for i in 1..n {
                for j in 0..i {
                    let sub = lu[i * n + j] * col[j];
                    col[i] -= sub;
                }
            }
            for i in (0..n).rev() {
                for j in (i + 1)..n {
                    let sub = lu[i * n + j] * col[j];
                    col[i] -= sub;
                }
                col[i] /= lu[i * n + i];
            }
            for i in 0..n {
                inv.set(i, e, col[i]);
            }
        }
        if !inv.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::DecompositionFailure("LU inverse (overflow)"));
        }
        Ok(inv)
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect();
        CMatrix { dim: self.dim, data }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a - b).collect();
        CMatrix { dim: self.dim, data }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        let data = self.data.iter().map(|a| -a).collect();
        CMatrix { dim: self.dim, data }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let add = aik * rhs.get(k, j);
                    let cur = out.get(i, j);
                    out.set(i, j, cur + add);
                }
            }
        }
        out
    }
}
