//! Spectral utilities on top of the decomposition kernels: operator absolute
//! value, PSD powers, normality tests, and distance to the unit circle.

use super::jacobi::{hermitian_eig, svd};
use super::qr_eig::general_eigenvalues;
use super::CMatrix;
use crate::error::Error;
use crate::tol;
use crate::Result;
use num_complex::Complex64;

/// Eigenvalue data. `eigenvectors` is a unitary whose columns match
/// `eigenvalues` and is present iff the source was diagonalized as normal.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Option<CMatrix>,
}

/// Normality defect test: `||A*A - AA*||_op <= tol * ||A||_op^2`.
pub fn is_normal(a: &CMatrix, tol_normal: f64) -> Result<bool> {
    let op = a.operator_norm()?;
    let adj = a.adjoint();
    let comm = &(&adj * a) - &(a * &adj);
    let defect = comm.operator_norm()?;
    Ok(defect <= tol_normal * (op * op).max(tol::ABS_FLOOR))
}

/// Operator absolute value `|A| = (A*A)^{1/2}`, via the right singular
/// vectors: `|A| = V diag(s) V*`.
pub fn abs_op(a: &CMatrix) -> Result<CMatrix> {
    let d = svd(a)?;
    Ok(&(&d.v * &CMatrix::diag_re(&d.s)) * &d.v.adjoint())
}

/// Power of a Hermitian PSD matrix through its eigendecomposition.
///
/// Eigenvalues below a small relative threshold are clipped to zero, so the
/// power acts on the numerical support and `0^0 := 0` makes `s = 0` the
/// support projection. Negative exponents are rejected, as is input that is
/// not Hermitian PSD within tolerance.
pub fn psd_power(p: &CMatrix, s: f64) -> Result<CMatrix> {
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    if s < 0.0 {
        return Err(Error::NotApplicable("negative power of a PSD matrix"));
    }
    let fro = p.frobenius_norm();
    if p.hermitian_defect() > tol::TOL_PSD_NEG * fro.max(tol::ABS_FLOOR) {
        return Err(Error::NotPsd);
    }
    let (vals, u) = hermitian_eig(p)?;
    let scale = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(CMatrix::zeros(p.dim()));
    }
    if vals[0] < -tol::TOL_PSD_NEG * scale {
        return Err(Error::NotPsd);
    }
    let powered: Vec<f64> = vals
        .iter()
        .map(|&x| if x <= tol::TOL_PSD_CLIP * scale { 0.0 } else { x.powf(s) })
        .collect();
    Ok(&(&u * &CMatrix::diag_re(&powered)) * &u.adjoint())
}

/// Distance from the spectrum to the unit circle, `min_i (1 - |lambda_i|)`.
/// Errors unless the whole spectrum is strictly inside the open unit disk.
pub fn dist_boundary_disk(a: &CMatrix) -> Result<f64> {
    let eigs = general_eigenvalues(a)?;
    let mut d = f64::INFINITY;
    for z in &eigs {
        let gap = 1.0 - z.norm();
        if gap <= tol::TOL_DISK {
            return Err(Error::SpectrumNotInDisk);
        }
        d = d.min(gap);
    }
    Ok(d)
}
