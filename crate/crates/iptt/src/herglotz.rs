//! Finite-atom functions of the form `f(z) = sum_j w_j (e^{ia_j}+z)/(e^{ia_j}-z)`
//! with positive weights summing to one, evaluated pointwise on the open unit
//! disk and spectrally on normal matrices whose spectrum lies inside it.

use crate::error::Error;
use crate::linalg::{normal_eig, CMatrix};
use crate::tol;
use crate::Result;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

/// One boundary atom: unit-circle angle and its positive mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

/// Convex combination of Cayley kernels anchored on the unit circle.
///
/// Weights are strictly positive and sum to one, so `f(0) = 1` exactly and
/// `Re f > 0` on the open disk. Angles are stored reduced into `[0, 2*pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzFn {
    atoms: Vec<Atom>,
}

impl HerglotzFn {
    /// Builds from `(angle, weight)` pairs, validating positivity and the
    /// unit total mass.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::BadAtoms("no atoms"));
        }
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut total = 0.0;
        for &(angle, weight) in pairs {
            if !angle.is_finite() || !weight.is_finite() {
                return Err(Error::BadAtoms("non-finite atom"));
            }
            if weight <= 0.0 {
                return Err(Error::BadAtoms("weight must be positive"));
            }
            total += weight;
            atoms.push(Atom { angle: angle.rem_euclid(TAU), weight });
        }
        if (total - 1.0).abs() > tol::TOL_WEIGHT_SUM {
            return Err(Error::BadAtoms("weights must sum to 1"));
        }
        Ok(Self { atoms })
    }

    /// Single unit-mass atom at `angle`.
    pub fn single(angle: f64) -> Result<Self> {
        Self::new(&[(angle, 1.0)])
    }

    /// Random function with `n_atoms` atoms: uniform angles, weights drawn
    /// uniformly then normalized to total mass one.
    pub fn random(n_atoms: usize, rng: &mut impl Rng) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::BadAtoms("no atoms"));
        }
        let mut pairs = Vec::with_capacity(n_atoms);
        let mut total = 0.0;
        for _ in 0..n_atoms {
            // Bounded below so normalization cannot produce a zero weight.
            let w = 0.05 + rng.gen::<f64>();
            total += w;
            pairs.push((rng.gen::<f64>() * TAU, w));
        }
        for p in &mut pairs {
            p.1 /= total;
        }
        Self::new(&pairs)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Pointwise value `sum_j w_j (e^{ia_j}+z)/(e^{ia_j}-z)` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if z.norm() >= 1.0 - tol::TOL_DISK {
            return Err(Error::OutsideDisk);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for atom in &self.atoms {
            let e = Complex64::from_polar(1.0, atom.angle);
            acc += atom.weight * (e + z) / (e - z);
        }
        Ok(acc)
    }

    /// Spectral calculus `f(A) = U diag(f(lambda)) U*` for normal `A` with
    /// spectrum in the open unit disk.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        let spectrum = normal_eig(a, tol::TOL_NORMAL)?;
        for z in &spectrum.eigenvalues {
            if z.norm() >= 1.0 - tol::TOL_DISK {
                return Err(Error::SpectrumNotInDisk);
            }
        }
        let u = spectrum
            .eigenvectors
            .ok_or(Error::DecompositionFailure("missing eigenbasis"))?;
        let mut vals = Vec::with_capacity(spectrum.eigenvalues.len());
        for &z in &spectrum.eigenvalues {
            vals.push(self.eval(z)?);
        }
        Ok(&(&u * &CMatrix::diag(&vals)) * &u.adjoint())
    }

    /// Same operator through the resolvent sum
    /// `sum_j w_j (e^{ia_j} - A)^{-1} (e^{ia_j} + A)`; agrees with `apply`
    /// on its domain and exists whenever no `e^{ia_j}` hits the spectrum.
    pub fn apply_resolvent(&self, a: &CMatrix) -> Result<CMatrix> {
        let n = a.dim();
        let id = CMatrix::identity(n);
        let mut acc = CMatrix::zeros(n);
        for atom in &self.atoms {
            let e = Complex64::from_polar(1.0, atom.angle);
            let shift = &id.scale(e) - a;
            let resolvent = shift.inverse()?;
            let term = &resolvent * &(&id.scale(e) + a);
            acc = &acc + &term.scale_re(atom.weight);
        }
        Ok(acc)
    }
}

/// Result of the resolvent growth check at one angle.
#[derive(Clone, Copy, Debug)]
pub struct ResolventSample {
    pub angle: f64,
    /// `||(e^{ia} - A)^{-1}||_op`.
    pub resolvent_norm: f64,
    /// `min_i |e^{ia} - lambda_i|`.
    pub spectral_dist: f64,
}

/// Verifies, for each sampled angle, the resolvent bound
/// `||(e^{ia}-A)^{-1}|| <= 1/d_A` (with `d_A = min_i (1-|lambda_i|)`) and the
/// normal-operator equality `||(e^{ia}-A)^{-1}|| = 1/dist(e^{ia}, sigma(A))`
/// within 1e-9 relative. Returns the per-angle samples on success.
pub fn resolvent_norm_bound_check(a: &CMatrix, angles: &[f64]) -> Result<Vec<ResolventSample>> {
    let spectrum = normal_eig(a, tol::TOL_NORMAL)?;
    let mut d_a = f64::INFINITY;
    for z in &spectrum.eigenvalues {
        let gap = 1.0 - z.norm();
        if gap <= tol::TOL_DISK {
            return Err(Error::SpectrumNotInDisk);
        }
        d_a = d_a.min(gap);
    }
    let n = a.dim();
    let id = CMatrix::identity(n);
    let mut out = Vec::with_capacity(angles.len());
    for &angle in angles {
        if !angle.is_finite() {
            return Err(Error::NonFinite);
        }
        let e = Complex64::from_polar(1.0, angle);
        let resolvent = (&id.scale(e) - a).inverse()?;
        let rn = resolvent.operator_norm()?;
        let dist = spectrum
            .eigenvalues
            .iter()
            .map(|z| (e - z).norm())
            .fold(f64::INFINITY, f64::min);
        let bound = 1.0 / d_a;
        if rn > bound * (1.0 + 1e-9) {
            return Err(Error::HypothesisViolated(format!(
                "resolvent norm {rn:.6e} exceeds 1/d_A = {bound:.6e} at angle {angle:.6}"
            )));
        }
        let eq_err = (rn - 1.0 / dist).abs();
        if eq_err > 1e-9 * rn.max(1.0) {
            return Err(Error::HypothesisViolated(format!(
                "growth equality off by {eq_err:.3e} at angle {angle:.6}"
            )));
        }
        out.push(ResolventSample { angle, resolvent_norm: rn, spectral_dist: dist });
    }
    Ok(out)
}
