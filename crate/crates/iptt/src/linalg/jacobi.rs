//! Jacobi-type eigensolvers: two-sided rotations for Hermitian matrices,
//! one-sided rotations for the SVD, and a clustered simultaneous
//! diagonalization of the Hermitian/skew split for normal matrices.
//!
//! Plane rotations make these kernels slow past a few hundred rows but very
//! accurate at the small dimensions used here.

use super::spectral::Spectrum;
use super::CMatrix;
use crate::error::Error;
use crate::tol;
use crate::Result;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Convergence threshold for off-diagonal mass, relative to the input norm.
const OFF_TOL: f64 = 1e-14;

/// Gram-angle threshold below which one-sided rotations are skipped.
const ORTHO_TOL: f64 = 1e-15;

/// Eigenvalue gap (relative to the Frobenius norm) under which the
/// simultaneous diagonalization treats eigenvalues as one cluster.
const CLUSTER_TOL: f64 = 1e-6;

/// Full SVD `A = U diag(s) V*` with `s` nonincreasing and `U`, `V` unitary.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// One complex Jacobi rotation: `c` real, `u` the phase of the pivot entry.
struct Rotation {
    c: f64,
    s: f64,
    t: f64,
    u: Complex64,
    gabs: f64,
}

/// Rotation diagonalizing the Hermitian 2x2 [[alpha, gamma], [conj gamma, beta]].
fn plane_rotation(alpha: f64, beta: f64, gamma: Complex64) -> Rotation {
    let gabs = gamma.norm();
    let u = gamma / gabs;
    let tau = (beta - alpha) / (2.0 * gabs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    Rotation { c, s: t * c, t, u, gabs }
}

fn off_diag_fro(m: &CMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
/// Returns eigenvalues ascending with matching unitary eigenvector columns.
/// The input is symmetrized first, so tiny Hermitian defects are tolerated.
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.dim();
    let half = Complex64::new(0.5, 0.0);
    let mut m = (a + &a.adjoint()).scale(half);
    for i in 0..n {
        let d = m.get(i, i);
        m.set(i, i, Complex64::new(d.re, 0.0));
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diag_fro(&m) <= OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let gamma = m.get(p, q);
                if gamma.norm() == 0.0 {
                    continue;
                }
                let alpha = m.get(p, p).re;
                let beta = m.get(q, q).re;
                let rot = plane_rotation(alpha, beta, gamma);
                let upp = rot.u * rot.c;
                let ups = rot.u * rot.s;

                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, mip * upp - miq * rot.s);
                    m.set(i, q, mip * ups + miq * rot.c);
                }
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, upp.conj() * mpj - rot.s * mqj);
                    m.set(q, j, ups.conj() * mpj + rot.c * mqj);
                }
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));
                m.set(p, p, Complex64::new(alpha - rot.t * rot.gabs, 0.0));
                m.set(q, q, Complex64::new(beta + rot.t * rot.gabs, 0.0));

                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * upp - viq * rot.s);
                    v.set(i, q, vip * ups + viq * rot.c);
                }
            }
        }
    }
    if !converged && off_diag_fro(&m) > OFF_TOL * scale {
        return Err(Error::DecompositionFailure("Hermitian Jacobi eigensolver"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re).then(i.cmp(&j)));
    let vals: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vs = CMatrix::zeros(n);
    for (jj, &src) in order.iter().enumerate() {
        for i in 0..n {
            vs.set(i, jj, v.get(i, src));
        }
    }
    Ok((vals, vs))
}

fn col_dot(w: &CMatrix, p: usize, q: usize) -> Complex64 {
    let n = w.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += w.get(i, p).conj() * w.get(i, q);
    }
    acc
}

fn col_norm_sqr(w: &CMatrix, p: usize) -> f64 {
    let n = w.dim();
    (0..n).map(|i| w.get(i, p).norm_sqr()).sum()
}

/// One-sided Jacobi: orthogonalizes column pairs of `W = A V`, accumulating
/// `V` when requested. Returns sorted column data.
fn jacobi_svd_core(a: &CMatrix, want_v: bool) -> Result<(CMatrix, Option<CMatrix>, Vec<f64>)> {
    let n = a.dim();
    let mut w = a.clone();
    let mut v = if want_v { Some(CMatrix::identity(n)) } else { None };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = col_norm_sqr(&w, p);
                let aqq = col_norm_sqr(&w, q);
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                let apq = col_dot(&w, p, q);
                if apq.norm() <= ORTHO_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = plane_rotation(app, aqq, apq);
                let upp = rot.u * rot.c;
                let ups = rot.u * rot.s;
                for i in 0..n {
                    let wip = w.get(i, p);
                    let wiq = w.get(i, q);
                    w.set(i, p, wip * upp - wiq * rot.s);
                    w.set(i, q, wip * ups + wiq * rot.c);
                }
                if let Some(vm) = v.as_mut() {
                    for i in 0..n {
                        let vip = vm.get(i, p);
                        let viq = vm.get(i, q);
                        vm.set(i, p, vip * upp - viq * rot.s);
                        vm.set(i, q, vip * ups + viq * rot.c);
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::DecompositionFailure("one-sided Jacobi SVD"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| col_norm_sqr(&w, j).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let svals: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut ws = CMatrix::zeros(n);
    for (jj, &src) in order.iter().enumerate() {
        for i in 0..n {
            ws.set(i, jj, w.get(i, src));
        }
    }
    let vs = v.map(|vm| {
        let mut out = CMatrix::zeros(n);
        for (jj, &src) in order.iter().enumerate() {
            for i in 0..n {
                out.set(i, jj, vm.get(i, src));
            }
        }
        out
    });
    Ok((ws, vs, svals))
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let (_, _, s) = jacobi_svd_core(a, false)?;
    Ok(s)
}

/// Full SVD. Null-space columns of `U` are completed to an orthonormal basis.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    let n = a.dim();
    let (w, v, s) = jacobi_svd_core(a, true)?;
    let v = v.expect("V accumulated");
    let smax = s.first().copied().unwrap_or(0.0);
    let rank_tol = smax * (n as f64) * 4.0 * f64::EPSILON;

    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        if s[j] > rank_tol && s[j] > 0.0 {
            let inv = 1.0 / s[j];
            cols.push((0..n).map(|i| w.get(i, j) * inv).collect());
        } else {
            cols.push(complete_column(&cols, n));
        }
    }
    let mut u = CMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            u.set(i, j, col[i]);
        }
    }
    Ok(Svd { u, s, v })
}

/// Picks the standard basis vector with the largest residual against the
/// existing columns and orthonormalizes it. Deterministic.
fn complete_column(cols: &[Vec<Complex64>], n: usize) -> Vec<Complex64> {
    let residual = |k: usize| -> Vec<Complex64> {
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        r[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for col in cols {
                let ip: Complex64 = col.iter().zip(r.iter()).map(|(c, x)| c.conj() * x).sum();
                for i in 0..n {
                    r[i] -= ip * col[i];
                }
            }
        }
        r
    };
    let mut best_k = 0;
    let mut best_norm = -1.0;
    for k in 0..n {
        let r = residual(k);
        let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nr > best_norm {
            best_norm = nr;
            best_k = k;
        }
    }
    let r = residual(best_k);
    let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    r.into_iter().map(|z| z / nr).collect()
}

/// Ranges of consecutive sorted values chained by gaps at most `gap`.
fn clusters(vals: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || (vals[i] - vals[i - 1]).abs() > gap {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Applies the block unitary `w` at `offset` on both sides of `m` and on the
/// columns of `u`: `m <- W* m W`, `u <- u W`.
fn apply_block(m: &mut CMatrix, u: &mut CMatrix, w: &CMatrix, offset: usize) {
    let n = m.dim();
    let r = w.dim();
    let mut tmp = vec![Complex64::new(0.0, 0.0); r];
    for i in 0..n {
        for (jj, t) in tmp.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..r {
                acc += m.get(i, offset + k) * w.get(k, jj);
            }
            *t = acc;
        }
        for (jj, t) in tmp.iter().enumerate() {
            m.set(i, offset + jj, *t);
        }
    }
    for j in 0..n {
        for (ii, t) in tmp.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..r {
                acc += w.get(k, ii).conj() * m.get(offset + k, j);
            }
            *t = acc;
        }
        for (ii, t) in tmp.iter().enumerate() {
            m.set(offset + ii, j, *t);
        }
    }
    for i in 0..n {
        for (jj, t) in tmp.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..r {
                acc += u.get(i, offset + k) * w.get(k, jj);
            }
            *t = acc;
        }
        for (jj, t) in tmp.iter().enumerate() {
            u.set(i, offset + jj, *t);
        }
    }
}

fn block_of(m: &CMatrix, start: usize, end: usize) -> CMatrix {
    let r = end - start;
    let mut b = CMatrix::zeros(r);
    for i in 0..r {
        for j in 0..r {
            b.set(i, j, m.get(start + i, start + j));
        }
    }
    b
}

/// Diagonalizes the commuting Hermitian/skew pair of a normal matrix:
/// eigenbasis of the Hermitian part, then the skew part inside each
/// eigenvalue cluster, then the Hermitian part again inside joint clusters.
fn simultaneous_diag(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let h = (a + &a.adjoint()).scale(Complex64::new(0.5, 0.0));
    let (hvals, mut u) = hermitian_eig(&h)?;
    let mut m = &(&u.adjoint() * a) * &u;
    let gap = CLUSTER_TOL * a.frobenius_norm().max(tol::ABS_FLOOR);

    for (cs, ce) in clusters(&hvals, gap) {
        if ce - cs < 2 {
            continue;
        }
        let b = block_of(&m, cs, ce);
        let kb = (&b - &b.adjoint()).scale(Complex64::new(0.0, -0.5));
        let (kvals, w) = hermitian_eig(&kb)?;
        apply_block(&mut m, &mut u, &w, cs);
        for (ss, se) in clusters(&kvals, gap) {
            if se - ss < 2 {
                continue;
            }
            let b2 = block_of(&m, cs + ss, cs + se);
            let hb = (&b2 + &b2.adjoint()).scale(Complex64::new(0.5, 0.0));
            let (_, w2) = hermitian_eig(&hb)?;
            apply_block(&mut m, &mut u, &w2, cs + ss);
        }
    }
    Ok((u, m))
}

/// Rotation phases tried when the first Hermitian/skew split fails to
/// resolve a cluster; rotating the matrix reshuffles the clustering.
const RETRY_PHASES: [f64; 4] = [0.0, 0.9129713018775527, 2.3999632297286535, 3.7764262818625740];

/// Spectral decomposition of a normal matrix: `A = U diag(eigenvalues) U*`.
/// Rejects inputs whose normality defect `||A*A - AA*||` exceeds
/// `tol * ||A||^2`.
pub fn normal_eig(a: &CMatrix, tol_normal: f64) -> Result<Spectrum> {
    let n = a.dim();
    let sv = singular_values(a)?;
    let op = sv.first().copied().unwrap_or(0.0);
    if op == 0.0 {
        return Ok(Spectrum {
            eigenvalues: vec![Complex64::new(0.0, 0.0); n],
            eigenvectors: Some(CMatrix::identity(n)),
        });
    }
    let adj = a.adjoint();
    let comm = &(&adj * a) - &(a * &adj);
    let defect = comm.operator_norm()?;
    if defect > tol_normal * (op * op).max(tol::ABS_FLOOR) {
        return Err(Error::NotNormal);
    }

    let accept = 0.5 * tol::TOL_RECON * op;
    let mut best: Option<(f64, CMatrix, Vec<Complex64>)> = None;
    for phi in RETRY_PHASES {
        let back = Complex64::from_polar(1.0, phi);
        let rotated = a.scale(Complex64::from_polar(1.0, -phi));
        let (u, m) = simultaneous_diag(&rotated)?;
        let off = off_diag_fro(&m);
        let eigenvalues: Vec<Complex64> = (0..n).map(|i| m.get(i, i) * back).collect();
        if best.as_ref().map(|(b, _, _)| off < *b).unwrap_or(true) {
            best = Some((off, u, eigenvalues));
        }
        if off <= accept {
            break;
        }
    }
    let (off, u, eigenvalues) = best.expect("at least one attempt");
    if off > accept {
        return Err(Error::DecompositionFailure("normal eigensolver"));
    }
    Ok(Spectrum { eigenvalues, eigenvectors: Some(u) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unitary_defect(u: &CMatrix) -> f64 {
        let n = u.dim();
        (&(&u.adjoint() * u) - &CMatrix::identity(n)).frobenius_norm()
    }

    #[test]
    fn hermitian_eig_two_by_two() {
        let a = CMatrix::from_re_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (vals, v) = hermitian_eig(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!(unitary_defect(&v) < 1e-12);
        let rec = &(&v * &CMatrix::diag_re(&vals)) * &v.adjoint();
        assert!(rec.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn hermitian_eig_complex_entries() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 2.0), c(0.3, 0.1)],
            vec![c(0.0, -2.0), c(-1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.3, -0.1), c(0.5, 0.0), c(0.25, 0.0)],
        ])
        .unwrap();
        let (vals, v) = hermitian_eig(&a).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!(unitary_defect(&v) < 1e-12);
        let rec = &(&v * &CMatrix::diag_re(&vals)) * &v.adjoint();
        assert!(rec.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn singular_values_of_real_diagonal() {
        let a = CMatrix::diag_re(&[3.0, -2.0, 1.0]);
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-13);
        assert!((s[1] - 2.0).abs() < 1e-13);
        assert!((s[2] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn singular_values_of_nilpotent_jordan_cell() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-14);
        assert!(s[1].abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_explicit_unitary_are_ones() {
        let r = 0.5f64.sqrt();
        let a = CMatrix::from_re_rows(&[vec![r, r], vec![r, -r]]).unwrap();
        let s = singular_values(&a).unwrap();
        for x in s {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_reconstructs_and_is_unitary() {
        let a = CMatrix::from_rows(&[
            vec![c(0.3, -1.0), c(2.0, 0.4), c(0.0, 0.0)],
            vec![c(1.0, 1.0), c(-0.7, 0.0), c(0.2, -0.3)],
            vec![c(0.0, 0.5), c(0.1, 0.1), c(-1.5, 0.9)],
        ])
        .unwrap();
        let d = svd(&a).unwrap();
        assert!(unitary_defect(&d.u) < 1e-12);
        assert!(unitary_defect(&d.v) < 1e-12);
        let rec = &(&d.u * &CMatrix::diag_re(&d.s)) * &d.v.adjoint();
        assert!(rec.max_abs_diff(&a) < 1e-12);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_of_rank_deficient_matrix_completes_u() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let d = svd(&a).unwrap();
        assert!(unitary_defect(&d.u) < 1e-12);
        let rec = &(&d.u * &CMatrix::diag_re(&d.s)) * &d.v.adjoint();
        assert!(rec.max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn svd_of_zero_matrix() {
        let a = CMatrix::zeros(3);
        let d = svd(&a).unwrap();
        assert!(d.s.iter().all(|&x| x == 0.0));
        assert!(unitary_defect(&d.u) < 1e-14);
    }

    #[test]
    fn normal_eig_recovers_diagonal_spectrum() {
        let a = CMatrix::diag(&[c(0.5, 0.0), c(0.0, 0.25)]);
        let sp = normal_eig(&a, tol::TOL_NORMAL).unwrap();
        let mut got: Vec<Complex64> = sp.eigenvalues.clone();
        got.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((got[0] - c(0.0, 0.25)).norm() < 1e-12);
        assert!((got[1] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn normal_eig_on_rotation_matrix() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 0.4], vec![-0.4, 0.0]]).unwrap();
        let sp = normal_eig(&a, tol::TOL_NORMAL).unwrap();
        let u = sp.eigenvectors.as_ref().unwrap();
        assert!(unitary_defect(u) < 1e-12);
        let rec = &(u * &CMatrix::diag(&sp.eigenvalues)) * &u.adjoint();
        assert!(rec.max_abs_diff(&a) < 1e-12);
        let mut ims: Vec<f64> = sp.eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 0.4).abs() < 1e-12 && (ims[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn normal_eig_with_repeated_eigenvalues() {
        let a = CMatrix::diag(&[c(0.5, 0.0), c(0.5, 0.0), c(0.0, -0.3)]);
        let sp = normal_eig(&a, tol::TOL_NORMAL).unwrap();
        let u = sp.eigenvectors.as_ref().unwrap();
        let rec = &(u * &CMatrix::diag(&sp.eigenvalues)) * &u.adjoint();
        assert!(rec.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn normal_eig_rejects_jordan_cell() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 2.0], Vec::from([0.0, 0.0])]).unwrap();
        assert!(matches!(normal_eig(&a, tol::TOL_NORMAL), Err(Error::NotNormal)));
    }

    #[test]
    fn normal_eig_of_zero_matrix() {
        let sp = normal_eig(&CMatrix::zeros(2), tol::TOL_NORMAL).unwrap();
        assert!(sp.eigenvalues.iter().all(|z| z.norm() == 0.0));
    }
}
