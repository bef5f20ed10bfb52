//! Eigenvalues of arbitrary complex matrices: Householder reduction to upper
//! Hessenberg form followed by an explicit single-shift QR iteration with
//! Wilkinson shifts and ad hoc exceptional shifts on stall.

use super::CMatrix;
use crate::error::Error;
use crate::Result;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Roots of the 2x2 block [[a, b], [c, d]], cancellation-safe.
fn eig_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    let l1 = (tr + disc).scale(0.5);
    let l2 = (tr - disc).scale(0.5);
    if l1.norm() >= l2.norm() && l1.norm() > 0.0 {
        (l1, det / l1)
    } else if l2.norm() > 0.0 {
        (det / l2, l2)
    } else {
        (l1, l2)
    }
}

fn householder_hessenberg(h: &mut CMatrix) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h.get(k + 1 + i, k)).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { Complex64::new(1.0, 0.0) };
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // rows: H <- (I - 2vv*) H on rows k+1..n
        for j in 0..n {
            let t: Complex64 = (0..m).map(|i| v[i].conj() * h.get(k + 1 + i, j)).sum();
            let t2 = t.scale(2.0);
            for i in 0..m {
                let cur = h.get(k + 1 + i, j);
                h.set(k + 1 + i, j, cur - v[i] * t2);
            }
        }
        // columns: H <- H (I - 2vv*) on columns k+1..n
        for i in 0..n {
            let s: Complex64 = (0..m).map(|j| h.get(i, k + 1 + j) * v[j]).sum();
            let s2 = s.scale(2.0);
            for j in 0..m {
                let cur = h.get(i, k + 1 + j);
                h.set(i, k + 1 + j, cur - s2 * v[j].conj());
            }
        }
        for i in (k + 2)..n {
            h.set(i, k, ZERO);
        }
    }
}

struct Givens {
    c: f64,
    s: Complex64,
}

/// Rotation with `G*(f, g) = (r, 0)` for `G = [[c, s], [-conj(s), c]]`.
fn givens(f: Complex64, g: Complex64) -> Givens {
    if f.norm() == 0.0 {
        return Givens { c: 0.0, s: Complex64::new(1.0, 0.0) };
    }
    let r = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let c = f.norm() / r;
    let s = (f / f.norm()) * g.conj() / r;
    Givens { c, s }
}

/// Eigenvalues of a general square complex matrix, in deflation order.
pub fn general_eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if n == 1 {
        return Ok(vec![a.get(0, 0)]);
    }
    let mut h = a.clone();
    householder_hessenberg(&mut h);

    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut stall = 0usize;
    let mut steps = 0usize;
    let max_steps = 60 * n;
    let eps = 4.0 * f64::EPSILON;

    loop {
        // deflate tiny subdiagonals
        for i in 1..=hi {
            let sub = h.get(i, i - 1).norm();
            let local = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
            if sub <= eps * local {
                h.set(i, i - 1, ZERO);
            }
        }
        // locate the active block [lo, hi]
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1).norm() > 0.0 {
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h.get(hi, hi));
            if hi == 0 {
                break;
            }
            hi -= 1;
            stall = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig_2x2(
                h.get(lo, lo),
                h.get(lo, hi),
                h.get(hi, lo),
                h.get(hi, hi),
            );
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            stall = 0;
            continue;
        }

        steps += 1;
        stall += 1;
        if steps > max_steps {
            return Err(Error::DecompositionFailure("Hessenberg QR eigenvalues"));
        }
        let mu = if stall % 12 == 0 {
            h.get(hi, hi) + Complex64::new(0.75 * h.get(hi, hi - 1).norm(), 0.0)
        } else {
            let (l1, l2) = eig_2x2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let d = h.get(hi, hi);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        for i in lo..=hi {
            let cur = h.get(i, i);
            h.set(i, i, cur - mu);
        }
        let mut rots: Vec<Givens> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let g = givens(h.get(i, i), h.get(i + 1, i));
            for j in i..=hi {
                let top = h.get(i, j);
                let bot = h.get(i + 1, j);
                h.set(i, j, top.scale(g.c) + g.s * bot);
                h.set(i + 1, j, -g.s.conj() * top + bot.scale(g.c));
            }
            h.set(i + 1, i, ZERO);
            rots.push(g);
        }
        for (idx, g) in rots.iter().enumerate() {
            let i = lo + idx;
            let rmax = (i + 1).min(hi);
            for r in lo..=rmax {
                let left = h.get(r, i);
                let right = h.get(r, i + 1);
                h.set(r, i, left.scale(g.c) + right * g.s.conj());
                h.set(r, i + 1, -g.s * left + right.scale(g.c));
            }
        }
        for i in lo..=hi {
            let cur = h.get(i, i);
            h.set(i, i, cur + mu);
        }
    }
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_by_re_im(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn triangular_matrix_returns_diagonal() {
        let a = CMatrix::from_re_rows(&[
            vec![0.1, 0.2, 0.3],
            vec![0.0, 0.4, 0.5],
            vec![0.0, 0.0, 0.6],
        ])
        .unwrap();
        let eigs = sorted_by_re_im(general_eigenvalues(&a).unwrap());
        for (got, want) in eigs.iter().zip([0.1, 0.4, 0.6]) {
            assert!((got - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn jordan_cell_has_zero_spectrum() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let eigs = general_eigenvalues(&a).unwrap();
        for z in eigs {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn companion_of_unity_gives_cube_roots() {
        let a = CMatrix::from_re_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let eigs = general_eigenvalues(&a).unwrap();
        for z in &eigs {
            assert!((z.norm() - 1.0).abs() < 1e-10);
            assert!((z.powu(3) - c(1.0, 0.0)).norm() < 1e-9);
        }
        let sum: Complex64 = eigs.iter().sum();
        assert!(sum.norm() < 1e-10);
    }

    #[test]
    fn rotation_block_gives_imaginary_pair() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 0.4], vec![-0.4, 0.0]]).unwrap();
        let eigs = sorted_by_re_im(general_eigenvalues(&a).unwrap());
        assert!((eigs[0] - c(0.0, -0.4)).norm() < 1e-12);
        assert!((eigs[1] - c(0.0, 0.4)).norm() < 1e-12);
    }

    #[test]
    fn single_entry_matrix() {
        let a = CMatrix::diag(&[c(0.3, -0.2)]);
        let eigs = general_eigenvalues(&a).unwrap();
        assert_eq!(eigs.len(), 1);
        assert!((eigs[0] - c(0.3, -0.2)).norm() == 0.0);
    }

    #[test]
    fn dense_nonnormal_matrix_trace_matches_eigenvalue_sum() {
        let a = CMatrix::from_rows(&[
            vec![c(0.2, 0.1), c(1.0, -0.3), c(0.0, 0.7)],
            vec![c(-0.5, 0.0), c(0.1, 0.1), c(0.4, 0.0)],
            vec![c(0.3, 0.3), c(0.0, -0.2), c(-0.6, 0.5)],
        ])
        .unwrap();
        let eigs = general_eigenvalues(&a).unwrap();
        let sum: Complex64 = eigs.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-10);
    }
}
