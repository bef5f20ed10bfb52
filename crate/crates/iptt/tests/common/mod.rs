//! Shared helpers for the integration suites: an independent
//! contour-integral route to the functional calculus and a multiset
//! eigenvalue comparator.

use iptt::linalg::{normal_eig, CMatrix};
use iptt::HerglotzFn;
use num_complex::Complex64;

/// Functional calculus through a trapezoid contour integral,
/// `f(A) = (1/2 pi i) oint f(z) (zI - A)^{-1} dz`, on the circle of radius
/// `(1 + max |lambda|) / 2`. The integrand is analytic in an annulus around
/// the contour, so 512 nodes are far more than the agreement tolerance of
/// 1e-6 needs. Test-only: the production path diagonalizes instead.
pub fn contour_calculus(f: &HerglotzFn, a: &CMatrix, nodes: usize) -> CMatrix {
    let spectrum = normal_eig(a, 1e-9).expect("normal input");
    let max_abs = spectrum
        .eigenvalues
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    assert!(max_abs < 1.0, "spectrum must stay inside the unit disk");
    let radius = 0.5 * (1.0 + max_abs);
    let dim = a.dim();
    let mut acc = CMatrix::zeros(dim);
    for k in 0..nodes {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
        let z = Complex64::from_polar(radius, angle);
        let resolvent = (&CMatrix::identity(dim).scale(z) - a)
            .inverse()
            .expect("z off the spectrum");
        let weight = f.eval(z).expect("z inside the disk") * z;
        acc = &acc + &resolvent.scale(weight);
    }
    acc.scale_re(1.0 / nodes as f64)
}

/// Greedy multiset matching: every entry of `xs` pairs with a distinct
/// entry of `ys` within `tol`.
pub fn multiset_close(xs: &[Complex64], ys: &[Complex64], tol: f64) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    for x in xs {
        let mut best: Option<(usize, f64)> = None;
        for (j, y) in ys.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= tol => used[j] = true,
            _ => return false,
        }
    }
    true
}
