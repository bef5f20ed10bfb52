//! Seeded random matrix ensembles: Ginibre, Haar unitaries, Hermitian
//! contractions, and normal matrices with prescribed spectral radius.

use super::CMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Standard complex Gaussian entry, unit variance.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, complex_gaussian(rng));
        }
    }
    m
}

/// Ginibre scaled by `1/sqrt(dim)`, keeping the operator norm around 2.
pub fn ginibre_normalized<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    ginibre(dim, rng).scale_re(1.0 / (dim as f64).sqrt())
}

/// Haar-distributed unitary: modified Gram-Schmidt on a Ginibre matrix.
/// The implicit R factor has a positive real diagonal, which is exactly the
/// normalization that makes the Q factor Haar.
pub fn haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let ip: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for i in 0..dim {
                    v[i] -= ip * u[i];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        cols.push(v);
    }
    let mut q = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            q.set(i, j, col[i]);
        }
    }
    q
}

/// Random Hermitian matrix `(G + G*) / 2`.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre_normalized(dim, rng);
    (&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Random Hermitian contraction `0 <= S <= I`: Haar basis, uniform eigenvalues.
pub fn hermitian_contraction<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let v = haar_unitary(dim, rng);
    let vals: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    &(&v * &CMatrix::diag_re(&vals)) * &v.adjoint()
}

/// Uniform sample from the closed disk of the given radius.
pub fn disk_sample<R: Rng>(radius: f64, rng: &mut R) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, theta)
}

/// Normal matrix with Haar eigenbasis and spectrum uniform in the disk of
/// the given radius.
pub fn normal_in_disk<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> CMatrix {
    let u = haar_unitary(dim, rng);
    let vals: Vec<Complex64> = (0..dim).map(|_| disk_sample(radius, rng)).collect();
    &(&u * &CMatrix::diag(&vals)) * &u.adjoint()
}

/// Hermitian matrix with Haar eigenbasis and eigenvalues uniform in
/// `[-radius, radius]`.
pub fn hermitian_in_interval<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> CMatrix {
    let u = haar_unitary(dim, rng);
    let vals: Vec<f64> = (0..dim).map(|_| radius * (2.0 * rng.gen::<f64>() - 1.0)).collect();
    &(&u * &CMatrix::diag_re(&vals)) * &u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [1, 2, 5, 8] {
            let u = haar_unitary(dim, &mut rng);
            let defect = (&(&u.adjoint() * &u) - &CMatrix::identity(dim)).frobenius_norm();
            assert!(defect < 1e-13, "dim {dim}: defect {defect}");
        }
    }

    #[test]
    fn disk_samples_stay_in_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            assert!(disk_sample(0.9, &mut rng).norm() <= 0.9 + 1e-12);
        }
    }

    #[test]
    fn contraction_is_sandwiched() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = hermitian_contraction(4, &mut rng);
        let (vals, _) = crate::linalg::hermitian_eig(&s).unwrap();
        assert!(vals[0] >= -1e-12 && vals[vals.len() - 1] <= 1.0 + 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let a = ginibre(3, &mut ChaCha8Rng::seed_from_u64(42));
        let b = ginibre(3, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }
}
