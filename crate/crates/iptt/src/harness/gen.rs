//! Deterministic instance generation. Every builder draws from a ChaCha
//! stream keyed only by the trial seed, so a cell can be regenerated in
//! isolation; all hypotheses of the target bound hold by construction.

use crate::herglotz::HerglotzFn;
use crate::ineq::{IneqId, IneqInputs, IneqInstance};
use crate::linalg::random::{
    disk_sample, ginibre_normalized, haar_unitary, hermitian_contraction, hermitian_in_interval,
    normal_in_disk, random_hermitian,
};
use crate::linalg::CMatrix;
use crate::norms::UINorm;
use crate::transformer::{gen_field, FieldKind, IptiTransformer, OperatorField};
use crate::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid length for scalar instances; reported in the `dim` field since the
/// matrix-dimension axis does not apply to them.
pub const SCALAR_GRID_LEN: usize = 128;

/// Spectral radius used for disk-constrained spectra, kept safely inside
/// the unit disk so distance-to-boundary factors stay well conditioned.
const DISK_RADIUS: f64 = 0.9;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick_atoms<R: Rng>(atoms: &[usize], rng: &mut R) -> usize {
    atoms[rng.gen_range(0..atoms.len())]
}

/// Herglotz atom counts are kept at five or fewer to keep the functions
/// well spread over the circle.
fn pick_herglotz_atoms<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(1..=5)
}

/// Two fields of the same kind sharing one weight vector, as the
/// transformer requires.
fn shared_weight_pair(
    left_kind: &FieldKind,
    right_kind: &FieldKind,
    n_atoms: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(OperatorField, OperatorField)> {
    let left = gen_field(left_kind, n_atoms, dim, rng.gen())?;
    let right_raw = gen_field(right_kind, n_atoms, dim, rng.gen())?;
    let right =
        OperatorField::new(left.weights().to_vec(), right_raw.ops().to_vec(), right_raw.flags())?;
    Ok((left, right))
}

/// Hermitian sandwich bounds: a common center matrix padded below and above
/// by strictly positive Hermitian gaps.
fn sandwich_bounds(dim: usize, rng: &mut ChaCha8Rng) -> (CMatrix, CMatrix) {
    let center = random_hermitian(dim, rng).scale_re(0.5);
    let pad_lo = &hermitian_contraction(dim, rng).scale_re(0.7)
        + &CMatrix::identity(dim).scale_re(0.3);
    let pad_hi = &hermitian_contraction(dim, rng).scale_re(0.7)
        + &CMatrix::identity(dim).scale_re(0.3);
    (&center - &pad_lo, &center + &pad_hi)
}

/// Builds the instance for one sweep cell. The generated data depend only
/// on (id, dim, atoms, seed); norm, theta, and pqr parametrize the
/// evaluation of that same data.
pub fn build_instance(
    id: IneqId,
    dim: usize,
    atoms: &[usize],
    seed: u64,
    norm: Option<UINorm>,
    theta: Option<f64>,
    pqr: Option<(f64, f64, f64)>,
) -> Result<IneqInstance> {
    let mut rng = rng_for(seed);
    let inputs = match id {
        IneqId::GrussScalar => {
            let lower_f = -1.0 + rng.gen::<f64>();
            let upper_f = lower_f + 0.5 + rng.gen::<f64>();
            let lower_g = -1.0 + rng.gen::<f64>();
            let upper_g = lower_g + 0.5 + rng.gen::<f64>();
            let f: Vec<f64> = (0..SCALAR_GRID_LEN)
                .map(|_| lower_f + rng.gen::<f64>() * (upper_f - lower_f))
                .collect();
            let g: Vec<f64> = (0..SCALAR_GRID_LEN)
                .map(|_| lower_g + rng.gen::<f64>() * (upper_g - lower_g))
                .collect();
            IneqInputs::GrussScalar { f, g, lower_f, upper_f, lower_g, upper_g }
        }
        IneqId::P1 => {
            let f = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let g = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let a = normal_in_disk(dim, DISK_RADIUS, &mut rng);
            let b = normal_in_disk(dim, DISK_RADIUS, &mut rng);
            let x = ginibre_normalized(dim, &mut rng);
            IneqInputs::P1 { f, g, a, b, x }
        }
        IneqId::C1 => {
            let f = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let g = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            // A and X share an eigenbasis so they commute and X is normal.
            let u = haar_unitary(dim, &mut rng);
            let eig_a: Vec<Complex64> =
                (0..dim).map(|_| disk_sample(DISK_RADIUS, &mut rng)).collect();
            let eig_x: Vec<Complex64> = (0..dim).map(|_| disk_sample(1.5, &mut rng)).collect();
            let a = &(&u * &CMatrix::diag(&eig_a)) * &u.adjoint();
            let x = &(&u * &CMatrix::diag(&eig_x)) * &u.adjoint();
            IneqInputs::C1 { f, g, a, x }
        }
        IneqId::C2Minus | IneqId::C2Plus => {
            let f = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let g = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let a = normal_in_disk(dim, DISK_RADIUS, &mut rng);
            let x = ginibre_normalized(dim, &mut rng);
            IneqInputs::C2 { f, g, a, x }
        }
        IneqId::C3 => {
            let f = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let g = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let a = normal_in_disk(dim, DISK_RADIUS, &mut rng);
            let b = normal_in_disk(dim, DISK_RADIUS, &mut rng);
            IneqInputs::C3 { f, g, a, b }
        }
        IneqId::Hilb => {
            let f = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let g = HerglotzFn::random(pick_herglotz_atoms(&mut rng), &mut rng)?;
            let a = hermitian_in_interval(dim, DISK_RADIUS, &mut rng);
            let b = hermitian_in_interval(dim, DISK_RADIUS, &mut rng);
            let x = ginibre_normalized(dim, &mut rng);
            IneqInputs::Hilb { f, g, a, b, x }
        }
        IneqId::CsUinorm => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let kind = FieldKind::CommutingNormalDisk;
            let (left, right) = shared_weight_pair(&kind, &kind, n_atoms, dim, &mut rng)?;
            let t = IptiTransformer::new(left, right)?;
            let x = ginibre_normalized(dim, &mut rng);
            IneqInputs::CsUinorm { t, x }
        }
        IneqId::CsTheta => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let kind = FieldKind::General;
            let (left, right) = shared_weight_pair(&kind, &kind, n_atoms, dim, &mut rng)?;
            IneqInputs::CsTheta { left, right, theta: theta.expect("theta axis") }
        }
        IneqId::LandauTheta => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let kind = FieldKind::General;
            let (left, right) = shared_weight_pair(&kind, &kind, n_atoms, dim, &mut rng)?;
            IneqInputs::LandauTheta { left, right, theta: theta.expect("theta axis") }
        }
        IneqId::GrussOperator => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let (lower_l, upper_l) = sandwich_bounds(dim, &mut rng);
            let (lower_r, upper_r) = sandwich_bounds(dim, &mut rng);
            let kind_l = FieldKind::HermitianBounded {
                lower: lower_l.clone(),
                upper: upper_l.clone(),
            };
            let kind_r = FieldKind::HermitianBounded {
                lower: lower_r.clone(),
                upper: upper_r.clone(),
            };
            let (left, right) = shared_weight_pair(&kind_l, &kind_r, n_atoms, dim, &mut rng)?;
            let x = ginibre_normalized(dim, &mut rng);
            IneqInputs::GrussOperator { left, right, lower_l, upper_l, lower_r, upper_r, x }
        }
        IneqId::ElementaryGruss => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let (lower_l, upper_l) = sandwich_bounds(dim, &mut rng);
            let (lower_r, upper_r) = sandwich_bounds(dim, &mut rng);
            let kind_l = FieldKind::HermitianBounded {
                lower: lower_l.clone(),
                upper: upper_l.clone(),
            };
            let kind_r = FieldKind::HermitianBounded {
                lower: lower_r.clone(),
                upper: upper_r.clone(),
            };
            let left_ops = gen_field(&kind_l, n_atoms, dim, rng.gen())?.ops().to_vec();
            let right_ops = gen_field(&kind_r, n_atoms, dim, rng.gen())?.ops().to_vec();
            let x = ginibre_normalized(dim, &mut rng);
            IneqInputs::ElementaryGruss {
                left_ops,
                right_ops,
                lower_l,
                upper_l,
                lower_r,
                upper_r,
                x,
            }
        }
        IneqId::SchattenLandau => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let kind = FieldKind::General;
            let (left, right) = shared_weight_pair(&kind, &kind, n_atoms, dim, &mut rng)?;
            let x = ginibre_normalized(dim, &mut rng);
            let (p, q, r) = pqr.expect("pqr axis");
            IneqInputs::SchattenLandau { left, right, p, q, r, x }
        }
        IneqId::HsExactNorm => {
            let n_atoms = pick_atoms(atoms, &mut rng);
            let kind = FieldKind::General;
            let (left, right) = shared_weight_pair(&kind, &kind, n_atoms, dim, &mut rng)?;
            let t = IptiTransformer::new(left, right)?;
            IneqInputs::HsExactNorm { t }
        }
    };
    Ok(IneqInstance { id, inputs, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq::evaluate;

    #[test]
    fn every_id_generates_and_evaluates() {
        let atoms = [2, 3];
        for id in IneqId::ALL {
            let norm = id.takes_norm().then(UINorm::operator);
            let theta = id.takes_theta().then_some(1.0);
            let pqr = id.takes_pqr().then_some((2.0, 2.0, 2.0));
            let dim = if id.takes_dim() { 3 } else { 0 };
            let inst = build_instance(id, dim, &atoms, 99, norm, theta, pqr).unwrap();
            let res = evaluate(&inst).unwrap();
            assert!(res.lhs.is_finite() && res.rhs.is_finite(), "{id}");
        }
    }

    #[test]
    fn same_seed_same_instance() {
        for id in [IneqId::P1, IneqId::GrussOperator, IneqId::SchattenLandau] {
            let norm = id.takes_norm().then(UINorm::operator);
            let pqr = id.takes_pqr().then_some((1.0, 1.0, 1.0));
            let a = build_instance(id, 4, &[2, 4], 1234, norm.clone(), None, pqr).unwrap();
            let b = build_instance(id, 4, &[2, 4], 1234, norm, None, pqr).unwrap();
            let ra = evaluate(&a).unwrap();
            let rb = evaluate(&b).unwrap();
            assert_eq!(ra.lhs.to_bits(), rb.lhs.to_bits());
            assert_eq!(ra.rhs.to_bits(), rb.rhs.to_bits());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = build_instance(IneqId::P1, 3, &[2], 1, Some(UINorm::operator()), None, None)
            .unwrap();
        let b = build_instance(IneqId::P1, 3, &[2], 2, Some(UINorm::operator()), None, None)
            .unwrap();
        let ra = evaluate(&a).unwrap();
        let rb = evaluate(&b).unwrap();
        assert_ne!(ra.lhs.to_bits(), rb.lhs.to_bits());
    }
}
