//! Weighted finite operator families and the transformers they induce,
//! `X -> sum_t mu_t A_t X B_t`, together with mean, variance, the Korkine
//! rewriting of the centered transformer, and an enclosing-radius estimate.

use crate::error::Error;
use crate::linalg::random::{
    disk_sample, ginibre_normalized, haar_unitary, hermitian_contraction,
};
use crate::linalg::{is_normal, psd_power, CMatrix};
use crate::tol;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Structural claims about a field, verified at construction time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FieldFlags {
    /// Weights sum to one.
    pub is_probability: bool,
    /// Members are normal and pairwise commute.
    pub is_commuting_normal: bool,
    /// Every member is Hermitian.
    pub is_self_adjoint: bool,
}

/// Finitely many operators of a shared dimension with positive weights.
#[derive(Clone, Debug)]
pub struct OperatorField {
    weights: Vec<f64>,
    ops: Vec<CMatrix>,
    flags: FieldFlags,
}

impl OperatorField {
    /// Validates lengths, dimensions, weight positivity, and every flag that
    /// is set. Flags are promises made by the caller; a set flag that fails
    /// its check is an error, never silently cleared.
    pub fn new(weights: Vec<f64>, ops: Vec<CMatrix>, flags: FieldFlags) -> Result<Self> {
        if weights.is_empty() || ops.is_empty() {
            return Err(Error::EmptyInput);
        }
        if weights.len() != ops.len() {
            return Err(Error::DimensionMismatch { left: weights.len(), right: ops.len() });
        }
        let dim = ops[0].dim();
        for op in &ops {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: op.dim() });
            }
        }
        for &w in &weights {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::BadAtoms("field weights must be positive and finite"));
            }
        }
        let field = Self { weights, ops, flags };
        field.verify_flags()?;
        Ok(field)
    }

    /// Field with `is_probability` set; weights must already sum to one.
    pub fn probability(weights: Vec<f64>, ops: Vec<CMatrix>) -> Result<Self> {
        Self::new(weights, ops, FieldFlags { is_probability: true, ..FieldFlags::default() })
    }

    fn verify_flags(&self) -> Result<()> {
        if self.flags.is_probability {
            let total: f64 = self.weights.iter().sum();
            if (total - 1.0).abs() > tol::TOL_WEIGHT_SUM {
                return Err(Error::NotProbability);
            }
        }
        if self.flags.is_self_adjoint {
            for op in &self.ops {
                let defect = (op - &op.adjoint()).operator_norm()?;
                if defect > tol::TOL_HERMITIAN {
                    return Err(Error::HypothesisViolated(format!(
                        "self-adjoint flag set but a member has Hermitian defect {defect:.3e}"
                    )));
                }
            }
        }
        if self.flags.is_commuting_normal {
            for op in &self.ops {
                if !is_normal(op, tol::TOL_NORMAL)? {
                    return Err(Error::HypothesisViolated(
                        "commuting-normal flag set but a member is not normal".into(),
                    ));
                }
            }
            for s in 0..self.ops.len() {
                for t in (s + 1)..self.ops.len() {
                    let comm = self.ops[s].commutator(&self.ops[t]).operator_norm()?;
                    if comm > tol::TOL_COMMUTE {
                        return Err(Error::HypothesisViolated(format!(
                            "commuting-normal flag set but a commutator has norm {comm:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn flags(&self) -> FieldFlags {
        self.flags
    }

    /// Field of adjoints with identical weights; self-adjointness survives,
    /// the other flags are re-derivable but commuting-normal also survives.
    pub fn adjoint(&self) -> Self {
        Self {
            weights: self.weights.clone(),
            ops: self.ops.iter().map(CMatrix::adjoint).collect(),
            flags: self.flags,
        }
    }

    /// `sum_t mu_t A_t`.
    pub fn mean(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim());
        for (w, op) in self.weights.iter().zip(&self.ops) {
            acc = &acc + &op.scale_re(*w);
        }
        acc
    }

    /// `sum_t mu_t A_t* A_t - M*M` with `M` the mean. Requires a probability
    /// field; the result is Hermitian PSD up to round-off.
    pub fn variance(&self) -> Result<CMatrix> {
        self.require_probability()?;
        let mean = self.mean();
        let mut acc = CMatrix::zeros(self.dim());
        for (w, op) in self.weights.iter().zip(&self.ops) {
            acc = &acc + &(&op.adjoint() * op).scale_re(*w);
        }
        Ok(&acc - &(&mean.adjoint() * &mean))
    }

    /// Variance in its symmetric pair form
    /// `(1/2) sum_{s,t} mu_s mu_t (A_s-A_t)*(A_s-A_t)`.
    pub fn variance_pair_form(&self) -> Result<CMatrix> {
        self.require_probability()?;
        let mut acc = CMatrix::zeros(self.dim());
        for s in 0..self.ops.len() {
            for t in 0..self.ops.len() {
                if s == t {
                    continue;
                }
                let d = &self.ops[s] - &self.ops[t];
                acc = &acc + &(&d.adjoint() * &d).scale_re(self.weights[s] * self.weights[t]);
            }
        }
        Ok(acc.scale_re(0.5))
    }

    /// `sum_t mu_t (A_t - B)*(A_t - B)`, the second moment about `B`.
    /// With `B` = mean this is the variance in centered form.
    pub fn second_moment_about(&self, b: &CMatrix) -> Result<CMatrix> {
        self.ops[0].check_same_dim(b)?;
        let mut acc = CMatrix::zeros(self.dim());
        for (w, op) in self.weights.iter().zip(&self.ops) {
            let d = op - b;
            acc = &acc + &(&d.adjoint() * &d).scale_re(*w);
        }
        Ok(acc)
    }

    /// Radius of a smallest enclosing operator-norm ball around the members,
    /// estimated over the mean, all pairwise midpoints, and a shrinking-step
    /// walk toward the farthest member. The result always lands in
    /// `[diam/2, diam]` where `diam = max ||A_s - A_t||_op`.
    pub fn radius_infinity(&self) -> Result<f64> {
        let max_dist = |c: &CMatrix| -> Result<f64> {
            let mut m = 0.0f64;
            for op in &self.ops {
                m = m.max((op - c).operator_norm()?);
            }
            Ok(m)
        };
        let farthest = |c: &CMatrix| -> Result<usize> {
            let mut best = 0;
            let mut bd = -1.0;
            for (i, op) in self.ops.iter().enumerate() {
                let d = (op - c).operator_norm()?;
                if d > bd {
                    bd = d;
                    best = i;
                }
            }
            Ok(best)
        };

        let mut best_center = self.mean();
        let mut best_r = max_dist(&best_center)?;
        for s in 0..self.ops.len() {
            for t in s..self.ops.len() {
                let mid = (&self.ops[s] + &self.ops[t]).scale_re(0.5);
                let r = max_dist(&mid)?;
                if r < best_r {
                    best_r = r;
                    best_center = mid;
                }
            }
        }

        let mut c = best_center;
        for k in 0..64usize {
            let f = farthest(&c)?;
            let step = 1.0 / (k as f64 + 2.0);
            c = &c + &(&self.ops[f] - &c).scale_re(step);
            let r = max_dist(&c)?;
            if r < best_r {
                best_r = r;
            }
        }
        Ok(best_r)
    }

    fn require_probability(&self) -> Result<()> {
        if !self.flags.is_probability {
            return Err(Error::NotProbability);
        }
        Ok(())
    }
}

/// Transformer `X -> sum_t mu_t A_t X B_t` built from two fields sharing one
/// weight vector.
#[derive(Clone, Debug)]
pub struct IptiTransformer {
    left: OperatorField,
    right: OperatorField,
}

impl IptiTransformer {
    pub fn new(left: OperatorField, right: OperatorField) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::DimensionMismatch { left: left.len(), right: right.len() });
        }
        if left.dim() != right.dim() {
            return Err(Error::DimensionMismatch { left: left.dim(), right: right.dim() });
        }
        if left.weights != right.weights {
            return Err(Error::HypothesisViolated(
                "left and right fields must share one weight vector".into(),
            ));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &OperatorField {
        &self.left
    }

    pub fn right(&self) -> &OperatorField {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// `sum_t mu_t A_t X B_t`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.left.ops[0].check_same_dim(x)?;
        let mut acc = CMatrix::zeros(self.dim());
        for ((w, a), b) in self.left.weights.iter().zip(&self.left.ops).zip(&self.right.ops) {
            acc = &acc + &(&(a * x) * b).scale_re(*w);
        }
        Ok(acc)
    }

    /// Adjoint of `apply` under the trace inner product:
    /// `sum_t mu_t A_t* X B_t*`.
    pub fn apply_hs_adjoint(&self, x: &CMatrix) -> Result<CMatrix> {
        self.left.ops[0].check_same_dim(x)?;
        let mut acc = CMatrix::zeros(self.dim());
        for ((w, a), b) in self.left.weights.iter().zip(&self.left.ops).zip(&self.right.ops) {
            acc = &acc + &(&(&a.adjoint() * x) * &b.adjoint()).scale_re(*w);
        }
        Ok(acc)
    }

    /// Centered transformer `T(X) - M_A X M_B`, the left side of the Korkine
    /// rewriting. Both fields must be probabilities.
    pub fn korkine_lhs(&self, x: &CMatrix) -> Result<CMatrix> {
        self.left.require_probability()?;
        self.right.require_probability()?;
        let t = self.apply(x)?;
        let mean_l = self.left.mean();
        let mean_r = self.right.mean();
        Ok(&t - &(&(&mean_l * x) * &mean_r))
    }

    /// `(1/2) sum_{s,t} mu_s mu_t (A_s - A_t) X (B_s - B_t)`; equals
    /// `korkine_lhs` exactly, which the test suite checks to 1e-10 relative.
    pub fn korkine_rhs(&self, x: &CMatrix) -> Result<CMatrix> {
        self.left.require_probability()?;
        self.right.require_probability()?;
        self.left.ops[0].check_same_dim(x)?;
        let n = self.left.len();
        let mut acc = CMatrix::zeros(self.dim());
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let da = &self.left.ops[s] - &self.left.ops[t];
                let db = &self.right.ops[s] - &self.right.ops[t];
                let w = self.left.weights[s] * self.left.weights[t];
                acc = &acc + &(&(&da * x) * &db).scale_re(w);
            }
        }
        Ok(acc.scale_re(0.5))
    }
}

/// Ensemble the generator draws a field from.
#[derive(Clone, Debug)]
pub enum FieldKind {
    /// Shared Haar eigenbasis, eigenvalues uniform on the disk of radius 0.9.
    CommutingNormalDisk,
    /// Hermitian members sandwiched between `lower` and `upper`.
    HermitianBounded { lower: CMatrix, upper: CMatrix },
    /// Independent scaled Ginibre members, no structure.
    General,
}

/// Draws a probability-weighted field of `n_atoms` members of size `dim`,
/// deterministically in `seed`. Structure flags are set to match the kind.
pub fn gen_field(kind: &FieldKind, n_atoms: usize, dim: usize, seed: u64) -> Result<OperatorField> {
    if n_atoms == 0 {
        return Err(Error::EmptyInput);
    }
    if dim == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(n_atoms);
    let mut total = 0.0;
    for _ in 0..n_atoms {
        // Bounded below so no weight collapses under normalization.
        let w = 0.05 + rng.gen::<f64>();
        total += w;
        weights.push(w);
    }
    for w in &mut weights {
        *w /= total;
    }

    let mut flags = FieldFlags { is_probability: true, ..FieldFlags::default() };
    let ops = match kind {
        FieldKind::CommutingNormalDisk => {
            flags.is_commuting_normal = true;
            let u = haar_unitary(dim, &mut rng);
            let uh = u.adjoint();
            let mut ops = Vec::with_capacity(n_atoms);
            for _ in 0..n_atoms {
                let eigs: Vec<_> = (0..dim).map(|_| disk_sample(0.9, &mut rng)).collect();
                ops.push(&(&u * &CMatrix::diag(&eigs)) * &uh);
            }
            ops
        }
        FieldKind::HermitianBounded { lower, upper } => {
            flags.is_self_adjoint = true;
            if lower.dim() != dim || upper.dim() != dim {
                return Err(Error::DimensionMismatch { left: lower.dim(), right: dim });
            }
            let gap = upper - lower;
            if gap.hermitian_defect() > tol::TOL_HERMITIAN {
                return Err(Error::BadBounds);
            }
            let root = psd_power(&gap, 0.5).map_err(|_| Error::BadBounds)?;
            let mut ops = Vec::with_capacity(n_atoms);
            for _ in 0..n_atoms {
                let s = hermitian_contraction(dim, &mut rng);
                let a = lower + &(&(&root * &s) * &root);
                // Symmetrize away round-off so the flag check is exact.
                ops.push((&a + &a.adjoint()).scale_re(0.5));
            }
            ops
        }
        FieldKind::General => (0..n_atoms).map(|_| ginibre_normalized(dim, &mut rng)).collect(),
    };
    OperatorField::new(weights, ops, flags)
}
