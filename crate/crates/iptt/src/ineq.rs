//! One evaluator per norm bound: each computes its left side, right side,
//! and margin = rhs - lhs on a single instance, after verifying the bound's
//! hypotheses. A violated hypothesis is an error, never a negative margin.

use crate::error::Error;
use crate::herglotz::HerglotzFn;
use crate::linalg::{abs_op, hermitian_eig, normal_eig, singular_values, CMatrix};
use crate::norms::UINorm;
use crate::tol;
use crate::transformer::{IptiTransformer, OperatorField};
use crate::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// Identifier of one checkable bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IneqId {
    GrussScalar,
    P1,
    C1,
    C2Minus,
    C2Plus,
    C3,
    Hilb,
    CsUinorm,
    CsTheta,
    LandauTheta,
    GrussOperator,
    ElementaryGruss,
    SchattenLandau,
    HsExactNorm,
}

impl IneqId {
    pub const ALL: [IneqId; 14] = [
        IneqId::GrussScalar,
        IneqId::P1,
        IneqId::C1,
        IneqId::C2Minus,
        IneqId::C2Plus,
        IneqId::C3,
        IneqId::Hilb,
        IneqId::CsUinorm,
        IneqId::CsTheta,
        IneqId::LandauTheta,
        IneqId::GrussOperator,
        IneqId::ElementaryGruss,
        IneqId::SchattenLandau,
        IneqId::HsExactNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IneqId::GrussScalar => "gruss_scalar",
            IneqId::P1 => "p1",
            IneqId::C1 => "c1",
            IneqId::C2Minus => "c2_minus",
            IneqId::C2Plus => "c2_plus",
            IneqId::C3 => "c3",
            IneqId::Hilb => "hilb",
            IneqId::CsUinorm => "cs_uinorm",
            IneqId::CsTheta => "cs_theta",
            IneqId::LandauTheta => "landau_theta",
            IneqId::GrussOperator => "gruss_operator",
            IneqId::ElementaryGruss => "elementary_gruss",
            IneqId::SchattenLandau => "schatten_landau",
            IneqId::HsExactNorm => "hs_exact_norm",
        }
    }

    /// Identity checks are judged by |margin|, inequalities by sign.
    pub fn is_identity(self) -> bool {
        matches!(self, IneqId::HsExactNorm)
    }

    /// Whether the evaluator consumes a caller-chosen norm; the rest fix
    /// their own norm (Schatten-2, Schatten-p, or operator).
    pub fn takes_norm(self) -> bool {
        !matches!(
            self,
            IneqId::GrussScalar | IneqId::Hilb | IneqId::SchattenLandau | IneqId::HsExactNorm
        )
    }

    pub fn takes_theta(self) -> bool {
        matches!(self, IneqId::CsTheta | IneqId::LandauTheta)
    }

    pub fn takes_pqr(self) -> bool {
        matches!(self, IneqId::SchattenLandau)
    }

    /// Dimension-independent checks (scalar grids) skip the dim axis.
    pub fn takes_dim(self) -> bool {
        !matches!(self, IneqId::GrussScalar)
    }
}

impl fmt::Display for IneqId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IneqId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        for id in IneqId::ALL {
            if id.name() == s {
                return Ok(id);
            }
        }
        Err(Error::ConfigInvalid(format!("unknown inequality id `{s}`")))
    }
}

/// Outcome of one evaluation: both sides, their gap, and the list of
/// hypotheses that were verified before computing anything.
#[derive(Clone, Debug)]
pub struct MarginResult {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub hypothesis_report: Vec<String>,
}

impl MarginResult {
    fn new(lhs: f64, rhs: f64, hypothesis_report: Vec<String>) -> Result<Self> {
        if !lhs.is_finite() || !rhs.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { lhs, rhs, margin: rhs - lhs, hypothesis_report })
    }
}

/// Sign variant of the `f(A)Xg(A) -+ X` bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum C2Sign {
    Minus,
    Plus,
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Scalar bound `|mean(fg) - mean(f) mean(g)| <= (D-C)(F-E)/4` for grid
/// samples `C <= f <= D`, `E <= g <= F`.
pub fn eval_gruss_scalar(
    f: &[f64],
    g: &[f64],
    lower_f: f64,
    upper_f: f64,
    lower_g: f64,
    upper_g: f64,
) -> Result<MarginResult> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptyInput);
    }
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { left: f.len(), right: g.len() });
    }
    for &b in &[lower_f, upper_f, lower_g, upper_g] {
        if !b.is_finite() {
            return Err(Error::BadBounds);
        }
    }
    if upper_f < lower_f || upper_g < lower_g {
        return Err(Error::BadBounds);
    }
    for &v in f {
        if !(lower_f <= v && v <= upper_f) {
            return Err(Error::HypothesisViolated(format!(
                "f sample {v:.6e} escapes [{lower_f:.6e}, {upper_f:.6e}]"
            )));
        }
    }
    for &v in g {
        if !(lower_g <= v && v <= upper_g) {
            return Err(Error::HypothesisViolated(format!(
                "g sample {v:.6e} escapes [{lower_g:.6e}, {upper_g:.6e}]"
            )));
        }
    }
    let prod: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    let lhs = (mean_of(&prod) - mean_of(f) * mean_of(g)).abs();
    let rhs = 0.25 * (upper_f - lower_f) * (upper_g - lower_g);
    MarginResult::new(
        lhs,
        rhs,
        vec![
            "f sampled within its stated bounds".into(),
            "g sampled within its stated bounds".into(),
            "matching grid lengths".into(),
        ],
    )
}

/// Minimal gap from the spectrum of a normal matrix to the unit circle.
fn disk_gap_normal(a: &CMatrix) -> Result<f64> {
    let spectrum = normal_eig(a, tol::TOL_NORMAL)?;
    let mut gap = f64::INFINITY;
    for z in &spectrum.eigenvalues {
        let g = 1.0 - z.norm();
        if g <= tol::TOL_DISK {
            return Err(Error::SpectrumNotInDisk);
        }
        gap = gap.min(g);
    }
    Ok(gap)
}

/// `|||f(A)Xg(B)+X||| <= (2 sqrt 2 / (d_A d_B)) ||| |AXB| + |X| |||` for
/// normal `A`, `B` with spectra in the open unit disk.
pub fn eval_p1(
    f: &HerglotzFn,
    g: &HerglotzFn,
    a: &CMatrix,
    b: &CMatrix,
    x: &CMatrix,
    norm: &UINorm,
) -> Result<MarginResult> {
    a.check_same_dim(b)?;
    a.check_same_dim(x)?;
    let d_a = disk_gap_normal(a)?;
    let d_b = disk_gap_normal(b)?;
    let fa = f.apply(a)?;
    let gb = g.apply(b)?;
    let lhs = norm.eval(&(&(&(&fa * x) * &gb) + x))?;
    let axb = &(a * x) * b;
    let rhs_core = &abs_op(&axb)? + &abs_op(x)?;
    let rhs = 2.0 * std::f64::consts::SQRT_2 / (d_a * d_b) * norm.eval(&rhs_core)?;
    MarginResult::new(
        lhs,
        rhs,
        vec![
            format!("A normal with spectrum in the unit disk, gap {d_a:.6e}"),
            format!("B normal with spectrum in the unit disk, gap {d_b:.6e}"),
        ],
    )
}

/// `|||f(A)Xg(A*)+X||| <= (2/d_A^2) ||| A|X|A* + |X| |||` for normal
/// commuting `A`, `X` with the spectrum of `A` in the open unit disk.
pub fn eval_c1(
    f: &HerglotzFn,
    g: &HerglotzFn,
    a: &CMatrix,
    x: &CMatrix,
    norm: &UINorm,
) -> Result<MarginResult> {
    a.check_same_dim(x)?;
    let d_a = disk_gap_normal(a)?;
    if !crate::linalg::is_normal(x, tol::TOL_NORMAL)? {
        return Err(Error::HypothesisViolated("X must be normal".into()));
    }
    let comm = a.commutator(x).operator_norm()?;
    let scale = (a.operator_norm()? * x.operator_norm()?).max(1.0);
    if comm > tol::TOL_COMMUTE * scale {
        return Err(Error::HypothesisViolated(format!(
            "A and X must commute; commutator norm {comm:.3e}"
        )));
    }
    let fa = f.apply(a)?;
    let ga = g.apply(&a.adjoint())?;
    let lhs = norm.eval(&(&(&(&fa * x) * &ga) + x))?;
    let absx = abs_op(x)?;
    let rhs_core = &(&(a * &absx) * &a.adjoint()) + &absx;
    let rhs = 2.0 / (d_a * d_a) * norm.eval(&rhs_core)?;
    MarginResult::new(
        lhs,
        rhs,
        vec![
            format!("A normal with spectrum in the unit disk, gap {d_a:.6e}"),
            "X normal".into(),
            "A and X commute".into(),
        ],
    )
}

/// `|||f(A)Xg(A) -+ X|||` against `(2 sqrt 2 / d_A^2) ||| |AX| + |XA| |||`.
/// The minus variant is the bound as stated; the plus variant is the
/// alternative sign, recorded so sweeps can compare both readings.
pub fn eval_c2(
    f: &HerglotzFn,
    g: &HerglotzFn,
    a: &CMatrix,
    x: &CMatrix,
    norm: &UINorm,
    sign: C2Sign,
) -> Result<MarginResult> {
    a.check_same_dim(x)?;
    let d_a = disk_gap_normal(a)?;
    let fa = f.apply(a)?;
    let ga = g.apply(a)?;
    let fxg = &(&fa * x) * &ga;
    let lhs_core = match sign {
        C2Sign::Minus => &fxg - x,
        C2Sign::Plus => &fxg + x,
    };
    let lhs = norm.eval(&lhs_core)?;
    let rhs_core = &abs_op(&(a * x))? + &abs_op(&(x * a))?;
    let rhs = 2.0 * std::f64::consts::SQRT_2 / (d_a * d_a) * norm.eval(&rhs_core)?;
    MarginResult::new(
        lhs,
        rhs,
        vec![format!("A normal with spectrum in the unit disk, gap {d_a:.6e}")],
    )
}

/// The `X = I` specialization of `eval_p1`; delegates so the two agree
/// bit-for-bit.
pub fn eval_c3(
    f: &HerglotzFn,
    g: &HerglotzFn,
    a: &CMatrix,
    b: &CMatrix,
    norm: &UINorm,
) -> Result<MarginResult> {
    eval_p1(f, g, a, b, &CMatrix::identity(a.dim()), norm)
}

/// Hilbert-Schmidt bound for Hermitian `A`, `B` with spectra in `(-1,1)`:
/// `max_{+-} ||f(A)X +- Xg(B)||_2 <= ||(X+|A|X)/d_A + (X+X|B|)/d_B||_2`.
pub fn eval_hilb(
    f: &HerglotzFn,
    g: &HerglotzFn,
    a: &CMatrix,
    b: &CMatrix,
    x: &CMatrix,
) -> Result<MarginResult> {
    a.check_same_dim(b)?;
    a.check_same_dim(x)?;
    for (m, label) in [(a, "A"), (b, "B")] {
        let defect = (m - &m.adjoint()).operator_norm()?;
        if defect > tol::TOL_HERMITIAN {
            return Err(Error::HypothesisViolated(format!(
                "{label} must be Hermitian; defect {defect:.3e}"
            )));
        }
    }
    let d_a = disk_gap_normal(a)?;
    let d_b = disk_gap_normal(b)?;
    let s2 = UINorm::schatten(2.0)?;
    let fa = f.apply(a)?;
    let gb = g.apply(b)?;
    let fax = &fa * x;
    let xgb = x * &gb;
    let lhs = s2.eval(&(&fax + &xgb))?.max(s2.eval(&(&fax - &xgb))?);
    let left_term = (&(x + &(&abs_op(a)? * x))).scale_re(1.0 / d_a);
    let right_term = (&(x + &(x * &abs_op(b)?))).scale_re(1.0 / d_b);
    let rhs = s2.eval(&(&left_term + &right_term))?;
    MarginResult::new(
        lhs,
        rhs,
        vec![
            format!("A Hermitian with spectrum in (-1,1), gap {d_a:.6e}"),
            format!("B Hermitian with spectrum in (-1,1), gap {d_b:.6e}"),
        ],
    )
}

/// Cauchy-Schwarz for the transformer with commuting-normal fields:
/// `|||T(X)||| <= ||| (sum mu A*A)^{1/2} X (sum mu B*B)^{1/2} |||`.
pub fn eval_cs_uinorm(t: &IptiTransformer, x: &CMatrix, norm: &UINorm) -> Result<MarginResult> {
    if !t.left().flags().is_commuting_normal || !t.right().flags().is_commuting_normal {
        return Err(Error::HypothesisViolated(
            "both fields must be flagged commuting normal".into(),
        ));
    }
    let lhs = norm.eval(&t.apply(x)?)?;
    let left_root = crate::linalg::psd_power(&gram_sum(t.left()), 0.5)?;
    let right_root = crate::linalg::psd_power(&gram_sum(t.right()), 0.5)?;
    let rhs = norm.eval(&(&(&left_root * x) * &right_root))?;
    MarginResult::new(
        lhs,
        rhs,
        vec!["left field commuting normal".into(), "right field commuting normal".into()],
    )
}

/// `sum_t mu_t A_t* A_t`.
fn gram_sum(field: &OperatorField) -> CMatrix {
    let mut acc = CMatrix::zeros(field.dim());
    for (w, op) in field.weights().iter().zip(field.ops()) {
        acc = &acc + &(&op.adjoint() * op).scale_re(*w);
    }
    acc
}

/// `sum_t mu_t A_t* B_t` for matched weights.
fn cross_sum(left: &OperatorField, right: &OperatorField) -> Result<CMatrix> {
    if left.weights() != right.weights() {
        return Err(Error::HypothesisViolated("fields must share one weight vector".into()));
    }
    if left.dim() != right.dim() {
        return Err(Error::DimensionMismatch { left: left.dim(), right: right.dim() });
    }
    let mut acc = CMatrix::zeros(left.dim());
    for ((w, a), b) in left.weights().iter().zip(left.ops()).zip(right.ops()) {
        acc = &acc + &(&a.adjoint() * b).scale_re(*w);
    }
    Ok(acc)
}

/// Power-mean Cauchy-Schwarz:
/// `||| |sum mu A*B|^theta ||| <= ||| (sum mu A*A)^theta |||^{1/2} ||| (sum mu B*B)^theta |||^{1/2}`.
pub fn eval_cs_theta(
    left: &OperatorField,
    right: &OperatorField,
    theta: f64,
    norm: &UINorm,
) -> Result<MarginResult> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::BadExponents);
    }
    let m = cross_sum(left, right)?;
    let lhs = norm.eval(&crate::linalg::psd_power(&abs_op(&m)?, theta)?)?;
    let la = norm.eval(&crate::linalg::psd_power(&gram_sum(left), theta)?)?;
    let lb = norm.eval(&crate::linalg::psd_power(&gram_sum(right), theta)?)?;
    let rhs = la.sqrt() * lb.sqrt();
    MarginResult::new(
        lhs,
        rhs,
        vec!["matched weight vectors".into(), format!("theta = {theta:.6e} positive")],
    )
}

/// Landau-type bound through centered fields:
/// `||| |sum mu A*B - M_A* M_B|^theta |||^2 <= ||| V_A^theta ||| ||| V_B^theta |||`.
pub fn eval_landau_theta(
    left: &OperatorField,
    right: &OperatorField,
    theta: f64,
    norm: &UINorm,
) -> Result<MarginResult> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::BadExponents);
    }
    if !left.flags().is_probability || !right.flags().is_probability {
        return Err(Error::NotProbability);
    }
    let m = &cross_sum(left, right)? - &(&left.mean().adjoint() * &right.mean());
    let lhs_root = norm.eval(&crate::linalg::psd_power(&abs_op(&m)?, theta)?)?;
    let lhs = lhs_root * lhs_root;
    let va = norm.eval(&crate::linalg::psd_power(&left.variance()?, theta)?)?;
    let vb = norm.eval(&crate::linalg::psd_power(&right.variance()?, theta)?)?;
    let rhs = va * vb;
    MarginResult::new(
        lhs,
        rhs,
        vec![
            "both fields probability-weighted".into(),
            format!("theta = {theta:.6e} positive"),
        ],
    )
}

fn check_sandwich(field: &OperatorField, lower: &CMatrix, upper: &CMatrix, label: &str) -> Result<()> {
    lower.check_same_dim(upper)?;
    lower.check_same_dim(&field.ops()[0])?;
    for (m, side) in [(lower, "lower"), (upper, "upper")] {
        let defect = (m - &m.adjoint()).operator_norm()?;
        if defect > tol::TOL_HERMITIAN {
            return Err(Error::HypothesisViolated(format!(
                "{label} {side} bound must be Hermitian; defect {defect:.3e}"
            )));
        }
    }
    if !field.flags().is_self_adjoint {
        return Err(Error::HypothesisViolated(format!(
            "{label} field must be flagged self-adjoint"
        )));
    }
    for op in field.ops() {
        let (above, _) = hermitian_eig(&(op - lower))?;
        if above[0] < -1e-10 {
            return Err(Error::HypothesisViolated(format!(
                "{label} field member drops {:.3e} below its lower bound",
                -above[0]
            )));
        }
        let (below, _) = hermitian_eig(&(upper - op))?;
        if below[0] < -1e-10 {
            return Err(Error::HypothesisViolated(format!(
                "{label} field member rises {:.3e} above its upper bound",
                -below[0]
            )));
        }
    }
    Ok(())
}

/// Operator-valued bound for sandwiched self-adjoint fields:
/// `|||T(X) - M_A X M_B||| <= (||D-C|| ||F-E|| / 4) |||X|||`.
#[allow(clippy::too_many_arguments)]
pub fn eval_gruss_operator(
    left: &OperatorField,
    right: &OperatorField,
    lower_l: &CMatrix,
    upper_l: &CMatrix,
    lower_r: &CMatrix,
    upper_r: &CMatrix,
    x: &CMatrix,
    norm: &UINorm,
) -> Result<MarginResult> {
    if !left.flags().is_probability || !right.flags().is_probability {
        return Err(Error::NotProbability);
    }
    check_sandwich(left, lower_l, upper_l, "left")?;
    check_sandwich(right, lower_r, upper_r, "right")?;
    let t = IptiTransformer::new(left.clone(), right.clone())?;
    let lhs = norm.eval(&t.korkine_lhs(x)?)?;
    let span_l = (upper_l - lower_l).operator_norm()?;
    let span_r = (upper_r - lower_r).operator_norm()?;
    let rhs = 0.25 * span_l * span_r * norm.eval(x)?;
    MarginResult::new(
        lhs,
        rhs,
        vec![
            "both fields probability-weighted".into(),
            "left field self-adjoint and sandwiched".into(),
            "right field self-adjoint and sandwiched".into(),
        ],
    )
}

/// Uniform-weight specialization of `eval_gruss_operator`; delegates so the
/// two agree bit-for-bit.
#[allow(clippy::too_many_arguments)]
pub fn eval_elementary_gruss(
    left_ops: &[CMatrix],
    right_ops: &[CMatrix],
    lower_l: &CMatrix,
    upper_l: &CMatrix,
    lower_r: &CMatrix,
    upper_r: &CMatrix,
    x: &CMatrix,
    norm: &UINorm,
) -> Result<MarginResult> {
    if left_ops.is_empty() || left_ops.len() != right_ops.len() {
        return Err(Error::DimensionMismatch { left: left_ops.len(), right: right_ops.len() });
    }
    let n = left_ops.len();
    let weights = vec![1.0 / n as f64; n];
    let flags = crate::transformer::FieldFlags {
        is_probability: true,
        is_self_adjoint: true,
        ..Default::default()
    };
    let left = OperatorField::new(weights.clone(), left_ops.to_vec(), flags)?;
    let right = OperatorField::new(weights, right_ops.to_vec(), flags)?;
    eval_gruss_operator(&left, &right, lower_l, upper_l, lower_r, upper_r, x, norm)
}

/// Schatten-p Landau bound for `1/p = 1/(2q) + 1/(2r)`:
/// `||T(X) - M_A X M_B||_p <= ||F_A|| ||X F_B||_p` where `F_A`, `F_B` are
/// the weighted-variance powers built from the centered fields.
pub fn eval_schatten_landau(
    left: &OperatorField,
    right: &OperatorField,
    p: f64,
    q: f64,
    r: f64,
    x: &CMatrix,
) -> Result<MarginResult> {
    for &e in &[p, q, r] {
        if !e.is_finite() || e < 1.0 {
            return Err(Error::BadExponents);
        }
    }
    if (1.0 / p - 0.5 / q - 0.5 / r).abs() > 1e-12 {
        return Err(Error::BadExponents);
    }
    if !left.flags().is_probability || !right.flags().is_probability {
        return Err(Error::NotProbability);
    }
    let t = IptiTransformer::new(left.clone(), right.clone())?;
    let sp = UINorm::schatten(p)?;
    let lhs = sp.eval(&t.korkine_lhs(x)?)?;

    let mean_l = left.mean();
    let centered_l: Vec<CMatrix> = left.ops().iter().map(|a| a - &mean_l).collect();
    let mean_r = right.mean();
    let centered_r: Vec<CMatrix> = right.ops().iter().map(|b| b - &mean_r).collect();

    // Y = (sum mu |(A_t - M_A)*|^2)^{(q-1)/2}, built on the adjoint variance.
    let mut adj_var_l = CMatrix::zeros(left.dim());
    for (w, c) in left.weights().iter().zip(&centered_l) {
        adj_var_l = &adj_var_l + &(c * &c.adjoint()).scale_re(*w);
    }
    let y = crate::linalg::psd_power(&adj_var_l, 0.5 * (q - 1.0))?;
    let mut fa_core = CMatrix::zeros(left.dim());
    for (w, c) in left.weights().iter().zip(&centered_l) {
        let yc = &y * c;
        fa_core = &fa_core + &(&yc.adjoint() * &yc).scale_re(*w);
    }
    let f_a = crate::linalg::psd_power(&fa_core, 0.5 / q)?;

    // Z = (sum mu |B_t - M_B|^2)^{(r-1)/2}, built on the plain variance.
    let mut var_r = CMatrix::zeros(right.dim());
    for (w, c) in right.weights().iter().zip(&centered_r) {
        var_r = &var_r + &(&c.adjoint() * c).scale_re(*w);
    }
    let z = crate::linalg::psd_power(&var_r, 0.5 * (r - 1.0))?;
    let mut fb_core = CMatrix::zeros(right.dim());
    for (w, c) in right.weights().iter().zip(&centered_r) {
        let zc = &z * &c.adjoint();
        fb_core = &fb_core + &(&zc.adjoint() * &zc).scale_re(*w);
    }
    let f_b = crate::linalg::psd_power(&fb_core, 0.5 / r)?;

    let rhs = f_a.operator_norm()? * sp.eval(&(x * &f_b))?;
    MarginResult::new(
        lhs,
        rhs,
        vec![
            "both fields probability-weighted".into(),
            format!("exponents satisfy 1/p = 1/(2q) + 1/(2r), p = {p:.6e}"),
        ],
    )
}

/// Flattened matrix of `X -> T(X)` on the trace inner-product space:
/// row `(i,j)`, column `(k,l)` holds `sum_t mu_t A_t[i,k] B_t[l,j]`.
pub fn hs_matrix(t: &IptiTransformer) -> CMatrix {
    let n = t.dim();
    let mut m = CMatrix::zeros(n * n);
    for ((w, a), b) in
        t.left().weights().iter().zip(t.left().ops()).zip(t.right().ops())
    {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let cur = m.get(i * n + j, k * n + l);
                        m.set(i * n + j, k * n + l, cur + a.get(i, k) * b.get(l, j) * *w);
                    }
                }
            }
        }
    }
    m
}

/// Largest singular value of `X -> T(X)` by power iteration on `T* T` under
/// the trace inner product, from a fixed pseudorandom start.
pub fn hs_power_norm(t: &IptiTransformer) -> Result<f64> {
    let n = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    let mut x = crate::linalg::random::ginibre(n, &mut rng);
    let nx = x.frobenius_norm();
    x = x.scale_re(1.0 / nx);
    let mut rho_prev = -1.0f64;
    for iter in 0..50_000usize {
        let y = t.apply(&x)?;
        let z = t.apply_hs_adjoint(&y)?;
        let rho = x.hs_inner(&z).re.max(0.0);
        let nz = z.frobenius_norm();
        if nz < 1e-280 {
            return Ok(0.0);
        }
        x = z.scale_re(1.0 / nz);
        if iter > 8 && (rho - rho_prev).abs() <= 1e-14 * rho.max(1e-30) {
            return Ok(rho.sqrt());
        }
        rho_prev = rho;
    }
    Ok(rho_prev.max(0.0).sqrt())
}

/// Identity check: the flattened-matrix operator norm of the transformer
/// against the power-iteration value; the two must agree to 1e-8.
pub fn eval_hs_exact_norm(t: &IptiTransformer) -> Result<MarginResult> {
    let m = hs_matrix(t);
    let lhs = singular_values(&m)?.first().copied().unwrap_or(0.0);
    let rhs = hs_power_norm(t)?;
    MarginResult::new(lhs, rhs, vec!["trace-norm pairing of the flattened matrix".into()])
}

/// Inputs for one evaluation, paired with an `IneqId` inside `IneqInstance`.
#[derive(Clone, Debug)]
pub enum IneqInputs {
    GrussScalar {
        f: Vec<f64>,
        g: Vec<f64>,
        lower_f: f64,
        upper_f: f64,
        lower_g: f64,
        upper_g: f64,
    },
    P1 { f: HerglotzFn, g: HerglotzFn, a: CMatrix, b: CMatrix, x: CMatrix },
    C1 { f: HerglotzFn, g: HerglotzFn, a: CMatrix, x: CMatrix },
    C2 { f: HerglotzFn, g: HerglotzFn, a: CMatrix, x: CMatrix },
    C3 { f: HerglotzFn, g: HerglotzFn, a: CMatrix, b: CMatrix },
    Hilb { f: HerglotzFn, g: HerglotzFn, a: CMatrix, b: CMatrix, x: CMatrix },
    CsUinorm { t: IptiTransformer, x: CMatrix },
    CsTheta { left: OperatorField, right: OperatorField, theta: f64 },
    LandauTheta { left: OperatorField, right: OperatorField, theta: f64 },
    GrussOperator {
        left: OperatorField,
        right: OperatorField,
        lower_l: CMatrix,
        upper_l: CMatrix,
        lower_r: CMatrix,
        upper_r: CMatrix,
        x: CMatrix,
    },
    ElementaryGruss {
        left_ops: Vec<CMatrix>,
        right_ops: Vec<CMatrix>,
        lower_l: CMatrix,
        upper_l: CMatrix,
        lower_r: CMatrix,
        upper_r: CMatrix,
        x: CMatrix,
    },
    SchattenLandau { left: OperatorField, right: OperatorField, p: f64, q: f64, r: f64, x: CMatrix },
    HsExactNorm { t: IptiTransformer },
}

/// One bound plus everything needed to evaluate it.
#[derive(Clone, Debug)]
pub struct IneqInstance {
    pub id: IneqId,
    pub inputs: IneqInputs,
    pub norm: Option<UINorm>,
}

/// Dispatches an instance to its evaluator, enforcing that ids, inputs, and
/// the norm slot line up.
pub fn evaluate(instance: &IneqInstance) -> Result<MarginResult> {
    let norm_for = |id: IneqId| -> Result<&UINorm> {
        instance
            .norm
            .as_ref()
            .ok_or(Error::NotApplicable("this inequality needs a norm"))
            .and_then(|n| if id.takes_norm() { Ok(n) } else { Err(Error::NotApplicable("this inequality fixes its own norm")) })
    };
    if !instance.id.takes_norm() && instance.norm.is_some() {
        return Err(Error::NotApplicable("this inequality fixes its own norm"));
    }
    match (instance.id, &instance.inputs) {
        (IneqId::GrussScalar, IneqInputs::GrussScalar { f, g, lower_f, upper_f, lower_g, upper_g }) => {
            eval_gruss_scalar(f, g, *lower_f, *upper_f, *lower_g, *upper_g)
        }
        (IneqId::P1, IneqInputs::P1 { f, g, a, b, x }) => {
            eval_p1(f, g, a, b, x, norm_for(IneqId::P1)?)
        }
        (IneqId::C1, IneqInputs::C1 { f, g, a, x }) => eval_c1(f, g, a, x, norm_for(IneqId::C1)?),
        (IneqId::C2Minus, IneqInputs::C2 { f, g, a, x }) => {
            eval_c2(f, g, a, x, norm_for(IneqId::C2Minus)?, C2Sign::Minus)
        }
        (IneqId::C2Plus, IneqInputs::C2 { f, g, a, x }) => {
            eval_c2(f, g, a, x, norm_for(IneqId::C2Plus)?, C2Sign::Plus)
        }
        (IneqId::C3, IneqInputs::C3 { f, g, a, b }) => eval_c3(f, g, a, b, norm_for(IneqId::C3)?),
        (IneqId::Hilb, IneqInputs::Hilb { f, g, a, b, x }) => eval_hilb(f, g, a, b, x),
        (IneqId::CsUinorm, IneqInputs::CsUinorm { t, x }) => {
            eval_cs_uinorm(t, x, norm_for(IneqId::CsUinorm)?)
        }
        (IneqId::CsTheta, IneqInputs::CsTheta { left, right, theta }) => {
            eval_cs_theta(left, right, *theta, norm_for(IneqId::CsTheta)?)
        }
        (IneqId::LandauTheta, IneqInputs::LandauTheta { left, right, theta }) => {
            eval_landau_theta(left, right, *theta, norm_for(IneqId::LandauTheta)?)
        }
        (
            IneqId::GrussOperator,
            IneqInputs::GrussOperator { left, right, lower_l, upper_l, lower_r, upper_r, x },
        ) => eval_gruss_operator(
            left,
            right,
            lower_l,
            upper_l,
            lower_r,
            upper_r,
            x,
            norm_for(IneqId::GrussOperator)?,
        ),
        (
            IneqId::ElementaryGruss,
            IneqInputs::ElementaryGruss { left_ops, right_ops, lower_l, upper_l, lower_r, upper_r, x },
        ) => eval_elementary_gruss(
            left_ops,
            right_ops,
            lower_l,
            upper_l,
            lower_r,
            upper_r,
            x,
            norm_for(IneqId::ElementaryGruss)?,
        ),
        (IneqId::SchattenLandau, IneqInputs::SchattenLandau { left, right, p, q, r, x }) => {
            eval_schatten_landau(left, right, *p, *q, *r, x)
        }
        (IneqId::HsExactNorm, IneqInputs::HsExactNorm { t }) => eval_hs_exact_norm(t),
        _ => Err(Error::NotApplicable("inputs do not match the inequality id")),
    }
}
