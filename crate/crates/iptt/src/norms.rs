//! Unitarily invariant norms as symmetric gauges of singular values:
//! operator, Schatten-p, Ky Fan-k, and p-reconvexized variants, plus duality
//! certificates and Ky Fan dominance.

use crate::error::Error;
use crate::linalg::random::{ginibre, haar_unitary};
use crate::linalg::{abs_op, psd_power, singular_values, svd, CMatrix};
use crate::tol;
use crate::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// A unitarily invariant norm, identified by its gauge on singular values.
#[derive(Clone, Debug, PartialEq)]
pub enum UINorm {
    /// Largest singular value.
    Operator,
    /// `(sum_i s_i^p)^{1/p}` for `p >= 1`; `p = inf` is the operator norm.
    Schatten(f64),
    /// Sum of the `k` largest singular values, `k >= 1` capped at the dimension.
    KyFan(usize),
    /// p-reconvexization `A -> base(|A|^p)^{1/p}` for `p >= 1`.
    Reconvex(Box<UINorm>, f64),
}

impl UINorm {
    pub fn operator() -> Self {
        UINorm::Operator
    }

    pub fn schatten(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::NotApplicable("Schatten exponent must be at least 1"));
        }
        Ok(UINorm::Schatten(p))
    }

    pub fn kyfan(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::NotApplicable("Ky Fan index must be at least 1"));
        }
        Ok(UINorm::KyFan(k))
    }

    pub fn reconvex(base: UINorm, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::NotApplicable("reconvexization exponent must be at least 1"));
        }
        Ok(UINorm::Reconvex(Box::new(base), p))
    }

    /// Gauge value on a nonincreasing singular value vector.
    fn gauge(&self, s: &[f64]) -> f64 {
        match self {
            UINorm::Operator => s.first().copied().unwrap_or(0.0),
            UINorm::Schatten(p) => {
                if p.is_infinite() {
                    s.first().copied().unwrap_or(0.0)
                } else {
                    s.iter().map(|x| x.powf(*p)).sum::<f64>().powf(1.0 / p)
                }
            }
            UINorm::KyFan(k) => s.iter().take(*k.min(&s.len())).sum(),
            UINorm::Reconvex(..) => unreachable!("reconvex norms evaluate via |A|^p"),
        }
    }

    /// Evaluates the norm on a matrix.
    pub fn eval(&self, a: &CMatrix) -> Result<f64> {
        match self {
            UINorm::Reconvex(base, p) => {
                let abs = abs_op(a)?;
                let powered = psd_power(&abs, *p)?;
                Ok(base.eval(&powered)?.powf(1.0 / p))
            }
            _ => {
                let s = singular_values(a)?;
                Ok(self.gauge(&s))
            }
        }
    }
}

impl fmt::Display for UINorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UINorm::Operator => write!(f, "op"),
            UINorm::Schatten(p) => {
                if p.is_infinite() {
                    write!(f, "sinf")
                } else if p.fract() == 0.0 {
                    write!(f, "s{}", *p as u64)
                } else {
                    write!(f, "s{p}")
                }
            }
            UINorm::KyFan(k) => write!(f, "kf{k}"),
            UINorm::Reconvex(base, p) => {
                if p.fract() == 0.0 {
                    write!(f, "rx{}({base})", *p as u64)
                } else {
                    write!(f, "rx{p}({base})")
                }
            }
        }
    }
}

impl FromStr for UINorm {
    type Err = Error;

    /// Parses the token grammar used by the CLI and sweep configs:
    /// `op`, `s<p>` (`s1`, `s1.5`, `sinf`), `kf<k>`, `rx<p>(<base>)`.
    fn from_str(tok: &str) -> Result<Self> {
        let bad = || Error::ConfigInvalid(format!("unknown norm token '{tok}'"));
        if tok == "op" {
            return Ok(UINorm::Operator);
        }
        if let Some(rest) = tok.strip_prefix("rx") {
            let open = rest.find('(').ok_or_else(bad)?;
            if !rest.ends_with(')') {
                return Err(bad());
            }
            let p: f64 = rest[..open].parse().map_err(|_| bad())?;
            let base = UINorm::from_str(&rest[open + 1..rest.len() - 1])?;
            return UINorm::reconvex(base, p);
        }
        if let Some(rest) = tok.strip_prefix("kf") {
            let k: usize = rest.parse().map_err(|_| bad())?;
            return UINorm::kyfan(k);
        }
        if let Some(rest) = tok.strip_prefix('s') {
            if rest == "inf" {
                return Ok(UINorm::Schatten(f64::INFINITY));
            }
            let p: f64 = rest.parse().map_err(|_| bad())?;
            return UINorm::schatten(p);
        }
        Err(bad())
    }
}

/// Which side of the operator/trace duality to estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualSide {
    /// `||A||_op = sup { |tr(AY)| : ||Y||_1 = 1 }`.
    OpFromTrace,
    /// `||A||_1 = sup { |tr(AY)| : ||Y||_op = 1 }`.
    TraceFromOp,
}

/// Lower-bound certificate for a norm through its duality pairing.
///
/// The candidate set always contains the analytic maximizer (top singular
/// pair, respectively polar unitary factor), so the result reaches the true
/// norm up to round-off; random candidates can only confirm it from below.
pub fn dual_norm_operator_trace(
    a: &CMatrix,
    side: DualSide,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let n = a.dim();
    let d = svd(a)?;
    let mut candidates: Vec<CMatrix> = Vec::with_capacity(samples + 2);
    match side {
        DualSide::OpFromTrace => {
            // rank-one Y = v1 u1* has trace norm 1 and tr(AY) = s1
            let mut y = CMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    y.set(i, j, d.v.get(i, 0) * d.u.get(j, 0).conj());
                }
            }
            candidates.push(y);
        }
        DualSide::TraceFromOp => {
            // adjoint of the polar unitary factor: Y = V U*
            candidates.push(&d.v * &d.u.adjoint());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        match side {
            DualSide::OpFromTrace => {
                let g = ginibre(n, &mut rng);
                let tn: f64 = singular_values(&g)?.iter().sum();
                if tn > 0.0 {
                    candidates.push(g.scale_re(1.0 / tn));
                }
            }
            DualSide::TraceFromOp => {
                candidates.push(haar_unitary(n, &mut rng));
            }
        }
    }
    let mut best = 0.0f64;
    for y in &candidates {
        best = best.max((a * y).trace().norm());
    }
    Ok(best)
}

/// Ky Fan dominance: every partial sum of singular values of `a` is at most
/// the matching partial sum for `b`, within an absolute tolerance.
pub fn kyfan_dominates(a: &CMatrix, b: &CMatrix) -> Result<bool> {
    a.check_same_dim(b)?;
    let sa = singular_values(a)?;
    let sb = singular_values(b)?;
    let mut pa = 0.0;
    let mut pb = 0.0;
    for k in 0..sa.len() {
        pa += sa[k];
        pb += sb[k];
        if pa > pb + tol::TOL_DOM {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::diag_re(entries)
    }

    #[test]
    fn schatten_and_kyfan_on_known_diagonal() {
        let a = diag(&[3.0, 2.0, 1.0]);
        assert!((UINorm::schatten(1.0).unwrap().eval(&a).unwrap() - 6.0).abs() < 1e-12);
        assert!(
            (UINorm::schatten(2.0).unwrap().eval(&a).unwrap() - 14.0f64.sqrt()).abs() < 1e-12
        );
        assert!((UINorm::kyfan(2).unwrap().eval(&a).unwrap() - 5.0).abs() < 1e-12);
        assert!((UINorm::Operator.eval(&a).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kyfan_one_is_operator_and_schatten_inf_is_operator() {
        let a = CMatrix::from_re_rows(&[vec![0.0, 2.0], vec![0.3, 0.0]]).unwrap();
        let op = UINorm::Operator.eval(&a).unwrap();
        assert_eq!(UINorm::kyfan(1).unwrap().eval(&a).unwrap(), op);
        assert_eq!(UINorm::Schatten(f64::INFINITY).eval(&a).unwrap(), op);
    }

    #[test]
    fn kyfan_index_caps_at_dimension() {
        let a = diag(&[3.0, 2.0]);
        assert!((UINorm::kyfan(9).unwrap().eval(&a).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn reconvex_of_trace_norm_matches_schatten() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let rx = UINorm::reconvex(UINorm::Schatten(1.0), 2.0).unwrap();
        let s2 = UINorm::Schatten(2.0);
        for _ in 0..25 {
            let a = ginibre(4, &mut rng);
            let x = rx.eval(&a).unwrap();
            let y = s2.eval(&a).unwrap();
            assert!((x - y).abs() <= 1e-9 * y.max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(UINorm::schatten(0.5).is_err());
        assert!(UINorm::kyfan(0).is_err());
        assert!(UINorm::reconvex(UINorm::Operator, 0.9).is_err());
    }

    #[test]
    fn norm_token_round_trip() {
        for tok in ["op", "s1", "s2", "s1.5", "sinf", "kf2", "rx2(s1)", "rx1.5(kf2)"] {
            let n: UINorm = tok.parse().unwrap();
            assert_eq!(n.to_string(), tok);
        }
        assert!("foo".parse::<UINorm>().is_err());
        assert!("s0.3".parse::<UINorm>().is_err());
    }

    #[test]
    fn dual_certificates_on_known_matrices() {
        let a = diag(&[3.0, 0.0]);
        let op = dual_norm_operator_trace(&a, DualSide::OpFromTrace, 20, 5).unwrap();
        assert!((op - 3.0).abs() < 1e-10);
        let id = CMatrix::identity(2);
        let tr = dual_norm_operator_trace(&id, DualSide::TraceFromOp, 20, 5).unwrap();
        assert!((tr - 2.0).abs() < 1e-10);
        let z = CMatrix::zeros(2);
        assert_eq!(dual_norm_operator_trace(&z, DualSide::OpFromTrace, 5, 1).unwrap(), 0.0);
    }

    #[test]
    fn kyfan_dominance_examples() {
        let a = diag(&[1.0, 1.0]);
        let b = diag(&[2.0, 0.5]);
        assert!(kyfan_dominates(&a, &b).unwrap());
        assert!(kyfan_dominates(&a, &a).unwrap());
        let c = diag(&[2.0, 0.0]);
        let d = diag(&[1.0, 1.0]);
        assert!(!kyfan_dominates(&c, &d).unwrap());
        assert!(kyfan_dominates(&a, &CMatrix::identity(3)).is_err());
    }
}
