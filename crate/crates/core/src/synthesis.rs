//! Synthesis of a real symmetric Hamiltonian with PST between two given
//! states at a prescribed time and with prescribed sign-class sizes.

use crate::error::{PstError, Result};
use crate::graph::Hamiltonian;
use crate::spectral::{decompose_matrix, ToleranceConfig};
use crate::state::{check_strong_cospectrality, involution, Cospectrality, PureState};
use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct SynthesisRequest {
    pub x: PureState,
    pub y: PureState,
    pub tau: f64,
    /// Number of eigenvalues on which `x` and `y` agree.
    pub m1: usize,
    /// Number of eigenvalues on which `x` and `y` differ in sign.
    pub m2: usize,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub hamiltonian: Hamiltonian,
    /// Eigenvalue assigned to each column of the orthogonal frame; the first
    /// `m1` carry the plus part, the next `m2` the minus part.
    pub theta: Vec<f64>,
}

const DEPENDENCE_THRESHOLD: f64 = 1e-8;

/// Completes orthonormal `start` to a basis of R^n by modified Gram-Schmidt
/// over the standard basis vectors.
fn extend_basis(start: Vec<DVector<f64>>, n: usize) -> Result<Vec<DVector<f64>>> {
    let mut basis = start;
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm > DEPENDENCE_THRESHOLD {
            basis.push(v / norm);
        }
    }
    if basis.len() == n {
        Ok(basis)
    } else {
        Err(PstError::NumericFailure("basis completion lost rank".into()))
    }
}

/// Eigenvalues for the frame: the support part realizes PST at exactly
/// `tau`, the rest are spaced by irrational multiples so they never
/// coincide with support eigenvalues.
pub fn eigenvalue_choice(m1: usize, m2: usize, n: usize, tau: f64) -> Vec<f64> {
    let mut theta = Vec::with_capacity(n);
    let step;
    if m1 + m2 == 2 {
        theta.push(PI / (2.0 * tau));
        theta.push(-PI / (2.0 * tau));
        step = PI / tau;
    } else {
        let b: Vec<i64> =
            (2..=m1).map(|j| 2 * (j as i64 - 1)).chain((m1 + 1..=m1 + m2).map(|j| 2 * (j - m1) as i64 - 1)).collect();
        let g = b.iter().fold(0i64, |g, v| g.gcd(v));
        step = PI / (g as f64 * tau);
        theta.push(0.0);
        theta.extend(b.iter().map(|bj| -(*bj as f64) * step));
    }
    let last = theta[m1 + m2 - 1];
    theta.extend((1..=n - m1 - m2).map(|k| last - k as f64 * step * std::f64::consts::FRAC_1_SQRT_2));
    theta
}

pub fn synthesize(req: &SynthesisRequest) -> Result<Synthesis> {
    let (x, y) = (req.x.vector(), req.y.vector());
    let n = x.len();
    if y.len() != n {
        return Err(PstError::DimensionMismatch { expected: n, got: y.len() });
    }
    if req.m1 == 0 || req.m2 == 0 || req.m1 + req.m2 > n {
        return Err(PstError::InvalidRequest(format!(
            "need m1, m2 >= 1 and m1 + m2 <= {n}, got m1 = {}, m2 = {}",
            req.m1, req.m2
        )));
    }
    if !(req.tau > 0.0) || !req.tau.is_finite() {
        return Err(PstError::InvalidRequest("tau must be positive".into()));
    }
    let (sum, diff) = (x + y, x - y);
    if sum.norm() < 1e-10 * req.x.norm() || diff.norm() < 1e-10 * req.x.norm() {
        return Err(PstError::DegeneratePair("x and y are parallel".into()));
    }
    if (req.x.norm() - req.y.norm()).abs() > 1e-10 * req.x.norm() {
        return Err(PstError::InvalidRequest("x and y must have equal norms".into()));
    }
    let (m1, m2) = (req.m1, req.m2);
    let block = |lo: usize, len: usize| {
        DVector::from_fn(n, |k, _| if k >= lo && k < lo + len { 1.0 / (len as f64).sqrt() } else { 0.0 })
    };
    let u = extend_basis(vec![block(0, m1), block(m1, m2)], n)?;
    let v = extend_basis(vec![sum.normalize(), diff.normalize()], n)?;
    let q = DMatrix::from_columns(&v) * DMatrix::from_columns(&u).transpose();
    let theta = eigenvalue_choice(m1, m2, n, req.tau);
    let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(&theta)) * q.transpose();
    let m = (&m + m.transpose()) * 0.5;
    Ok(Synthesis { hamiltonian: Hamiltonian::dense(m)?, theta })
}

/// `Q = sum_{plus} E_j - sum_{minus} E_j` (identity off the support),
/// checked to satisfy `Q^2 = I` and `Q x = y`.
pub fn involution_certificate(
    m: &DMatrix<f64>,
    x: &PureState,
    y: &PureState,
    cfg: &ToleranceConfig,
) -> Result<DMatrix<f64>> {
    let s = decompose_matrix(m, cfg)?;
    let cert = match check_strong_cospectrality(&s, x, y, cfg)? {
        Cospectrality::Strong(c) => c,
        Cospectrality::Refused(r) => return Err(PstError::InvalidPair(r.describe())),
    };
    let q = involution(&s, &cert);
    let n = s.n();
    if (&q * &q - DMatrix::identity(n, n)).amax() > 1e-8 || (&q * x.vector() - y.vector()).amax() > 1e-8 * x.norm() {
        return Err(PstError::NumericFailure("involution check failed".into()));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pst::{pst_decide, verify_pst_numeric};
    use approx::assert_relative_eq;

    fn st(v: &[f64]) -> PureState {
        PureState::from_slice(v).unwrap()
    }

    fn round_trip(x: PureState, y: PureState, tau: f64, m1: usize, m2: usize) {
        let cfg = ToleranceConfig::default();
        let syn = synthesize(&SynthesisRequest { x: x.clone(), y: y.clone(), tau, m1, m2 }).unwrap();
        let s = decompose_matrix(&syn.hamiltonian.matrix, &cfg).unwrap();
        assert_eq!(s.eigenvalues().len(), x.len());
        let v = pst_decide(&s, &x, &y, &cfg).unwrap();
        assert!(v.is_yes(), "{v:?}");
        assert_relative_eq!(v.tau_min.unwrap(), tau, max_relative = 1e-9);
        let cert = v.certificate.unwrap();
        assert_eq!((cert.plus.len(), cert.minus.len()), (m1, m2));
        assert!(verify_pst_numeric(&s, &x, &y, tau, &cfg).unwrap().pass);
        involution_certificate(&syn.hamiltonian.matrix, &x, &y, &cfg).unwrap();
    }

    #[test]
    fn two_vertex_request() {
        round_trip(st(&[1.0, 0.0]), st(&[0.0, 1.0]), PI / 2.0, 1, 1);
        let syn = synthesize(&SynthesisRequest { x: st(&[1.0, 0.0]), y: st(&[0.0, 1.0]), tau: PI / 2.0, m1: 1, m2: 1 })
            .unwrap();
        assert_relative_eq!(syn.theta[0] - syn.theta[1], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn four_vertex_request() {
        round_trip(st(&[0.5, -0.2, 0.7, 0.1]), st(&[0.1, 0.7, -0.2, 0.5]), 1.0, 2, 2);
        round_trip(st(&[0.5, -0.2, 0.7, 0.1]), st(&[0.1, 0.7, -0.2, 0.5]), 3.3, 1, 3);
        round_trip(st(&[0.5, -0.2, 0.7, 0.1]), st(&[0.1, 0.7, -0.2, 0.5]), 0.2, 3, 1);
    }

    #[test]
    fn halving_tau_doubles_the_gap() {
        let req = |tau| SynthesisRequest { x: st(&[1.0, 0.0, 0.0]), y: st(&[0.0, 1.0, 0.0]), tau, m1: 1, m2: 1 };
        let a = synthesize(&req(1.0)).unwrap().theta;
        let b = synthesize(&req(0.5)).unwrap().theta;
        assert_relative_eq!(b[0] - b[1], 2.0 * (a[0] - a[1]), max_relative = 1e-14);
    }

    #[test]
    fn invalid_requests() {
        let x = st(&[1.0, 0.0, 0.0]);
        let req = |y: PureState, m1, m2| SynthesisRequest { x: x.clone(), y, tau: 1.0, m1, m2 };
        assert!(matches!(synthesize(&req(x.clone(), 1, 1)), Err(PstError::DegeneratePair(_))));
        assert!(matches!(synthesize(&req(st(&[0.0, 1.0, 0.0]), 2, 2)), Err(PstError::InvalidRequest(_))));
        assert!(matches!(synthesize(&req(st(&[0.0, 2.0, 0.0]), 1, 1)), Err(PstError::InvalidRequest(_))));
    }

    #[test]
    fn size_two_reflection_trace() {
        let cfg = ToleranceConfig::default();
        let x = st(&[1.0, 0.0, 0.0]);
        let y = st(&[0.0, 1.0, 0.0]);
        let syn = synthesize(&SynthesisRequest { x: x.clone(), y: y.clone(), tau: 1.0, m1: 1, m2: 1 }).unwrap();
        let q = involution_certificate(&syn.hamiltonian.matrix, &x, &y, &cfg).unwrap();
        assert_relative_eq!(q.trace(), 1.0, epsilon = 1e-9);
    }
}
