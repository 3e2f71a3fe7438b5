use crate::arith::nu2;
use crate::error::{PstError, Result};
use crate::graph::HamiltonianKind;
use nalgebra::DVector;
use num_integer::Integer;
use std::f64::consts::PI;

/// A component must exceed this fraction of `||x||` to count as present.
const SPAN_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum BipartiteOutcome {
    Transfer {
        y: DVector<f64>,
        tau: f64,
        case: &'static str,
    },
    /// `x` lies in the span of at most two eigenspace components.
    Refused(String),
}

/// The PST partner of `x = (x1; x2)` in `K_{m,n}` when its eigenvalue
/// support has at least three elements. `x1` holds the first `m` entries.
pub fn complete_bipartite_pst(m: usize, n: usize, kind: HamiltonianKind, x: &DVector<f64>) -> Result<BipartiteOutcome> {
    if m == 0 || n == 0 {
        return Err(PstError::InvalidSize("both parts must be nonempty".into()));
    }
    if x.len() != m + n {
        return Err(PstError::DimensionMismatch { expected: m + n, got: x.len() });
    }
    let norm = x.norm();
    if !(norm > 0.0) {
        return Err(PstError::InvalidState("zero vector".into()));
    }
    let (mf, nf) = (m as f64, n as f64);
    let s1: f64 = x.rows(0, m).sum();
    let s2: f64 = x.rows(m, n).sum();
    let zero_sum = |lo: usize, len: usize, s: f64| x.rows(lo, len).map(|v| v - s / len as f64).norm();
    let (z1, z2) = (zero_sum(0, m, s1), zero_sum(m, n, s2));
    let count = |parts: &[f64]| parts.iter().filter(|p| p.abs() > SPAN_MARGIN * norm).count();
    match kind {
        HamiltonianKind::Adjacency => {
            let r = (2.0 * mf * nf).sqrt();
            let plus = (nf.sqrt() * s1 + mf.sqrt() * s2) / r;
            let minus = (nf.sqrt() * s1 - mf.sqrt() * s2) / r;
            let zero = (z1 * z1 + z2 * z2).sqrt();
            if count(&[plus, minus, zero]) < 3 {
                return Ok(BipartiteOutcome::Refused("x lies in a two-dimensional eigenspace span".into()));
            }
            let y = DVector::from_fn(m + n, |i, _| if i < m { x[i] - 2.0 * s1 / mf } else { x[i] - 2.0 * s2 / nf });
            Ok(BipartiteOutcome::Transfer { y, tau: PI / (mf * nf).sqrt(), case: "adjacency" })
        }
        HamiltonianKind::Laplacian => {
            let ones = (s1 + s2) / (mf + nf).sqrt();
            let cross = (nf * s1 - mf * s2) / (mf * nf * (mf + nf)).sqrt();
            let present =
                if m == n { count(&[ones, cross, (z1 * z1 + z2 * z2).sqrt()]) } else { count(&[ones, cross, z1, z2]) };
            if present < 3 {
                return Ok(BipartiteOutcome::Refused("x lies in a two-dimensional eigenspace span".into()));
            }
            let k = 2.0 / (mf + nf);
            let (vm, vn) = (nu2(m as i64), nu2(n as i64));
            let (y, case) =
                if vm == vn {
                    (
                        DVector::from_fn(
                            m + n,
                            |i, _| if i < m { -x[i] + 2.0 * s1 / mf } else { -x[i] + 2.0 * s2 / nf },
                        ),
                        "equal-valuation",
                    )
                } else if vm > vn {
                    (
                        DVector::from_fn(m + n, |i, _| {
                            if i < m {
                                -x[i] + k * (s2 + s1)
                            } else {
                                x[i] + k * (s1 - mf / nf * s2)
                            }
                        }),
                        "first-part-larger-valuation",
                    )
                } else {
                    (
                        DVector::from_fn(m + n, |i, _| {
                            if i < m {
                                x[i] + k * (s2 - nf / mf * s1)
                            } else {
                                -x[i] + k * (s1 + s2)
                            }
                        }),
                        "second-part-larger-valuation",
                    )
                };
            Ok(BipartiteOutcome::Transfer { y, tau: PI / m.gcd(&n) as f64, case })
        }
        HamiltonianKind::Custom => Err(PstError::InvalidRequest("adjacency or Laplacian only".into())),
    }
}
