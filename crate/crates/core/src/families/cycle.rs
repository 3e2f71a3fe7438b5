use super::{ClosedBasis, Component, ParamFamily, SupportRule};
use crate::error::{PstError, Result};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Basis vector `v_j` of the cycle: cosine vectors for `j <= n/2`, sine
/// vectors for `j > n/2`.
pub fn cycle_vector(n: usize, j: usize) -> DVector<f64> {
    let nf = n as f64;
    if j == 0 {
        return DVector::from_element(n, 1.0 / nf.sqrt());
    }
    if 2 * j == n {
        return DVector::from_fn(n, |l, _| if l % 2 == 0 { 1.0 } else { -1.0 } / nf.sqrt());
    }
    let c = (2.0 / nf).sqrt();
    if 2 * j < n {
        DVector::from_fn(n, |l, _| c * (2.0 * PI * (j * l) as f64 / nf).cos())
    } else {
        let k = n - j;
        DVector::from_fn(n, |l, _| c * (2.0 * PI * (k * l) as f64 / nf).sin())
    }
}

pub fn cycle_eigenvalue(n: usize, j: usize) -> f64 {
    2.0 * (2.0 * PI * j as f64 / n as f64).cos()
}

/// Orthonormal adjacency eigenbasis of `C_n`.
pub fn cycle_eigenbasis(n: usize) -> Result<ClosedBasis> {
    if n < 3 {
        return Err(PstError::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    Ok(ClosedBasis::from_pairs(n, (0..n).map(|j| (cycle_eigenvalue(n, j), cycle_vector(n, j))).collect()))
}

/// The eigenspace of `lambda_j` as a component: `{v_j, v_{n-j}}`, or a
/// single vector for `j = 0` and `j = n/2`.
fn space(name: &'static str, n: usize, j: usize, y_sign: f64, required: bool) -> Component {
    let mut vectors = vec![cycle_vector(n, j)];
    if j != 0 && 2 * j != n {
        vectors.push(cycle_vector(n, n - j));
    }
    Component { name, eigenvalue: cycle_eigenvalue(n, j), vectors, y_sign, required }
}

/// PST families on `C_n` with at least three support eigenvalues closed
/// under algebraic conjugates. Empty when no case applies to `n`.
pub fn cycle_pst_families(n: usize) -> Result<Vec<ParamFamily>> {
    if n < 3 {
        return Err(PstError::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    let mut out = Vec::new();
    // integer support: even eigenvalues keep their sign, odd ones flip
    if n.is_multiple_of(6) {
        let mut comps = vec![
            space("a", n, 0, 1.0, false),
            space("b", n, n / 6, -1.0, false),
            space("d", n, n / 3, -1.0, false),
            space("e", n, n / 2, 1.0, false),
        ];
        out.push(ParamFamily {
            label: "cycle-integer".into(),
            n,
            tau: PI,
            components: comps.clone(),
            rule: SupportRule::MixedParity,
        });
        if n.is_multiple_of(12) {
            comps.insert(2, space("c", n, n / 4, 1.0, true));
            out.push(ParamFamily {
                label: "cycle-integer-zero".into(),
                n,
                tau: PI,
                components: comps,
                rule: SupportRule::MixedParity,
            });
        }
    }
    if n.is_multiple_of(4) {
        let m = n / 4;
        out.push(ParamFamily {
            label: "cycle-even".into(),
            n,
            tau: PI / 2.0,
            components: vec![
                space("a", n, 0, -1.0, true),
                space("b", n, m, 1.0, true),
                space("c", n, 2 * m, -1.0, true),
            ],
            rule: SupportRule::All,
        });
    }
    if n.is_multiple_of(12) {
        let m = n / 12;
        out.push(ParamFamily {
            label: "cycle-sqrt3".into(),
            n,
            tau: PI / 3f64.sqrt(),
            components: vec![
                space("a", n, 3 * m, 1.0, true),
                space("b", n, m, -1.0, true),
                space("c", n, 5 * m, -1.0, true),
            ],
            rule: SupportRule::All,
        });
    }
    if n.is_multiple_of(8) {
        let m = n / 8;
        out.push(ParamFamily {
            label: "cycle-sqrt2".into(),
            n,
            tau: PI / 2f64.sqrt(),
            components: vec![
                space("a", n, 2 * m, 1.0, true),
                space("b", n, m, -1.0, true),
                space("c", n, 3 * m, -1.0, true),
            ],
            rule: SupportRule::All,
        });
    }
    Ok(out)
}
