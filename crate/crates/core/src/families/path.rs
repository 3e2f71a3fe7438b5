use super::{ClosedBasis, Component, ParamFamily, SupportRule};
use crate::error::{PstError, Result};
use crate::graph::HamiltonianKind;
use nalgebra::DVector;
use std::f64::consts::PI;

/// Adjacency eigenvector `z_j`, `1 <= j <= n`, with eigenvalue
/// `2 cos(j pi / (n + 1))`.
pub fn path_adj_vector(n: usize, j: usize) -> (f64, DVector<f64>) {
    let h = (n + 1) as f64;
    let c = (2.0 / h).sqrt();
    let v = DVector::from_fn(n, |l, _| c * (((l + 1) * j) as f64 * PI / h).sin());
    (2.0 * (j as f64 * PI / h).cos(), v)
}

/// Laplacian eigenvector `w_j`, `0 <= j < n`, with eigenvalue
/// `2 (1 - cos(j pi / n))`.
pub fn path_lap_vector(n: usize, j: usize) -> (f64, DVector<f64>) {
    let nf = n as f64;
    let v = if j == 0 {
        DVector::from_element(n, 1.0 / nf.sqrt())
    } else {
        let c = (2.0 / nf).sqrt();
        DVector::from_fn(n, |l, _| c * ((2 * l + 1) as f64 * j as f64 * PI / (2.0 * nf)).cos())
    };
    (2.0 * (1.0 - (j as f64 * PI / nf).cos()), v)
}

pub fn path_adj_eigenbasis(n: usize) -> Result<ClosedBasis> {
    if n == 0 {
        return Err(PstError::InvalidSize("path needs n >= 1".into()));
    }
    Ok(ClosedBasis::from_pairs(n, (1..=n).map(|j| path_adj_vector(n, j)).collect()))
}

pub fn path_lap_eigenbasis(n: usize) -> Result<ClosedBasis> {
    if n == 0 {
        return Err(PstError::InvalidSize("path needs n >= 1".into()));
    }
    Ok(ClosedBasis::from_pairs(n, (0..n).map(|j| path_lap_vector(n, j)).collect()))
}

fn comp(name: &'static str, (eigenvalue, v): (f64, DVector<f64>), y_sign: f64, required: bool) -> Component {
    Component { name, eigenvalue, vectors: vec![v], y_sign, required }
}

fn triple(label: &str, n: usize, tau: f64, terms: [(f64, DVector<f64>); 3]) -> ParamFamily {
    let [a, b, c] = terms;
    ParamFamily {
        label: label.into(),
        n,
        tau,
        components: vec![comp("a", a, 1.0, true), comp("b", b, -1.0, true), comp("c", c, -1.0, true)],
        rule: SupportRule::All,
    }
}

/// PST families on `P_n` with at least three support eigenvalues closed
/// under algebraic conjugates.
pub fn path_pst_families(n: usize, kind: HamiltonianKind) -> Result<Vec<ParamFamily>> {
    if n < 3 {
        return Err(PstError::InvalidSize(format!("path families need n >= 3, got {n}")));
    }
    let mut out = Vec::new();
    match kind {
        HamiltonianKind::Adjacency => {
            let z = |j| path_adj_vector(n, j);
            if (n + 1).is_multiple_of(6) {
                let m = (n + 1) / 6;
                out.push(triple("path-adj-integer", n, PI, [z(3 * m), z(2 * m), z(4 * m)]));
                out.push(triple("path-adj-sqrt3", n, PI / 3f64.sqrt(), [z(3 * m), z(m), z(5 * m)]));
            }
            if (n + 1).is_multiple_of(4) {
                let m = (n + 1) / 4;
                out.push(triple("path-adj-sqrt2", n, PI / 2f64.sqrt(), [z(2 * m), z(m), z(3 * m)]));
            }
        }
        HamiltonianKind::Laplacian => {
            let w = |j| path_lap_vector(n, j);
            if n.is_multiple_of(3) {
                let m = n / 3;
                let mut comps = vec![comp("a", w(2 * m), -1.0, false)];
                if m.is_multiple_of(2) {
                    comps.push(comp("b", w(3 * m / 2), 1.0, false));
                }
                comps.push(comp("c", w(m), -1.0, false));
                comps.push(comp("d", w(0), 1.0, false));
                out.push(ParamFamily {
                    label: "path-lap-integer".into(),
                    n,
                    tau: PI,
                    components: comps,
                    rule: SupportRule::MixedParity,
                });
            }
            if n.is_multiple_of(6) {
                let m = n / 6;
                out.push(triple("path-lap-sqrt3", n, PI / 3f64.sqrt(), [w(3 * m), w(m), w(5 * m)]));
            }
            if n.is_multiple_of(4) {
                let m = n / 4;
                out.push(triple("path-lap-sqrt2", n, PI / 2f64.sqrt(), [w(2 * m), w(m), w(3 * m)]));
            }
        }
        HamiltonianKind::Custom => {
            return Err(PstError::InvalidRequest("path families exist for adjacency and Laplacian only".into()))
        }
    }
    Ok(out)
}

/// Least minimum PST time over all real states of `P_n`, attained by a
/// pair supported on the two extreme eigenvalues.
pub fn path_least_time(n: usize, kind: HamiltonianKind) -> Result<f64> {
    if n < 2 {
        return Err(PstError::InvalidSize(format!("path needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    match kind {
        HamiltonianKind::Adjacency => Ok(PI / (4.0 * (PI / (nf + 1.0)).cos())),
        HamiltonianKind::Laplacian => Ok(PI / (2.0 * (1.0 - ((nf - 1.0) * PI / nf).cos()))),
        HamiltonianKind::Custom => Err(PstError::InvalidRequest("adjacency or Laplacian only".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family_sweep;
    use crate::graph::{build_path, hamiltonian};
    use crate::pst::{pst_decide, pst_partner};
    use crate::spectral::{decompose, ToleranceConfig};
    use crate::state::PureState;
    use approx::assert_relative_eq;

    #[test]
    fn eigenbases_are_exact() {
        for n in 1..=64 {
            let g = build_path(n).unwrap();
            let a = path_adj_eigenbasis(n).unwrap();
            assert!(a.orthonormality_error() <= 1e-10 && a.residual(&g.adjacency()) <= 1e-9, "n={n}");
            let l = path_lap_eigenbasis(n).unwrap();
            assert!(l.orthonormality_error() <= 1e-10 && l.residual(&g.laplacian()) <= 1e-9, "n={n}");
        }
        let ev: Vec<f64> = path_adj_eigenbasis(3).unwrap().spaces.iter().map(|s| s.eigenvalue).collect();
        assert_relative_eq!(ev[0], 2f64.sqrt(), epsilon = 1e-15);
        assert!(ev[1].abs() < 1e-15);
        let (t0, w0) = path_lap_vector(4, 0);
        assert_eq!(t0, 0.0);
        assert!(w0.iter().all(|v| (*v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn documented_adjacency_instances() {
        let cfg = ToleranceConfig::default();
        type Terms = &'static [(usize, f64)];
        let cases: [(usize, Terms, Terms); 2] = [
            (7, &[(1, 1.0), (7, -1.0)], &[(3, 1.0), (5, -1.0)]),
            (11, &[(1, 1.0), (7, -1.0), (9, 1.0)], &[(3, 1.0), (5, -1.0), (11, 1.0)]),
        ];
        for (n, xs, ys) in cases {
            let vec = |t: &[(usize, f64)]| {
                let mut v = DVector::zeros(n);
                t.iter().for_each(|(i, c)| v[i - 1] = *c);
                PureState::new(v).unwrap()
            };
            let s =
                decompose(&hamiltonian(&build_path(n).unwrap(), HamiltonianKind::Adjacency).unwrap(), &cfg).unwrap();
            let v = pst_decide(&s, &vec(xs), &vec(ys), &cfg).unwrap();
            assert!(v.is_yes());
            assert_relative_eq!(v.tau_min.unwrap(), PI / 2f64.sqrt(), max_relative = 1e-12);
            let fams = path_pst_families(n, HamiltonianKind::Adjacency).unwrap();
            let f = fams.iter().find(|f| f.label == "path-adj-sqrt2").unwrap();
            let h = ((n + 1) as f64).sqrt() / (2.0 * 2f64.sqrt());
            let inst = f.instantiate(&[h, h / 2f64.sqrt(), h / 2f64.sqrt()], &[vec![1.0], vec![1.0], vec![1.0]]);
            assert!((inst.x - vec(xs).vector()).amax() < 1e-12);
            assert!((inst.y + vec(ys).vector()).amax() < 1e-12);
        }
    }

    #[test]
    fn integer_adjacency_case_transfers_at_pi() {
        let cfg = ToleranceConfig::default();
        let n = 5;
        let f = &path_pst_families(n, HamiltonianKind::Adjacency).unwrap()[0];
        let inst = f.instantiate(&[1.0, 0.5, -0.3], &[vec![1.0], vec![1.0], vec![1.0]]);
        let s = decompose(&hamiltonian(&build_path(n).unwrap(), HamiltonianKind::Adjacency).unwrap(), &cfg).unwrap();
        let r = pst_partner(&s, &PureState::new(inst.x).unwrap(), &cfg).unwrap().unwrap();
        assert_relative_eq!(r.tau, PI, max_relative = 1e-12);
    }

    #[test]
    fn least_time_tends_to_quarter_pi() {
        for kind in [HamiltonianKind::Adjacency, HamiltonianKind::Laplacian] {
            for (n, tol) in [(50, 5e-3), (100, 1.3e-3), (200, 4e-4)] {
                assert!((path_least_time(n, kind).unwrap() - PI / 4.0).abs() < tol);
            }
        }
    }

    #[test]
    fn sweeps_agree_with_decision_procedure() {
        let cfg = ToleranceConfig::default();
        for kind in [HamiltonianKind::Adjacency, HamiltonianKind::Laplacian] {
            for n in [5usize, 6, 7, 11, 12] {
                let m = hamiltonian(&build_path(n).unwrap(), kind).unwrap();
                let b =
                    if kind == HamiltonianKind::Adjacency { path_adj_eigenbasis(n) } else { path_lap_eigenbasis(n) }
                        .unwrap();
                let r = family_sweep(&m.matrix, &b, &path_pst_families(n, kind).unwrap(), 60, n as u64, &cfg).unwrap();
                assert!(r.disagreements.is_empty(), "{kind:?} n={n}: {:?}", r.disagreements);
            }
        }
    }
}
