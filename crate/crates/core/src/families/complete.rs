use crate::error::{PstError, Result};
use nalgebra::DVector;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum CompleteOutcome {
    /// `x` is an eigenvector of `K_n`.
    Fixed,
    Transfer {
        y: DVector<f64>,
        tau: f64,
    },
}

/// The PST partner of `x` in `K_n` (adjacency): `x - (2 (1^T x) / n) 1`
/// at `pi / n`.
pub fn complete_graph_pst(x: &DVector<f64>) -> Result<CompleteOutcome> {
    let n = x.len();
    if n < 2 {
        return Err(PstError::InvalidSize(format!("complete graph needs n >= 2, got {n}")));
    }
    let norm = x.norm();
    if !(norm > 0.0) {
        return Err(PstError::InvalidState("zero vector".into()));
    }
    let nf = n as f64;
    let sum = x.sum();
    let mean = sum / nf;
    let off_mean = x.map(|v| v - mean).norm();
    if sum.abs() <= 1e-10 * norm * nf.sqrt() || off_mean <= 1e-10 * norm {
        return Ok(CompleteOutcome::Fixed);
    }
    Ok(CompleteOutcome::Transfer { y: x.map(|v| v - 2.0 * mean), tau: PI / nf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_complete, hamiltonian, HamiltonianKind};
    use crate::pst::pst_decide;
    use crate::spectral::{decompose, ToleranceConfig};
    use crate::state::PureState;

    fn transfer(x: &[f64]) -> (DVector<f64>, f64) {
        match complete_graph_pst(&DVector::from_column_slice(x)).unwrap() {
            CompleteOutcome::Transfer { y, tau } => (y, tau),
            CompleteOutcome::Fixed => panic!("fixed"),
        }
    }

    #[test]
    fn documented_pairs() {
        let (y, tau) = transfer(&[1.0, 0.0, 2.0]);
        assert!((y - DVector::from_column_slice(&[-1.0, -2.0, 0.0])).amax() < 1e-15);
        assert!((tau - PI / 3.0).abs() < 1e-15);
        let (y, _) = transfer(&[1.0, 0.0, 0.5]);
        assert!((y - DVector::from_column_slice(&[0.0, -1.0, -0.5])).amax() < 1e-15);
        let (y, tau) = transfer(&[1.0, 0.0, 1.0, 0.0]);
        assert!((y - DVector::from_column_slice(&[0.0, -1.0, 0.0, -1.0])).amax() < 1e-15);
        assert!((tau - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_states() {
        assert_eq!(complete_graph_pst(&DVector::from_element(5, 1.0)).unwrap(), CompleteOutcome::Fixed);
        assert_eq!(complete_graph_pst(&DVector::from_column_slice(&[1.0, -1.0, 0.0])).unwrap(), CompleteOutcome::Fixed);
        assert!(complete_graph_pst(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn agrees_with_decision_procedure() {
        let cfg = ToleranceConfig::default();
        let s =
            decompose(&hamiltonian(&build_complete(5).unwrap(), HamiltonianKind::Adjacency).unwrap(), &cfg).unwrap();
        let x = DVector::from_column_slice(&[0.3, -1.0, 0.2, 0.9, 0.1]);
        let (y, tau) = transfer(x.as_slice());
        let v = pst_decide(&s, &PureState::new(x).unwrap(), &PureState::new(y).unwrap(), &cfg).unwrap();
        assert!(v.is_yes());
        assert!((v.tau_min.unwrap() - tau).abs() < 1e-12);
    }
}
