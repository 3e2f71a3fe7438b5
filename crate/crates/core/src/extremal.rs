//! Graphs and states with the least minimum PST time among connected
//! unweighted graphs on `n` vertices, and an exhaustive spread oracle.

use crate::error::{PstError, Result};
use crate::graph::{build_complete, build_empty, hamiltonian, join, Graph, HamiltonianKind};
use crate::par::{self, Execution};
use crate::pst::pst_decide;
use crate::spectral::{decompose, ToleranceConfig};
use crate::state::PureState;
use crate::symbolic::render_time;
use nalgebra::{DVector, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;

/// Largest `n` the exhaustive oracle enumerates (2^21 edge masks).
pub const ORACLE_GUARD: usize = 7;

#[derive(Debug, Clone)]
pub struct ExtremalPair {
    pub graph: Graph,
    pub kind: HamiltonianKind,
    /// Sizes of the two sides of the join.
    pub parts: (usize, usize),
    pub x: PureState,
    pub y: PureState,
    /// Closed-form minimum PST time.
    pub tau: f64,
    pub tau_symbolic: Option<String>,
    /// Minimum PST time found by the decision procedure on this graph.
    pub verified_tau: f64,
    /// Caveat attached to the construction, if any.
    pub note: Option<String>,
}

impl ExtremalPair {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "n": self.graph.n(),
            "parts": [self.parts.0, self.parts.1],
            "edges": self.graph.num_edges(),
            "x": self.x.vector().as_slice(),
            "y": self.y.vector().as_slice(),
            "tau": self.tau,
            "tau_symbolic": self.tau_symbolic,
            "verified_tau": self.verified_tau,
            "note": self.note,
        })
    }
}

/// The pair `x = (u + v)/sqrt 2`, `y = (u - v)/sqrt 2` for unit vectors
/// along the given eigenvectors.
fn balanced_pair(u: DVector<f64>, v: DVector<f64>) -> Result<(PureState, PureState)> {
    let (u, v) = (&u / u.norm(), &v / v.norm());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok((PureState::new((&u + &v) * r)?, PureState::new((&u - &v) * r)?))
}

/// Laplacian: any join `O_{n/2} v O_{n/2}` with `x` in the span of the
/// all-ones vector and the join eigenvector for `n`, `tau = pi / n`.
/// Adjacency: the complete split graph `O_a v K_{n-a}`, `a = ceil(n/3)`,
/// with `x` on its two extreme eigenvectors, `tau = pi / sqrt(D)`,
/// `D = (n-a-1)^2 + 4a(n-a)`; optimal only for large `n`.
pub fn extremal_min_pst_search(n: usize, kind: HamiltonianKind, cfg: &ToleranceConfig) -> Result<ExtremalPair> {
    if n < 2 {
        return Err(PstError::InvalidSize(format!("need n >= 2, got {n}")));
    }
    let nf = n as f64;
    let (graph, parts, x, y, tau, note) = match kind {
        HamiltonianKind::Laplacian => {
            let (n1, n2) = (n / 2, n - n / 2);
            let g = join(&build_empty(n1)?, &build_empty(n2)?);
            let w = DVector::from_fn(n, |i, _| if i < n1 { n2 as f64 } else { -(n1 as f64) });
            let (x, y) = balanced_pair(DVector::from_element(n, 1.0), w)?;
            (g, (n1, n2), x, y, PI / nf, None)
        }
        HamiltonianKind::Adjacency => {
            if n == 2 {
                let g = build_complete(2)?;
                let (x, y) = balanced_pair(DVector::from_element(2, 1.0), DVector::from_column_slice(&[1.0, -1.0]))?;
                (g, (1, 1), x, y, PI / 2.0, None)
            } else {
                let a = n.div_ceil(3);
                let b = (n - a) as f64;
                let af = a as f64;
                let g = join(&build_empty(a)?, &build_complete(n - a)?);
                let d = (b - 1.0).powi(2) + 4.0 * af * b;
                let (lp, lm) = ((b - 1.0 + d.sqrt()) / 2.0, (b - 1.0 - d.sqrt()) / 2.0);
                let top = DVector::from_fn(n, |i, _| if i < a { -lm } else { af });
                let bottom = DVector::from_fn(n, |i, _| if i < a { -lp } else { af });
                let (x, y) = balanced_pair(top, bottom)?;
                (g, (a, n - a), x, y, PI / d.sqrt(), Some("asymptotic, unverified at this n".to_string()))
            }
        }
        HamiltonianKind::Custom => return Err(PstError::InvalidRequest("adjacency or Laplacian only".into())),
    };
    let s = decompose(&hamiltonian(&graph, kind)?, cfg)?;
    let v = pst_decide(&s, &x, &y, cfg)?;
    let verified_tau = v
        .tau_min
        .filter(|_| v.is_yes())
        .ok_or_else(|| PstError::NumericFailure("extremal pair failed the decision procedure".into()))?;
    Ok(ExtremalPair { graph, kind, parts, x, y, tau, tau_symbolic: render_time(tau), verified_tau, note })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpreadOracle {
    pub n: usize,
    pub connected_graphs: usize,
    /// Largest Laplacian spread over connected graphs.
    pub max_spread: f64,
    /// `2 pi / max_spread`: the least minimum period of any state.
    pub least_period: f64,
    /// Number of connected graphs attaining the maximum spread.
    pub extremal_graphs: usize,
    /// Whether every graph attaining it is a join (disconnected complement).
    pub extremal_are_joins: bool,
}

/// Enumerates every labelled graph on `n` vertices and records the
/// Laplacian spread of the connected ones. The least minimum period of a
/// state is `2 pi / spread`, reached by a support on the extreme
/// eigenvalues.
pub fn laplacian_spread_oracle(n: usize, exec: Execution) -> Result<SpreadOracle> {
    if !(2..=ORACLE_GUARD).contains(&n) {
        return Err(PstError::TooLarge(format!("oracle handles 2 <= n <= {ORACLE_GUARD}, got {n}")));
    }
    let pairs = n * (n - 1) / 2;
    let spreads = par::map_range(exec, 0, 1u64 << pairs, |mask| {
        let g = Graph::from_edge_mask(n, mask);
        if !g.is_connected() {
            return None;
        }
        let ev = SymmetricEigen::new(g.laplacian()).eigenvalues;
        let spread = ev.max() - ev.min();
        Some((spread, !g.complement().is_connected()))
    });
    let found: Vec<(f64, bool)> = spreads.into_iter().flatten().collect();
    let max_spread = found.iter().map(|s| s.0).fold(0.0, f64::max);
    let top: Vec<&(f64, bool)> = found.iter().filter(|s| s.0 >= max_spread - 1e-9).collect();
    Ok(SpreadOracle {
        n,
        connected_graphs: found.len(),
        max_spread,
        least_period: 2.0 * PI / max_spread,
        extremal_graphs: top.len(),
        extremal_are_joins: top.iter().all(|s| s.1),
    })
}
