//! Derivatives of the fidelity `f(t) = |y^T U(t) x|^2` at a PST time and
//! the bound `0 > f''(tau) >= -(lmax - lmin)^2 / 2`.

use crate::arith::binomial;
use crate::error::{PstError, Result};
use crate::extremal::{extremal_min_pst_search, ExtremalPair};
use crate::graph::{hamiltonian, HamiltonianKind};
use crate::pst::verify_pst_numeric;
use crate::spectral::{decompose, SpectralDecomposition, ToleranceConfig};
use crate::state::{moment, moment_check, support, PureState};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

/// `f''` values in `(-NEAR_FIXED, 0)` cannot be told apart from a fixed
/// state and are flagged rather than accepted.
pub const NEAR_FIXED: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityReport {
    pub tau: f64,
    /// `d^k f / dt^k` at `tau` for `k = 1..=k_max`: the moment formula for
    /// even `k`, the pair sum for odd `k`.
    pub derivatives: Vec<f64>,
    /// The same derivatives from the pair sum over eigenvalue differences.
    pub pair_sum: Vec<f64>,
    pub d2: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub bound_lo: f64,
    pub pass: bool,
    pub near_fixed: bool,
    pub odd_max_abs: f64,
    /// `x^T M^k x = y^T M^k y` for `k <= k_max`.
    pub moments_match: bool,
}

impl SensitivityReport {
    pub fn derivative(&self, k: usize) -> Option<f64> {
        self.derivatives.get(k.checked_sub(1)?).copied()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "tau": self.tau,
            "d2": self.d2,
            "bound_lo": self.bound_lo,
            "pass": self.pass,
            "odd_max_abs": self.odd_max_abs,
            "near_fixed": self.near_fixed,
            "derivatives": self.derivatives,
        })
    }
}

/// Fidelity derivatives at a verified PST time. States are normalized
/// internally; a pair that does not transfer at `tau` is refused.
pub fn fidelity_derivatives(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    tau: f64,
    k_max: usize,
    cfg: &ToleranceConfig,
) -> Result<SensitivityReport> {
    if k_max < 2 {
        return Err(PstError::InvalidRequest("k_max must be at least 2".into()));
    }
    if !verify_pst_numeric(s, x, y, tau, cfg)?.pass {
        return Err(PstError::InvalidPair(format!("no perfect state transfer at tau = {tau}")));
    }
    let (xu, yu) = (x.normalized(), y.normalized());
    let m: Vec<f64> = (0..=k_max).map(|j| moment(s, &yu, j as u32)).collect::<Result<_>>()?;
    let c = s.amplitudes(&xu, &yu)?;
    let ev = s.eigenvalues();
    let pair_sum: Vec<f64> = (1..=k_max)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, cl) in ev.iter().zip(&c) {
                for (mm, cm) in ev.iter().zip(&c) {
                    let d = l - mm;
                    acc += cl * cm * Complex64::new(0.0, d).powu(k as u32) * Complex64::from_polar(1.0, tau * d);
                }
            }
            acc.re
        })
        .collect();
    let derivatives: Vec<f64> = (1..=k_max)
        .map(|k| {
            if k % 2 == 1 {
                return pair_sum[k - 1];
            }
            let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
            sign * (0..=k)
                .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(k as u32, j as u32) * m[j] * m[k - j])
                .sum::<f64>()
        })
        .collect();
    let profile = support(s, &PureState::new(xu.clone())?, cfg)?;
    let lambda_max = profile.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = profile.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let bound_lo = -(lambda_max - lambda_min).powi(2) / 2.0;
    let d2 = derivatives[1];
    let near_fixed = d2 > -NEAR_FIXED;
    let odd_max_abs = derivatives.iter().step_by(2).map(|v| v.abs()).fold(0.0, f64::max);
    Ok(SensitivityReport {
        tau,
        pair_sum,
        d2,
        lambda_max,
        lambda_min,
        bound_lo,
        pass: !near_fixed && d2 >= bound_lo - 1e-8,
        near_fixed,
        odd_max_abs,
        moments_match: moment_check(s, &PureState::new(xu)?, &PureState::new(yu)?, k_max as u32)?,
        derivatives,
    })
}

/// Finite-difference weights for derivative `order` at `z` on the nodes
/// `xs`.
fn fornberg_weights(z: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let (mut c1, mut c4) = (1.0, xs[0] - z);
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let (mut c2, c5) = (1.0, c4);
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Central 9-point finite difference of `d^k f / dt^k` at `tau`.
pub fn finite_difference_oracle(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    tau: f64,
    k: usize,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(PstError::InvalidRequest("step must be positive".into()));
    }
    if !(1..=8).contains(&k) {
        return Err(PstError::InvalidRequest("a 9-point stencil supports derivatives 1..=8".into()));
    }
    let nodes: Vec<f64> = (-4..=4).map(f64::from).collect();
    let w = fornberg_weights(0.0, &nodes, k);
    let mut acc = 0.0;
    for (node, wi) in nodes.iter().zip(&w) {
        acc += wi * s.fidelity(tau + node * h, x.vector(), y.vector())?;
    }
    Ok(acc / h.powi(k as i32))
}

#[derive(Debug, Clone)]
pub struct ExtremalSensitivity {
    pub pair: ExtremalPair,
    pub report: SensitivityReport,
}

/// `f''` for the extremal join pair on `n` vertices; it equals
/// `-(lmax - lmin)^2 / 2` (`-n^2 / 2` for the Laplacian).
pub fn sensitivity_extremal(n: usize, kind: HamiltonianKind, cfg: &ToleranceConfig) -> Result<ExtremalSensitivity> {
    let pair = extremal_min_pst_search(n, kind, cfg)?;
    let s = decompose(&hamiltonian(&pair.graph, kind)?, cfg)?;
    let report = fidelity_derivatives(&s, &pair.x, &pair.y, pair.verified_tau, 4, cfg)?;
    Ok(ExtremalSensitivity { pair, report })
}
