//! Periodicity of states: the ratio condition with rational reconstruction,
//! integer/quadratic spectral forms and minimum periods.

use crate::arith::{checked_lcm_all, is_square_free, rational_approx, square_free_decomposition};
use crate::error::{PstError, Result};
use crate::graph::{covering_radius, CoveringRadius, Hamiltonian, HamiltonianKind};
use crate::spectral::{SpectralDecomposition, ToleranceConfig};
use crate::state::{support, PureState};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    /// Position in the decreasing support list (0-based, so entries start at 2).
    pub position: usize,
    pub eigenvalue: f64,
    pub p: i64,
    pub q: i64,
    pub ratio: f64,
    pub residual: f64,
}

/// Reduced fractions `p_j/q_j = (l1 - lj)/(l1 - l2)` for the support
/// eigenvalues below the two largest ones `l1 > l2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub lambda1: f64,
    pub lambda2: f64,
    pub entries: Vec<RatioEntry>,
}

impl RatioTable {
    pub fn gap(&self) -> f64 {
        self.lambda1 - self.lambda2
    }

    /// `lcm(q_3, ..., q_m)`, or 1 for a two-element support.
    pub fn lcm_q(&self) -> Result<i64> {
        checked_lcm_all(self.entries.iter().map(|e| e.q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RatioOutcome {
    Periodic(RatioTable),
    NonPeriodic { position: usize, eigenvalue: f64, ratio: f64 },
}

fn sorted_desc(support: &[f64]) -> Vec<f64> {
    let mut s = support.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn default_noise(support: &[f64]) -> f64 {
    64.0 * f64::EPSILON * support.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

pub fn ratio_condition(support: &[f64], cfg: &ToleranceConfig) -> Result<RatioOutcome> {
    ratio_condition_with_noise(support, cfg, default_noise(support))
}

/// Ratio condition where `eigen_noise` bounds the absolute eigenvalue error.
/// A ratio is accepted as `p/q` when it is within
/// `max(tol_ratio, 10 * propagated noise)` (capped at `int_tol`), `q <= q_max`,
/// and the phase error `pi q |ratio - p/q|` stays within `tol_phase` (or the
/// propagated noise, when larger).
pub fn ratio_condition_with_noise(support: &[f64], cfg: &ToleranceConfig, eigen_noise: f64) -> Result<RatioOutcome> {
    if support.len() < 2 {
        return Err(PstError::InvalidRequest("ratio condition needs at least two eigenvalues".into()));
    }
    let s = sorted_desc(support);
    let (l1, l2) = (s[0], s[1]);
    let gap = l1 - l2;
    if !(gap > 0.0) {
        return Err(PstError::InvalidRequest("support eigenvalues must be distinct".into()));
    }
    let mut entries = Vec::with_capacity(s.len() - 2);
    for (position, &lj) in s.iter().enumerate().skip(2) {
        let ratio = (l1 - lj) / gap;
        let propagated = 2.0 * eigen_noise.max(default_noise(&s)) * (1.0 + ratio) / gap;
        let tol = cfg.tol_ratio.max(10.0 * propagated).min(cfg.int_tol);
        // p/q must also reproduce the phase at the implied period
        let phase_ok = |&(p, q): &(i64, i64)| {
            let phase_err = PI * q as f64 * (ratio - p as f64 / q as f64).abs();
            phase_err <= cfg.tol_phase.max(10.0 * PI * q as f64 * propagated)
        };
        match rational_approx(ratio, tol, cfg.q_max).filter(phase_ok) {
            Some((p, q)) => entries.push(RatioEntry {
                position,
                eigenvalue: lj,
                p,
                q,
                ratio,
                residual: (ratio - p as f64 / q as f64).abs(),
            }),
            None => return Ok(RatioOutcome::NonPeriodic { position, eigenvalue: lj, ratio }),
        }
    }
    Ok(RatioOutcome::Periodic(RatioTable { lambda1: l1, lambda2: l2, entries }))
}

/// Minimum period: `2 pi q / (l1 - l2)` with `q = lcm(q_j)` (`q = 1` for two eigenvalues).
pub fn minimum_period(table: &RatioTable) -> Result<f64> {
    Ok(2.0 * PI * table.lcm_q()? as f64 / table.gap())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpectralForm {
    Size2,
    /// All support eigenvalues are integers; `g` is the gcd of `l1 - lj`.
    Integer {
        values: Vec<i64>,
        g: i64,
    },
    /// Support eigenvalues `(a + b_j sqrt(delta)) / 2` with `delta > 1` square-free;
    /// `g` is the gcd of `(l1 - lj)/sqrt(delta)`, possibly a half-integer.
    Quadratic {
        a: i64,
        b: Vec<i64>,
        delta: u64,
        g: f64,
    },
    NonPeriodic,
}

impl SpectralForm {
    /// `2 pi / (g sqrt(delta))` for the integer and quadratic forms.
    pub fn period(&self) -> Option<f64> {
        match self {
            SpectralForm::Integer { g, .. } => Some(2.0 * PI / *g as f64),
            SpectralForm::Quadratic { g, delta, .. } => Some(2.0 * PI / (g * (*delta as f64).sqrt())),
            _ => None,
        }
    }

    /// Exact differences `(l1 - lj)/sqrt(delta)` as integers, when they are integers.
    pub fn scaled_differences(&self) -> Option<Vec<i64>> {
        match self {
            SpectralForm::Integer { values, .. } => Some(values.iter().map(|v| values[0] - v).collect()),
            SpectralForm::Quadratic { b, .. } => {
                let d: Vec<i64> = b.iter().map(|bj| b[0] - bj).collect();
                d.iter().all(|x| x % 2 == 0).then(|| d.iter().map(|x| x / 2).collect())
            }
            _ => None,
        }
    }

    pub fn sqrt_delta(&self) -> f64 {
        match self {
            SpectralForm::Quadratic { delta, .. } => (*delta as f64).sqrt(),
            _ => 1.0,
        }
    }
}

fn near_integer(x: f64, tol: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= tol && r.abs() < 9e15).then_some(r as i64)
}

fn gcd_all(values: impl IntoIterator<Item = i64>) -> i64 {
    values.into_iter().fold(0i64, |g, v| g.gcd(&v))
}

fn fit_quadratic(s: &[f64], cfg: &ToleranceConfig) -> Option<SpectralForm> {
    for i in 0..s.len() {
        for j in i..s.len() {
            let Some(a) = near_integer(s[i] + s[j], cfg.int_tol) else { continue };
            let mut squares = Vec::with_capacity(s.len());
            for &l in s {
                let t = 2.0 * l - a as f64;
                match near_integer(t * t, cfg.int_tol * 4.0 * t.abs().max(1.0)) {
                    Some(d) if d >= 0 => squares.push((d as u64, t.signum() as i64)),
                    _ => break,
                }
            }
            if squares.len() != s.len() {
                continue;
            }
            let parts: Vec<(u64, u64)> =
                squares.iter().filter(|(d, _)| *d > 0).map(|(d, _)| square_free_decomposition(*d)).collect();
            let Some(&(_, delta)) = parts.first() else { continue };
            if delta <= 1 || !is_square_free(delta) || parts.iter().any(|p| p.1 != delta) {
                continue;
            }
            let b: Vec<i64> = squares
                .iter()
                .map(|&(d, sign)| if d == 0 { 0 } else { sign * square_free_decomposition(d).0 as i64 })
                .collect();
            let sd = (delta as f64).sqrt();
            if s.iter().zip(&b).any(|(l, bj)| ((a as f64 + *bj as f64 * sd) / 2.0 - l).abs() > cfg.int_tol) {
                continue;
            }
            let g = gcd_all(b.iter().map(|bj| b[0] - bj)) as f64 / 2.0;
            return Some(SpectralForm::Quadratic { a, b, delta, g });
        }
    }
    None
}

/// Integer or quadratic form of a support, or `NonPeriodic` when neither
/// fits or the fitted set violates the unit gap between eigenvalues.
pub fn classify_form(support: &[f64], cfg: &ToleranceConfig) -> SpectralForm {
    let s = sorted_desc(support);
    if s.len() == 2 {
        return SpectralForm::Size2;
    }
    let ints: Option<Vec<i64>> = s.iter().map(|l| near_integer(*l, cfg.int_tol)).collect();
    let form = match ints {
        Some(values) => {
            let g = gcd_all(values.iter().map(|v| values[0] - v));
            Some(SpectralForm::Integer { values, g })
        }
        None => fit_quadratic(&s, cfg),
    };
    match form {
        Some(f) if spectral_gap_check(&s, cfg) => f,
        _ => SpectralForm::NonPeriodic,
    }
}

/// All pairwise differences are at least `1 - int_tol`.
pub fn spectral_gap_check(support: &[f64], cfg: &ToleranceConfig) -> bool {
    let s = sorted_desc(support);
    s.windows(2).all(|w| w[0] - w[1] >= 1.0 - cfg.int_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringBoundReport {
    pub radius: CoveringRadius,
    pub support_size: usize,
    /// Largest row sum of the nonnegative matrix (`kI - L` for Laplacians).
    pub k: f64,
    pub periodic: bool,
    /// `r <= 1` for two-element supports, `r <= 2k` for periodic supports
    /// with an integer or quadratic form; `None` when neither applies.
    pub bound: Option<f64>,
    /// `r + 1 <= |support|`.
    pub support_bound_holds: bool,
    pub bound_satisfied: bool,
}

pub fn covering_radius_bound_check(
    h: &Hamiltonian,
    x: &PureState,
    s: &SpectralDecomposition,
    cfg: &ToleranceConfig,
) -> Result<CoveringBoundReport> {
    let g = h.graph.as_ref().ok_or_else(|| PstError::NotApplicable("covering radius needs a graph".into()))?;
    if x.vector().iter().any(|v| *v < 0.0) {
        return Err(PstError::NotApplicable("state has negative entries".into()));
    }
    let k = match h.kind {
        HamiltonianKind::Laplacian => g.degrees().into_iter().fold(0.0, f64::max),
        _ => {
            if h.matrix.iter().any(|v| *v < 0.0) {
                return Err(PstError::NotApplicable("matrix has negative entries".into()));
            }
            crate::graph::inf_norm(&h.matrix)
        }
    };
    let profile = support(s, x, cfg)?;
    let radius = covering_radius(g, x.vector(), cfg.tol_supp)?;
    let m = profile.len();
    let periodic = m <= 2
        || matches!(ratio_condition_with_noise(&profile.eigenvalues, cfg, s.eigen_noise())?, RatioOutcome::Periodic(_));
    let bound = if m == 2 {
        Some(1.0)
    } else if m >= 3
        && periodic
        && matches!(
            classify_form(&profile.eigenvalues, cfg),
            SpectralForm::Integer { .. } | SpectralForm::Quadratic { .. }
        )
    {
        Some(2.0 * k)
    } else {
        None
    };
    let r = match radius {
        CoveringRadius::Finite(r) => Some(r),
        CoveringRadius::Infinite => None,
    };
    let support_bound_holds = r.is_some_and(|r| r < m) || m == 1;
    let bound_satisfied = match (bound, r) {
        (Some(b), Some(r)) => r as f64 <= b,
        (Some(_), None) => false,
        (None, _) => true,
    };
    Ok(CoveringBoundReport { radius, support_size: m, k, periodic, bound, support_bound_holds, bound_satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::*;
    use crate::spectral::decompose;
    use approx::assert_relative_eq;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn close_rational_with_large_phase_error_is_rejected() {
        // (2 - 2cos(8pi/11)) / (2 - 2cos(6pi/11)) sits within 1e-10 of 12889/8897
        let support: Vec<f64> = [0.0, 6.0, 8.0].iter().map(|k: &f64| 2.0 * (k * PI / 11.0).cos()).collect();
        assert!(matches!(ratio_condition(&support, &cfg()).unwrap(), RatioOutcome::NonPeriodic { .. }));
    }

    fn cycle_vertex_support(n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..=n / 2).map(|j| 2.0 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
        v.dedup();
        v
    }

    #[test]
    fn c4_vertex_state() {
        let RatioOutcome::Periodic(t) = ratio_condition(&[2.0, 0.0, -2.0], &cfg()).unwrap() else { panic!() };
        assert_eq!((t.entries[0].p, t.entries[0].q), (2, 1));
        assert_relative_eq!(minimum_period(&t).unwrap(), PI, epsilon = 1e-14);
    }

    #[test]
    fn c5_vertex_state_is_not_periodic() {
        let s = cycle_vertex_support(5);
        assert_eq!(s.len(), 3);
        assert!(matches!(ratio_condition(&s, &cfg()).unwrap(), RatioOutcome::NonPeriodic { position: 2, .. }));
        assert_eq!(classify_form(&s, &cfg()), SpectralForm::NonPeriodic);
    }

    #[test]
    fn two_eigenvalues_are_periodic() {
        let RatioOutcome::Periodic(t) = ratio_condition(&[0.3, -1.1], &cfg()).unwrap() else { panic!() };
        assert!(t.entries.is_empty());
        assert_relative_eq!(minimum_period(&t).unwrap(), 2.0 * PI / 1.4, epsilon = 1e-14);
        // K_n general state
        let RatioOutcome::Periodic(t) = ratio_condition(&[6.0, -1.0], &cfg()).unwrap() else { panic!() };
        assert_relative_eq!(minimum_period(&t).unwrap(), 2.0 * PI / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn forms() {
        assert!(matches!(classify_form(&[2.0, 1.0, -1.0, -2.0], &cfg()), SpectralForm::Integer { g: 1, .. }));
        let r2 = 2f64.sqrt();
        match classify_form(&[r2, 0.0, -r2], &cfg()) {
            SpectralForm::Quadratic { a, b, delta, g } => {
                assert_eq!((a, delta), (0, 2));
                assert_eq!(b, vec![2, 0, -2]);
                assert_eq!(g, 1.0);
            }
            other => panic!("{other:?}"),
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(classify_form(&[1.0, phi, -1.0 / phi], &cfg()), SpectralForm::NonPeriodic);
        assert_eq!(classify_form(&[3.0, 1.0], &cfg()), SpectralForm::Size2);
    }

    #[test]
    fn closed_form_period_matches_ratio_period() {
        let r3 = 3f64.sqrt();
        for s in [vec![r3, 0.0, -r3], vec![2.0, 1.0, 0.0, -1.0, -2.0], vec![1.0 + 2f64.sqrt(), 1.0, 1.0 - 2f64.sqrt()]]
        {
            let RatioOutcome::Periodic(t) = ratio_condition(&s, &cfg()).unwrap() else { panic!() };
            let form = classify_form(&s, &cfg());
            assert_relative_eq!(form.period().unwrap(), minimum_period(&t).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn gaps() {
        assert!(spectral_gap_check(&[2.0, 0.0, -2.0], &cfg()));
        assert!(!spectral_gap_check(&[1.0, 1.5, -1.0], &cfg()));
        let r5 = 5f64.sqrt();
        let p4 = [(r5 + 1.0) / 2.0, (r5 - 1.0) / 2.0, -(r5 - 1.0) / 2.0, -(r5 + 1.0) / 2.0];
        assert!(spectral_gap_check(&p4, &cfg()));
    }

    #[test]
    fn covering_bounds() {
        let c = cfg();
        let star = build_complete_bipartite(1, 3).unwrap();
        let h = hamiltonian(&star, HamiltonianKind::Adjacency).unwrap();
        let s = decompose(&h, &c).unwrap();
        let x = PureState::from_slice(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let rep = covering_radius_bound_check(&h, &x, &s, &c).unwrap();
        assert_eq!(rep.support_size, 2);
        assert_eq!(rep.bound, Some(1.0));
        assert!(rep.bound_satisfied);

        let c6 = build_cycle(6).unwrap();
        let h = hamiltonian(&c6, HamiltonianKind::Adjacency).unwrap();
        let s = decompose(&h, &c).unwrap();
        let x = PureState::from_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let rep = covering_radius_bound_check(&h, &x, &s, &c).unwrap();
        assert_eq!(rep.radius, CoveringRadius::Finite(3));
        assert_eq!(rep.bound, Some(4.0));
        assert!(rep.bound_satisfied && rep.support_bound_holds);

        let ones = PureState::from_slice(&[1.0; 6]).unwrap();
        let rep = covering_radius_bound_check(&h, &ones, &s, &c).unwrap();
        assert_eq!(rep.radius, CoveringRadius::Finite(0));
        assert!(rep.bound_satisfied);

        let neg = PureState::from_slice(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(covering_radius_bound_check(&h, &neg, &s, &c), Err(PstError::NotApplicable(_))));
    }
}
