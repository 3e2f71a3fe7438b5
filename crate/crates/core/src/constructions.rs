//! PST-preserving constructions: Cartesian products of tensor states and
//! joins, including closed-form join transition matrices.

use crate::error::{PstError, Result};
use crate::graph::{cartesian_product, hamiltonian, join, Graph, HamiltonianKind};
use crate::periodicity::{minimum_period, ratio_condition_with_noise, RatioOutcome};
use crate::pst::{pst_decide, verify_pst_numeric, Decision, PstVerdict};
use crate::spectral::{decompose, SpectralDecomposition, ToleranceConfig};
use crate::state::{support, PureState, SupportClass};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest product graph `product_pst` will build.
pub const PRODUCT_GUARD: usize = 4096;
/// Tolerance on `tau / tau_min` being an integer.
const MULTIPLE_TOL: f64 = 1e-9;
/// Tolerance on the join phase condition modulo `2 pi`.
const MODULAR_TOL: f64 = 1e-7;

fn near_integer(r: f64) -> Option<i64> {
    let k = r.round();
    ((r - k).abs() <= MULTIPLE_TOL * r.abs().max(1.0)).then_some(k as i64)
}

/// What a factor does at the requested time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FactorWitness {
    /// PST between the factor states at `tau`, an odd multiple of `tau_min`.
    Transfer {
        tau_min: f64,
    },
    /// `x = +-y` and `x` returns to itself up to phase at `tau`.
    Periodic {
        period: Option<f64>,
    },
    Fails(String),
}

impl FactorWitness {
    fn holds(&self) -> bool {
        !matches!(self, FactorWitness::Fails(_))
    }
}

fn same_up_to_sign(x: &PureState, y: &PureState) -> bool {
    let tol = 1e-12 * x.norm();
    (x.vector() - y.vector()).amax() <= tol || (x.vector() + y.vector()).amax() <= tol
}

fn factor_transfer(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    tau: f64,
    cfg: &ToleranceConfig,
) -> Result<FactorWitness> {
    let v = pst_decide(s, x, y, cfg)?;
    let Some(t) = v.tau_min.filter(|_| v.is_yes()) else {
        return Ok(FactorWitness::Fails(format!("no PST: {}", v.reason.map_or("", |r| r.code()))));
    };
    Ok(match near_integer(tau / t) {
        Some(k) if k % 2 == 1 => FactorWitness::Transfer { tau_min: t },
        _ => FactorWitness::Fails(format!("tau is not an odd multiple of {t}")),
    })
}

fn factor_periodic(s: &SpectralDecomposition, x: &PureState, tau: f64, cfg: &ToleranceConfig) -> Result<FactorWitness> {
    let profile = support(s, x, cfg)?;
    if profile.class == SupportClass::Fixed {
        return Ok(FactorWitness::Periodic { period: None });
    }
    Ok(match ratio_condition_with_noise(&profile.eigenvalues, cfg, s.eigen_noise())? {
        RatioOutcome::Periodic(table) => {
            let rho = minimum_period(&table)?;
            match near_integer(tau / rho) {
                Some(k) if k >= 1 => FactorWitness::Periodic { period: Some(rho) },
                _ => FactorWitness::Fails(format!("tau is not a multiple of the period {rho}")),
            }
        }
        RatioOutcome::NonPeriodic { .. } => FactorWitness::Fails("not periodic".into()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductPstWitness {
    pub first: FactorWitness,
    pub second: FactorWitness,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub tau: f64,
    /// Decision from the factor analysis at `tau`.
    pub decision: Decision,
    /// Whether direct evolution on the product confirms `decision` at `tau`.
    pub numeric_pass: bool,
    pub product_tau_min: Option<f64>,
    pub cross_check_agrees: bool,
}

/// Decides PST between `x1 (x) x2` and `y1 (x) y2` on `G [] H` at `tau`
/// from the factors, and cross-checks on the product itself.
#[allow(clippy::too_many_arguments)]
pub fn product_pst(
    g: &Graph,
    h: &Graph,
    kind: HamiltonianKind,
    x1: &PureState,
    y1: &PureState,
    x2: &PureState,
    y2: &PureState,
    tau: f64,
    cfg: &ToleranceConfig,
) -> Result<ProductPstWitness> {
    if kind == HamiltonianKind::Custom {
        return Err(PstError::InvalidRequest("products are defined for adjacency and Laplacian".into()));
    }
    if g.n() * h.n() > PRODUCT_GUARD {
        return Err(PstError::TooLarge(format!("product has {} vertices, limit {PRODUCT_GUARD}", g.n() * h.n())));
    }
    for (x, y, k) in [(x1, y1, g.n()), (x2, y2, h.n())] {
        if x.len() != k || y.len() != k {
            return Err(PstError::DimensionMismatch { expected: k, got: x.len().max(y.len()) });
        }
    }
    if !(tau > 0.0) {
        return Err(PstError::InvalidRequest("tau must be positive".into()));
    }
    let (same1, same2) = (same_up_to_sign(x1, y1), same_up_to_sign(x2, y2));
    if same1 && same2 {
        return Err(PstError::InvalidPair("both factor pairs are equal up to sign".into()));
    }
    let sg = decompose(&hamiltonian(g, kind)?, cfg)?;
    let sh = decompose(&hamiltonian(h, kind)?, cfg)?;
    let first = if same1 { factor_periodic(&sg, x1, tau, cfg)? } else { factor_transfer(&sg, x1, y1, tau, cfg)? };
    let second = if same2 { factor_periodic(&sh, x2, tau, cfg)? } else { factor_transfer(&sh, x2, y2, tau, cfg)? };
    let decision = if first.holds() && second.holds() { Decision::Yes } else { Decision::No };

    let p = cartesian_product(g, h);
    let sp = decompose(&hamiltonian(&p, kind)?, cfg)?;
    let x = PureState::new(x1.vector().kronecker(x2.vector()))?;
    let y = PureState::new(y1.vector().kronecker(y2.vector()))?;
    let numeric_pass = verify_pst_numeric(&sp, &x, &y, tau, cfg)?.pass;
    let verdict = pst_decide(&sp, &x, &y, cfg)?;
    let product_tau_min = verdict.tau_min.filter(|_| verdict.is_yes());
    let odd_multiple = product_tau_min.and_then(|t| near_integer(tau / t)).is_some_and(|k| k % 2 == 1);
    let cross_check_agrees = match decision {
        Decision::Yes => numeric_pass && odd_multiple,
        Decision::No => !numeric_pass && !odd_multiple,
    };
    Ok(ProductPstWitness {
        first,
        second,
        x: x.vector().iter().copied().collect(),
        y: y.vector().iter().copied().collect(),
        tau,
        decision,
        numeric_pass,
        product_tau_min,
        cross_check_agrees,
    })
}

/// Product witness from a vertex transfer `e_u -> e_v` in `G` (or a
/// periodic vertex when `u == v`) and a PST pair in `H`.
#[allow(clippy::too_many_arguments)]
pub fn product_from_vertex_transfer(
    g: &Graph,
    h: &Graph,
    kind: HamiltonianKind,
    u: usize,
    v: usize,
    x2: &PureState,
    y2: &PureState,
    tau: f64,
    cfg: &ToleranceConfig,
) -> Result<ProductPstWitness> {
    if u >= g.n() || v >= g.n() {
        return Err(PstError::InvalidRequest(format!("vertex out of range 0..{}", g.n())));
    }
    let e = |i: usize| PureState::new(DVector::from_fn(g.n(), |k, _| if k == i { 1.0 } else { 0.0 }));
    product_pst(g, h, kind, &e(u)?, &e(v)?, x2, y2, tau, cfg)
}

/// Closed-form join transition matrix together with its distance from the
/// generic spectral evolution of the join.
#[derive(Debug, Clone)]
pub struct JoinTransition {
    pub matrix: DMatrix<Complex64>,
    pub generic_residual: f64,
}

fn embed(block: &DMatrix<f64>, offset: usize, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((offset, offset), (block.nrows(), block.ncols())).copy_from(block);
    out
}

fn add_term(u: &mut DMatrix<Complex64>, phase: f64, t: f64, p: &DMatrix<f64>) {
    let z = Complex64::from_polar(1.0, t * phase);
    u.iter_mut().zip(p.iter()).for_each(|(o, v)| *o += z * v);
}

/// `exp(it M(G v H))` assembled from the spectral data of the factors.
/// Adjacency requires both factors to be regular.
pub fn join_transition_matrix(
    g: &Graph,
    h: &Graph,
    kind: HamiltonianKind,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<JoinTransition> {
    let (m, n) = (g.n(), h.n());
    let total = m + n;
    let (mf, nf) = (m as f64, n as f64);
    let mut u = DMatrix::from_element(total, total, Complex64::new(0.0, 0.0));
    let ones = |k: usize, c: f64| DMatrix::from_element(k, k, c);
    match kind {
        HamiltonianKind::Laplacian => {
            let sg = decompose(&hamiltonian(g, kind)?, cfg)?;
            let sh = decompose(&hamiltonian(h, kind)?, cfg)?;
            add_term(&mut u, 0.0, t, &DMatrix::from_element(total, total, 1.0 / (mf + nf)));
            let w = DVector::from_fn(total, |i, _| if i < m { nf } else { -mf });
            add_term(&mut u, mf + nf, t, &(&w * w.transpose() / (mf * nf * (mf + nf))));
            for (sf, off, shift, k, conn) in [(&sg, 0, nf, m, g.is_connected()), (&sh, m, mf, n, h.is_connected())] {
                for (l, e) in sf.eigenvalues().iter().zip(sf.projectors()) {
                    if *l > sf.group_threshold() {
                        add_term(&mut u, l + shift, t, &embed(e, off, total));
                    } else if !conn {
                        add_term(&mut u, shift, t, &embed(&(e - ones(k, 1.0 / k as f64)), off, total));
                    }
                }
            }
        }
        HamiltonianKind::Adjacency => {
            let (Some(k), Some(l)) = (g.regular_degree(), h.regular_degree()) else {
                return Err(PstError::NotApplicable("adjacency join formula needs regular factors".into()));
            };
            let sg = decompose(&hamiltonian(g, kind)?, cfg)?;
            let sh = decompose(&hamiltonian(h, kind)?, cfg)?;
            let delta = (k - l).powi(2) + 4.0 * mf * nf;
            let (lp, lm) = ((k + l + delta.sqrt()) / 2.0, (k + l - delta.sqrt()) / 2.0);
            let uu = DVector::from_fn(total, |i, _| if i < m { k - lm } else { mf });
            let vv = DVector::from_fn(total, |i, _| if i < m { k - lp } else { mf });
            add_term(&mut u, lp, t, &(&uu * uu.transpose() / (mf * delta.sqrt() * (k - lm))));
            add_term(&mut u, lm, t, &(&vv * vv.transpose() / (mf * delta.sqrt() * (lp - k))));
            for (sf, off, deg, size, conn) in [(&sg, 0, k, m, g.is_connected()), (&sh, m, l, n, h.is_connected())] {
                for (lam, e) in sf.eigenvalues().iter().zip(sf.projectors()) {
                    if *lam < deg - sf.group_threshold() {
                        add_term(&mut u, *lam, t, &embed(e, off, total));
                    } else if !conn {
                        add_term(&mut u, deg, t, &embed(&(e - ones(size, 1.0 / size as f64)), off, total));
                    }
                }
            }
        }
        HamiltonianKind::Custom => {
            return Err(PstError::InvalidRequest("joins are defined for adjacency and Laplacian".into()))
        }
    }
    let generic = decompose(&hamiltonian(&join(g, h), kind)?, cfg)?.transition_matrix(t);
    let generic_residual = (&u - generic).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if generic_residual > 1e-8 {
        return Err(PstError::NumericFailure(format!(
            "join formula differs from direct evolution by {generic_residual:e}"
        )));
    }
    Ok(JoinTransition { matrix: u, generic_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JoinPart {
    /// States supported on the first factor only.
    Embedded,
    /// States with parts on both factors.
    Combined,
}

#[derive(Debug, Clone, Serialize)]
pub struct JoinPstVerdict {
    pub part: JoinPart,
    /// Decision predicted from the factors.
    pub decision: Decision,
    pub tau: Option<f64>,
    /// The pair `(lambda, theta)` satisfying the phase condition, if any.
    pub modular_witness: Option<(f64, f64)>,
    pub join_decision: Decision,
    pub join_tau_min: Option<f64>,
    pub numeric_pass: bool,
    pub cross_check_agrees: bool,
}

fn mean_free(x: &PureState, what: &str) -> Result<()> {
    if x.vector().sum().abs() > 1e-10 * x.norm() * (x.len() as f64).sqrt() {
        return Err(PstError::NotApplicable(format!("{what} is not orthogonal to the all-ones vector")));
    }
    Ok(())
}

fn stack(a: &PureState, b: Option<&PureState>, n: usize) -> Result<PureState> {
    let m = a.len();
    PureState::new(DVector::from_fn(
        m + n,
        |i, _| if i < m { a.vector()[i] } else { b.map_or(0.0, |b| b.vector()[i - m]) },
    ))
}

/// PST on `G v H` between `[x1; x2]` and `[y1; y2]` (or `[x1; 0]` and
/// `[y1; 0]` when the second parts are absent). Factor states must be
/// orthogonal to the all-ones vector.
#[allow(clippy::too_many_arguments)]
pub fn join_pst(
    g: &Graph,
    h: &Graph,
    kind: HamiltonianKind,
    x1: &PureState,
    y1: &PureState,
    second: Option<(&PureState, &PureState)>,
    tau: f64,
    cfg: &ToleranceConfig,
) -> Result<JoinPstVerdict> {
    if kind == HamiltonianKind::Custom {
        return Err(PstError::InvalidRequest("joins are defined for adjacency and Laplacian".into()));
    }
    if kind == HamiltonianKind::Adjacency && (g.regular_degree().is_none() || h.regular_degree().is_none()) {
        return Err(PstError::NotApplicable("adjacency joins need regular factors".into()));
    }
    if x1.len() != g.n() || y1.len() != g.n() {
        return Err(PstError::DimensionMismatch { expected: g.n(), got: x1.len() });
    }
    mean_free(x1, "x1")?;
    mean_free(y1, "y1")?;
    let (m, n) = (g.n(), h.n());
    let sg = decompose(&hamiltonian(g, kind)?, cfg)?;
    let g_verdict = pst_decide(&sg, x1, y1, cfg)?;
    let (part, decision, tau_used, witness, x, y) = match second {
        None => {
            let t = g_verdict.tau_min.filter(|_| g_verdict.is_yes());
            (JoinPart::Embedded, g_verdict.decision, t, None, stack(x1, None, n)?, stack(y1, None, n)?)
        }
        Some((x2, y2)) => {
            if x2.len() != n || y2.len() != n {
                return Err(PstError::DimensionMismatch { expected: n, got: x2.len() });
            }
            mean_free(x2, "x2")?;
            mean_free(y2, "y2")?;
            if !g.is_connected() || !h.is_connected() {
                return Err(PstError::NotApplicable("combined join states need connected factors".into()));
            }
            let sh = decompose(&hamiltonian(h, kind)?, cfg)?;
            let h_verdict = pst_decide(&sh, x2, y2, cfg)?;
            let at_tau = |v: &PstVerdict| {
                v.tau_min.filter(|_| v.is_yes()).and_then(|t| near_integer(tau / t)).is_some_and(|k| k % 2 == 1)
            };
            let delta = if kind == HamiltonianKind::Laplacian { 1.0 } else { 0.0 };
            let mut witness = None;
            if at_tau(&g_verdict) && at_tau(&h_verdict) {
                let (cg, ch) = (g_verdict.certificate.as_ref().unwrap(), h_verdict.certificate.as_ref().unwrap());
                'search: for &l in &cg.sigma_plus {
                    for &th in &ch.sigma_plus {
                        let phase = tau * (l - th + delta * (n as f64 - m as f64));
                        let r = phase.rem_euclid(2.0 * PI);
                        if r.min(2.0 * PI - r) <= MODULAR_TOL {
                            witness = Some((l, th));
                            break 'search;
                        }
                    }
                }
            }
            let d = if witness.is_some() { Decision::Yes } else { Decision::No };
            (JoinPart::Combined, d, Some(tau), witness, stack(x1, Some(x2), n)?, stack(y1, Some(y2), n)?)
        }
    };
    let sj = decompose(&hamiltonian(&join(g, h), kind)?, cfg)?;
    let jv = pst_decide(&sj, &x, &y, cfg)?;
    let join_tau_min = jv.tau_min.filter(|_| jv.is_yes());
    let check_tau = tau_used.unwrap_or(tau);
    let numeric_pass = verify_pst_numeric(&sj, &x, &y, check_tau, cfg)?.pass;
    let cross_check_agrees = match (part, decision) {
        (JoinPart::Embedded, Decision::Yes) => {
            jv.is_yes() && join_tau_min.zip(tau_used).is_some_and(|(a, b)| (a - b).abs() <= 1e-9 * b) && numeric_pass
        }
        (JoinPart::Embedded, Decision::No) => !jv.is_yes(),
        (JoinPart::Combined, Decision::Yes) => jv.is_yes() && numeric_pass,
        (JoinPart::Combined, Decision::No) => !numeric_pass,
    };
    Ok(JoinPstVerdict {
        part,
        decision,
        tau: tau_used,
        modular_witness: witness,
        join_decision: jv.decision,
        join_tau_min,
        numeric_pass,
        cross_check_agrees,
    })
}
