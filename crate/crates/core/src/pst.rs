//! Perfect state transfer: the decision procedure, constructive partners,
//! numerical verification and fidelity scans.

use crate::arith::{nu2, Valuation};
use crate::error::{PstError, Result};
use crate::periodicity::{classify_form, ratio_condition_with_noise, RatioOutcome, RatioTable, SpectralForm};
use crate::spectral::{SpectralDecomposition, ToleranceConfig};
use crate::state::{
    check_strong_cospectrality, signed_combination, support, CospectralRefusal, Cospectrality,
    CospectralityCertificate, PureState, SupportClass, SupportProfile,
};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Yes,
    No,
}

/// Which branch of the parity test applied: whether the second largest
/// support eigenvalue carries the same sign as the largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParityCase {
    Lambda2Plus,
    Lambda2Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RefusalReason {
    NotCospectral(CospectralRefusal),
    NotPeriodic { eigenvalue: f64, ratio: f64 },
    ParityConditionFailed(ParityCase),
}

impl RefusalReason {
    pub fn code(&self) -> &'static str {
        match self {
            RefusalReason::NotCospectral(_) => "not-cospectral",
            RefusalReason::NotPeriodic { .. } => "not-periodic",
            RefusalReason::ParityConditionFailed(ParityCase::Lambda2Plus) => "parity-condition-failed(lambda2-plus)",
            RefusalReason::ParityConditionFailed(ParityCase::Lambda2Minus) => "parity-condition-failed(lambda2-minus)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PstVerdict {
    pub decision: Decision,
    pub tau_min: Option<f64>,
    pub phase: Option<Complex64>,
    pub certificate: Option<CospectralityCertificate>,
    pub ratio_table: Option<RatioTable>,
    pub form: Option<SpectralForm>,
    pub reason: Option<RefusalReason>,
    /// Outcome of the closed-form test on `(l1 - l)/sqrt(delta)` when the
    /// support has an integer or quadratic form; must agree with `decision`.
    pub closed_form_decision: Option<Decision>,
}

impl PstVerdict {
    fn no(reason: RefusalReason) -> Self {
        PstVerdict {
            decision: Decision::No,
            tau_min: None,
            phase: None,
            certificate: None,
            ratio_table: None,
            form: None,
            reason: Some(reason),
            closed_form_decision: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.decision == Decision::Yes
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cert = self.certificate.as_ref();
        json!({
            "decision": match self.decision { Decision::Yes => "Yes", Decision::No => "No" },
            "tau_min": self.tau_min,
            "tau_symbolic": self.tau_min.and_then(crate::symbolic::render_time),
            "phase_re": self.phase.map(|p| p.re),
            "phase_im": self.phase.map(|p| p.im),
            "sigma_plus": cert.map(|c| c.sigma_plus.clone()),
            "sigma_minus": cert.map(|c| c.sigma_minus.clone()),
            "ratio_table": self.ratio_table.as_ref().map(|t| t.entries.iter().map(|e| json!({
                "eigenvalue": e.eigenvalue, "p": e.p, "q": e.q
            })).collect::<Vec<_>>()),
            "reason": self.reason.as_ref().map(RefusalReason::code),
        })
    }
}

/// Canonical split of a support into the positions sharing the sign of the
/// largest eigenvalue and the rest.
fn canonical_split(profile: &SupportProfile, cert: &CospectralityCertificate) -> (Vec<usize>, Vec<usize>) {
    let (mut plus, mut minus): (Vec<usize>, Vec<usize>) =
        (0..profile.len()).partition(|&p| cert.plus.contains(&profile.indices[p]));
    if !plus.contains(&0) {
        std::mem::swap(&mut plus, &mut minus);
    }
    (plus, minus)
}

/// Parity test on the reconstructed fractions, keyed on the sign of the
/// second largest support eigenvalue.
fn parity_condition(table: &RatioTable, plus: &[usize]) -> std::result::Result<(), ParityCase> {
    let entries = &table.entries;
    if plus.contains(&1) {
        let minus_vals: Vec<Valuation> =
            entries.iter().filter(|e| !plus.contains(&e.position)).map(|e| nu2(e.q)).collect();
        let eta = minus_vals[0];
        let equal = minus_vals.iter().all(|v| *v == eta);
        // l2 itself sits at q = 1 in the plus part
        let dominated = nu2(1) < eta && entries.iter().filter(|e| plus.contains(&e.position)).all(|e| nu2(e.q) < eta);
        if equal && dominated {
            Ok(())
        } else {
            Err(ParityCase::Lambda2Plus)
        }
    } else {
        let ok = entries.iter().all(|e| e.q % 2 == 1 && ((e.p % 2 == 0) == plus.contains(&e.position)));
        if ok {
            Ok(())
        } else {
            Err(ParityCase::Lambda2Minus)
        }
    }
}

/// Closed-form test: with `d_j = (l1 - lj)/sqrt(delta)` integers, the plus
/// part must have strictly larger 2-adic valuation than the (equal)
/// valuations of the minus part.
fn closed_form_test(form: &SpectralForm, plus: &[usize], m: usize) -> Option<Decision> {
    let d = form.scaled_differences()?;
    let minus: Vec<Valuation> = (0..m).filter(|p| !plus.contains(p)).map(|p| nu2(d[p])).collect();
    let eta = *minus.first()?;
    let ok = minus.iter().all(|v| *v == eta) && plus.iter().all(|&p| nu2(d[p]) > eta);
    Some(if ok { Decision::Yes } else { Decision::No })
}

/// Decides whether PST occurs between `x` and `y`.
pub fn pst_decide(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    cfg: &ToleranceConfig,
) -> Result<PstVerdict> {
    let cert = match check_strong_cospectrality(s, x, y, cfg)? {
        Cospectrality::Strong(c) => c,
        Cospectrality::Refused(r) => return Ok(PstVerdict::no(RefusalReason::NotCospectral(r))),
    };
    let profile = support(s, x, cfg)?;
    let (plus, _) = canonical_split(&profile, &cert);
    let m = profile.len();
    let table = match ratio_condition_with_noise(&profile.eigenvalues, cfg, s.eigen_noise())? {
        RatioOutcome::Periodic(t) => t,
        RatioOutcome::NonPeriodic { eigenvalue, ratio, .. } => {
            let mut v = PstVerdict::no(RefusalReason::NotPeriodic { eigenvalue, ratio });
            v.certificate = Some(cert);
            v.form = Some(SpectralForm::NonPeriodic);
            return Ok(v);
        }
    };
    let form = classify_form(&profile.eigenvalues, cfg);
    let closed_form_decision = if m >= 3 { closed_form_test(&form, &plus, m) } else { None };
    let parity = if m == 2 { Ok(()) } else { parity_condition(&table, &plus) };
    if let Err(case) = parity {
        return Ok(PstVerdict {
            certificate: Some(cert),
            ratio_table: Some(table),
            form: Some(form),
            closed_form_decision,
            ..PstVerdict::no(RefusalReason::ParityConditionFailed(case))
        });
    }
    let q = table.lcm_q()?;
    if plus.contains(&1) && m >= 3 && q % 2 != 0 {
        return Err(PstError::NumericFailure("parity test passed with an odd common denominator".into()));
    }
    let tau = PI * q as f64 / table.gap();
    let phase = Complex64::from_polar(1.0, tau * cert.sigma_plus[0]);
    Ok(PstVerdict {
        decision: Decision::Yes,
        tau_min: Some(tau),
        phase: Some(phase),
        certificate: Some(cert),
        ratio_table: Some(table),
        form: Some(form),
        reason: None,
        closed_form_decision,
    })
}

/// The unique PST partner of a periodic state, with the minimum PST time.
#[derive(Debug, Clone)]
pub struct PartnerResult {
    pub partner: PureState,
    pub tau: f64,
}

/// Constructs the PST partner of `x` when `x` is periodic; `None` otherwise.
pub fn pst_partner(s: &SpectralDecomposition, x: &PureState, cfg: &ToleranceConfig) -> Result<Option<PartnerResult>> {
    let profile = support(s, x, cfg)?;
    if profile.class == SupportClass::Fixed {
        return Err(PstError::InvalidState("a fixed state has no PST partner".into()));
    }
    let m = profile.len();
    let table = match ratio_condition_with_noise(&profile.eigenvalues, cfg, s.eigen_noise())? {
        RatioOutcome::Periodic(t) => t,
        RatioOutcome::NonPeriodic { .. } => return Ok(None),
    };
    let minus: Vec<usize> = if m == 2 {
        vec![1]
    } else if table.entries.iter().all(|e| e.q % 2 == 1) {
        // every p_j odd puts everything but l1 in the minus part; otherwise
        // the minus part is l2 with the odd p_j
        std::iter::once(1).chain(table.entries.iter().filter(|e| e.p % 2 != 0).map(|e| e.position)).collect()
    } else {
        let eta = table.entries.iter().map(|e| nu2(e.q)).max().unwrap();
        table.entries.iter().filter(|e| nu2(e.q) == eta).map(|e| e.position).collect()
    };
    let y = PureState::new(signed_combination(&profile, &minus))?;
    let tau = PI * table.lcm_q()? as f64 / table.gap();
    Ok(Some(PartnerResult { partner: y, tau }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericCheck {
    pub fidelity: f64,
    pub phase_re: f64,
    pub phase_im: f64,
    /// `||U(tau) x - gamma y|| / ||x||`.
    pub residual: f64,
    pub pass: bool,
}

impl NumericCheck {
    pub fn phase(&self) -> Complex64 {
        Complex64::new(self.phase_re, self.phase_im)
    }
}

/// Evolves `x` to `tau` and compares with the best phase multiple of `y`.
pub fn verify_pst_numeric(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    tau: f64,
    cfg: &ToleranceConfig,
) -> Result<NumericCheck> {
    if !(tau > 0.0) {
        return Err(PstError::InvalidRequest("tau must be positive".into()));
    }
    let z = s.evolve(tau, x.vector())?;
    let amp: Complex64 = z.iter().zip(y.vector().iter()).map(|(a, b)| a * b).sum();
    let gamma = if amp.norm() > 0.0 { amp / amp.norm() } else { Complex64::new(1.0, 0.0) };
    let diff = z - y.vector().map(|v| gamma * v);
    let residual = diff.norm() / x.norm();
    let fidelity = amp.norm_sqr() / (x.norm() * x.norm() * y.norm() * y.norm());
    Ok(NumericCheck { fidelity, phase_re: gamma.re, phase_im: gamma.im, residual, pass: residual <= cfg.tol_phase })
}

/// `x = u1 + u2`, `y = u1 - u2` from unit eigenvectors of the extreme
/// eigenvalues; PST at `pi / (lmax - lmin)`.
pub fn universal_pst_pair(s: &SpectralDecomposition) -> Result<(PureState, PureState, f64)> {
    let k = s.eigenvalues().len();
    if k < 2 {
        return Err(PstError::NoPair("matrix has a single eigenvalue".into()));
    }
    let unit_eigvec = |j: usize| {
        let e = s.projector(j);
        let col = (0..s.n()).max_by(|&a, &b| e[(a, a)].total_cmp(&e[(b, b)])).unwrap();
        let v = e.column(col).into_owned();
        &v / v.norm()
    };
    let (u1, u2) = (unit_eigvec(0), unit_eigvec(k - 1));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let x = PureState::new((&u1 + &u2) * r)?;
    let y = PureState::new((&u1 - &u2) * r)?;
    Ok((x, y, PI / (s.eigenvalues()[0] - s.eigenvalues()[k - 1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityScan {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub peak_time: f64,
    pub peak_value: f64,
}

/// Samples the fidelity on a uniform grid of `[0, t_max]` and refines the
/// best sample by golden-section search.
pub fn fidelity_scan(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    t_max: f64,
    steps: usize,
) -> Result<FidelityScan> {
    if steps < 2 || !(t_max > 0.0) {
        return Err(PstError::InvalidRequest("scan needs t_max > 0 and at least two steps".into()));
    }
    let amps = s.amplitudes(x.vector(), y.vector())?;
    let norm = (x.norm() * y.norm()).powi(2);
    let f = |t: f64| {
        let a: Complex64 = amps.iter().zip(s.eigenvalues()).map(|(c, l)| Complex64::from_polar(*c, t * l)).sum();
        a.norm_sqr() / norm
    };
    let dt = t_max / (steps - 1) as f64;
    let times: Vec<f64> = (0..steps).map(|i| i as f64 * dt).collect();
    let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
    let best = (0..steps).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let (mut lo, mut hi) = ((times[best] - dt).max(0.0), (times[best] + dt).min(t_max));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if hi - lo < 1e-13 * t_max.max(1.0) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let mid = (lo + hi) / 2.0;
    let (peak_time, peak_value) =
        [(times[best], values[best]), (mid, f(mid))]
            .into_iter()
            .fold((0.0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    Ok(FidelityScan { times, values, peak_time, peak_value })
}

/// Convenience: standard basis vector.
pub fn basis(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })
}
