//! Eigenvalue supports, strong cospectrality and cospectral partners.

use crate::error::{PstError, Result};
use crate::spectral::{SpectralDecomposition, ToleranceConfig};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// A nonzero real vector standing for the pure state `x x^T / ||x||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: DVector<f64>,
    norm: f64,
}

impl PureState {
    pub fn new(vector: DVector<f64>) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(PstError::InvalidState("state must be a nonzero finite vector".into()));
        }
        Ok(PureState { vector, norm })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }

    pub fn normalized(&self) -> DVector<f64> {
        &self.vector / self.norm
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.vector
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportClass {
    Fixed,
    Size2,
    General,
}

/// The eigenvalues a state is supported on, with its components `E_j x`.
/// Entries are ordered by decreasing eigenvalue.
#[derive(Debug, Clone)]
pub struct SupportProfile {
    pub indices: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub components: Vec<DVector<f64>>,
    pub class: SupportClass,
}

impl SupportProfile {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Squared component norms `||E_j x||^2`.
    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|u| u.norm_squared()).collect()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }
}

pub fn support(s: &SpectralDecomposition, x: &PureState, cfg: &ToleranceConfig) -> Result<SupportProfile> {
    let comps = s.components(x.vector())?;
    let threshold = cfg.tol_supp * x.norm();
    let mut profile =
        SupportProfile { indices: vec![], eigenvalues: vec![], components: vec![], class: SupportClass::General };
    for (j, u) in comps.into_iter().enumerate() {
        if u.norm() > threshold {
            profile.indices.push(j);
            profile.eigenvalues.push(s.eigenvalues()[j]);
            profile.components.push(u);
        }
    }
    profile.class = match profile.len() {
        0 => return Err(PstError::NumericFailure("state has empty eigenvalue support".into())),
        1 => SupportClass::Fixed,
        2 => SupportClass::Size2,
        _ => SupportClass::General,
    };
    Ok(profile)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CospectralityCertificate {
    /// Indices into the decomposition's distinct eigenvalues.
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub sigma_plus: Vec<f64>,
    pub sigma_minus: Vec<f64>,
    /// Largest `||E_j x -+ E_j y||` over the support.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CospectralRefusal {
    /// A fixed state cannot be strongly cospectral with another state.
    FixedState,
    /// `E_j x` differs from both `E_j y` and `-E_j y`.
    SignMismatch { eigenvalue: f64 },
    /// The sign could not be decided with the required margin.
    Ambiguous { eigenvalue: f64 },
}

impl CospectralRefusal {
    pub fn describe(&self) -> String {
        match self {
            CospectralRefusal::FixedState => "fixed state cannot be strongly cospectral".into(),
            CospectralRefusal::SignMismatch { eigenvalue } => {
                format!("E_j x is not +-E_j y at eigenvalue {eigenvalue}")
            }
            CospectralRefusal::Ambiguous { eigenvalue } => {
                format!("sign of E_j y relative to E_j x is ambiguous at eigenvalue {eigenvalue}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cospectrality {
    Strong(CospectralityCertificate),
    Refused(CospectralRefusal),
}

/// Checks the preconditions shared by all pair operations: equal norms
/// (to 1e-10 relative) and `y != +-x`.
pub fn validate_pair(x: &PureState, y: &PureState) -> Result<()> {
    if x.len() != y.len() {
        return Err(PstError::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if (x.norm() - y.norm()).abs() > 1e-10 * x.norm() {
        return Err(PstError::InvalidPair(format!("norms differ: {} vs {}", x.norm(), y.norm())));
    }
    let (xv, yv) = (x.vector(), y.vector());
    if (xv - yv).norm() <= 1e-10 * x.norm() || (xv + yv).norm() <= 1e-10 * x.norm() {
        return Err(PstError::InvalidPair("y equals x up to sign".into()));
    }
    Ok(())
}

pub fn check_strong_cospectrality(
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    cfg: &ToleranceConfig,
) -> Result<Cospectrality> {
    validate_pair(x, y)?;
    let sx = support(s, x, cfg)?;
    if sx.class == SupportClass::Fixed {
        return Ok(Cospectrality::Refused(CospectralRefusal::FixedState));
    }
    let tol = cfg.tol_supp * x.norm();
    let ex = s.components(x.vector())?;
    let ey = s.components(y.vector())?;
    let mut cert = CospectralityCertificate {
        plus: vec![],
        minus: vec![],
        sigma_plus: vec![],
        sigma_minus: vec![],
        residual: 0.0,
    };
    for (j, (a, b)) in ex.iter().zip(&ey).enumerate() {
        let lambda = s.eigenvalues()[j];
        let in_x = sx.contains(j);
        if !in_x {
            if b.norm() > tol {
                return Ok(Cospectrality::Refused(CospectralRefusal::SignMismatch { eigenvalue: lambda }));
            }
            continue;
        }
        let minus_gap = (a - b).norm();
        let plus_gap = (a + b).norm();
        let (winner, loser, same_sign) =
            if minus_gap <= plus_gap { (minus_gap, plus_gap, true) } else { (plus_gap, minus_gap, false) };
        if winner > tol {
            return Ok(Cospectrality::Refused(CospectralRefusal::SignMismatch { eigenvalue: lambda }));
        }
        if loser <= 10.0 * tol {
            return Ok(Cospectrality::Refused(CospectralRefusal::Ambiguous { eigenvalue: lambda }));
        }
        cert.residual = cert.residual.max(winner);
        if same_sign {
            cert.plus.push(j);
            cert.sigma_plus.push(lambda);
        } else {
            cert.minus.push(j);
            cert.sigma_minus.push(lambda);
        }
    }
    Ok(Cospectrality::Strong(cert))
}

/// A strongly cospectral partner `sum_{plus} u_j - sum_{minus} u_j`.
#[derive(Debug, Clone)]
pub struct Partner {
    pub state: PureState,
    /// Positions within the support profile assigned the plus sign.
    pub plus_positions: Vec<usize>,
    pub minus_positions: Vec<usize>,
}

/// Builds `sum_{plus} u_j - sum_{minus} u_j` from a support profile.
pub fn signed_combination(profile: &SupportProfile, minus_positions: &[usize]) -> DVector<f64> {
    profile.components.iter().enumerate().fold(DVector::zeros(profile.components[0].len()), |acc, (i, u)| {
        if minus_positions.contains(&i) {
            acc - u
        } else {
            acc + u
        }
    })
}

/// All `2^(m-1) - 1` strongly cospectral partners of `x`, with the largest
/// support eigenvalue always in the plus part.
pub fn enumerate_partners(s: &SpectralDecomposition, x: &PureState, cfg: &ToleranceConfig) -> Result<Vec<Partner>> {
    let profile = support(s, x, cfg)?;
    let m = profile.len();
    if profile.class == SupportClass::Fixed {
        return Err(PstError::InvalidState("fixed state has no cospectral partners".into()));
    }
    if m > 20 {
        return Err(PstError::TooManyPartitions(m));
    }
    let mut out = Vec::with_capacity((1usize << (m - 1)) - 1);
    for mask in 1u32..(1u32 << (m - 1)) {
        let minus: Vec<usize> = (1..m).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let plus: Vec<usize> = (0..m).filter(|i| !minus.contains(i)).collect();
        let v = signed_combination(&profile, &minus);
        out.push(Partner { state: PureState::new(v)?, plus_positions: plus, minus_positions: minus });
    }
    Ok(out)
}

/// `x^T M^k x`, computed as `sum_j lambda_j^k ||E_j x||^2`.
pub fn moment(s: &SpectralDecomposition, x: &DVector<f64>, k: u32) -> Result<f64> {
    Ok(s.components(x)?.iter().zip(s.eigenvalues()).map(|(u, l)| l.powi(k as i32) * u.norm_squared()).sum())
}

/// Whether `x^T M^k x = y^T M^k y` for `k = 0..=k_max`, within
/// `1e-8 * max(1, scale)^k` relative to `||x||^2`.
pub fn moment_check(s: &SpectralDecomposition, x: &PureState, y: &PureState, k_max: u32) -> Result<bool> {
    let base = s.scale().max(1.0);
    for k in 0..=k_max {
        let (a, b) = (moment(s, x.vector(), k)?, moment(s, y.vector(), k)?);
        if (a - b).abs() > 1e-8 * base.powi(k as i32) * x.norm().powi(2) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(P v)[perm[i]] = v[i]`.
pub fn permute(perm: &[usize], v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for (i, &p) in perm.iter().enumerate() {
        out[p] = v[i];
    }
    out
}

fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(PstError::InvalidAutomorphism(format!("length {} for {n} vertices", perm.len())));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(PstError::InvalidAutomorphism("not a permutation".into()));
        }
    }
    Ok(())
}

/// For an automorphism `P` and strongly cospectral `x, y`: reports whether
/// `P y = y` implies `P x = x`.
pub fn automorphism_fix_check(
    perm: &[usize],
    s: &SpectralDecomposition,
    x: &PureState,
    y: &PureState,
    cfg: &ToleranceConfig,
) -> Result<bool> {
    let n = s.n();
    validate_permutation(perm, n)?;
    let m = s.reconstruct();
    let tol = cfg.proj_threshold(n) * s.scale().max(1.0);
    for i in 0..n {
        for j in 0..n {
            if (m[(perm[i], perm[j])] - m[(i, j)]).abs() > tol {
                return Err(PstError::InvalidAutomorphism(format!("entry ({i},{j}) is not preserved")));
            }
        }
    }
    if !matches!(check_strong_cospectrality(s, x, y, cfg)?, Cospectrality::Strong(_)) {
        return Err(PstError::InvalidPair("states are not strongly cospectral".into()));
    }
    let fixes = |v: &DVector<f64>| (permute(perm, v) - v).norm() <= 1e-8 * v.norm();
    Ok(!fixes(y.vector()) || fixes(x.vector()))
}

/// `Q = sum_{plus} E_j - sum_{minus} E_j`, extended by the identity off the
/// support, i.e. `Q = I - 2 sum_{minus} E_j`.
pub fn involution(s: &SpectralDecomposition, cert: &CospectralityCertificate) -> DMatrix<f64> {
    cert.minus.iter().fold(DMatrix::identity(s.n(), s.n()), |q, &j| q - s.projector(j) * 2.0)
}
