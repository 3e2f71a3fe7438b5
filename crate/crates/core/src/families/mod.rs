//! Closed-form spectra and PST characterizations for complete graphs,
//! cycles, paths and complete bipartite graphs, with samplers that draw
//! valid instances and exhaustive pair/plus state catalogs.

mod bipartite;
mod catalog;
mod complete;
mod cycle;
mod path;

pub use bipartite::{complete_bipartite_pst, BipartiteOutcome};
pub use catalog::{catalog_brute_force, pair_plus_catalog, Catalog, CatalogEntry, CatalogFamily, SPair};
pub use complete::{complete_graph_pst, CompleteOutcome};
pub use cycle::{cycle_eigenbasis, cycle_pst_families};
pub use path::{path_adj_eigenbasis, path_lap_eigenbasis, path_least_time, path_pst_families};

use crate::error::Result;
use crate::graph::HamiltonianKind;
use crate::pst::{pst_partner, verify_pst_numeric};
use crate::spectral::{decompose_matrix, ToleranceConfig};
use crate::state::PureState;
use crate::symbolic::render_time;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

/// Eigenvalue-matching tolerance for the exact closed-form spectra.
const EIGEN_MATCH: f64 = 1e-9;
/// Free coefficients that must be nonzero are drawn outside this ball.
const NONZERO_MARGIN: f64 = 1e-3;

/// An eigenvalue with an orthonormal basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub eigenvalue: f64,
    pub vectors: Vec<DVector<f64>>,
}

/// Closed-form eigenbasis grouped by distinct eigenvalue, in descending
/// eigenvalue order.
#[derive(Debug, Clone)]
pub struct ClosedBasis {
    pub n: usize,
    pub spaces: Vec<Eigenspace>,
}

impl ClosedBasis {
    fn from_pairs(n: usize, mut pairs: Vec<(f64, DVector<f64>)>) -> Self {
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut spaces: Vec<Eigenspace> = Vec::new();
        for (l, v) in pairs {
            match spaces.last_mut() {
                Some(s) if (s.eigenvalue - l).abs() <= EIGEN_MATCH => s.vectors.push(v),
                _ => spaces.push(Eigenspace { eigenvalue: l, vectors: vec![v] }),
            }
        }
        ClosedBasis { n, spaces }
    }

    /// All basis vectors as matrix columns, in space order.
    pub fn matrix(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.spaces.iter().flat_map(|s| s.vectors.iter().cloned()).collect();
        DMatrix::from_columns(&cols)
    }

    /// `max ||M v - lambda v||` over the basis.
    pub fn residual(&self, m: &DMatrix<f64>) -> f64 {
        self.spaces
            .iter()
            .flat_map(|s| s.vectors.iter().map(move |v| (m * v - v * s.eigenvalue).amax()))
            .fold(0.0, f64::max)
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = self.matrix();
        (v.transpose() * &v - DMatrix::identity(self.n, self.n)).amax()
    }

    /// Projection of `x` onto each eigenspace.
    pub fn project(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        self.spaces.iter().map(|s| s.vectors.iter().fold(DVector::zeros(self.n), |acc, v| acc + v * v.dot(x))).collect()
    }
}

/// Extra constraint a family puts on which components are present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportRule {
    /// Every component is present.
    All,
    /// At least three eigenvalues, with both even and odd integers present.
    MixedParity,
}

/// One term of a family: a coefficient times a unit vector in one
/// eigenspace, carried into `y` with sign `y_sign`.
#[derive(Debug, Clone)]
pub struct Component {
    pub name: &'static str,
    pub eigenvalue: f64,
    pub vectors: Vec<DVector<f64>>,
    pub y_sign: f64,
    pub required: bool,
}

/// A parametrized PST family `x(params) -> y(params)` with a fixed minimum
/// PST time.
#[derive(Debug, Clone)]
pub struct ParamFamily {
    pub label: String,
    pub n: usize,
    pub tau: f64,
    pub components: Vec<Component>,
    pub rule: SupportRule,
}

/// A concrete PST pair drawn from a family.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub label: String,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub tau: f64,
}

fn rule_holds(rule: SupportRule, eigenvalues: &[f64]) -> bool {
    match rule {
        SupportRule::All => true,
        SupportRule::MixedParity => {
            let parity = |l: &f64| (l.round() as i64).rem_euclid(2);
            eigenvalues.len() >= 3
                && eigenvalues.iter().any(|l| parity(l) == 0)
                && eigenvalues.iter().any(|l| parity(l) == 1)
        }
    }
}

fn draw_nonzero(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let c: f64 = rng.random_range(-1.0..=1.0);
        if c.abs() > NONZERO_MARGIN {
            return c;
        }
    }
}

fn draw_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > NONZERO_MARGIN {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

impl ParamFamily {
    /// Builds `(x, y)` from one coefficient and one unit direction per
    /// component; zero coefficients drop the component.
    pub fn instantiate(&self, coefficients: &[f64], directions: &[Vec<f64>]) -> FamilyInstance {
        let mut x = DVector::zeros(self.n);
        let mut y = DVector::zeros(self.n);
        for ((c, coef), dir) in self.components.iter().zip(coefficients).zip(directions) {
            let u = c.vectors.iter().zip(dir).fold(DVector::zeros(self.n), |acc, (v, a)| acc + v * *a);
            x += &u * *coef;
            y += &u * (*coef * c.y_sign);
        }
        FamilyInstance { label: self.label.clone(), x, y, tau: self.tau }
    }

    /// Draws a valid instance: nonzero coefficients on required components,
    /// optional components kept with probability one half, unit-normalized.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> FamilyInstance {
        loop {
            let keep: Vec<bool> = self.components.iter().map(|c| c.required || rng.random_bool(0.5)).collect();
            let present: Vec<f64> =
                self.components.iter().zip(&keep).filter(|(_, k)| **k).map(|(c, _)| c.eigenvalue).collect();
            if present.len() < 3 || !rule_holds(self.rule, &present) {
                continue;
            }
            let coefficients: Vec<f64> = keep.iter().map(|k| if *k { draw_nonzero(rng) } else { 0.0 }).collect();
            let directions: Vec<Vec<f64>> =
                self.components.iter().map(|c| draw_direction(rng, c.vectors.len())).collect();
            let mut inst = self.instantiate(&coefficients, &directions);
            let norm = inst.x.norm();
            inst.x /= norm;
            inst.y /= norm;
            return inst;
        }
    }

    /// Whether a support (as a set of eigenvalues) is one this family
    /// describes.
    pub fn matches(&self, support: &[f64]) -> bool {
        let known = |l: &f64| self.components.iter().any(|c| (c.eigenvalue - l).abs() <= EIGEN_MATCH);
        let has = |c: &Component| support.iter().any(|l| (c.eigenvalue - l).abs() <= EIGEN_MATCH);
        support.len() >= 3
            && support.iter().all(known)
            && self.components.iter().filter(|c| c.required).all(has)
            && rule_holds(self.rule, support)
    }

    fn sign_of(&self, eigenvalue: f64) -> f64 {
        self.components.iter().find(|c| (c.eigenvalue - eigenvalue).abs() <= EIGEN_MATCH).map_or(1.0, |c| c.y_sign)
    }
}

/// Partner and time predicted by a list of families for `x`, using the
/// closed-form basis: size-2 supports always transfer, larger supports
/// transfer exactly when some family matches.
pub fn predict_partner(
    basis: &ClosedBasis,
    families: &[ParamFamily],
    x: &DVector<f64>,
    tol: f64,
) -> Option<(DVector<f64>, f64)> {
    let parts = basis.project(x);
    let present: Vec<usize> = (0..parts.len()).filter(|&j| parts[j].norm() > tol * x.norm()).collect();
    let support: Vec<f64> = present.iter().map(|&j| basis.spaces[j].eigenvalue).collect();
    match support.len() {
        0 | 1 => None,
        2 => {
            let y = &parts[present[0]] - &parts[present[1]];
            Some((y, std::f64::consts::PI / (support[0] - support[1])))
        }
        _ => {
            let fam = families.iter().find(|f| f.matches(&support))?;
            let y = present
                .iter()
                .fold(DVector::zeros(basis.n), |acc, &j| acc + &parts[j] * fam.sign_of(basis.spaces[j].eigenvalue));
            Some((y, fam.tau))
        }
    }
}

/// Outcome of comparing family predictions with the decision procedure on
/// random states.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepReport {
    pub states: usize,
    pub predicted_yes: usize,
    pub agreements: usize,
    pub disagreements: Vec<String>,
}

/// Draws `count` random states supported on random unions of eigenspaces
/// of `m` and checks that `pst_partner` finds a partner exactly when the
/// families predict one, with the same partner (up to sign) and time.
pub fn family_sweep(
    m: &DMatrix<f64>,
    basis: &ClosedBasis,
    families: &[ParamFamily],
    count: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<SweepReport> {
    let s = decompose_matrix(m, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = basis.spaces.len();
    let mut report = SweepReport::default();
    while report.states < count {
        let pick: Vec<usize> = match rng.random_range(0..3) {
            0 => {
                let a = rng.random_range(0..k);
                let b = rng.random_range(0..k);
                let mut v = vec![a, b];
                v.dedup();
                v
            }
            1 => (0..k).filter(|_| rng.random_bool(0.5)).collect(),
            _ => {
                let fam = &families.get(rng.random_range(0..families.len().max(1)));
                match fam {
                    Some(f) => f
                        .components
                        .iter()
                        .filter(|c| c.required || rng.random_bool(0.5))
                        .filter_map(|c| {
                            basis.spaces.iter().position(|sp| (sp.eigenvalue - c.eigenvalue).abs() <= EIGEN_MATCH)
                        })
                        .collect(),
                    None => (0..k).filter(|_| rng.random_bool(0.5)).collect(),
                }
            }
        };
        if pick.len() < 2 {
            continue;
        }
        let x = pick.iter().fold(DVector::zeros(basis.n), |acc, &j| {
            let dir = draw_direction(&mut rng, basis.spaces[j].vectors.len());
            let c = draw_nonzero(&mut rng);
            acc + basis.spaces[j].vectors.iter().zip(&dir).fold(DVector::zeros(basis.n), |a, (v, d)| a + v * (*d * c))
        });
        let x = &x / x.norm();
        report.states += 1;
        let predicted = predict_partner(basis, families, &x, 1e-12);
        let xs = PureState::new(x.clone())?;
        let found = pst_partner(&s, &xs, cfg)?;
        let agree = match (&predicted, &found) {
            (None, None) => true,
            (Some((y, tau)), Some(r)) => {
                let d = (r.partner.vector() - y).amax().min((r.partner.vector() + y).amax());
                d <= 1e-7 && (r.tau - tau).abs() <= 1e-9 * tau
            }
            _ => false,
        };
        if predicted.is_some() {
            report.predicted_yes += 1;
        }
        if agree {
            report.agreements += 1;
        } else {
            report.disagreements.push(format!(
                "support {:?}: predicted {:?}, found {:?}",
                pick.iter().map(|&j| basis.spaces[j].eigenvalue).collect::<Vec<_>>(),
                predicted.as_ref().map(|p| p.1),
                found.as_ref().map(|r| r.tau)
            ));
        }
    }
    Ok(report)
}

/// The families a report can describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyName {
    CompleteGraph,
    Cycle,
    PathAdj,
    PathLap,
    CompleteBipartiteAdj,
    CompleteBipartiteLap,
}

impl FamilyName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "complete" => FamilyName::CompleteGraph,
            "cycle" => FamilyName::Cycle,
            "path-adj" => FamilyName::PathAdj,
            "path-lap" => FamilyName::PathLap,
            "complete-bipartite-adj" => FamilyName::CompleteBipartiteAdj,
            "complete-bipartite-lap" => FamilyName::CompleteBipartiteLap,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportedPair {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub tau: f64,
    pub tau_symbolic: Option<String>,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub family: FamilyName,
    pub parameters: Vec<usize>,
    pub pst_pairs: Vec<ReportedPair>,
    pub pair_plus_catalog: Option<Catalog>,
}

impl FamilyReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!(self)
    }
}

/// One sampled instance per parametrized family (or the closed-form pair
/// for complete and complete bipartite graphs), each verified numerically,
/// plus the pair/plus catalog when the graph is small enough.
pub fn family_report(family: FamilyName, params: &[usize], seed: u64, cfg: &ToleranceConfig) -> Result<FamilyReport> {
    use crate::error::PstError;
    use crate::graph::{build_complete, build_complete_bipartite, build_cycle, build_path, hamiltonian};
    let need = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(PstError::InvalidRequest(format!("family expects {k} size parameter(s)")))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (graph, kind, instances, cat) = match family {
        FamilyName::CompleteGraph | FamilyName::CompleteBipartiteAdj | FamilyName::CompleteBipartiteLap => {
            let (g, kind, split) = match family {
                FamilyName::CompleteGraph => {
                    need(1)?;
                    (build_complete(params[0])?, HamiltonianKind::Adjacency, None)
                }
                FamilyName::CompleteBipartiteAdj => {
                    need(2)?;
                    (
                        build_complete_bipartite(params[0], params[1])?,
                        HamiltonianKind::Adjacency,
                        Some((params[0], params[1])),
                    )
                }
                _ => {
                    need(2)?;
                    (
                        build_complete_bipartite(params[0], params[1])?,
                        HamiltonianKind::Laplacian,
                        Some((params[0], params[1])),
                    )
                }
            };
            let mut inst = Vec::new();
            for _ in 0..100 {
                let x = DVector::from_fn(g.n(), |_, _| rng.random_range(-1.0..=1.0));
                let x = &x / x.norm();
                let found = match split {
                    None => match complete_graph_pst(&x)? {
                        CompleteOutcome::Transfer { y, tau } => Some((y, tau)),
                        CompleteOutcome::Fixed => None,
                    },
                    Some((m, n)) => match complete_bipartite_pst(m, n, kind, &x)? {
                        BipartiteOutcome::Transfer { y, tau, .. } => Some((y, tau)),
                        BipartiteOutcome::Refused(_) => None,
                    },
                };
                if let Some((y, tau)) = found {
                    inst.push(FamilyInstance { label: "closed-form".into(), x, y, tau });
                    break;
                }
            }
            let cat = match split {
                None => CatalogFamily::Complete(params[0]),
                Some((m, n)) => CatalogFamily::CompleteBipartite(m, n),
            };
            (g, kind, inst, cat)
        }
        FamilyName::Cycle => {
            need(1)?;
            let fams = cycle_pst_families(params[0])?;
            let inst = fams.iter().map(|f| f.sample(&mut rng)).collect();
            (build_cycle(params[0])?, HamiltonianKind::Adjacency, inst, CatalogFamily::Cycle(params[0]))
        }
        FamilyName::PathAdj | FamilyName::PathLap => {
            need(1)?;
            let kind =
                if family == FamilyName::PathAdj { HamiltonianKind::Adjacency } else { HamiltonianKind::Laplacian };
            let fams = path_pst_families(params[0], kind)?;
            let inst = fams.iter().map(|f| f.sample(&mut rng)).collect();
            (build_path(params[0])?, kind, inst, CatalogFamily::Path(params[0]))
        }
    };
    let h = hamiltonian(&graph, kind)?;
    let s = decompose_matrix(&h.matrix, cfg)?;
    let mut pairs = Vec::new();
    for inst in instances {
        let check =
            verify_pst_numeric(&s, &PureState::new(inst.x.clone())?, &PureState::new(inst.y.clone())?, inst.tau, cfg)?;
        pairs.push(ReportedPair {
            label: inst.label,
            x: inst.x.iter().copied().collect(),
            y: inst.y.iter().copied().collect(),
            tau: inst.tau,
            tau_symbolic: render_time(inst.tau),
            fidelity: check.fidelity,
        });
    }
    let catalog = if graph.n() <= catalog::CATALOG_GUARD {
        Some(pair_plus_catalog(cat, kind, cfg, crate::par::Execution::default())?)
    } else {
        None
    };
    Ok(FamilyReport { family, parameters: params.to_vec(), pst_pairs: pairs, pair_plus_catalog: catalog })
}
