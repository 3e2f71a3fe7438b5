use crate::error::{PstError, Result};
use crate::graph::{
    build_complete, build_complete_bipartite, build_cycle, build_path, hamiltonian, Graph, HamiltonianKind,
};
use crate::par::{self, Execution};
use crate::pst::{pst_decide, pst_partner};
use crate::spectral::{decompose, ToleranceConfig};
use crate::state::{support, PureState, SupportClass};
use crate::symbolic::render_time;
use nalgebra::DVector;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest graph the exhaustive catalogs accept.
pub const CATALOG_GUARD: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogFamily {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    CompleteBipartite(usize, usize),
}

impl CatalogFamily {
    pub fn graph(&self) -> Result<Graph> {
        match *self {
            CatalogFamily::Path(n) => build_path(n),
            CatalogFamily::Cycle(n) => build_cycle(n),
            CatalogFamily::Complete(n) => build_complete(n),
            CatalogFamily::CompleteBipartite(m, n) => build_complete_bipartite(m, n),
        }
    }
}

/// The state `e_u + s e_v` with `u < v` and `s = +-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SPair {
    pub u: usize,
    pub v: usize,
    pub s: i8,
}

impl SPair {
    pub fn vector(&self, n: usize) -> DVector<f64> {
        let mut x = DVector::zeros(n);
        x[self.u] = 1.0;
        x[self.v] = self.s as f64;
        x
    }

    /// Recognizes `y` as a multiple of an s-pair state.
    fn recognize(y: &DVector<f64>) -> Option<SPair> {
        let y = y / y.norm();
        let big: Vec<usize> = (0..y.len()).filter(|&i| y[i].abs() > 0.5).collect();
        if big.len() != 2 {
            return None;
        }
        let ok = (0..y.len()).all(|i| {
            let target = if big.contains(&i) { FRAC_1_SQRT_2 } else { 0.0 };
            (y[i].abs() - target).abs() <= 1e-8
        });
        let s = if y[big[0]] * y[big[1]] > 0.0 { 1 } else { -1 };
        ok.then_some(SPair { u: big[0], v: big[1], s })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub x: SPair,
    pub y: SPair,
    pub tau: f64,
    pub tau_symbolic: Option<String>,
}

/// Every PST pair among pair states (`s = -1`) and among plus states
/// (`s = +1`), each unordered pair listed once with `x < y`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Catalog {
    pub pair: Vec<CatalogEntry>,
    pub plus: Vec<CatalogEntry>,
}

impl Catalog {
    /// Vertex counts of the listed pair and plus transfers are nonempty.
    pub fn has_pair(&self) -> bool {
        !self.pair.is_empty()
    }

    pub fn has_plus(&self) -> bool {
        !self.plus.is_empty()
    }

    fn from_entries(mut entries: Vec<CatalogEntry>) -> Self {
        entries.sort_by_key(|a| (a.x, a.y));
        let (pair, plus) = entries.into_iter().partition(|e| e.x.s < 0);
        Catalog { pair, plus }
    }
}

fn states(n: usize) -> Vec<SPair> {
    let mut out = Vec::new();
    for s in [-1i8, 1] {
        for u in 0..n {
            for v in u + 1..n {
                out.push(SPair { u, v, s });
            }
        }
    }
    out
}

fn entry(x: SPair, y: SPair, tau: f64) -> CatalogEntry {
    CatalogEntry { x, y, tau, tau_symbolic: render_time(tau) }
}

fn setup(
    family: CatalogFamily,
    kind: HamiltonianKind,
    cfg: &ToleranceConfig,
) -> Result<(usize, crate::spectral::SpectralDecomposition)> {
    let g = family.graph()?;
    if g.n() > CATALOG_GUARD {
        return Err(PstError::TooLarge(format!("catalogs are limited to {CATALOG_GUARD} vertices, got {}", g.n())));
    }
    Ok((g.n(), decompose(&hamiltonian(&g, kind)?, cfg)?))
}

/// Builds the catalog from the unique PST partner of each s-pair state.
pub fn pair_plus_catalog(
    family: CatalogFamily,
    kind: HamiltonianKind,
    cfg: &ToleranceConfig,
    exec: Execution,
) -> Result<Catalog> {
    let (n, s) = setup(family, kind, cfg)?;
    let found = par::map(exec, &states(n), |&x| -> Result<Option<CatalogEntry>> {
        let xs = PureState::new(x.vector(n))?;
        if support(&s, &xs, cfg)?.class == SupportClass::Fixed {
            return Ok(None);
        }
        Ok(pst_partner(&s, &xs, cfg)?
            .and_then(|r| SPair::recognize(r.partner.vector()).map(|y| (y, r.tau)))
            .filter(|(y, _)| y.s == x.s && x < *y)
            .map(|(y, tau)| entry(x, y, tau)))
    });
    Ok(Catalog::from_entries(found.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect()))
}

/// The same catalog by running the decision procedure on every pair of
/// s-pair states with equal sign.
pub fn catalog_brute_force(
    family: CatalogFamily,
    kind: HamiltonianKind,
    cfg: &ToleranceConfig,
    exec: Execution,
) -> Result<Catalog> {
    let (n, s) = setup(family, kind, cfg)?;
    let all = states(n);
    let rows = par::map(exec, &all, |&x| -> Result<Vec<CatalogEntry>> {
        let xs = PureState::new(x.vector(n))?;
        let mut out = Vec::new();
        for &y in all.iter().filter(|y| y.s == x.s && x < **y) {
            let v = pst_decide(&s, &xs, &PureState::new(y.vector(n))?, cfg)?;
            if let Some(tau) = v.tau_min.filter(|_| v.is_yes()) {
                out.push(entry(x, y, tau));
            }
        }
        Ok(out)
    });
    Ok(Catalog::from_entries(rows.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect()))
}
