//! Weighted simple graphs, standard builders, products, joins and the
//! Hamiltonians they generate.

use crate::error::{PstError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Weighted simple undirected graph on vertices `0..n`.
///
/// Edges are stored canonically as `(u, v, w)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and non-positive weights.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (u, v, w) in edges {
            let bad = |reason: &str| PstError::InvalidEdge { u, v, reason: reason.into() };
            if u >= n || v >= n {
                return Err(bad("endpoint out of range"));
            }
            if u == v {
                return Err(bad("self-loop"));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(bad("weight must be positive and finite"));
            }
            let key = (u.min(v), u.max(v));
            if map.insert(key, w).is_some() {
                return Err(bad("duplicate edge"));
            }
        }
        Ok(Graph { n, edges: map.into_iter().map(|((u, v), w)| (u, v, w)).collect() })
    }

    fn unit(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Graph::new(n, edges.into_iter().map(|(u, v)| (u, v, 1.0))).expect("builder produced an invalid edge")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search_by(|e| (e.0, e.1).cmp(&key)).is_ok()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Weighted degrees.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(u, v, w) in &self.edges {
            d[u] += w;
            d[v] += w;
        }
        d
    }

    /// Returns the common weighted degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<f64> {
        let d = self.degrees();
        let first = *d.first()?;
        d.iter().all(|x| (x - first).abs() <= 1e-12 * first.abs().max(1.0)).then_some(first)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            a[(u, v)] = w;
            a[(v, u)] = w;
        }
        a
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        for (i, d) in self.degrees().into_iter().enumerate() {
            l[(i, i)] = d;
        }
        l
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        bfs_distances(&self.neighbors(), &[0]).iter().all(Option::is_some)
    }

    /// Bitmask encoding of an unweighted graph on at most 11 vertices,
    /// used to order exhaustive searches.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let pairs = vertex_pairs(n);
        Graph::unit(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| *p))
    }

    pub fn complement(&self) -> Graph {
        Graph::unit(self.n, vertex_pairs(self.n).into_iter().filter(|&(u, v)| !self.has_edge(u, v)))
    }
}

/// All pairs `(u, v)` with `u < v` in lexicographic order.
pub fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn bfs_distances(adj: &[Vec<usize>], sources: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(PstError::InvalidSize(msg()))
    }
}

/// Path on `n` vertices; vertex `j` in 1-based labelling is index `j - 1`.
pub fn build_path(n: usize) -> Result<Graph> {
    require(n >= 1, || "path needs at least one vertex".into())?;
    Ok(Graph::unit(n, (1..n).map(|j| (j - 1, j))))
}

pub fn build_cycle(n: usize) -> Result<Graph> {
    require(n >= 3, || format!("cycle needs n >= 3, got {n}"))?;
    Ok(Graph::unit(n, (0..n).map(|j| (j, (j + 1) % n))))
}

pub fn build_complete(n: usize) -> Result<Graph> {
    require(n >= 1, || "complete graph needs n >= 1".into())?;
    Ok(Graph::unit(n, vertex_pairs(n)))
}

/// `K_{m,n}` with the first part on indices `0..m`.
pub fn build_complete_bipartite(m: usize, n: usize) -> Result<Graph> {
    require(m >= 1 && n >= 1, || format!("complete bipartite needs positive parts, got ({m}, {n})"))?;
    Ok(Graph::unit(m + n, (0..m).flat_map(|u| (m..m + n).map(move |v| (u, v)))))
}

/// Edgeless graph `O_n`.
pub fn build_empty(n: usize) -> Result<Graph> {
    require(n >= 1, || "empty graph needs n >= 1".into())?;
    Ok(Graph::unit(n, []))
}

pub fn build_hypercube(d: u32) -> Result<Graph> {
    require((1..=12).contains(&d), || format!("hypercube dimension must be in 1..=12, got {d}"))?;
    let n = 1usize << d;
    Ok(Graph::unit(n, (0..n).flat_map(|u| (0..d).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v))))
}

/// Cartesian product; vertex `(g, h)` is index `g * |V(H)| + h`.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Graph {
    let nh = h.n;
    let mut edges = Vec::with_capacity(g.num_edges() * nh + h.num_edges() * g.n);
    for &(a, b, w) in &g.edges {
        edges.extend((0..nh).map(|x| (a * nh + x, b * nh + x, w)));
    }
    for &(a, b, w) in &h.edges {
        edges.extend((0..g.n).map(|x| (x * nh + a, x * nh + b, w)));
    }
    Graph::new(g.n * nh, edges).expect("product of valid graphs is valid")
}

/// Join: `G` on indices `0..|G|`, `H` after it, all cross edges of weight one.
pub fn join(g: &Graph, h: &Graph) -> Graph {
    let m = g.n;
    let mut edges = g.edges.clone();
    edges.extend(h.edges.iter().map(|&(u, v, w)| (u + m, v + m, w)));
    edges.extend((0..m).flat_map(|u| (0..h.n).map(move |v| (u, m + v, 1.0))));
    Graph::new(m + h.n, edges).expect("join of valid graphs is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HamiltonianKind {
    Adjacency,
    Laplacian,
    Custom,
}

/// A real symmetric matrix generating the walk, with the graph it came from
/// when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub kind: HamiltonianKind,
    pub matrix: DMatrix<f64>,
    pub graph: Option<Graph>,
}

impl Hamiltonian {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Dense symmetric matrix with no graph attached.
    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&matrix)?;
        Ok(Hamiltonian { kind: HamiltonianKind::Custom, matrix, graph: None })
    }

    /// Largest absolute row sum.
    pub fn scale(&self) -> f64 {
        inf_norm(&self.matrix)
    }
}

pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(PstError::PatternMismatch("matrix is not square".into()));
    }
    for i in 0..m.nrows() {
        for j in 0..i {
            if m[(i, j)] != m[(j, i)] {
                return Err(PstError::PatternMismatch(format!("entries ({i},{j}) and ({j},{i}) differ")));
            }
        }
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(PstError::PatternMismatch("matrix has non-finite entries".into()));
    }
    Ok(())
}

pub fn hamiltonian(g: &Graph, kind: HamiltonianKind) -> Result<Hamiltonian> {
    let matrix = match kind {
        HamiltonianKind::Adjacency => g.adjacency(),
        HamiltonianKind::Laplacian => g.laplacian(),
        HamiltonianKind::Custom => {
            return Err(PstError::InvalidRequest("custom Hamiltonians are built with load_custom".into()))
        }
    };
    Ok(Hamiltonian { kind, matrix, graph: Some(g.clone()) })
}

/// Custom Hamiltonian whose off-diagonal zero pattern must match `g` exactly.
pub fn load_custom(matrix: DMatrix<f64>, g: &Graph) -> Result<Hamiltonian> {
    if matrix.nrows() != g.n {
        return Err(PstError::DimensionMismatch { expected: g.n, got: matrix.nrows() });
    }
    check_symmetric(&matrix)?;
    for i in 0..g.n {
        for j in i + 1..g.n {
            if (matrix[(i, j)] != 0.0) != g.has_edge(i, j) {
                return Err(PstError::PatternMismatch(format!(
                    "entry ({i},{j}) is {} but the edge is {}",
                    matrix[(i, j)],
                    if g.has_edge(i, j) { "present" } else { "absent" }
                )));
            }
        }
    }
    Ok(Hamiltonian { kind: HamiltonianKind::Custom, matrix, graph: Some(g.clone()) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoveringRadius {
    Finite(usize),
    Infinite,
}

/// Largest distance from a vertex to the support of `x`, where `u` is in
/// the support when `|x_u| > tol_supp * ||x||`.
pub fn covering_radius(g: &Graph, x: &DVector<f64>, tol_supp: f64) -> Result<CoveringRadius> {
    if x.len() != g.n {
        return Err(PstError::DimensionMismatch { expected: g.n, got: x.len() });
    }
    let norm = x.norm();
    if !(norm > 0.0) {
        return Err(PstError::InvalidState("zero vector has no support".into()));
    }
    let support: Vec<usize> = (0..g.n).filter(|&u| x[u].abs() > tol_supp * norm).collect();
    let dist = bfs_distances(&g.neighbors(), &support);
    Ok(dist
        .iter()
        .try_fold(0usize, |acc, d| d.map(|d| acc.max(d)))
        .map_or(CoveringRadius::Infinite, CoveringRadius::Finite))
}

/// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
pub fn build_petersen() -> Graph {
    let mut e: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    e.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
    e.extend((0..5).map(|i| (i, i + 5)));
    Graph::unit(10, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let (m, n) = (a.nrows(), b.nrows());
        a.kronecker(&DMatrix::identity(n, n)) + DMatrix::identity(m, m).kronecker(b)
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::new(3, [(1, 1, 1.0)]), Err(PstError::InvalidEdge { .. })));
        assert!(matches!(Graph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]), Err(PstError::InvalidEdge { .. })));
        assert!(matches!(Graph::new(3, [(0, 1, 0.0)]), Err(PstError::InvalidEdge { .. })));
        assert!(matches!(Graph::new(3, [(0, 1, -1.0)]), Err(PstError::InvalidEdge { .. })));
    }

    #[test]
    fn builders() {
        assert_eq!(build_path(1).unwrap().num_edges(), 0);
        assert_eq!(build_path(3).unwrap().edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert!(build_path(0).is_err());
        assert!(build_cycle(2).is_err());
        assert_eq!(build_cycle(3).unwrap(), build_complete(3).unwrap());
        assert_eq!(build_cycle(8).unwrap().regular_degree(), Some(2.0));
        assert_eq!(build_complete(4).unwrap().num_edges(), 6);
        assert_eq!(build_complete_bipartite(2, 4).unwrap().num_edges(), 8);
        assert!(build_complete_bipartite(0, 4).is_err());
        let q3 = build_hypercube(3).unwrap();
        assert_eq!((q3.n(), q3.num_edges(), q3.regular_degree()), (8, 12, Some(3.0)));
        assert!(build_hypercube(0).is_err());
        assert_eq!(build_petersen().regular_degree(), Some(3.0));
    }

    #[test]
    fn products_and_joins() {
        let k2 = build_complete(2).unwrap();
        let c4 = build_cycle(4).unwrap();
        let sq = cartesian_product(&k2, &k2);
        // relabel: (0,0)=0,(0,1)=1,(1,0)=2,(1,1)=3 gives the cycle 0-1-3-2
        assert_eq!(sq.num_edges(), 4);
        assert_eq!(sq.regular_degree(), Some(2.0));
        assert!(sq.has_edge(0, 1) && sq.has_edge(1, 3) && sq.has_edge(3, 2) && sq.has_edge(2, 0));
        let p = cartesian_product(&build_path(2).unwrap(), &build_path(3).unwrap());
        assert_eq!((p.n(), p.num_edges()), (6, 7));
        let q = cartesian_product(&build_hypercube(2).unwrap(), &build_cycle(8).unwrap());
        assert_eq!((q.n(), q.regular_degree()), (32, Some(4.0)));

        let o1 = build_empty(1).unwrap();
        assert_eq!(join(&o1, &o1), k2);
        let o2 = build_empty(2).unwrap();
        assert_eq!(join(&o2, &o2), build_complete_bipartite(2, 2).unwrap());
        assert_eq!(join(&o2, &o2).regular_degree(), c4.regular_degree());
        let split = join(&build_empty(3).unwrap(), &k2);
        assert_eq!((split.n(), split.num_edges()), (5, 7));
        let split = join(&build_complete(3).unwrap(), &build_empty(2).unwrap());
        assert_eq!((split.n(), split.num_edges()), (5, 9));
    }

    #[test]
    fn kronecker_sum_is_exact() {
        let g = build_path(3).unwrap();
        let h = Graph::new(3, [(0, 1, 0.5), (1, 2, 2.25)]).unwrap();
        let gh = cartesian_product(&g, &h);
        assert_eq!(gh.adjacency(), kron_sum(&g.adjacency(), &h.adjacency()));
        assert_eq!(gh.laplacian(), kron_sum(&g.laplacian(), &h.laplacian()));
    }

    #[test]
    fn hamiltonians() {
        let a = hamiltonian(&build_complete(3).unwrap(), HamiltonianKind::Adjacency).unwrap().matrix;
        assert_eq!(a, DMatrix::from_element(3, 3, 1.0) - DMatrix::identity(3, 3));
        let l = hamiltonian(&build_path(3).unwrap(), HamiltonianKind::Laplacian).unwrap().matrix;
        assert_eq!(l.diagonal().as_slice(), &[1.0, 2.0, 1.0]);
        assert!(l.row_iter().all(|r| r.sum() == 0.0));
    }

    #[test]
    fn custom_pattern() {
        let g = build_path(3).unwrap();
        let mut m = g.adjacency();
        m[(0, 1)] = -2.0;
        m[(1, 0)] = -2.0;
        m[(2, 2)] = 5.0;
        assert!(load_custom(m.clone(), &g).is_ok());
        m[(0, 2)] = 1.0;
        m[(2, 0)] = 1.0;
        assert!(matches!(load_custom(m.clone(), &g), Err(PstError::PatternMismatch(_))));
        m[(2, 0)] = 0.0;
        assert!(matches!(load_custom(m, &g), Err(PstError::PatternMismatch(_))));
    }

    #[test]
    fn covering_radii() {
        let p5 = build_path(5).unwrap();
        let ones = DVector::from_element(5, 1.0);
        assert_eq!(covering_radius(&p5, &ones, 1e-8).unwrap(), CoveringRadius::Finite(0));
        let e0 = DVector::from_fn(5, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert_eq!(covering_radius(&p5, &e0, 1e-8).unwrap(), CoveringRadius::Finite(4));
        let pet = build_petersen();
        let x = DVector::from_fn(10, |i, _| match i {
            0 => 1.0,
            1 => -1.0,
            _ => 0.0,
        });
        assert_eq!(covering_radius(&pet, &x, 1e-8).unwrap(), CoveringRadius::Finite(2));
        let two = Graph::new(2, []).unwrap();
        let e = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(covering_radius(&two, &e, 1e-8).unwrap(), CoveringRadius::Infinite);
        assert!(!two.is_connected());
        assert!(p5.is_connected());
    }

    #[test]
    fn edge_masks() {
        let g = Graph::from_edge_mask(4, 0b111111);
        assert_eq!(g, build_complete(4).unwrap());
        assert_eq!(g.complement().num_edges(), 0);
    }
}
