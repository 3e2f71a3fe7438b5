//! Spectral decomposition into distinct eigenvalues with eigenprojectors,
//! and the walk operator `U(t) = sum_j exp(i t lambda_j) E_j`.

use crate::error::{PstError, Result};
use crate::graph::{inf_norm, Hamiltonian};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Numerical tolerances. `tol_group` is relative to `max(1, scale)` and
/// `tol_proj` is per dimension; the rest are used as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub tol_group: f64,
    pub tol_supp: f64,
    pub tol_proj: f64,
    pub tol_phase: f64,
    pub q_max: i64,
    pub int_tol: f64,
    /// Floor for accepting a rational reconstruction of an eigenvalue ratio.
    pub tol_ratio: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            tol_group: 1e-8,
            tol_supp: 1e-8,
            tol_proj: 1e-9,
            tol_phase: 1e-8,
            q_max: 10_000,
            int_tol: 1e-6,
            tol_ratio: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn group_threshold(&self, scale: f64) -> f64 {
        self.tol_group * scale.max(1.0)
    }

    pub fn proj_threshold(&self, n: usize) -> f64 {
        self.tol_proj * n.max(1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.tol_group, self.tol_supp, self.tol_proj, self.tol_phase, self.int_tol, self.tol_ratio]
            .iter()
            .all(|t| *t > 0.0 && t.is_finite())
            && self.q_max > 0;
        if ok {
            Ok(())
        } else {
            Err(PstError::InvalidRequest("tolerances must be strictly positive".into()))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    eigenvalues: Vec<f64>,
    projectors: Vec<DMatrix<f64>>,
    multiplicities: Vec<usize>,
    scale: f64,
    group_threshold: f64,
    eigen_noise: f64,
    warnings: Vec<String>,
}

/// Eigendecomposition grouped by single linkage on the sorted spectrum.
pub fn decompose(h: &Hamiltonian, cfg: &ToleranceConfig) -> Result<SpectralDecomposition> {
    decompose_matrix(&h.matrix, cfg)
}

pub fn decompose_matrix(m: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    if n == 0 || !m.is_square() {
        return Err(PstError::InvalidSize("decomposition needs a non-empty square matrix".into()));
    }
    let scale = inf_norm(m);
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or_else(|| PstError::NumericFailure("symmetric eigensolver did not converge".into()))?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(PstError::NumericFailure("eigensolver returned non-finite values".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let threshold = cfg.group_threshold(scale);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[*c.last().unwrap()] - eig.eigenvalues[i] <= threshold => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut spread: f64 = 0.0;
    for c in &clusters {
        let vals: Vec<f64> = c.iter().map(|&i| eig.eigenvalues[i]).collect();
        eigenvalues.push(vals.iter().sum::<f64>() / vals.len() as f64);
        spread = spread.max(vals[0] - vals[vals.len() - 1]);
        let v = DMatrix::from_columns(&c.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
        projectors.push(&v * v.transpose());
    }
    let warnings = eigenvalues
        .windows(2)
        .filter(|w| w[0] - w[1] < 2.0 * threshold)
        .map(|w| format!("eigenvalues {} and {} are closer than twice the grouping tolerance", w[0], w[1]))
        .collect();
    let eigen_noise = (spread / 2.0).max(4.0 * n as f64 * f64::EPSILON * scale.max(1.0));
    Ok(SpectralDecomposition {
        n,
        multiplicities: clusters.iter().map(Vec::len).collect(),
        eigenvalues,
        projectors,
        scale,
        group_threshold: threshold,
        eigen_noise,
        warnings,
    })
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct eigenvalues, strictly decreasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[DMatrix<f64>] {
        &self.projectors
    }

    pub fn projector(&self, j: usize) -> &DMatrix<f64> {
        &self.projectors[j]
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn group_threshold(&self) -> f64 {
        self.group_threshold
    }

    /// Estimated absolute error of the computed eigenvalues.
    pub fn eigen_noise(&self) -> f64 {
        self.eigen_noise
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Index of the distinct eigenvalue within the grouping threshold of `lambda`.
    pub fn index_of(&self, lambda: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|&l| (l - lambda).abs() <= self.group_threshold)
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() == self.n {
            Ok(())
        } else {
            Err(PstError::DimensionMismatch { expected: self.n, got: x.len() })
        }
    }

    /// `E_j x` for every distinct eigenvalue.
    pub fn components(&self, x: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        self.check_dim(x)?;
        Ok(self.projectors.iter().map(|e| e * x).collect())
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.eigenvalues.iter().zip(&self.projectors).fold(DMatrix::zeros(self.n, self.n), |acc, (l, e)| acc + e * *l)
    }

    /// `U(t) x`.
    pub fn evolve(&self, t: f64, x: &DVector<f64>) -> Result<DVector<Complex64>> {
        let comps = self.components(x)?;
        let mut out = DVector::from_element(self.n, Complex64::new(0.0, 0.0));
        for (l, u) in self.eigenvalues.iter().zip(&comps) {
            let phase = Complex64::from_polar(1.0, t * l);
            out.iter_mut().zip(u.iter()).for_each(|(o, v)| *o += phase * v);
        }
        Ok(out)
    }

    /// Applies `U(t)` to a complex vector.
    pub fn evolve_complex(&self, t: f64, z: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if z.len() != self.n {
            return Err(PstError::DimensionMismatch { expected: self.n, got: z.len() });
        }
        let re = z.map(|c| c.re);
        let im = z.map(|c| c.im);
        let a = self.evolve(t, &re)?;
        let b = self.evolve(t, &im)?;
        Ok(a + b * Complex64::i())
    }

    pub fn transition_matrix(&self, t: f64) -> DMatrix<Complex64> {
        let mut u = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
        for (l, e) in self.eigenvalues.iter().zip(&self.projectors) {
            let phase = Complex64::from_polar(1.0, t * l);
            u.iter_mut().zip(e.iter()).for_each(|(o, v)| *o += phase * v);
        }
        u
    }

    /// `|y^T U(t) x|^2 / (||x||^2 ||y||^2)`.
    pub fn fidelity(&self, t: f64, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_dim(y)?;
        let (nx, ny) = (x.norm(), y.norm());
        if !(nx > 0.0 && ny > 0.0) {
            return Err(PstError::InvalidState("fidelity needs nonzero states".into()));
        }
        let ux = self.evolve(t, x)?;
        let amp: Complex64 = ux.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        Ok(amp.norm_sqr() / (nx * nx * ny * ny))
    }

    /// Transition amplitudes `c_j = y^T E_j x`, so that
    /// `y^T U(t) x = sum_j c_j exp(i t lambda_j)`.
    pub fn amplitudes(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        Ok(self.components(x)?.iter().map(|u| u.dot(y)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn adj(g: &Graph) -> SpectralDecomposition {
        decompose(&hamiltonian(g, HamiltonianKind::Adjacency).unwrap(), &ToleranceConfig::default()).unwrap()
    }

    fn e(n: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn complete_graph_spectrum() {
        let s = adj(&build_complete(4).unwrap());
        assert_eq!(s.eigenvalues().len(), 2);
        assert_abs_diff_eq!(s.eigenvalues()[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalues()[1], -1.0, epsilon = 1e-12);
        assert_eq!(s.multiplicities(), &[1, 3]);
        assert!(s.warnings().is_empty());
    }

    #[test]
    fn cycle_spectrum() {
        let s = adj(&build_cycle(8).unwrap());
        let expected = [2.0, 2f64.sqrt(), 0.0, -(2f64.sqrt()), -2.0];
        assert_eq!(s.eigenvalues().len(), 5);
        for (a, b) in s.eigenvalues().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert_eq!(s.multiplicities(), &[1, 2, 2, 2, 1]);
    }

    #[test]
    fn path_laplacian_spectrum() {
        let h = hamiltonian(&build_path(3).unwrap(), HamiltonianKind::Laplacian).unwrap();
        let s = decompose(&h, &ToleranceConfig::default()).unwrap();
        for (a, b) in s.eigenvalues().iter().zip([3.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn k2_evolution() {
        let s = adj(&build_complete(2).unwrap());
        let z = s.evolve(PI / 2.0, &e(2, 0)).unwrap();
        assert_abs_diff_eq!(z[0].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z[1].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z[1].im, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.fidelity(PI / 2.0, &e(2, 0), &e(2, 1)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.fidelity(PI / 4.0, &e(2, 0), &e(2, 1)).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.fidelity(0.0, &e(2, 0), &e(2, 0)).unwrap(), 1.0, epsilon = 1e-12);
        let z0 = s.evolve(0.0, &e(2, 1)).unwrap();
        assert_abs_diff_eq!(z0[1].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fixed_state_only_picks_up_a_phase() {
        let s = adj(&build_complete(3).unwrap());
        let ones = DVector::from_element(3, 1.0);
        for t in [0.3, 1.7, 4.0] {
            let z = s.evolve(t, &ones).unwrap();
            let phase = Complex64::from_polar(1.0, 2.0 * t);
            for c in z.iter() {
                assert_abs_diff_eq!((c - phase).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_state_fidelity_is_an_error() {
        let s = adj(&build_complete(2).unwrap());
        assert!(matches!(s.fidelity(1.0, &DVector::zeros(2), &e(2, 0)), Err(PstError::InvalidState(_))));
    }

    #[test]
    fn close_clusters_are_flagged() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0 + 3e-8, 2.0]));
        let s = decompose_matrix(&m, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.eigenvalues().len(), 3);
        assert!(!s.warnings().is_empty());
    }
}
