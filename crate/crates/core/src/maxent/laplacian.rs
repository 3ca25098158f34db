use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{Edge, GammaVector};
use crate::error::{Error, Result};

/// Lower clamp applied to marginals.
const MARGINAL_FLOOR: f64 = 1e-12;

pub(crate) fn is_connected(n: usize, edges: impl IntoIterator<Item = Edge>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut components = n;
    for (u, v) in edges {
        let (ru, rv) = (root(&mut parent, u), root(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components <= 1
}

/// Cholesky factor of the weighted Laplacian with the last vertex grounded.
pub(crate) struct GroundedLaplacian {
    n: usize,
    chol: Option<Cholesky<f64, Dyn>>,
}

impl GroundedLaplacian {
    /// `edges` may contain parallel edges; self-loops are ignored.
    pub(crate) fn new(n: usize, edges: &[Edge], weights: &[f64]) -> Result<Self> {
        if n == 1 {
            return Ok(Self { n, chol: None });
        }
        let m = n - 1;
        let mut lap = DMatrix::<f64>::zeros(m, m);
        for (&(u, v), &w) in edges.iter().zip(weights) {
            if u == v {
                continue;
            }
            if u < m {
                lap[(u, u)] += w;
            }
            if v < m {
                lap[(v, v)] += w;
            }
            if u < m && v < m {
                lap[(u, v)] -= w;
                lap[(v, u)] -= w;
            }
        }
        let chol = Cholesky::new(lap).ok_or(Error::SingularLaplacian)?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        if !(lo > 0.0) || lo / hi < 1e-9 {
            return Err(Error::SingularLaplacian);
        }
        Ok(Self { n, chol: Some(chol) })
    }

    /// `det` of the grounded Laplacian, i.e. the weighted tree count.
    pub(crate) fn determinant(&self) -> f64 {
        match &self.chol {
            None => 1.0,
            Some(c) => c.l_dirty().diagonal().iter().map(|d| d * d).product(),
        }
    }

    /// Inverse of the grounded Laplacian, padded with a zero row and column
    /// for the grounded vertex.
    pub(crate) fn padded_inverse(&self) -> DMatrix<f64> {
        let mut full = DMatrix::<f64>::zeros(self.n, self.n);
        if let Some(c) = &self.chol {
            let inv = c.inverse();
            full.view_mut((0, 0), (self.n - 1, self.n - 1)).copy_from(&inv);
        }
        full
    }

    /// Effective resistance between `u` and `v`.
    pub(crate) fn resistance(&self, u: usize, v: usize) -> f64 {
        let Some(c) = &self.chol else { return 0.0 };
        let m = self.n - 1;
        let mut b = DVector::<f64>::zeros(m);
        if u < m {
            b[u] += 1.0;
        }
        if v < m {
            b[v] -= 1.0;
        }
        let x = c.solve(&b);
        let xu = if u < m { x[u] } else { 0.0 };
        let xv = if v < m { x[v] } else { 0.0 };
        xu - xv
    }
}

/// `Pr[e ∈ T]` for every edge of `gamma` under `p(T) ∝ Π_{e∈T} λ_e`, via
/// `q_e = λ_e · R_eff(e)`.
pub fn tree_marginals(gamma: &GammaVector) -> Result<Vec<f64>> {
    let n = gamma.n;
    if !is_connected(n, gamma.edges.iter().copied()) {
        return Err(Error::Disconnected);
    }
    let lambdas = gamma.scaled_lambdas();
    let lap = GroundedLaplacian::new(n, &gamma.edges, &lambdas)?;
    let inv = lap.padded_inverse();
    Ok(gamma
        .edges
        .iter()
        .zip(&lambdas)
        .map(|(&(u, v), &l)| {
            let r = inv[(u, u)] + inv[(v, v)] - 2.0 * inv[(u, v)];
            (l * r).clamp(MARGINAL_FLOOR, 1.0)
        })
        .collect())
}

/// Weighted matrix-tree count `Σ_T Π_{e∈T} λ_e`.
pub fn weighted_tree_count(n: usize, edges: &[Edge], lambdas: &[f64]) -> Result<f64> {
    if !is_connected(n, edges.iter().copied()) {
        return Err(Error::Disconnected);
    }
    Ok(GroundedLaplacian::new(n, edges, lambdas)?.determinant())
}
