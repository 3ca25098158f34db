//! Maximum-entropy spanning-tree distributions.
//!
//! The Held-Karp point is symmetrized and scaled into the spanning-tree
//! polytope, an exponential family `p(T) ∝ Π λ_e` is fitted so that edge
//! marginals stay below `(1 + ε) z_e`, and trees are drawn from it.

mod fit;
mod laplacian;
mod sample;

pub use fit::{fit_gamma, GammaFit, FIT_STEP_CAP};
pub use laplacian::{tree_marginals, weighted_tree_count};
pub use sample::{sample_best_of, sample_seed, sample_tree};

use serde::{Deserialize, Serialize};

use crate::held_karp::FractionalArcVector;
use crate::model::Instance;

/// Edges with `z_e` below this are dropped from the support.
pub const Z_SUPPORT_TOL: f64 = 1e-9;

/// Undirected edge `{u, v}` stored with `u < v`.
pub type Edge = (usize, usize);

/// `z*` over the undirected support, with per-edge costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricEdgeVector {
    pub n: usize,
    pub edges: Vec<Edge>,
    pub z: Vec<f64>,
    pub edge_cost: Vec<f64>,
}

impl SymmetricEdgeVector {
    pub fn total(&self) -> f64 {
        self.z.iter().sum()
    }

    /// `z(δ(U))` for the membership vector `inside`.
    pub fn cut_value(&self, inside: &[bool]) -> f64 {
        self.edges
            .iter()
            .zip(&self.z)
            .filter(|(&(u, v), _)| inside[u] != inside[v])
            .map(|(_, z)| z)
            .sum()
    }

    /// `Σ_e c(e) z_e`.
    pub fn cost(&self) -> f64 {
        self.z.iter().zip(&self.edge_cost).map(|(z, c)| z * c).sum()
    }

    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        let key = (e.0.min(e.1), e.0.max(e.1));
        self.edges.binary_search(&key).ok()
    }
}

/// Log-domain edge weights; `λ_e = exp(γ_e)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaVector {
    pub n: usize,
    pub edges: Vec<Edge>,
    pub gammas: Vec<f64>,
    /// Costs used to price sampled trees. Zero unless supplied.
    pub edge_cost: Vec<f64>,
}

impl GammaVector {
    pub fn new(n: usize, edges: Vec<Edge>, gammas: Vec<f64>) -> Self {
        assert_eq!(edges.len(), gammas.len());
        let edge_cost = vec![0.0; edges.len()];
        Self {
            n,
            edges,
            gammas,
            edge_cost,
        }
    }

    /// Builds weights from `λ` directly.
    pub fn from_lambdas(n: usize, edges: Vec<Edge>, lambdas: &[f64]) -> Self {
        let gammas = lambdas.iter().map(|l| l.ln()).collect();
        Self::new(n, edges, gammas)
    }

    pub fn with_costs(mut self, edge_cost: Vec<f64>) -> Self {
        assert_eq!(edge_cost.len(), self.edges.len());
        self.edge_cost = edge_cost;
        self
    }

    /// `λ_e / max λ`, which keeps every weight in `(0, 1]`.
    pub(crate) fn scaled_lambdas(&self) -> Vec<f64> {
        let top = self.gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.gammas.iter().map(|g| (g - top).exp()).collect()
    }
}

/// A spanning tree over the vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanningTree {
    /// Sorted edges with `u < v`.
    pub edges: Vec<Edge>,
    pub cost: f64,
}

impl SpanningTree {
    /// Validates that `edges` form a spanning tree on `n` vertices.
    pub fn new(n: usize, mut edges: Vec<Edge>, cost: f64) -> crate::Result<Self> {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        if edges.len() + 1 != n {
            return Err(crate::Error::InvalidParameter(format!(
                "tree on {n} vertices needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &(u, v) in &edges {
            if u == v || v >= n {
                return Err(crate::Error::InvalidParameter(format!("bad edge ({u}, {v})")));
            }
            let (ru, rv) = (root(&mut parent, u), root(&mut parent, v));
            if ru == rv {
                return Err(crate::Error::InvalidParameter(format!(
                    "edge ({u}, {v}) closes a cycle"
                )));
            }
            parent[ru] = rv;
        }
        Ok(Self { edges, cost })
    }

    /// `|T ∩ δ(U)|`.
    pub fn cut_load(&self, inside: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| inside[u] != inside[v])
            .count()
    }
}

/// `z_{u,v} = (n-1)/n (x_uv + x_vu)`, with edge cost the cheaper of the two
/// arcs present in the support of `x`.
pub fn symmetrize(x: &FractionalArcVector, inst: &Instance) -> SymmetricEdgeVector {
    let n = x.n();
    let scale = (n as f64 - 1.0) / n as f64;
    let mut edges = Vec::new();
    let mut z = Vec::new();
    let mut edge_cost = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let ze = scale * (x.get(u, v) + x.get(v, u));
            let forward = x.in_support(u, v);
            let backward = x.in_support(v, u);
            if ze < Z_SUPPORT_TOL || !(forward || backward) {
                continue;
            }
            let c = match (forward, backward) {
                (true, true) => inst.cost(u, v).min(inst.cost(v, u)),
                (true, false) => inst.cost(u, v),
                _ => inst.cost(v, u),
            };
            edges.push((u, v));
            z.push(ze);
            edge_cost.push(c);
        }
    }
    SymmetricEdgeVector {
        n,
        edges,
        z,
        edge_cost,
    }
}
