use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::laplacian::{is_connected, GroundedLaplacian};
use super::{Edge, GammaVector, SpanningTree};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }
}

/// Draws one λ-random tree, returning indices into `gamma.edges`.
///
/// Edges are decided in index order. The probability that edge `e` joins
/// the tree given the earlier decisions is its marginal in the graph where
/// accepted edges are contracted and rejected ones deleted.
pub(crate) fn sample_tree_indices(gamma: &GammaVector, seed: u64) -> Result<Vec<usize>> {
    let n = gamma.n;
    if !is_connected(n, gamma.edges.iter().copied()) {
        return Err(Error::Disconnected);
    }
    let lambdas = gamma.scaled_lambdas();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dsu = Dsu((0..n).collect());
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    let mut label = vec![usize::MAX; n];

    for (i, &(u, v)) in gamma.edges.iter().enumerate() {
        if chosen.len() + 1 == n {
            break;
        }
        let (ru, rv) = (dsu.find(u), dsu.find(v));
        if ru == rv {
            continue;
        }
        // Relabel components 0..c.
        label.iter_mut().for_each(|l| *l = usize::MAX);
        let mut c = 0;
        for w in 0..n {
            let r = dsu.find(w);
            if label[r] == usize::MAX {
                label[r] = c;
                c += 1;
            }
        }
        let mut cedges: Vec<Edge> = Vec::with_capacity(gamma.edges.len() - i);
        let mut cweights = Vec::with_capacity(gamma.edges.len() - i);
        for (j, &(a, b)) in gamma.edges.iter().enumerate().skip(i) {
            let (la, lb) = (label[dsu.find(a)], label[dsu.find(b)]);
            if la != lb {
                cedges.push((la, lb));
                cweights.push(lambdas[j]);
            }
        }
        if !is_connected(c, cedges.iter().copied()) {
            return Err(Error::InvalidParameter(
                "contraction left the remaining graph disconnected".into(),
            ));
        }
        let lap = GroundedLaplacian::new(c, &cedges, &cweights)?;
        let q = lambdas[i] * lap.resistance(label[ru], label[rv]);
        let draw: f64 = rng.gen();
        if q >= 1.0 - 1e-12 || draw < q {
            dsu.0[ru] = rv;
            chosen.push(i);
        }
    }
    if chosen.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "sampler produced {} edges for {n} vertices",
            chosen.len()
        )));
    }
    Ok(chosen)
}

fn build_tree(gamma: &GammaVector, idx: &[usize], costs: &[f64]) -> Result<SpanningTree> {
    let edges = idx.iter().map(|&i| gamma.edges[i]).collect();
    let cost = idx.iter().map(|&i| costs[i]).sum();
    SpanningTree::new(gamma.n, edges, cost)
}

/// One tree drawn with probability proportional to `Π_{e∈T} λ_e`, priced
/// with `gamma.edge_cost`.
pub fn sample_tree(gamma: &GammaVector, seed: u64) -> Result<SpanningTree> {
    let idx = sample_tree_indices(gamma, seed)?;
    build_tree(gamma, &idx, &gamma.edge_cost)
}

/// Cheapest of `count` independent samples. Sample `i` uses the seed
/// `derive_seed(seed, "tree-sample", i)`; ties go to the lower index.
pub fn sample_best_of(
    gamma: &GammaVector,
    count: usize,
    edge_costs: &[f64],
    seed: u64,
) -> Result<SpanningTree> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if edge_costs.len() != gamma.edges.len() {
        return Err(Error::InvalidParameter("one cost per edge required".into()));
    }
    let trees: Vec<SpanningTree> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let idx = sample_tree_indices(gamma, derive_seed(seed, "tree-sample", i))?;
            build_tree(gamma, &idx, edge_costs)
        })
        .collect::<Result<_>>()?;
    Ok(trees
        .into_iter()
        .reduce(|best, t| if t.cost < best.cost { t } else { best })
        .expect("count >= 1"))
}

/// Seed used for sample `i` of [`sample_best_of`].
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, "tree-sample", i as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(lambdas: &[f64]) -> GammaVector {
        GammaVector::from_lambdas(3, vec![(0, 1), (1, 2), (0, 2)], lambdas)
    }

    #[test]
    fn triangle_yields_two_edges() {
        for seed in 0..20 {
            let t = sample_tree(&triangle(&[1.0; 3]), seed).unwrap();
            assert_eq!(t.edges.len(), 2);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let g = triangle(&[1.0, 1.0, 2.0]);
        assert_eq!(sample_tree(&g, 9).unwrap(), sample_tree(&g, 9).unwrap());
    }

    #[test]
    fn best_of_one_equals_single_sample() {
        let g = triangle(&[1.0, 1.0, 2.0]).with_costs(vec![1.0, 2.0, 3.0]);
        let best = sample_best_of(&g, 1, &g.edge_cost, 4).unwrap();
        assert_eq!(best, sample_tree(&g, sample_seed(4, 0)).unwrap());
    }

    #[test]
    fn best_of_is_minimum() {
        let costs = vec![1.0, 2.0, 3.0];
        let g = triangle(&[1.0, 1.0, 2.0]).with_costs(costs.clone());
        let best = sample_best_of(&g, 5, &costs, 17).unwrap();
        for i in 0..5 {
            let t = sample_tree(&g, sample_seed(17, i)).unwrap();
            assert!(best.cost <= t.cost);
        }
    }

    #[test]
    fn zero_count_rejected() {
        let g = triangle(&[1.0; 3]);
        assert!(sample_best_of(&g, 0, &[0.0; 3], 1).is_err());
    }
}
