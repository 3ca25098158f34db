//! Exact solvers and enumerators used to validate the approximation
//! pipelines on small instances. None of this is on the solving path.

use crate::error::{Error, Result};
use crate::model::{Instance, SpanningPath, Tour};

/// Largest instance the subset dynamic programs accept.
pub const MAX_ORACLE_N: usize = 18;

/// Largest graph accepted by [`enumerate_spanning_trees`].
pub const MAX_TREE_ENUM_N: usize = 10;

fn check_oracle_n(n: usize) -> Result<()> {
    if !(2..=MAX_ORACLE_N).contains(&n) {
        return Err(Error::SizeOutOfRange {
            n,
            min: 2,
            max: MAX_ORACLE_N,
        });
    }
    Ok(())
}

/// Relative slack for "equal to the optimum" during tour reconstruction.
fn near(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * (1.0 + b.abs())
}

/// Minimum-cost Hamiltonian cycle by dynamic programming over subsets.
///
/// The tour starts at vertex 0. Among optimal tours the lexicographically
/// smallest order is returned.
pub fn exact_atsp(inst: &Instance) -> Result<Tour> {
    let n = inst.n();
    check_oracle_n(n)?;
    // Vertices 1..n map to bits 0..n-1. `g[mask][v]` is the cheapest way to
    // start at v (already visited, bit set in mask), visit every vertex
    // outside mask and return to 0.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let idx = |mask: usize, v: usize| mask * m + (v - 1);
    let mut g = vec![f64::INFINITY; (full + 1) * m];
    for v in 1..n {
        g[idx(full, v)] = inst.cost(v, 0);
    }
    for mask in (1..full).rev() {
        for v in 1..n {
            if mask & (1 << (v - 1)) == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            for w in 1..n {
                let bit = 1 << (w - 1);
                if mask & bit == 0 {
                    let c = inst.cost(v, w) + g[idx(mask | bit, w)];
                    if c < best {
                        best = c;
                    }
                }
            }
            g[idx(mask, v)] = best;
        }
    }
    let start_cost = |w: usize| inst.cost(0, w) + g[idx(1 << (w - 1), w)];
    let opt = (1..n).map(start_cost).fold(f64::INFINITY, f64::min);

    let mut order = vec![0];
    let mut mask = 0usize;
    let mut cur = 0usize;
    let mut remaining = opt;
    for _ in 1..n {
        let mut chosen = None;
        for w in 1..n {
            let bit = 1 << (w - 1);
            if mask & bit != 0 {
                continue;
            }
            let c = inst.cost(cur, w) + g[idx(mask | bit, w)];
            if near(c, remaining) {
                chosen = Some((w, remaining - inst.cost(cur, w)));
                break;
            }
        }
        let (w, rest) = chosen.expect("DP reconstruction always finds a successor");
        order.push(w);
        mask |= 1 << (w - 1);
        cur = w;
        remaining = rest;
    }
    Tour::from_order(inst, order)
}

/// Minimum-cost Hamiltonian path from `s` to `t`.
pub fn exact_atspp(inst: &Instance, s: usize, t: usize) -> Result<SpanningPath> {
    let n = inst.n();
    check_oracle_n(n)?;
    if s >= n || t >= n {
        return Err(Error::InvalidParameter(format!(
            "endpoints ({s}, {t}) out of range"
        )));
    }
    if s == t {
        return Err(Error::InvalidParameter("path endpoints must differ".into()));
    }
    if n == 2 {
        return SpanningPath::simple(inst, vec![s, t]);
    }
    // Interior vertices (all except s and t) are numbered 0..m.
    let interior: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let m = interior.len();
    let full = (1usize << m) - 1;
    let idx = |mask: usize, i: usize| mask * m + i;
    // g[mask][i]: at interior[i], mask visited; cheapest completion to t.
    let mut g = vec![f64::INFINITY; (full + 1) * m];
    for i in 0..m {
        g[idx(full, i)] = inst.cost(interior[i], t);
    }
    for mask in (1..full).rev() {
        for i in 0..m {
            if mask & (1 << i) == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            for j in 0..m {
                if mask & (1 << j) == 0 {
                    let c = inst.cost(interior[i], interior[j]) + g[idx(mask | (1 << j), j)];
                    if c < best {
                        best = c;
                    }
                }
            }
            g[idx(mask, i)] = best;
        }
    }
    let opt = (0..m)
        .map(|j| inst.cost(s, interior[j]) + g[idx(1 << j, j)])
        .fold(f64::INFINITY, f64::min);

    let mut order = vec![s];
    let mut mask = 0usize;
    let mut cur = s;
    let mut remaining = opt;
    for _ in 0..m {
        // Lexicographic on vertex ids: interior is sorted ascending.
        let mut chosen = None;
        for j in 0..m {
            if mask & (1 << j) != 0 {
                continue;
            }
            let c = inst.cost(cur, interior[j]) + g[idx(mask | (1 << j), j)];
            if near(c, remaining) {
                chosen = Some((j, remaining - inst.cost(cur, interior[j])));
                break;
            }
        }
        let (j, rest) = chosen.expect("DP reconstruction always finds a successor");
        order.push(interior[j]);
        mask |= 1 << j;
        cur = interior[j];
        remaining = rest;
    }
    order.push(t);
    SpanningPath::simple(inst, order)
}

/// Bitmask of a vertex subset.
pub type CutMask = u32;

/// All cuts of the complete graph on `n` vertices, each listed once.
///
/// Of a subset and its complement the smaller side is emitted; on a tie the
/// side containing vertex 0 is emitted. Yields `2^(n-1) - 1` masks in
/// increasing numeric order.
pub fn enumerate_cuts(n: usize) -> Result<impl Iterator<Item = CutMask>> {
    check_oracle_n(n)?;
    let all: CutMask = (1 << n) - 1;
    Ok((1..all).filter(move |&mask| {
        let size = mask.count_ones() as usize;
        2 * size < n || (2 * size == n && mask & 1 == 1)
    }))
}

pub fn mask_to_vertices(mask: CutMask, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask & (1 << v) != 0).collect()
}

/// A spanning tree together with the product of its edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    /// Indices into the edge list handed to [`enumerate_spanning_trees`].
    pub edges: Vec<usize>,
    pub weight: f64,
}

/// Every spanning tree of the graph `(n, edges)` with its product of
/// `weights`. Trees are emitted in lexicographic order of edge indices.
pub fn enumerate_spanning_trees(
    n: usize,
    edges: &[(usize, usize)],
    weights: &[f64],
) -> Result<Vec<WeightedTree>> {
    if !(1..=MAX_TREE_ENUM_N).contains(&n) {
        return Err(Error::SizeOutOfRange {
            n,
            min: 1,
            max: MAX_TREE_ENUM_N,
        });
    }
    if edges.len() != weights.len() {
        return Err(Error::InvalidParameter(
            "edge and weight lists differ in length".into(),
        ));
    }
    if !connected(n, edges) {
        return Err(Error::Disconnected);
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    let mut parent: Vec<usize> = (0..n).collect();
    extend_trees(n, edges, weights, 0, &mut chosen, &mut parent, &mut out);
    Ok(out)
}

fn find(parent: &[usize], mut v: usize) -> usize {
    while parent[v] != v {
        v = parent[v];
    }
    v
}

fn extend_trees(
    n: usize,
    edges: &[(usize, usize)],
    weights: &[f64],
    next: usize,
    chosen: &mut Vec<usize>,
    parent: &mut Vec<usize>,
    out: &mut Vec<WeightedTree>,
) {
    if chosen.len() == n - 1 {
        let weight = chosen.iter().map(|&e| weights[e]).product();
        out.push(WeightedTree {
            edges: chosen.clone(),
            weight,
        });
        return;
    }
    if edges.len() - next < n - 1 - chosen.len() {
        return;
    }
    let (u, v) = edges[next];
    let (ru, rv) = (find(parent, u), find(parent, v));
    if ru != rv {
        // No path compression, so undoing the union is a single reset.
        parent[ru] = rv;
        chosen.push(next);
        extend_trees(n, edges, weights, next + 1, chosen, parent, out);
        chosen.pop();
        parent[ru] = ru;
    }
    extend_trees(n, edges, weights, next + 1, chosen, parent, out);
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut components = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&parent, u), find(&parent, v));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn k3_ones() -> Instance {
        Instance::from_rows(
            "k3",
            &[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn atsp_small_cases() {
        assert_eq!(exact_atsp(&k3_ones()).unwrap().cost, 3.0);
        let two = Instance::from_rows("two", &[vec![0.0, 3.0], vec![5.0, 0.0]]).unwrap();
        let t = exact_atsp(&two).unwrap();
        assert_eq!(t.cost, 8.0);
        assert_eq!(t.order, vec![0, 1]);
    }

    #[test]
    fn atsp_lexicographic_tie_break() {
        assert_eq!(exact_atsp(&k3_ones()).unwrap().order, vec![0, 1, 2]);
    }

    #[test]
    fn atspp_small_cases() {
        let two = Instance::from_rows("two", &[vec![0.0, 3.0], vec![5.0, 0.0]]).unwrap();
        let p = exact_atspp(&two, 0, 1).unwrap();
        assert_eq!((p.order.clone(), p.cost), (vec![0, 1], 3.0));
        let p = exact_atspp(&k3_ones(), 0, 2).unwrap();
        assert_eq!((p.order, p.cost), (vec![0, 1, 2], 2.0));
        assert!(exact_atspp(&k3_ones(), 1, 1).is_err());
    }

    #[test]
    fn oracle_size_limits() {
        let big = crate::model::gen_instance(19, crate::model::GenModel::UniformMetric, 1).unwrap();
        assert!(matches!(
            exact_atsp(&big),
            Err(Error::SizeOutOfRange { n: 19, .. })
        ));
        assert!(enumerate_cuts(19).is_err());
    }

    #[test]
    fn cuts_small() {
        let c3: Vec<_> = enumerate_cuts(3).unwrap().collect();
        assert_eq!(c3, vec![0b001, 0b010, 0b100]);
        assert_eq!(enumerate_cuts(4).unwrap().count(), 7);
    }

    #[test]
    fn cuts_unique_up_to_complement() {
        for n in 2..=9 {
            let all: CutMask = (1 << n) - 1;
            let mut seen = HashSet::new();
            for m in enumerate_cuts(n).unwrap() {
                assert!(seen.insert(m.min(all ^ m)), "duplicate cut {m:b}");
            }
            assert_eq!(seen.len(), (1 << (n - 1)) - 1);
        }
    }

    #[test]
    fn trees_triangle_and_k4() {
        let tri = [(0, 1), (1, 2), (0, 2)];
        let trees = enumerate_spanning_trees(3, &tri, &[1.0; 3]).unwrap();
        assert_eq!(trees.len(), 3);
        assert!(trees.iter().all(|t| t.weight == 1.0));

        let k4: Vec<_> = (0..4)
            .flat_map(|u| (u + 1..4).map(move |v| (u, v)))
            .collect();
        assert_eq!(enumerate_spanning_trees(4, &k4, &[1.0; 6]).unwrap().len(), 16);
    }

    #[test]
    fn trees_weighted_triangle() {
        // edges a={0,1}, b={1,2}, c={0,2} with lambda (1, 1, 2)
        let tri = [(0, 1), (1, 2), (0, 2)];
        let trees = enumerate_spanning_trees(3, &tri, &[1.0, 1.0, 2.0]).unwrap();
        let got: Vec<(Vec<usize>, f64)> = trees.into_iter().map(|t| (t.edges, t.weight)).collect();
        assert_eq!(
            got,
            vec![(vec![0, 1], 1.0), (vec![0, 2], 2.0), (vec![1, 2], 2.0)]
        );
    }

    #[test]
    fn trees_reject_disconnected() {
        assert_eq!(
            enumerate_spanning_trees(4, &[(0, 1), (2, 3)], &[1.0, 1.0]),
            Err(Error::Disconnected)
        );
    }
}
