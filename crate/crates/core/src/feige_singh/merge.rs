use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::PathCollection;
use crate::error::{Error, Result};
use crate::model::{Instance, SpanningPath};

/// Largest DP table (positions times last-path choices) a merge may build.
pub const DEFAULT_STATE_BUDGET: u128 = 10_000_000;

const FROM_S: u8 = u8::MAX;

fn interiors(paths: &[Vec<usize>]) -> Vec<&[usize]> {
    paths
        .iter()
        .map(|p| &p[1..p.len() - 1])
        .filter(|i| !i.is_empty())
        .collect()
}

/// DP table size needed to merge `paths`: the product of `(interior + 1)`
/// over paths with a non-empty interior, times their count.
pub fn merge_state_count(paths: &[Vec<usize>]) -> u128 {
    let inner = interiors(paths);
    let product = inner
        .iter()
        .fold(1u128, |acc, i| acc.saturating_mul(i.len() as u128 + 1));
    product.saturating_mul(inner.len().max(1) as u128)
}

/// Cheapest `s -> t` order containing every interior sequence as a
/// subsequence. The table is indexed by a mixed-radix encoding of how far
/// each path has advanced and by which path supplied the last vertex.
fn merge_core(s: usize, t: usize, paths: &[Vec<usize>], inst: &Instance, budget: u128) -> Result<Vec<usize>> {
    let inner = interiors(paths);
    let k = inner.len();
    if k == 0 {
        return Ok(vec![s, t]);
    }
    let states = merge_state_count(paths);
    if states > budget || k >= FROM_S as usize {
        return Err(Error::StateBudget { states, budget });
    }
    let mut stride = vec![1usize; k];
    for j in 1..k {
        stride[j] = stride[j - 1] * (inner[j - 1].len() + 1);
    }
    let positions = stride[k - 1] * (inner[k - 1].len() + 1);
    let mut dp = vec![f64::INFINITY; positions * k];
    let mut parent = vec![FROM_S; positions * k];
    for j in 0..k {
        dp[stride[j] * k + j] = inst.cost(s, inner[j][0]);
    }
    let mut pos = vec![0usize; k];
    for idx in 0..positions {
        for last in 0..k {
            let val = dp[idx * k + last];
            if !val.is_finite() {
                continue;
            }
            let u = inner[last][pos[last] - 1];
            for j in 0..k {
                if pos[j] == inner[j].len() {
                    continue;
                }
                let slot = (idx + stride[j]) * k + j;
                let cand = val + inst.cost(u, inner[j][pos[j]]);
                if cand < dp[slot] {
                    dp[slot] = cand;
                    parent[slot] = last as u8;
                }
            }
        }
        for j in 0..k {
            pos[j] += 1;
            if pos[j] <= inner[j].len() {
                break;
            }
            pos[j] = 0;
        }
    }

    let full = positions - 1;
    let mut best = (f64::INFINITY, 0);
    for last in 0..k {
        let u = inner[last][inner[last].len() - 1];
        let total = dp[full * k + last] + inst.cost(u, t);
        if total < best.0 {
            best = (total, last);
        }
    }
    let mut order = Vec::with_capacity(positions);
    let (mut idx, mut last) = (full, best.1);
    loop {
        let p = (idx / stride[last]) % (inner[last].len() + 1);
        order.push(inner[last][p - 1]);
        let prev = parent[idx * k + last];
        idx -= stride[last];
        if prev == FROM_S {
            break;
        }
        last = prev as usize;
    }
    order.push(s);
    order.reverse();
    order.push(t);
    Ok(order)
}

fn priced(inst: &Instance, order: Vec<usize>) -> SpanningPath {
    SpanningPath {
        s: order[0],
        t: order[order.len() - 1],
        cost: inst.order_cost(&order, false),
        order,
        simple: true,
    }
}

/// Minimum-weight `s -> t` path over the vertices of `pc` that respects the
/// order of every path in it.
pub fn merge_ordered_paths(pc: &PathCollection, inst: &Instance) -> Result<SpanningPath> {
    merge_ordered_paths_with_budget(pc, inst, DEFAULT_STATE_BUDGET)
}

pub fn merge_ordered_paths_with_budget(pc: &PathCollection, inst: &Instance, budget: u128) -> Result<SpanningPath> {
    let order = merge_core(pc.s, pc.t, &pc.paths, inst, budget)?;
    Ok(priced(inst, order))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRun {
    pub path: SpanningPath,
    /// Group size used in each round.
    pub ks: Vec<usize>,
    /// Some round used a smaller group than requested to stay in budget.
    pub k_reduced: bool,
}

impl MergeRun {
    pub fn k_sum(&self) -> usize {
        self.ks.iter().sum()
    }
}

/// Repeatedly merges groups of `k = max(2, min(⌈9/ε⌉, r))` paths until one
/// remains. Merged paths rejoin the back of the queue.
pub fn algorithm_c(pc: &PathCollection, epsilon: f64, inst: &Instance) -> Result<MergeRun> {
    algorithm_c_with_budget(pc, epsilon, inst, DEFAULT_STATE_BUDGET)
}

pub fn algorithm_c_with_budget(
    pc: &PathCollection,
    epsilon: f64,
    inst: &Instance,
    budget: u128,
) -> Result<MergeRun> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut queue: VecDeque<Vec<usize>> = pc.paths.iter().cloned().collect();
    let mut ks = Vec::new();
    let mut k_reduced = false;
    while queue.len() > 1 {
        let r = queue.len();
        let mut k = ((9.0 / epsilon).ceil().min(r as f64) as usize).max(2);
        let group = |k: usize| queue.iter().take(k).cloned().collect::<Vec<_>>();
        while k > 2 && merge_state_count(&group(k)) > budget {
            k -= 1;
            k_reduced = true;
        }
        let chosen = group(k);
        let merged = merge_core(pc.s, pc.t, &chosen, inst, budget)?;
        queue.drain(..k);
        queue.push_back(merged);
        ks.push(k);
    }
    let order = queue.pop_front().expect("collection is non-empty");
    Ok(MergeRun {
        path: priced(inst, order),
        ks,
        k_reduced,
    })
}
