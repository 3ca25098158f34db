//! ATSP path via reduction to ATSP, with order-respecting merging of the
//! resulting `s -> t` paths, and a repeated cycle-cover ATSP heuristic.

mod cover;
mod merge;
mod reduction;

pub use cover::{cycle_cover, repeated_cycle_cover_atsp, CycleCover, CycleCoverRun};
pub use merge::{
    algorithm_c, algorithm_c_with_budget, merge_ordered_paths, merge_ordered_paths_with_budget, merge_state_count,
    MergeRun, DEFAULT_STATE_BUDGET,
};
pub use reduction::{algorithm_b, hk_path_bound, AtsppDiagnostics, AtsppOutcome, AtsppParams, CandidateLog};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

/// `s -> t` paths whose interior vertices are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCollection {
    pub s: usize,
    pub t: usize,
    pub paths: Vec<Vec<usize>>,
}

impl PathCollection {
    pub fn new(s: usize, t: usize, paths: Vec<Vec<usize>>) -> Result<Self> {
        if s == t {
            return Err(Error::InvalidPaths(format!("endpoints coincide at {s}")));
        }
        if paths.is_empty() {
            return Err(Error::InvalidPaths("empty collection".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, p) in paths.iter().enumerate() {
            if p.len() < 2 || p[0] != s || p[p.len() - 1] != t {
                return Err(Error::InvalidPaths(format!("path {i} does not run from {s} to {t}")));
            }
            for &v in &p[1..p.len() - 1] {
                if v == s || v == t || !seen.insert(v) {
                    return Err(Error::InvalidPaths(format!("vertex {v} appears twice")));
                }
            }
        }
        Ok(Self { s, t, paths })
    }

    /// Number of paths.
    pub fn r(&self) -> usize {
        self.paths.len()
    }

    /// `s`, `t` and every interior vertex, sorted.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .paths
            .iter()
            .flat_map(|p| p[1..p.len() - 1].iter().copied())
            .chain([self.s, self.t])
            .collect();
        vs.sort_unstable();
        vs
    }

    /// `Σ_i w(P_i)`.
    pub fn total_weight(&self, inst: &Instance) -> f64 {
        self.paths.iter().map(|p| inst.order_cost(p, false)).sum()
    }
}

/// Whether `order` contains every vertex of `path` in the same relative order.
pub fn respects_order(order: &[usize], path: &[usize]) -> bool {
    let mut pos = std::collections::HashMap::new();
    for (i, &v) in order.iter().enumerate() {
        pos.entry(v).or_insert(i);
    }
    let mut last = None;
    for v in path {
        match pos.get(v) {
            Some(&p) if last.map_or(true, |l| p > l) => last = Some(p),
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collection_validation() {
        assert!(PathCollection::new(0, 3, vec![vec![0, 1, 3], vec![0, 2, 3]]).is_ok());
        assert!(PathCollection::new(0, 3, vec![vec![0, 1, 3], vec![0, 1, 3]]).is_err());
        assert!(PathCollection::new(0, 3, vec![vec![1, 3]]).is_err());
        assert!(PathCollection::new(0, 0, vec![vec![0, 0]]).is_err());
        assert!(PathCollection::new(0, 3, vec![vec![0, 3, 1, 3]]).is_err());
    }

    #[test]
    fn order_respect() {
        assert!(respects_order(&[0, 1, 2, 3], &[0, 2, 3]));
        assert!(!respects_order(&[0, 2, 1, 3], &[0, 1, 2, 3]));
        assert!(!respects_order(&[0, 1, 3], &[0, 2, 3]));
    }
}
