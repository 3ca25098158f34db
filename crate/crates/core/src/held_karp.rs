//! Held-Karp relaxation solved by cutting planes.
//!
//! The master LP starts from the degree constraints alone and repeatedly adds
//! violated subtour constraints `x(δ⁺(U)) + x(δ⁻(U)) >= 2`, found by a global
//! minimum cut on the undirected graph weighted by `x_uv + x_vu`, until none
//! remains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RowKind};
use crate::model::{Arc, Instance};

/// Slack below 2 at which a cut counts as violated during separation.
pub const SEPARATION_TOL: f64 = 1e-7;

/// Values `x_a` for every arc of the complete digraph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalArcVector {
    n: usize,
    values: Vec<f64>,
}

impl FractionalArcVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[u * self.n + v]
    }

    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        assert_ne!(u, v, "no self-loops");
        self.values[u * self.n + v] = value;
    }

    /// Arcs with `x_a > 1e-9`, in row-major order.
    pub fn support(&self) -> Vec<Arc> {
        let n = self.n;
        (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && self.get(u, v) > 1e-9)
            .collect()
    }

    pub fn in_support(&self, u: usize, v: usize) -> bool {
        u != v && self.get(u, v) > 1e-9
    }

    /// `x(δ⁺(v)) + x(δ⁻(v))`.
    pub fn degree(&self, v: usize) -> f64 {
        (0..self.n)
            .filter(|&w| w != v)
            .map(|w| self.get(v, w) + self.get(w, v))
            .sum()
    }

    /// `x(δ⁺(U)) + x(δ⁻(U))` for the membership vector `inside`.
    pub fn cut_value(&self, inside: &[bool]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for u in 0..n {
            for v in 0..n {
                if inside[u] != inside[v] {
                    total += self.get(u, v);
                }
            }
        }
        total
    }

    pub fn cost(&self, inst: &Instance) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    total += inst.cost(u, v) * self.get(u, v);
                }
            }
        }
        total
    }
}

/// A subtour constraint on subset `U`, with how far `x` falls short of 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutConstraint {
    pub subset: Vec<usize>,
    pub violation: f64,
}

impl CutConstraint {
    fn membership(&self, n: usize) -> Vec<bool> {
        let mut inside = vec![false; n];
        for &v in &self.subset {
            inside[v] = true;
        }
        inside
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldKarpOptions {
    /// Also impose `x(δ⁺(v)) = x(δ⁻(v)) = 1`. Keeps `x*` a circulation, which
    /// the circulation rounding step relies on for feasibility.
    pub balanced: bool,
    pub max_rounds: usize,
}

impl Default for HeldKarpOptions {
    fn default() -> Self {
        Self {
            balanced: true,
            max_rounds: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldKarpSolution {
    pub x: FractionalArcVector,
    pub opt_hk: f64,
    pub cuts: Vec<CutConstraint>,
    pub rounds: usize,
}

pub fn solve_held_karp(inst: &Instance) -> Result<HeldKarpSolution> {
    solve_held_karp_with(inst, &HeldKarpOptions::default())
}

pub fn solve_held_karp_with(inst: &Instance, opts: &HeldKarpOptions) -> Result<HeldKarpSolution> {
    let mut cuts: Vec<CutConstraint> = Vec::new();
    for round in 1..=opts.max_rounds {
        let x = solve_master(inst, &cuts, opts.balanced)?;
        let found = violated_cuts(&x);
        if found.is_empty() {
            let opt_hk = x.cost(inst);
            return Ok(HeldKarpSolution {
                x,
                opt_hk,
                cuts,
                rounds: round,
            });
        }
        for cut in found {
            if !cuts.iter().any(|c| c.subset == cut.subset) {
                cuts.push(cut);
            }
        }
    }
    Err(Error::CutLoopLimit {
        rounds: opts.max_rounds,
    })
}

#[inline]
fn var_index(n: usize, u: usize, v: usize) -> usize {
    u * (n - 1) + if v < u { v } else { v - 1 }
}

/// Solves the LP restricted to the degree constraints and `cuts`.
pub fn solve_master(
    inst: &Instance,
    cuts: &[CutConstraint],
    balanced: bool,
) -> Result<FractionalArcVector> {
    let n = inst.n();
    let arcs: Vec<Arc> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let cost = arcs.iter().map(|&(u, v)| inst.cost(u, v)).collect();
    let mut lp = LinearProgram::new(cost, vec![1.0; arcs.len()]);
    for v in 0..n {
        let out: Vec<(usize, f64)> = (0..n)
            .filter(|&w| w != v)
            .map(|w| (var_index(n, v, w), 1.0))
            .collect();
        let inc: Vec<(usize, f64)> = (0..n)
            .filter(|&w| w != v)
            .map(|w| (var_index(n, w, v), 1.0))
            .collect();
        if balanced {
            lp.add_row(out, RowKind::Eq, 1.0);
            lp.add_row(inc, RowKind::Eq, 1.0);
        } else {
            lp.add_row([out, inc].concat(), RowKind::Eq, 2.0);
        }
    }
    for cut in cuts {
        let inside = cut.membership(n);
        let coeffs = arcs
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| inside[u] != inside[v])
            .map(|(j, _)| (j, 1.0))
            .collect();
        lp.add_row(coeffs, RowKind::Ge, 2.0);
    }
    let sol = lp.solve()?;
    let mut x = FractionalArcVector::zeros(n);
    for (j, &(u, v)) in arcs.iter().enumerate() {
        x.set(u, v, sol.x[j]);
    }
    Ok(x)
}

/// Components of the support when it is disconnected, otherwise the global
/// minimum cut if it is violated.
fn violated_cuts(x: &FractionalArcVector) -> Vec<CutConstraint> {
    let n = x.n();
    let comps = support_components(x);
    if comps.len() > 1 {
        return comps
            .into_iter()
            .map(|subset| {
                let mut inside = vec![false; n];
                subset.iter().for_each(|&v| inside[v] = true);
                let violation = 2.0 - x.cut_value(&inside);
                CutConstraint { subset, violation }
            })
            .collect();
    }
    separate(x).into_iter().collect()
}

fn support_components(x: &FractionalArcVector) -> Vec<Vec<usize>> {
    let n = x.n();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = vec![];
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..n {
                if comp[v] == usize::MAX && (x.in_support(u, v) || x.in_support(v, u)) {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Returns a most violated subtour constraint, or `None` when every cut has
/// value at least `2 - SEPARATION_TOL`.
pub fn separate(x: &FractionalArcVector) -> Option<CutConstraint> {
    let n = x.n();
    let mut w = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                w[u * n + v] = x.get(u, v) + x.get(v, u);
            }
        }
    }
    let (value, mut subset) = stoer_wagner(n, &w);
    if value < 2.0 - SEPARATION_TOL {
        subset.sort_unstable();
        Some(CutConstraint {
            subset,
            violation: 2.0 - value,
        })
    } else {
        None
    }
}

/// Global minimum cut of a dense symmetric weight matrix. Returns the cut
/// value and one side of the cut.
pub fn stoer_wagner(n: usize, weights: &[f64]) -> (f64, Vec<usize>) {
    let mut w = weights.to_vec();
    // groups[v]: original vertices merged into v.
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, Vec::new());
    while active.len() > 1 {
        let mut added = vec![false; n];
        let mut key = vec![0.0; n];
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let mut sel = usize::MAX;
            for &v in &active {
                if !added[v] && (sel == usize::MAX || key[v] > key[sel]) {
                    sel = v;
                }
            }
            added[sel] = true;
            if step == active.len() - 1 {
                if key[sel] < best.0 {
                    best = (key[sel], groups[sel].clone());
                }
                last = sel;
            } else {
                prev = sel;
                for &v in &active {
                    if !added[v] {
                        key[v] += w[sel * n + v];
                    }
                }
            }
        }
        // Merge `last` into `prev`.
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &active {
            w[prev * n + v] += w[last * n + v];
            w[v * n + prev] = w[prev * n + v];
        }
        w[prev * n + prev] = 0.0;
        active.retain(|&v| v != last);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_nodes_force_both_arcs() {
        let inst = Instance::from_rows("two", &[vec![0.0, 3.0], vec![5.0, 0.0]]).unwrap();
        let hk = solve_held_karp(&inst).unwrap();
        assert_abs_diff_eq!(hk.x.get(0, 1), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(hk.x.get(1, 0), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(hk.opt_hk, 8.0, epsilon = 1e-9);
    }

    #[test]
    fn triangle_all_ones() {
        let inst = Instance::from_rows(
            "k3",
            &[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        let hk = solve_held_karp(&inst).unwrap();
        assert_abs_diff_eq!(hk.opt_hk, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn separation_finds_disjoint_two_cycles() {
        let mut x = FractionalArcVector::zeros(4);
        for (u, v) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            x.set(u, v, 1.0);
        }
        let cut = separate(&x).expect("violated");
        assert_abs_diff_eq!(cut.violation, 2.0, epsilon = 1e-12);
        let mut side = cut.subset.clone();
        if side.contains(&2) {
            side = vec![0, 1, 2, 3].into_iter().filter(|v| !side.contains(v)).collect();
        }
        assert_eq!(side, vec![0, 1]);
    }

    #[test]
    fn separation_accepts_a_tour() {
        let mut x = FractionalArcVector::zeros(5);
        for i in 0..5 {
            x.set(i, (i + 1) % 5, 1.0);
        }
        assert!(separate(&x).is_none());
    }

    #[test]
    fn stoer_wagner_path_graph() {
        // 0 -3- 1 -1- 2 -4- 3
        let n = 4;
        let mut w = vec![0.0; 16];
        for (u, v, c) in [(0, 1, 3.0), (1, 2, 1.0), (2, 3, 4.0)] {
            w[u * n + v] = c;
            w[v * n + u] = c;
        }
        let (value, mut side) = stoer_wagner(n, &w);
        side.sort_unstable();
        assert_eq!(value, 1.0);
        assert!(side == vec![0, 1] || side == vec![2, 3]);
    }
}
