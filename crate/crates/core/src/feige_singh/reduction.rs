use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::merge::algorithm_c_with_budget;
use super::{PathCollection, DEFAULT_STATE_BUDGET};
use crate::error::{Error, Result};
use crate::held_karp::solve_held_karp;
use crate::model::{Instance, SpanningPath};
use crate::seed::derive_seed;
use crate::solver::AtspSolver;

/// Refuse grids longer than this instead of running for hours.
const MAX_CANDIDATES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtsppParams {
    pub epsilon: f64,
    pub state_budget: u128,
}

impl Default for AtsppParams {
    fn default() -> Self {
        Self {
            epsilon: 0.2,
            state_budget: DEFAULT_STATE_BUDGET,
        }
    }
}

/// What happened for one guess `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateLog {
    pub d: f64,
    /// Cost `c(S)` of the inner tour on the closed reduced instance.
    pub inner_cost: f64,
    /// Copies of the arc `(t, s)` in the expanded tour.
    pub r: usize,
    /// Paths handed to the merge after dropping those with no interior.
    pub paths: usize,
    /// `Σ_i w(P_i)` after shortcutting.
    pub paths_weight: f64,
    pub merge_rounds: usize,
    pub k_sum: usize,
    pub k_reduced: bool,
    /// `w(Q)`.
    pub path_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtsppDiagnostics {
    pub epsilon: f64,
    /// `c(s, t)`.
    pub direct_cost: f64,
    /// Held-Karp bound on the path problem.
    pub hk_path_bound: f64,
    pub lower: f64,
    pub upper: f64,
    pub candidates: Vec<CandidateLog>,
    /// Index into `candidates` of the returned path.
    pub chosen: usize,
}

impl AtsppDiagnostics {
    pub fn chosen_candidate(&self) -> &CandidateLog {
        &self.candidates[self.chosen]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtsppOutcome {
    pub path: SpanningPath,
    pub diagnostics: AtsppDiagnostics,
}

/// Shortest paths under `w` (row-major, `INFINITY` for missing arcs) with
/// next-hop table.
fn floyd_warshall(n: usize, mut w: Vec<f64>) -> (Vec<f64>, Vec<usize>) {
    let mut next = vec![usize::MAX; n * n];
    for u in 0..n {
        for v in 0..n {
            if w[u * n + v].is_finite() {
                next[u * n + v] = v;
            }
        }
    }
    for m in 0..n {
        for u in 0..n {
            let um = w[u * n + m];
            if !um.is_finite() {
                continue;
            }
            for v in 0..n {
                let cand = um + w[m * n + v];
                if cand < w[u * n + v] {
                    w[u * n + v] = cand;
                    next[u * n + v] = next[u * n + m];
                }
            }
        }
    }
    (w, next)
}

/// Held-Karp value of the cycle problem where `(t, s)` is free and every
/// other arc entering `s` or leaving `t` is prohibitively expensive. Its
/// optimum equals the path optimum.
pub fn hk_path_bound(inst: &Instance, s: usize, t: usize) -> Result<f64> {
    let n = inst.n();
    let big = 1.0 + n as f64 * inst.max_cost().max(1.0);
    let mut cost = inst.matrix().to_vec();
    for u in 0..n {
        if u != s && u != t {
            cost[u * n + s] = big;
            cost[t * n + u] = big;
        }
    }
    cost[s * n + t] = inst.cost(s, t);
    cost[t * n + s] = 0.0;
    if n == 2 {
        return Ok(inst.cost(s, t));
    }
    Ok(solve_held_karp(&Instance::new("path-bound", n, cost)?)?.opt_hk)
}

fn candidate_grid(lower: f64, upper: f64, epsilon: f64, min_positive: Option<f64>) -> Result<Vec<f64>> {
    let start = if lower > 0.0 {
        lower
    } else {
        match min_positive {
            Some(c) => c,
            None => return Ok(vec![0.0]),
        }
    };
    let ratio = 1.0 + epsilon / 8.0;
    let mut grid = Vec::new();
    let mut d = start;
    while d <= upper * (1.0 + 1e-12) || grid.is_empty() {
        grid.push(d);
        if grid.len() > MAX_CANDIDATES {
            return Err(Error::InvalidParameter(format!(
                "guess grid from {start} to {upper} exceeds {MAX_CANDIDATES} values; raise epsilon"
            )));
        }
        d *= ratio;
    }
    Ok(grid)
}

fn run_candidate(
    inst: &Instance,
    s: usize,
    t: usize,
    d: f64,
    params: &AtsppParams,
    inner: &dyn AtspSolver,
    seed: u64,
) -> Result<(Vec<usize>, CandidateLog)> {
    let n = inst.n();
    let mut w1 = inst.matrix().to_vec();
    for u in 0..n {
        if u != s {
            w1[u * n + s] = f64::INFINITY;
        }
        if u != t {
            w1[t * n + u] = f64::INFINITY;
        }
    }
    w1[t * n + s] = d;
    let (w2, next) = floyd_warshall(n, w1);
    let closed = Instance::new("atspp-reduction", n, w2)?;
    let tour = inner.solve(&closed, seed)?;

    let mut walk = vec![tour.order[0]];
    for (a, b) in tour.arcs() {
        let mut v = a;
        while v != b {
            v = next[v * n + b];
            walk.push(v);
        }
    }
    let first = (0..walk.len() - 1)
        .find(|&i| walk[i] == t && walk[i + 1] == s)
        .ok_or_else(|| Error::InvalidWalk("expanded tour never uses (t, s)".into()))?;
    let len = walk.len() - 1;
    let rotated: Vec<usize> = (0..=len).map(|i| walk[(first + 1 + i) % len]).collect();

    let mut segments: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![s];
    for pair in rotated.windows(2) {
        if pair == [t, s] {
            segments.push(std::mem::replace(&mut current, vec![s]));
        } else {
            current.push(pair[1]);
        }
    }
    let r = segments.len();

    let mut seen = vec![false; n];
    seen[s] = true;
    seen[t] = true;
    let mut paths: Vec<Vec<usize>> = Vec::with_capacity(r);
    for seg in &segments {
        let mut p = vec![s];
        for &v in &seg[1..seg.len() - 1] {
            if !std::mem::replace(&mut seen[v], true) {
                p.push(v);
            }
        }
        p.push(t);
        if p.len() > 2 || paths.is_empty() {
            paths.push(p);
        }
    }
    if paths.len() > 1 && paths[0].len() == 2 {
        paths.remove(0);
    }
    let pc = PathCollection::new(s, t, paths)?;
    let paths_weight = pc.total_weight(inst);
    let merged = algorithm_c_with_budget(&pc, params.epsilon, inst, params.state_budget)?;
    let log = CandidateLog {
        d,
        inner_cost: tour.cost,
        r,
        paths: pc.r(),
        paths_weight,
        merge_rounds: merged.ks.len(),
        k_sum: merged.k_sum(),
        k_reduced: merged.k_reduced,
        path_cost: merged.path.cost,
    };
    Ok((merged.path.order, log))
}

/// Hamiltonian `s -> t` path from an ATSP solver.
///
/// For each guess `d` on a geometric grid, arcs into `s` and out of `t` are
/// removed, an arc `(t, s)` of weight `d` is added, the graph is closed
/// under shortest paths and handed to `inner`. The tour is expanded back,
/// cut at every copy of `(t, s)`, shortcut so that no vertex repeats across
/// the pieces, and the pieces are merged. The cheapest result wins, ties
/// going to the smaller guess.
pub fn algorithm_b(
    inst: &Instance,
    s: usize,
    t: usize,
    params: &AtsppParams,
    inner: &dyn AtspSolver,
    seed: u64,
) -> Result<AtsppOutcome> {
    let n = inst.n();
    if s >= n || t >= n {
        return Err(Error::InvalidParameter(format!("endpoints ({s}, {t}) out of range for n = {n}")));
    }
    if s == t {
        return Err(Error::InvalidParameter("s and t must differ".into()));
    }
    if !(params.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", params.epsilon)));
    }
    if !inst.is_metric() {
        return Err(Error::InvalidInstance(
            "instance violates the triangle inequality; apply metric closure first".into(),
        ));
    }
    let direct_cost = inst.cost(s, t);
    let hk = hk_path_bound(inst, s, t)?;
    let lower = direct_cost.max(hk);
    let upper = n as f64 * inst.max_cost();
    let min_positive = inst
        .matrix()
        .iter()
        .copied()
        .filter(|&c| c > 0.0)
        .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.min(c))));
    let grid = candidate_grid(lower, upper, params.epsilon, min_positive)?;

    let runs: Vec<(Vec<usize>, CandidateLog)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &d)| run_candidate(inst, s, t, d, params, inner, derive_seed(seed, "atspp-candidate", i as u64)))
        .collect::<Result<_>>()?;
    let mut chosen = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1.path_cost < runs[chosen].1.path_cost {
            chosen = i;
        }
    }
    let path = SpanningPath::simple(inst, runs[chosen].0.clone())?;
    let candidates = runs.into_iter().map(|r| r.1).collect();
    Ok(AtsppOutcome {
        path,
        diagnostics: AtsppDiagnostics {
            epsilon: params.epsilon,
            direct_cost,
            hk_path_bound: hk,
            lower,
            upper,
            candidates,
            chosen,
        },
    })
}
