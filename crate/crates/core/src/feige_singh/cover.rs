use serde::{Deserialize, Serialize};

use crate::circulation::euler_circuit;
use crate::error::{Error, Result};
use crate::model::{shortcut, Arc, Instance, Tour, Walk};

/// Vertex-disjoint cycles covering every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleCover {
    /// Each cycle starts at its smallest vertex; cycles sorted by that vertex.
    pub cycles: Vec<Vec<usize>>,
    pub weight: f64,
}

impl CycleCover {
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.cycles
            .iter()
            .flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()])))
    }
}

/// Minimum-cost assignment on an `n x n` row-major matrix (shortest
/// augmenting paths with potentials). Returns the column of each row.
fn assignment(n: usize, cost: &[f64]) -> Vec<usize> {
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        col[row_of[j] - 1] = j - 1;
    }
    col
}

/// Minimum-weight cycle cover with self-loops forbidden.
pub fn cycle_cover(inst: &Instance) -> Result<CycleCover> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::SizeOutOfRange { n, min: 2, max: usize::MAX });
    }
    let penalty = 1.0 + 2.0 * n as f64 * inst.max_cost().max(1.0);
    let mut cost = inst.matrix().to_vec();
    for v in 0..n {
        cost[v * n + v] = penalty;
    }
    let succ = assignment(n, &cost);
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    let mut weight = 0.0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v);
            weight += inst.cost(v, succ[v]);
            v = succ[v];
        }
        if cycle.len() < 2 {
            return Err(Error::InvalidParameter("assignment kept a self-loop".into()));
        }
        cycles.push(cycle);
    }
    Ok(CycleCover { cycles, weight })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleCoverRun {
    pub tour: Tour,
    /// Covers in original vertex labels, one per contraction round.
    pub covers: Vec<CycleCover>,
}

impl CycleCoverRun {
    pub fn cover_weight(&self) -> f64 {
        self.covers.iter().map(|c| c.weight).sum()
    }
}

/// Contracts each cycle of a minimum cycle cover to its smallest vertex and
/// repeats until one vertex is left, then shortcuts an Eulerian walk over
/// the union of all covers.
pub fn repeated_cycle_cover_atsp(inst: &Instance) -> Result<CycleCoverRun> {
    let n = inst.n();
    let mut active: Vec<usize> = (0..n).collect();
    let mut covers = Vec::new();
    while active.len() > 1 {
        let m = active.len();
        let mut sub = Vec::with_capacity(m * m);
        for &u in &active {
            for &v in &active {
                sub.push(inst.cost(u, v));
            }
        }
        let local = cycle_cover(&Instance::new("contracted", m, sub)?)?;
        let cycles: Vec<Vec<usize>> = local
            .cycles
            .iter()
            .map(|c| c.iter().map(|&i| active[i]).collect())
            .collect();
        active = cycles.iter().map(|c| c[0]).collect();
        covers.push(CycleCover {
            cycles,
            weight: local.weight,
        });
    }
    let arcs: Vec<Arc> = covers.iter().flat_map(|c| c.arcs().collect::<Vec<_>>()).collect();
    let counts = vec![1u64; arcs.len()];
    let circuit = euler_circuit(n, &arcs, &counts, 0)?;
    let tour = shortcut(&Walk::from_vertices(&circuit), inst)?;
    Ok(CycleCoverRun { tour, covers })
}
