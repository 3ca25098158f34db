//! Tree orientation, Hoffman bounds, integral min-cost circulation and
//! Eulerian walk extraction.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::held_karp::FractionalArcVector;
use crate::maxent::SpanningTree;
use crate::model::{Arc, Instance, Walk};

/// Flow values within this distance of an integer are snapped to it.
pub const SNAP_TOL: f64 = 1e-9;
const CAP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientedTree {
    pub n: usize,
    pub arcs: Vec<Arc>,
    pub cost: f64,
}

/// Orients each tree edge along its cheaper support arc, `(min, max)` on ties.
pub fn orient_tree(tree: &SpanningTree, x: &FractionalArcVector, inst: &Instance) -> Result<OrientedTree> {
    let mut arcs = Vec::with_capacity(tree.edges.len());
    let mut cost = 0.0;
    for &(a, b) in &tree.edges {
        let (u, v) = (a.min(b), a.max(b));
        let arc = match (x.in_support(u, v), x.in_support(v, u)) {
            (true, true) if inst.cost(v, u) < inst.cost(u, v) => (v, u),
            (true, _) => (u, v),
            (false, true) => (v, u),
            (false, false) => return Err(Error::EdgeOutsideSupport(u, v)),
        };
        cost += inst.cost(arc.0, arc.1);
        arcs.push(arc);
    }
    Ok(OrientedTree { n: x.n(), arcs, cost })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculationProblem {
    pub n: usize,
    pub arcs: Vec<Arc>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cost: Vec<f64>,
}

impl CirculationProblem {
    /// `Σ_a c(a) u(a)`.
    pub fn upper_cost(&self) -> f64 {
        self.upper.iter().zip(&self.cost).map(|(u, c)| u * c).sum()
    }
}

/// Bounds over the support of `x`: `l = 1` and `u = 1 + 2αx` on tree arcs,
/// `l = 0` and `u = 2αx` elsewhere.
pub fn build_bounds(
    tree: &OrientedTree,
    x: &FractionalArcVector,
    alpha: f64,
    inst: &Instance,
) -> Result<CirculationProblem> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let n = x.n();
    let mut arcs = x.support();
    for &a in &tree.arcs {
        if !arcs.contains(&a) {
            arcs.push(a);
        }
    }
    arcs.sort_unstable();
    let mut lower = Vec::with_capacity(arcs.len());
    let mut upper = Vec::with_capacity(arcs.len());
    let mut cost = Vec::with_capacity(arcs.len());
    for &(u, v) in &arcs {
        let on_tree = tree.arcs.contains(&(u, v));
        let base = if on_tree { 1.0 } else { 0.0 };
        lower.push(base);
        upper.push(base + 2.0 * alpha * x.get(u, v));
        cost.push(inst.cost(u, v));
    }
    Ok(CirculationProblem {
        n,
        arcs,
        lower,
        upper,
        cost,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circulation {
    pub n: usize,
    pub arcs: Vec<Arc>,
    pub flow: Vec<f64>,
    pub cost: f64,
    /// Cost of the fractional optimum before rounding.
    pub fractional_cost: f64,
    /// Some arc carries more than its upper bound after rounding up.
    pub ceiling_used: bool,
}

impl Circulation {
    /// Net inflow minus outflow at every vertex.
    pub fn imbalance(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.n];
        for (&(u, v), &f) in self.arcs.iter().zip(&self.flow) {
            b[u] -= f;
            b[v] += f;
        }
        b
    }
}

struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

struct Residual {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: f64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge { to: from, cap: 0.0, cost: -cost });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Successive shortest paths from a super source to a super sink after
/// shifting out the lower bounds. Returns the fractional flow on each arc.
fn fractional_circulation(p: &CirculationProblem) -> Result<Vec<f64>> {
    let n = p.n;
    let (src, sink) = (n, n + 1);
    let mut g = Residual::new(n + 2);
    let mut balance = vec![0.0; n];
    let mut ids = Vec::with_capacity(p.arcs.len());
    for (i, &(u, v)) in p.arcs.iter().enumerate() {
        if p.lower[i] > p.upper[i] + SNAP_TOL {
            return Err(Error::CirculationInfeasible {
                demand: p.lower[i],
                routed: p.upper[i],
                violated_cut: None,
            });
        }
        if p.cost[i] < 0.0 {
            return Err(Error::InvalidParameter(format!("negative arc cost on ({u}, {v})")));
        }
        let cap = (p.upper[i] - p.lower[i]).max(0.0);
        ids.push(g.add(u, v, cap, p.cost[i]));
        balance[u] -= p.lower[i];
        balance[v] += p.lower[i];
    }
    let mut demand = 0.0;
    for (v, &b) in balance.iter().enumerate() {
        if b > 0.0 {
            g.add(src, v, b, 0.0);
            demand += b;
        } else if b < 0.0 {
            g.add(v, sink, -b, 0.0);
        }
    }

    let nodes = n + 2;
    let mut potential = vec![0.0; nodes];
    let mut routed = 0.0;
    let limit = 10 * g.edges.len() + 100;
    for _ in 0..limit {
        if demand - routed <= SNAP_TOL * (1.0 + demand) {
            break;
        }
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via = vec![usize::MAX; nodes];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Entry(0.0, src));
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in &g.adj[u] {
                let edge = &g.edges[e];
                if edge.cap <= CAP_EPS {
                    continue;
                }
                let reduced = (edge.cost + potential[u] - potential[edge.to]).max(0.0);
                let nd = d + reduced;
                if nd < dist[edge.to] {
                    dist[edge.to] = nd;
                    via[edge.to] = e;
                    heap.push(Entry(nd, edge.to));
                }
            }
        }
        if !dist[sink].is_finite() {
            let violated: Vec<usize> = (0..n).filter(|&v| dist[v].is_finite()).collect();
            return Err(Error::CirculationInfeasible {
                demand,
                routed,
                violated_cut: (!violated.is_empty()).then_some(violated),
            });
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        let mut push = demand - routed;
        let mut v = sink;
        while v != src {
            let e = via[v];
            push = push.min(g.edges[e].cap);
            v = g.edges[e ^ 1].to;
        }
        let mut v = sink;
        while v != src {
            let e = via[v];
            g.edges[e].cap -= push;
            g.edges[e ^ 1].cap += push;
            v = g.edges[e ^ 1].to;
        }
        routed += push;
    }
    if demand - routed > SNAP_TOL * (1.0 + demand) {
        return Err(Error::CirculationInfeasible {
            demand,
            routed,
            violated_cut: None,
        });
    }
    Ok(ids
        .iter()
        .enumerate()
        .map(|(i, &e)| p.lower[i] + g.edges[e ^ 1].cap)
        .collect())
}

fn is_fractional(f: f64) -> bool {
    (f - f.round()).abs() > SNAP_TOL
}

/// Finds a cycle in the undirected multigraph of fractional arcs. Returns
/// `(arc index, forward)` pairs in traversal order.
fn fractional_cycle(n: usize, arcs: &[Arc], flow: &[f64]) -> Option<std::result::Result<Vec<(usize, bool)>, usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(u, v)) in arcs.iter().enumerate() {
        if is_fractional(flow[i]) {
            adj[u].push(i);
            adj[v].push(i);
        }
    }
    let start = (0..n).find(|&v| !adj[v].is_empty())?;
    let mut pos = vec![usize::MAX; n];
    let mut steps: Vec<(usize, bool)> = Vec::new();
    let mut v = start;
    let mut came: Option<usize> = None;
    loop {
        pos[v] = steps.len();
        let Some(&a) = adj[v].iter().find(|&&a| Some(a) != came) else {
            // Dead end: the arc we arrived on is fractional only by round-off.
            return Some(Err(came.expect("start vertex has an arc")));
        };
        let (u, w) = arcs[a];
        let (forward, next) = if u == v { (true, w) } else { (false, u) };
        steps.push((a, forward));
        came = Some(a);
        v = next;
        if pos[v] != usize::MAX {
            return Some(Ok(steps.split_off(pos[v])));
        }
    }
}

/// Integral min-cost circulation for `p`.
///
/// The fractional optimum is rounded by pushing flow around cycles of
/// fractional arcs in the direction that does not raise cost, so each arc
/// ends between the floor and ceiling of its fractional value.
pub fn solve_min_cost_circulation(p: &CirculationProblem) -> Result<Circulation> {
    let mut flow = fractional_circulation(p)?;
    let fractional_cost = flow.iter().zip(&p.cost).map(|(f, c)| f * c).sum();
    for f in flow.iter_mut() {
        if !is_fractional(*f) {
            *f = f.round();
        }
    }
    let mut guard = 0;
    while let Some(found) = fractional_cycle(p.n, &p.arcs, &flow) {
        guard += 1;
        if guard > 4 * p.arcs.len() + 4 {
            return Err(Error::InvalidParameter("flow rounding did not terminate".into()));
        }
        let cycle = match found {
            Ok(c) => c,
            Err(a) => {
                flow[a] = flow[a].round();
                continue;
            }
        };
        let delta_cost: f64 = cycle
            .iter()
            .map(|&(a, fw)| if fw { p.cost[a] } else { -p.cost[a] })
            .sum();
        let dir = if delta_cost <= 0.0 { 1.0 } else { -1.0 };
        let step = cycle
            .iter()
            .map(|&(a, fw)| {
                let up = if fw { dir } else { -dir };
                if up > 0.0 {
                    flow[a].ceil() - flow[a]
                } else {
                    flow[a] - flow[a].floor()
                }
            })
            .fold(f64::INFINITY, f64::min);
        for &(a, fw) in &cycle {
            let sign = if fw { dir } else { -dir };
            flow[a] += sign * step;
            if !is_fractional(flow[a]) {
                flow[a] = flow[a].round();
            }
        }
    }
    let cost = flow.iter().zip(&p.cost).map(|(f, c)| f * c).sum();
    let ceiling_used = flow.iter().zip(&p.upper).any(|(f, u)| *f > u + SNAP_TOL);
    let circ = Circulation {
        n: p.n,
        arcs: p.arcs.clone(),
        flow,
        cost,
        fractional_cost,
        ceiling_used,
    };
    for (v, b) in circ.imbalance().iter().enumerate() {
        if *b != 0.0 {
            let (inflow, outflow) = in_out(&circ, v);
            return Err(Error::NotEulerian { vertex: v, inflow, outflow });
        }
    }
    Ok(circ)
}

fn in_out(c: &Circulation, v: usize) -> (u64, u64) {
    let mut inflow = 0;
    let mut outflow = 0;
    for (&(a, b), &f) in c.arcs.iter().zip(&c.flow) {
        if b == v {
            inflow += f as u64;
        }
        if a == v {
            outflow += f as u64;
        }
    }
    (inflow, outflow)
}

/// Closed walk from vertex 0 using every arc copy of an integral
/// circulation exactly once.
pub fn to_eulerian_walk(c: &Circulation, tree: &OrientedTree) -> Result<Walk> {
    let n = c.n;
    for (i, &f) in c.flow.iter().enumerate() {
        if f < 0.0 || f.fract() != 0.0 {
            return Err(Error::InvalidWalk(format!("arc {:?} carries non-integral flow {f}", c.arcs[i])));
        }
    }
    for &a in &tree.arcs {
        let carried = c.arcs.iter().position(|&b| b == a).map(|i| c.flow[i]).unwrap_or(0.0);
        if carried < 1.0 {
            return Err(Error::InvalidWalk(format!("tree arc {a:?} carries no flow")));
        }
    }
    for v in 0..n {
        let (inflow, outflow) = in_out(c, v);
        if inflow != outflow {
            return Err(Error::NotEulerian { vertex: v, inflow, outflow });
        }
    }
    let counts: Vec<u64> = c.flow.iter().map(|&f| f as u64).collect();
    let circuit = euler_circuit(n, &c.arcs, &counts, 0)?;
    Ok(Walk::from_vertices(&circuit))
}

/// Hierholzer's algorithm over a multigraph where arc `arcs[i]` has
/// `counts[i]` copies. Out-arcs are tried in `(tail, head)` order. Returns
/// the closed vertex sequence starting and ending at `start`.
pub(crate) fn euler_circuit(n: usize, arcs: &[Arc], counts: &[u64], start: usize) -> Result<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut left = counts.to_vec();
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by_key(|&i| arcs[i]);
    for &i in &order {
        out[arcs[i].0].push(i);
    }
    let total: u64 = left.iter().sum();
    let mut next = vec![0usize; n];
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(total as usize + 1);
    while let Some(&v) = stack.last() {
        while next[v] < out[v].len() && left[out[v][next[v]]] == 0 {
            next[v] += 1;
        }
        if next[v] < out[v].len() {
            let a = out[v][next[v]];
            left[a] -= 1;
            stack.push(arcs[a].1);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    if (circuit.len() as u64) != total + 1 {
        return Err(Error::InvalidWalk(format!(
            "multigraph is disconnected: walk covers {} of {total} arc copies",
            circuit.len().saturating_sub(1)
        )));
    }
    Ok(circuit)
}
