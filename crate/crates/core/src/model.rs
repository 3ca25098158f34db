//! Instances, tours, spanning paths and walks over a complete directed graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Absolute tolerance used for cost comparisons.
pub const COST_TOL: f64 = 1e-9;

/// A directed arc `(tail, head)`.
pub type Arc = (usize, usize);

/// Complete directed graph given by an `n x n` nonnegative cost matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    name: String,
    n: usize,
    cost: Vec<f64>,
    metric: bool,
}

impl Instance {
    /// Builds an instance from a row-major matrix. The diagonal must be zero
    /// and every entry finite and nonnegative. The metric flag is computed.
    pub fn new(name: impl Into<String>, n: usize, cost: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::SizeOutOfRange {
                n,
                min: 2,
                max: usize::MAX,
            });
        }
        if cost.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "expected {} matrix entries, got {}",
                n * n,
                cost.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let c = cost[i * n + j];
                if !c.is_finite() {
                    return Err(Error::InvalidInstance(format!(
                        "non-finite cost on arc ({i}, {j})"
                    )));
                }
                if c < 0.0 {
                    return Err(Error::NegativeCost {
                        from: i,
                        to: j,
                        cost: c,
                    });
                }
                if i == j && c != 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "diagonal entry ({i}, {i}) is {c}, expected 0"
                    )));
                }
            }
        }
        let mut inst = Self {
            name: name.into(),
            n,
            cost,
            metric: false,
        };
        inst.metric = inst.satisfies_triangle_inequality();
        Ok(inst)
    }

    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInstance("cost matrix is not square".into()));
        }
        Self::new(name, n, rows.concat())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_metric(&self) -> bool {
        self.metric
    }

    #[inline]
    pub fn cost(&self, from: usize, to: usize) -> f64 {
        self.cost[from * self.n + to]
    }

    /// Row-major cost matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.cost
    }

    pub fn max_cost(&self) -> f64 {
        self.cost.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Exhaustive `n^3` triangle scan with tolerance [`COST_TOL`].
    pub fn satisfies_triangle_inequality(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let cij = self.cost(i, j);
                for k in 0..n {
                    if self.cost(i, k) > cij + self.cost(j, k) + COST_TOL {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// SHA-256 over the dimension and the bit patterns of the cost matrix.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        for c in &self.cost {
            hasher.update(c.to_bits().to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Sum of arc costs along `order`, optionally closing the cycle.
    pub fn order_cost(&self, order: &[usize], closed: bool) -> f64 {
        let mut total: f64 = order.windows(2).map(|w| self.cost(w[0], w[1])).sum();
        if closed && order.len() > 1 {
            total += self.cost(order[order.len() - 1], order[0]);
        }
        total
    }
}

/// Replaces every arc cost by the shortest directed path cost (Floyd-Warshall).
pub fn metric_closure(inst: &Instance) -> Result<Instance> {
    let n = inst.n;
    if let Some(pos) = inst.cost.iter().position(|&c| c < 0.0) {
        return Err(Error::NegativeCost {
            from: pos / n,
            to: pos % n,
            cost: inst.cost[pos],
        });
    }
    let mut d = inst.cost.clone();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    Ok(Instance {
        name: inst.name.clone(),
        n,
        cost: d,
        metric: true,
    })
}

/// Random instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenModel {
    /// Planar points, Euclidean distances scaled per arc by an independent
    /// factor drawn from `[1, 1.5]`.
    EuclideanPerturbed,
    /// Integer arc costs drawn uniformly from `1..=100`.
    UniformMetric,
}

impl GenModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GenModel::EuclideanPerturbed => "euclidean-perturbed",
            GenModel::UniformMetric => "uniform-metric",
        }
    }
}

impl std::str::FromStr for GenModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean-perturbed" => Ok(GenModel::EuclideanPerturbed),
            "uniform-metric" => Ok(GenModel::UniformMetric),
            other => Err(Error::InvalidParameter(format!(
                "unknown instance model '{other}'"
            ))),
        }
    }
}

/// Deterministic metric instance for `(n, model, seed)`. Metric closure is
/// applied before returning.
pub fn gen_instance(n: usize, model: GenModel, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::SizeOutOfRange {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cost = vec![0.0; n * n];
    match model {
        GenModel::EuclideanPerturbed => {
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                .collect();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                        cost[i * n + j] = dx.hypot(dy) * rng.gen_range(1.0..=1.5);
                    }
                }
            }
        }
        GenModel::UniformMetric => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        cost[i * n + j] = f64::from(rng.gen_range(1u32..=100));
                    }
                }
            }
        }
    }
    let raw = Instance {
        name: format!("{}-{n}-{seed}", model.as_str()),
        n,
        cost,
        metric: false,
    };
    metric_closure(&raw)
}

/// Hamiltonian cycle given as a cyclic vertex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub cost: f64,
}

impl Tour {
    /// Validates that `order` is a permutation of `0..n` and prices it.
    pub fn from_order(inst: &Instance, order: Vec<usize>) -> Result<Self> {
        check_permutation(inst.n(), &order)?;
        let cost = inst.order_cost(&order, true);
        Ok(Self { order, cost })
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        let k = self.order.len();
        (0..k).map(move |i| (self.order[i], self.order[(i + 1) % k]))
    }
}

/// An `s -> t` path; `simple` paths visit every vertex exactly once, walks at
/// least once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanningPath {
    pub s: usize,
    pub t: usize,
    pub order: Vec<usize>,
    pub cost: f64,
    pub simple: bool,
}

impl SpanningPath {
    /// Validates a simple Hamiltonian `s -> t` path and prices it.
    pub fn simple(inst: &Instance, order: Vec<usize>) -> Result<Self> {
        check_permutation(inst.n(), &order)?;
        let s = order[0];
        let t = *order.last().expect("non-empty");
        let cost = inst.order_cost(&order, false);
        Ok(Self {
            s,
            t,
            order,
            cost,
            simple: true,
        })
    }

    /// Validates a spanning `s -> t` walk (vertices may repeat).
    pub fn walk(inst: &Instance, order: Vec<usize>) -> Result<Self> {
        let n = inst.n();
        if order.len() < 2 {
            return Err(Error::InvalidOrder("path needs at least two vertices".into()));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n {
                return Err(Error::InvalidOrder(format!("vertex {v} out of range")));
            }
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|&b| !b) {
            return Err(Error::InvalidOrder(format!("vertex {v} not visited")));
        }
        let cost = inst.order_cost(&order, false);
        Ok(Self {
            s: order[0],
            t: *order.last().expect("non-empty"),
            cost,
            simple: false,
            order,
        })
    }
}

pub(crate) fn check_permutation(n: usize, order: &[usize]) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidOrder(format!(
            "expected {n} vertices, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(Error::InvalidOrder(format!("vertex {v} out of range")));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidOrder(format!("vertex {v} repeated")));
        }
    }
    Ok(())
}

/// Ordered arc list; arcs may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub arcs: Vec<Arc>,
}

impl Walk {
    /// Checks that consecutive arcs share endpoints.
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        for (i, w) in arcs.windows(2).enumerate() {
            if w[0].1 != w[1].0 {
                return Err(Error::InvalidWalk(format!(
                    "arc {i} ends at {} but arc {} starts at {}",
                    w[0].1,
                    i + 1,
                    w[1].0
                )));
            }
        }
        Ok(Self { arcs })
    }

    /// Builds a walk from a vertex sequence.
    pub fn from_vertices(vertices: &[usize]) -> Self {
        Self {
            arcs: vertices.windows(2).map(|w| (w[0], w[1])).collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        match (self.arcs.first(), self.arcs.last()) {
            (Some(a), Some(b)) => a.0 == b.1,
            _ => false,
        }
    }

    pub fn cost(&self, inst: &Instance) -> f64 {
        self.arcs.iter().map(|&(u, v)| inst.cost(u, v)).sum()
    }
}

/// Keeps the first occurrence of every vertex along a closed spanning walk.
pub fn shortcut(walk: &Walk, inst: &Instance) -> Result<Tour> {
    let n = inst.n();
    if !walk.is_closed() {
        return Err(Error::InvalidWalk("walk is not closed".into()));
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for &(u, v) in &walk.arcs {
        if u >= n || v >= n {
            return Err(Error::InvalidWalk(format!("arc ({u}, {v}) out of range")));
        }
        if !std::mem::replace(&mut seen[u], true) {
            order.push(u);
        }
    }
    if let Some(v) = seen.iter().position(|&b| !b) {
        return Err(Error::InvalidWalk(format!("vertex {v} not visited")));
    }
    Tour::from_order(inst, order)
}
