use thiserror::Error;

/// Errors raised by the solvers and their supporting routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("negative cost {cost} on arc ({from}, {to})")]
    NegativeCost { from: usize, to: usize, cost: f64 },

    #[error("vertex count {n} outside supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },

    #[error("tsplib: {0}")]
    Tsplib(String),

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("invalid tour or path: {0}")]
    InvalidOrder(String),

    #[error("LP infeasible (phase one residual {residual:.3e})")]
    LpInfeasible { residual: f64 },

    #[error("LP unbounded in direction of variable {var}")]
    LpUnbounded { var: usize },

    #[error("LP basis numerically singular (condition estimate {condition:.3e})")]
    LpSingular { condition: f64 },

    #[error("LP iteration limit {limit} reached")]
    LpIterationLimit { limit: usize },

    #[error("cutting-plane loop did not converge after {rounds} rounds")]
    CutLoopLimit { rounds: usize },

    #[error("support graph is disconnected")]
    Disconnected,

    #[error("weighted Laplacian numerically singular")]
    SingularLaplacian,

    #[error("gamma fitting did not converge in {steps} steps (edge {edge:?}: q/z = {ratio:.6})")]
    FitNoConvergence {
        steps: usize,
        edge: (usize, usize),
        ratio: f64,
    },

    #[error("cut {subset:?} has zero fractional weight")]
    ZeroCut { subset: Vec<usize> },

    #[error("tree edge ({0}, {1}) has no arc in the LP support")]
    EdgeOutsideSupport(usize, usize),

    #[error("circulation infeasible: demand {demand:.6} but only {routed:.6} routable")]
    CirculationInfeasible {
        demand: f64,
        routed: f64,
        violated_cut: Option<Vec<usize>>,
    },

    #[error("flow not conserved at vertex {vertex} (in {inflow}, out {outflow})")]
    NotEulerian {
        vertex: usize,
        inflow: u64,
        outflow: u64,
    },

    #[error("invalid path collection: {0}")]
    InvalidPaths(String),

    #[error("merge state space {states} exceeds budget {budget}")]
    StateBudget { states: u128, budget: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
