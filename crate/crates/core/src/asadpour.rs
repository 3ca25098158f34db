//! The thin-tree pipeline: Held-Karp, max-entropy sampling, circulation
//! rounding, Eulerian walk, shortcut.

use serde::{Deserialize, Serialize};

use crate::circulation::{build_bounds, orient_tree, solve_min_cost_circulation, to_eulerian_walk};
use crate::error::{Error, Result};
use crate::held_karp::{solve_held_karp_with, HeldKarpOptions};
use crate::maxent::{fit_gamma, sample_best_of, symmetrize, SpanningTree};
use crate::model::{shortcut, Instance, Tour};
use crate::oracle::MAX_ORACLE_N;
use crate::seed::derive_seed;
use crate::thin::{beta_target, verify_thinness, ThinnessMode, DEFAULT_EPSILON};

/// Limit on how often `α` is doubled after an infeasible circulation.
const MAX_ALPHA_DOUBLINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsadpourParams {
    pub epsilon: f64,
    /// Number of trees to sample; `⌈2 ln n⌉` (at least 1) when `None`.
    pub samples: Option<usize>,
    pub held_karp: HeldKarpOptions,
}

impl Default for AsadpourParams {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            samples: None,
            held_karp: HeldKarpOptions::default(),
        }
    }
}

pub fn default_samples(n: usize) -> usize {
    ((2.0 * (n as f64).ln()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsadpourDiagnostics {
    pub opt_hk: f64,
    pub hk_rounds: usize,
    pub hk_cuts: usize,
    pub fit_steps: usize,
    pub fit_max_ratio: f64,
    pub samples: usize,
    pub tree: SpanningTree,
    pub tree_cost: f64,
    pub oriented_tree_cost: f64,
    /// Worst cut ratio of the chosen tree; exact when `alpha_certified`.
    pub alpha_achieved: f64,
    pub alpha_certified: bool,
    pub s_achieved: f64,
    pub beta_target: f64,
    /// `α` used for the circulation bounds.
    pub alpha_used: f64,
    pub alpha_doublings: usize,
    /// `c(u) = c(T_D) + 2α c(x*)`.
    pub bound_cost: f64,
    pub fractional_circulation_cost: f64,
    pub circulation_cost: f64,
    pub ceiling_used: bool,
    pub walk_length: usize,
    pub tour_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsadpourOutcome {
    pub tour: Tour,
    pub diagnostics: AsadpourDiagnostics,
}

pub fn asadpour_solve(inst: &Instance, seed: u64, params: &AsadpourParams) -> Result<AsadpourOutcome> {
    let n = inst.n();
    if !inst.is_metric() {
        return Err(Error::InvalidInstance(
            "instance violates the triangle inequality; apply metric closure first".into(),
        ));
    }
    let hk = solve_held_karp_with(inst, &params.held_karp)?;
    let z = symmetrize(&hk.x, inst);
    let fit = fit_gamma(&z, params.epsilon)?;
    let samples = params.samples.unwrap_or_else(|| default_samples(n));
    let tree = sample_best_of(&fit.gamma, samples, &z.edge_cost, derive_seed(seed, "trees", 0))?;

    let mode = if n <= MAX_ORACLE_N {
        ThinnessMode::Exhaustive
    } else {
        ThinnessMode::Sampled {
            seed: derive_seed(seed, "thinness", 0),
        }
    };
    let thin = verify_thinness(&tree, &z, hk.opt_hk, mode)?;
    let beta = beta_target(n, params.epsilon).value;
    let oriented = orient_tree(&tree, &hk.x, inst)?;

    let mut alpha = if thin.is_certified() { thin.alpha_achieved } else { beta };
    let mut doublings = 0;
    let (problem, circ) = loop {
        let problem = build_bounds(&oriented, &hk.x, alpha, inst)?;
        match solve_min_cost_circulation(&problem) {
            Ok(c) => break (problem, c),
            Err(Error::CirculationInfeasible { .. }) if doublings < MAX_ALPHA_DOUBLINGS => {
                alpha *= 2.0;
                doublings += 1;
            }
            Err(e) => return Err(e),
        }
    };
    let walk = to_eulerian_walk(&circ, &oriented)?;
    let tour = shortcut(&walk, inst)?;

    let diagnostics = AsadpourDiagnostics {
        opt_hk: hk.opt_hk,
        hk_rounds: hk.rounds,
        hk_cuts: hk.cuts.len(),
        fit_steps: fit.steps,
        fit_max_ratio: fit.max_ratio,
        samples,
        tree_cost: tree.cost,
        tree,
        oriented_tree_cost: oriented.cost,
        alpha_achieved: thin.alpha_achieved,
        alpha_certified: thin.is_certified(),
        s_achieved: thin.s_achieved,
        beta_target: beta,
        alpha_used: alpha,
        alpha_doublings: doublings,
        bound_cost: problem.upper_cost(),
        fractional_circulation_cost: circ.fractional_cost,
        circulation_cost: circ.cost,
        ceiling_used: circ.ceiling_used,
        walk_length: walk.arcs.len(),
        tour_cost: tour.cost,
    };
    Ok(AsadpourOutcome { tour, diagnostics })
}
