//! JSON report written by `solve` and `atspp` and read back by `verify`.

use atsp_core::asadpour::AsadpourDiagnostics;
use atsp_core::feige_singh::{AtsppDiagnostics, CycleCover};
use atsp_core::Instance;
use serde::{Deserialize, Serialize};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Absolute slack for every cost comparison.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub schema_version: u32,
    pub instance: InstanceInfo,
    /// `asadpour`, `cyclecover`, `exact`, or `atspp/<inner>`.
    pub algorithm: String,
    pub mode: Mode,
    pub seed: u64,
    pub params: Params,
    /// Cyclic order for tours, `s ... t` for paths.
    pub order: Vec<usize>,
    pub cost: f64,
    /// Held-Karp value of the tour problem, or of the path problem in path mode.
    pub opt_hk: f64,
    pub exact_cost: Option<f64>,
    pub ratio_to_exact: Option<f64>,
    pub chain: Vec<ChainCheck>,
    pub diagnostics: Diagnostics,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceInfo {
    pub name: String,
    pub n: usize,
    /// SHA-256 of the metric-closed cost matrix.
    pub hash: String,
}

impl InstanceInfo {
    pub fn of(inst: &Instance) -> Self {
        Self {
            name: inst.name().to_string(),
            n: inst.n(),
            hash: inst.content_hash(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tour,
    Path,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub epsilon: f64,
    pub samples: Option<usize>,
    pub s: Option<usize>,
    pub t: Option<usize>,
}

/// One inequality `lhs <= rhs` instantiated with measured values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ChainCheck {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            holds: lhs <= rhs + TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostics {
    Asadpour(AsadpourDiagnostics),
    CycleCover(CycleCoverDiagnostics),
    Exact {},
    Atspp(AtsppDiagnostics),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleCoverDiagnostics {
    pub rounds: usize,
    pub covers: Vec<CycleCover>,
    pub cover_weight: f64,
}

/// Inequalities a correct run must satisfy, computed from the report alone
/// plus the exact optimum when known.
pub fn chain_checks(report: &SolveReport) -> Vec<ChainCheck> {
    let mut out = Vec::new();
    let cost = report.cost;
    out.push(ChainCheck::new("opt_hk <= cost", report.opt_hk, cost));
    if let Some(opt) = report.exact_cost {
        out.push(ChainCheck::new("exact_cost <= cost", opt, cost));
        out.push(ChainCheck::new("opt_hk <= exact_cost", report.opt_hk, opt));
    }
    match &report.diagnostics {
        Diagnostics::Asadpour(d) => {
            out.push(ChainCheck::new("circulation_cost <= bound_cost", d.circulation_cost, d.bound_cost));
            out.push(ChainCheck::new(
                "bound_cost <= oriented_tree_cost + 2 alpha_used opt_hk",
                d.bound_cost,
                d.oriented_tree_cost + 2.0 * d.alpha_used * d.opt_hk,
            ));
            out.push(ChainCheck::new("tour_cost <= circulation_cost", d.tour_cost, d.circulation_cost));
            out.push(ChainCheck::new(
                "tour_cost <= (2 alpha_used + s_achieved) opt_hk",
                d.tour_cost,
                (2.0 * d.alpha_used + d.s_achieved) * d.opt_hk,
            ));
        }
        Diagnostics::CycleCover(d) => {
            out.push(ChainCheck::new("cost <= cover_weight", cost, d.cover_weight));
            let n = report.instance.n as f64;
            out.push(ChainCheck::new("rounds <= ceil(log2 n)", d.rounds as f64, n.log2().ceil()));
        }
        Diagnostics::Exact {} => {}
        Diagnostics::Atspp(d) => {
            out.push(ChainCheck::new("direct_cost <= cost", d.direct_cost, cost));
            let c = d.chosen_candidate();
            out.push(ChainCheck::new("cost <= chosen path_cost", cost, c.path_cost));
            for (i, c) in d.candidates.iter().enumerate() {
                out.push(ChainCheck::new(
                    &format!("candidate {i}: paths_weight <= inner_cost - r d"),
                    c.paths_weight,
                    c.inner_cost - c.r as f64 * c.d,
                ));
            }
            if let Some(opt) = report.exact_cost {
                let eps = d.epsilon;
                let guess = d
                    .candidates
                    .iter()
                    .filter(|c| c.d >= (1.0 - eps / 8.0) * opt - TOL && c.d <= opt + TOL && !c.k_reduced)
                    .last();
                if let Some(g) = guess {
                    let r = g.r as f64;
                    out.push(ChainCheck::new(
                        "guess path_cost <= inner_cost - r d + (1 + eps/8) r exact_cost",
                        g.path_cost,
                        g.inner_cost - r * g.d + (1.0 + eps / 8.0) * r * opt,
                    ));
                    let alpha_obs = g.inner_cost / (opt + g.d);
                    out.push(ChainCheck::new(
                        "cost <= (2 + eps) alpha_obs exact_cost",
                        cost,
                        (2.0 + eps) * alpha_obs * opt,
                    ));
                }
            }
        }
    }
    out
}
