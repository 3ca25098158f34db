use serde::{Deserialize, Serialize};

use super::{tree_marginals, GammaVector, SymmetricEdgeVector};
use crate::error::{Error, Result};

/// Maximum number of coordinate updates before giving up.
pub const FIT_STEP_CAP: usize = 10_000;

/// Fitted weights together with how closely they track `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub gamma: GammaVector,
    pub marginals: Vec<f64>,
    pub steps: usize,
    /// `max_e q_e / z_e`; at most `1 + ε` on success.
    pub max_ratio: f64,
    /// `min_e q_e / z_e`, reported but not constrained.
    pub min_ratio: f64,
}

/// Coordinate descent on `γ` until every marginal satisfies
/// `q_e <= (1 + ε) z_e`.
///
/// Each step takes the edge with the largest `q_e / z_e`. With the other
/// weights fixed, `q_e(λ_e) = λ_e B / (λ_e B + A)`, so scaling `λ_e` by
/// `t (1 - q_e) / (q_e (1 - t))` moves that marginal exactly to the target
/// `t = (1 + ε/2) min(z_e, 1 - 1e-9)`.
pub fn fit_gamma(z: &SymmetricEdgeVector, epsilon: f64) -> Result<GammaFit> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let mut gamma =
        GammaVector::new(z.n, z.edges.clone(), vec![0.0; z.edges.len()]).with_costs(z.edge_cost.clone());
    let ratios = |q: &[f64]| -> Vec<f64> { q.iter().zip(&z.z).map(|(q, z)| q / z).collect() };

    for steps in 0..=FIT_STEP_CAP {
        let q = tree_marginals(&gamma)?;
        let r = ratios(&q);
        let (worst, &max_ratio) = r
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if max_ratio <= 1.0 + epsilon {
            let min_ratio = r.iter().copied().fold(f64::INFINITY, f64::min);
            return Ok(GammaFit {
                gamma,
                marginals: q,
                steps,
                max_ratio,
                min_ratio,
            });
        }
        if steps == FIT_STEP_CAP {
            return Err(Error::FitNoConvergence {
                steps,
                edge: z.edges[worst],
                ratio: max_ratio,
            });
        }
        let qe = q[worst];
        if qe >= 1.0 - 1e-12 {
            // A bridge of the support: its marginal cannot move.
            return Err(Error::FitNoConvergence {
                steps,
                edge: z.edges[worst],
                ratio: max_ratio,
            });
        }
        let target = (1.0 + epsilon / 2.0) * z.z[worst].min(1.0 - 1e-9);
        gamma.gammas[worst] += (target * (1.0 - qe) / (qe * (1.0 - target))).ln();
    }
    unreachable!("loop returns at the step cap")
}
