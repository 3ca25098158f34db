//! Thinness certificates for sampled trees.
//!
//! A tree `T` is `(α, s)`-thin with respect to `z*` when every cut carries
//! `|T ∩ δ(U)| <= α z*(δ(U))` and `c(T) <= s · OPT_HK`. The verifier reports
//! the smallest such `α` over the cuts it inspects and the achieved `s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxent::{SpanningTree, SymmetricEdgeVector};
use crate::oracle::{enumerate_cuts, mask_to_vertices, MAX_ORACLE_N};

/// ε used with the `β` target unless overridden.
pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThinnessMode {
    /// Every cut, `n <= 18`.
    Exhaustive,
    /// Singletons plus `10 n^2` random subsets. A lower bound on `α` only.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinnessReport {
    pub alpha_achieved: f64,
    pub s_achieved: f64,
    pub mode: ThinnessMode,
    pub cuts_checked: usize,
    pub worst_cut: Vec<usize>,
    /// `|T ∩ δ(worst_cut)|`.
    pub worst_load: usize,
    /// `z*(δ(worst_cut))`.
    pub worst_z: f64,
}

impl ThinnessReport {
    /// Whether `alpha_achieved` is exact rather than a lower bound.
    pub fn is_certified(&self) -> bool {
        self.mode == ThinnessMode::Exhaustive
    }
}

struct Scan {
    best: f64,
    worst: Vec<bool>,
    load: usize,
    zc: f64,
    checked: usize,
}

impl Scan {
    fn visit(&mut self, tree: &SpanningTree, z: &SymmetricEdgeVector, inside: &[bool]) -> Result<()> {
        let zc = z.cut_value(inside);
        if zc <= 1e-12 {
            return Err(Error::ZeroCut {
                subset: (0..inside.len()).filter(|&v| inside[v]).collect(),
            });
        }
        let load = tree.cut_load(inside);
        let ratio = load as f64 / zc;
        self.checked += 1;
        if ratio > self.best {
            self.best = ratio;
            self.worst = inside.to_vec();
            self.load = load;
            self.zc = zc;
        }
        Ok(())
    }
}

pub fn verify_thinness(
    tree: &SpanningTree,
    z: &SymmetricEdgeVector,
    opt_hk: f64,
    mode: ThinnessMode,
) -> Result<ThinnessReport> {
    let n = z.n;
    if tree.edges.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "tree has {} edges but z* spans {n} vertices",
            tree.edges.len()
        )));
    }
    let mut scan = Scan {
        best: f64::NEG_INFINITY,
        worst: vec![false; n],
        load: 0,
        zc: 0.0,
        checked: 0,
    };
    match mode {
        ThinnessMode::Exhaustive => {
            if n > MAX_ORACLE_N {
                return Err(Error::SizeOutOfRange {
                    n,
                    min: 2,
                    max: MAX_ORACLE_N,
                });
            }
            let mut inside = vec![false; n];
            for mask in enumerate_cuts(n)? {
                for (v, b) in inside.iter_mut().enumerate() {
                    *b = mask & (1 << v) != 0;
                }
                scan.visit(tree, z, &inside)?;
            }
        }
        ThinnessMode::Sampled { seed } => {
            let mut inside = vec![false; n];
            for v in 0..n {
                inside.iter_mut().for_each(|b| *b = false);
                inside[v] = true;
                scan.visit(tree, z, &inside)?;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut drawn = 0;
            while drawn < 10 * n * n {
                inside.iter_mut().for_each(|b| *b = rng.gen());
                let k = inside.iter().filter(|&&b| b).count();
                if k == 0 || k == n {
                    continue;
                }
                scan.visit(tree, z, &inside)?;
                drawn += 1;
            }
        }
    }
    let s_achieved = if opt_hk > 0.0 {
        tree.cost / opt_hk
    } else if tree.cost == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ThinnessReport {
        alpha_achieved: scan.best,
        s_achieved,
        mode,
        cuts_checked: scan.checked,
        worst_cut: (0..n).filter(|&v| scan.worst[v]).collect(),
        worst_load: scan.load,
        worst_z: scan.zc,
    })
}

/// Convenience wrapper around [`mask_to_vertices`] for report consumers.
pub fn cut_members(mask: u32, n: usize) -> Vec<usize> {
    mask_to_vertices(mask, n)
}

/// Target thinness `β = 4 log n / log log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaTarget {
    pub value: f64,
    pub epsilon: f64,
    /// Set for `n < 5`, where the formula is evaluated at `n = 5` instead.
    pub advisory: bool,
}

/// `β` with natural logarithms.
pub fn beta_target(n: usize, epsilon: f64) -> BetaTarget {
    beta_target_in_base(n, epsilon, std::f64::consts::E)
}

/// `β` with logarithms in `base`.
pub fn beta_target_in_base(n: usize, epsilon: f64, base: f64) -> BetaTarget {
    let advisory = n < 5;
    let nn = n.max(5) as f64;
    let log = |v: f64| v.ln() / base.ln();
    BetaTarget {
        value: 4.0 * log(nn) / log(log(nn)),
        epsilon,
        advisory,
    }
}
