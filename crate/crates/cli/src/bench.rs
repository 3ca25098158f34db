//! Batch runs over generated instances, one CSV row per (size, trial, algo).

use std::time::Instant;

use atsp_core::asadpour::{asadpour_solve, AsadpourParams};
use atsp_core::feige_singh::repeated_cycle_cover_atsp;
use atsp_core::held_karp::solve_held_karp;
use atsp_core::oracle::{exact_atsp, MAX_ORACLE_N};
use atsp_core::seed::derive_seed;
use atsp_core::gen_instance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{Algo, BenchArgs};
use crate::commands::ratio;
use crate::error::{CliError, CliResult};

pub const COLUMNS: [&str; 13] = [
    "size", "trial", "algo", "instance", "seed", "cost", "opt_hk", "ratio_to_hk", "exact_cost",
    "ratio_to_exact", "alpha", "s", "time_ms",
];

/// Column order matches `COLUMNS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub trial: usize,
    pub algo: String,
    pub instance: String,
    pub seed: u64,
    pub cost: f64,
    pub opt_hk: f64,
    /// Never below 1 for a correct run, since Held-Karp bounds the optimum.
    pub ratio_to_hk: f64,
    /// Empty above `--exact-max`.
    pub exact_cost: Option<f64>,
    pub ratio_to_exact: Option<f64>,
    /// Asadpour only.
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    pub time_ms: f64,
}

fn trial(args: &BenchArgs, size: usize, trial: usize) -> CliResult<Vec<BenchRow>> {
    let index = ((size as u64) << 32) | trial as u64;
    let inst = gen_instance(size, args.model, derive_seed(args.seed, "bench-instance", index))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = derive_seed(args.seed, "bench-solve", index);
    let opt_hk = solve_held_karp(&inst)?.opt_hk;
    let exact_cost = if size <= args.exact_max.min(MAX_ORACLE_N) {
        Some(exact_atsp(&inst)?.cost)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(args.algos.len());
    for &algo in &args.algos {
        let started = Instant::now();
        let (cost, alpha, s) = match algo {
            Algo::Asadpour => {
                let params = AsadpourParams {
                    epsilon: args.eps,
                    ..Default::default()
                };
                let out = asadpour_solve(&inst, seed, &params)?;
                let d = out.diagnostics;
                (out.tour.cost, Some(d.alpha_achieved), Some(d.s_achieved))
            }
            Algo::Cyclecover => (repeated_cycle_cover_atsp(&inst)?.tour.cost, None, None),
            Algo::Exact => (exact_atsp(&inst)?.cost, None, None),
        };
        rows.push(BenchRow {
            size,
            trial,
            algo: algo.id().to_string(),
            instance: inst.name().to_string(),
            seed,
            cost,
            opt_hk,
            ratio_to_hk: ratio(cost, opt_hk),
            exact_cost,
            ratio_to_exact: exact_cost.map(|opt| ratio(cost, opt)),
            alpha,
            s,
            time_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(rows)
}

/// Trials run concurrently; rows come back sorted by (size, trial, algo).
pub fn run(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    if args.sizes.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("--sizes entries must be at least 2".into()));
    }
    if args.algos.contains(&Algo::Asadpour) && !(args.eps > 0.0 && args.eps <= 1.0) {
        return Err(CliError::Usage(format!("--eps must lie in (0, 1], got {}", args.eps)));
    }
    if args.algos.contains(&Algo::Exact) && args.sizes.iter().any(|&n| n > MAX_ORACLE_N) {
        return Err(CliError::Usage(format!("--algos exact supports sizes up to {MAX_ORACLE_N}")));
    }
    let jobs: Vec<(usize, usize)> = args
        .sizes
        .iter()
        .flat_map(|&n| (0..args.trials).map(move |t| (n, t)))
        .collect();
    let mut rows: Vec<BenchRow> = jobs
        .par_iter()
        .map(|&(n, t)| trial(args, n, t))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| (a.size, a.trial, &a.algo).cmp(&(b.size, b.trial, &b.algo)));
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(COLUMNS).map_err(|e| CliError::Output(e.to_string()))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}
