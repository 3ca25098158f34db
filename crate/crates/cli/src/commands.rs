use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use atsp_core::asadpour::{asadpour_solve, AsadpourParams};
use atsp_core::feige_singh::{algorithm_b, repeated_cycle_cover_atsp, AtsppParams};
use atsp_core::held_karp::solve_held_karp;
use atsp_core::oracle::{exact_atsp, exact_atspp, MAX_ORACLE_N};
use atsp_core::solver::{AsadpourSolver, AtspSolver, CycleCoverSolver};
use atsp_core::tsplib::{parse_tsplib, write_tsplib};
use atsp_core::{gen_instance, metric_closure, Instance};

use crate::args::{Algo, AtsppArgs, GenArgs, Inner, InstanceSource, SolveArgs};
use crate::error::{CliError, CliResult};
use crate::report::{
    chain_checks, CycleCoverDiagnostics, Diagnostics, InstanceInfo, Mode, Params, SolveReport, SCHEMA_VERSION,
};

/// Reads or generates the instance and closes it under shortest paths.
pub fn load_instance(source: &InstanceSource) -> CliResult<Instance> {
    match (&source.input, &source.gen) {
        (Some(path), _) => {
            let input_err = |reason: String| CliError::Input {
                path: path.display().to_string(),
                reason,
            };
            let text = fs::read_to_string(path).map_err(|e| input_err(e.to_string()))?;
            let raw = parse_tsplib(&text).map_err(|e| input_err(e.to_string()))?;
            metric_closure(&raw).map_err(|e| input_err(e.to_string()))
        }
        (None, Some(g)) => gen_instance(g.n, g.model, g.seed).map_err(|e| CliError::Usage(e.to_string())),
        (None, None) => Err(CliError::Usage("one of --input or --gen is required".into())),
    }
}

fn exact_tour_cost(inst: &Instance) -> CliResult<f64> {
    if inst.n() > MAX_ORACLE_N {
        return Err(CliError::Usage(format!(
            "--exact-compare supports at most {MAX_ORACLE_N} vertices, instance has {}",
            inst.n()
        )));
    }
    Ok(exact_atsp(inst)?.cost)
}

fn finish(mut report: SolveReport, started: Instant) -> SolveReport {
    report.ratio_to_exact = report.exact_cost.map(|opt| ratio(report.cost, opt));
    report.chain = chain_checks(&report);
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    report
}

pub(crate) fn ratio(cost: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        cost / reference
    } else if cost > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

pub fn solve(inst: &Instance, args: &SolveArgs) -> CliResult<SolveReport> {
    if args.algo == Algo::Asadpour && !(args.eps > 0.0 && args.eps <= 1.0) {
        return Err(CliError::Usage(format!("--eps must lie in (0, 1], got {}", args.eps)));
    }
    if args.samples == Some(0) {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let started = Instant::now();
    let (order, cost, opt_hk, exact, diagnostics) = match args.algo {
        Algo::Asadpour => {
            let params = AsadpourParams {
                epsilon: args.eps,
                samples: args.samples,
                ..Default::default()
            };
            let out = asadpour_solve(inst, args.seed, &params)?;
            let hk = out.diagnostics.opt_hk;
            (out.tour.order, out.tour.cost, hk, None, Diagnostics::Asadpour(out.diagnostics))
        }
        Algo::Cyclecover => {
            let run = repeated_cycle_cover_atsp(inst)?;
            let diag = CycleCoverDiagnostics {
                rounds: run.covers.len(),
                cover_weight: run.cover_weight(),
                covers: run.covers,
            };
            let hk = solve_held_karp(inst)?.opt_hk;
            (run.tour.order, run.tour.cost, hk, None, Diagnostics::CycleCover(diag))
        }
        Algo::Exact => {
            let tour = exact_atsp(inst)?;
            let hk = solve_held_karp(inst)?.opt_hk;
            (tour.order, tour.cost, hk, Some(tour.cost), Diagnostics::Exact {})
        }
    };
    let exact_cost = match exact {
        Some(c) => Some(c),
        None if args.exact_compare => Some(exact_tour_cost(inst)?),
        None => None,
    };
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        instance: InstanceInfo::of(inst),
        algorithm: args.algo.id().to_string(),
        mode: Mode::Tour,
        seed: args.seed,
        params: Params {
            epsilon: args.eps,
            samples: args.samples,
            s: None,
            t: None,
        },
        order,
        cost,
        opt_hk,
        exact_cost,
        ratio_to_exact: None,
        chain: Vec::new(),
        diagnostics,
        wall_time_ms: 0.0,
    };
    Ok(finish(report, started))
}

pub fn atspp(inst: &Instance, args: &AtsppArgs) -> CliResult<SolveReport> {
    let n = inst.n();
    if args.s >= n || args.t >= n {
        return Err(CliError::Usage(format!("--s and --t must be below n = {n}")));
    }
    if args.s == args.t {
        return Err(CliError::Usage("--s and --t must differ".into()));
    }
    if !(args.eps > 0.0) {
        return Err(CliError::Usage(format!("--eps must be positive, got {}", args.eps)));
    }
    if args.samples == Some(0) {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if args.exact_compare && n > MAX_ORACLE_N {
        return Err(CliError::Usage(format!(
            "--exact-compare supports at most {MAX_ORACLE_N} vertices, instance has {n}"
        )));
    }
    let started = Instant::now();
    let inner: Box<dyn AtspSolver> = match args.inner {
        Inner::Cyclecover => Box::new(CycleCoverSolver),
        Inner::Asadpour => Box::new(AsadpourSolver {
            params: AsadpourParams {
                samples: args.samples,
                ..Default::default()
            },
        }),
    };
    let params = AtsppParams {
        epsilon: args.eps,
        ..Default::default()
    };
    let out = algorithm_b(inst, args.s, args.t, &params, inner.as_ref(), args.seed)?;
    let exact_cost = if args.exact_compare {
        Some(exact_atspp(inst, args.s, args.t)?.cost)
    } else {
        None
    };
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        instance: InstanceInfo::of(inst),
        algorithm: format!("atspp/{}", inner.id()),
        mode: Mode::Path,
        seed: args.seed,
        params: Params {
            epsilon: args.eps,
            samples: args.samples,
            s: Some(args.s),
            t: Some(args.t),
        },
        order: out.path.order,
        cost: out.path.cost,
        opt_hk: out.diagnostics.hk_path_bound,
        exact_cost,
        ratio_to_exact: None,
        chain: Vec::new(),
        diagnostics: Diagnostics::Atspp(out.diagnostics),
        wall_time_ms: 0.0,
    };
    Ok(finish(report, started))
}

pub fn emit_report(report: &SolveReport, pretty: bool, output: Option<&Path>) -> CliResult<()> {
    let text = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    }
    .map_err(|e| CliError::Output(e.to_string()))?;
    match output {
        Some(path) => fs::write(path, text + "\n").map_err(|e| CliError::Output(e.to_string())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

pub fn gen(args: &GenArgs) -> CliResult<String> {
    let inst = gen_instance(args.spec.n, args.spec.model, args.spec.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(write_tsplib(&inst))
}
