//! Replays a stored report against its instance.

use std::fs;

use atsp_core::asadpour::AsadpourDiagnostics;
use atsp_core::feige_singh::{hk_path_bound, AtsppDiagnostics, CycleCover};
use atsp_core::held_karp::solve_held_karp;
use atsp_core::maxent::{fit_gamma, symmetrize, SpanningTree};
use atsp_core::oracle::{exact_atsp, exact_atspp, MAX_ORACLE_N};
use atsp_core::thin::{verify_thinness, ThinnessMode};
use atsp_core::{Instance, SpanningPath, Tour};

use crate::args::VerifyArgs;
use crate::commands::{load_instance, ratio};
use crate::error::{CliError, CliResult};
use crate::report::{chain_checks, Diagnostics, Mode, SolveReport, SCHEMA_VERSION, TOL};

/// Held-Karp values are recomputed by a floating-point LP; allow this much drift.
const LP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {} ({})", self.name, self.detail)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn close(&mut self, name: &str, reported: f64, actual: f64, tol: f64) {
        let pass = (reported - actual).abs() <= tol * actual.abs().max(1.0);
        self.push(name, pass, format!("reported {reported}, recomputed {actual}"));
    }
}

fn close_enough(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

pub fn read_report(path: &std::path::Path) -> CliResult<SolveReport> {
    let input_err = |reason: String| CliError::Input {
        path: path.display().to_string(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| input_err(e.to_string()))?;
    let report: SolveReport = serde_json::from_str(&text).map_err(|e| input_err(e.to_string()))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(input_err(format!(
            "schema version {} is not supported (expected {SCHEMA_VERSION})",
            report.schema_version
        )));
    }
    Ok(report)
}

/// All checks with their outcome. Errors only for unreadable input or a
/// report that belongs to a different instance.
pub fn verify(args: &VerifyArgs) -> CliResult<Vec<Check>> {
    let report = read_report(&args.report)?;
    let inst = load_instance(&args.source)?;
    let actual = inst.content_hash();
    if actual != report.instance.hash {
        return Err(CliError::HashMismatch {
            report: report.instance.hash.clone(),
            actual,
        });
    }
    Ok(verify_report(&report, &inst))
}

pub fn verify_report(report: &SolveReport, inst: &Instance) -> Vec<Check> {
    let mut c = Checks::default();
    let n = inst.n();
    c.push("instance size", report.instance.n == n, format!("n = {n}"));

    let order = report.order.clone();
    let recomputed = match report.mode {
        Mode::Tour => Tour::from_order(inst, order).map(|t| t.cost),
        Mode::Path => SpanningPath::simple(inst, order).and_then(|p| {
            let ends = (report.params.s, report.params.t);
            if ends == (Some(p.s), Some(p.t)) {
                Ok(p.cost)
            } else {
                Err(atsp_core::Error::InvalidOrder(format!(
                    "path runs {} -> {} but report asks for {ends:?}",
                    p.s, p.t
                )))
            }
        }),
    };
    match recomputed {
        Ok(cost) => {
            c.push("order valid", true, format!("{} vertices", report.order.len()));
            c.close("cost re-evaluation", report.cost, cost, TOL);
        }
        Err(e) => c.push("order valid", false, e.to_string()),
    }

    match report.mode {
        Mode::Tour => match solve_held_karp(inst) {
            Ok(hk) => c.close("opt_hk", report.opt_hk, hk.opt_hk, LP_TOL),
            Err(e) => c.push("opt_hk", false, e.to_string()),
        },
        Mode::Path => match (report.params.s, report.params.t) {
            (Some(s), Some(t)) => match hk_path_bound(inst, s, t) {
                Ok(v) => c.close("opt_hk (path)", report.opt_hk, v, LP_TOL),
                Err(e) => c.push("opt_hk (path)", false, e.to_string()),
            },
            _ => c.push("opt_hk (path)", false, "report lacks s and t"),
        },
    }

    if let Some(reported) = report.exact_cost {
        if n > MAX_ORACLE_N {
            c.push("exact_cost", false, format!("n = {n} is beyond the exact oracle"));
        } else {
            let exact = match (report.mode, report.params.s, report.params.t) {
                (Mode::Tour, _, _) => exact_atsp(inst).map(|t| t.cost),
                (Mode::Path, Some(s), Some(t)) => exact_atspp(inst, s, t).map(|p| p.cost),
                _ => Err(atsp_core::Error::InvalidParameter("report lacks s and t".into())),
            };
            match exact {
                Ok(v) => c.close("exact_cost", reported, v, TOL),
                Err(e) => c.push("exact_cost", false, e.to_string()),
            }
        }
        let want = ratio(report.cost, reported);
        let ok = report.ratio_to_exact.is_some_and(|r| close_enough(r, want, TOL));
        c.push("ratio_to_exact", ok, format!("reported {:?}, expected {want}", report.ratio_to_exact));
    } else {
        c.push("ratio_to_exact", report.ratio_to_exact.is_none(), "no exact cost reported");
    }

    let chain = chain_checks(report);
    c.push(
        "stored chain matches replay",
        chain == report.chain,
        format!("{} inequalities", chain.len()),
    );
    for check in &chain {
        c.push(
            format!("chain: {}", check.name),
            check.holds,
            format!("{} <= {}", check.lhs, check.rhs),
        );
    }

    match &report.diagnostics {
        Diagnostics::Asadpour(d) => asadpour_checks(&mut c, report, d, inst),
        Diagnostics::CycleCover(d) => {
            c.push("algorithm", report.algorithm == "cyclecover", report.algorithm.clone());
            cover_checks(&mut c, &d.covers, inst);
            let total: f64 = d.covers.iter().map(|cv| cv.weight).sum();
            c.close("cover_weight", d.cover_weight, total, TOL);
            c.push("rounds", d.rounds == d.covers.len(), format!("{} rounds", d.rounds));
        }
        Diagnostics::Exact {} => {
            c.push("algorithm", report.algorithm == "exact", report.algorithm.clone());
            if let Some(opt) = report.exact_cost {
                c.close("exact tour is optimal", report.cost, opt, TOL);
            }
        }
        Diagnostics::Atspp(d) => atspp_checks(&mut c, report, d, inst),
    }
    c.0
}

fn asadpour_checks(c: &mut Checks, report: &SolveReport, d: &AsadpourDiagnostics, inst: &Instance) {
    let n = inst.n();
    c.push("algorithm", report.algorithm == "asadpour", report.algorithm.clone());
    c.close("tour_cost", d.tour_cost, report.cost, TOL);
    c.close("diagnostics opt_hk", d.opt_hk, report.opt_hk, TOL);
    let hk = match solve_held_karp(inst) {
        Ok(hk) => hk,
        Err(e) => return c.push("held-karp replay", false, e.to_string()),
    };
    let z = symmetrize(&hk.x, inst);

    let tree = match SpanningTree::new(n, d.tree.edges.clone(), d.tree.cost) {
        Ok(t) => t,
        Err(e) => return c.push("tree is spanning", false, e.to_string()),
    };
    c.push("tree is spanning", true, format!("{} edges", tree.edges.len()));
    let mut tree_cost = 0.0;
    let mut outside = Vec::new();
    for &e in &tree.edges {
        match z.edge_index(e) {
            Some(i) => tree_cost += z.edge_cost[i],
            None => outside.push(e),
        }
    }
    c.push("tree inside z support", outside.is_empty(), format!("edges outside: {outside:?}"));
    c.close("tree_cost", d.tree_cost, tree_cost, LP_TOL);
    if hk.opt_hk > 0.0 {
        c.close("s_achieved", d.s_achieved, tree_cost / hk.opt_hk, LP_TOL);
    }

    match fit_gamma(&z, report.params.epsilon) {
        Ok(fit) => {
            let limit = 1.0 + report.params.epsilon;
            c.push(
                "fit marginals q <= (1 + eps) z",
                fit.max_ratio <= limit + TOL,
                format!("max q/z {:.6}, limit {limit}", fit.max_ratio),
            );
        }
        Err(e) => c.push("fit marginals q <= (1 + eps) z", false, e.to_string()),
    }

    if n <= MAX_ORACLE_N {
        match verify_thinness(&tree, &z, hk.opt_hk, ThinnessMode::Exhaustive) {
            Ok(thin) => {
                let pass = if d.alpha_certified {
                    close_enough(d.alpha_achieved, thin.alpha_achieved, LP_TOL)
                } else {
                    d.alpha_achieved <= thin.alpha_achieved + LP_TOL
                };
                c.push(
                    "thinness (exhaustive)",
                    pass,
                    format!(
                        "reported alpha {}, exhaustive alpha {} over {} cuts",
                        d.alpha_achieved, thin.alpha_achieved, thin.cuts_checked
                    ),
                );
            }
            Err(e) => c.push("thinness (exhaustive)", false, e.to_string()),
        }
    } else {
        c.push(
            "thinness (exhaustive)",
            !d.alpha_certified,
            format!("n = {n} is beyond exhaustive cut enumeration; reported alpha is a sampled lower bound"),
        );
    }
    if d.alpha_certified {
        c.push(
            "alpha_used >= alpha_achieved",
            d.alpha_used + TOL >= d.alpha_achieved,
            format!("{} vs {}", d.alpha_used, d.alpha_achieved),
        );
    }
}

/// Each cover must be a cycle cover of the representatives left by the
/// previous round, priced correctly.
fn cover_checks(c: &mut Checks, covers: &[CycleCover], inst: &Instance) {
    let mut active: Vec<usize> = (0..inst.n()).collect();
    for (round, cover) in covers.iter().enumerate() {
        let mut seen: Vec<usize> = cover.cycles.iter().flatten().copied().collect();
        seen.sort_unstable();
        let partition = seen == active && cover.cycles.iter().all(|cy| cy.len() >= 2);
        let weight: f64 = cover.arcs().map(|(u, v)| inst.cost(u, v)).sum();
        c.push(
            format!("round {round} cover"),
            partition && close_enough(cover.weight, weight, TOL),
            format!("{} cycles, weight {} (recomputed {weight})", cover.cycles.len(), cover.weight),
        );
        active = cover.cycles.iter().map(|cy| cy[0]).collect();
        active.sort_unstable();
    }
    c.push("contracted to one vertex", active.len() == 1, format!("{} left", active.len()));
}

fn atspp_checks(c: &mut Checks, report: &SolveReport, d: &AtsppDiagnostics, inst: &Instance) {
    c.push("algorithm", report.algorithm.starts_with("atspp/"), report.algorithm.clone());
    c.close("diagnostics hk_path_bound", d.hk_path_bound, report.opt_hk, TOL);
    if let (Some(s), Some(t)) = (report.params.s, report.params.t) {
        c.close("direct_cost", d.direct_cost, inst.cost(s, t), TOL);
    }
    c.close("lower = max(direct_cost, hk_path_bound)", d.lower, d.direct_cost.max(d.hk_path_bound), TOL);
    let in_range = d
        .candidates
        .iter()
        .all(|k| k.d <= d.upper * (1.0 + 1e-12) || d.candidates.len() == 1);
    let increasing = d.candidates.windows(2).all(|w| w[0].d < w[1].d);
    c.push(
        "guess grid",
        !d.candidates.is_empty() && in_range && increasing,
        format!("{} guesses in [{}, {}]", d.candidates.len(), d.lower, d.upper),
    );
    let best = d
        .candidates
        .iter()
        .enumerate()
        .fold(0, |b, (i, k)| if k.path_cost < d.candidates[b].path_cost { i } else { b });
    c.push(
        "chosen is the cheapest guess",
        d.chosen < d.candidates.len() && d.chosen == best,
        format!("chosen {}, cheapest {best}", d.chosen),
    );
}
