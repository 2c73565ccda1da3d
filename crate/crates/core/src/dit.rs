//! Bisection over the scalarization weight.
//!
//! At `lambda = 1` the scalarized optimum maximizes the shortest path, so if
//! it misses `M` nothing can meet it. Otherwise the search narrows `[lr, rr]`
//! around the smallest weight whose optimum still meets `M`, stopping once the
//! interval is no wider than `1 / U^2`, and returns the plan at `rr`.

use crate::cit::{solve_cit_with, DpState};
use crate::error::{Error, Result};
use crate::relax::upper_weights;
use crate::report::{Problem, SolveReport, Status, UpgradePlan};
use crate::tree::{self, leaf_control, TreeInstance, EPS};
use log::warn;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DitOptions {
    /// Accept a midpoint only when its shortest path is strictly above `M`
    /// (otherwise `>= M`).
    pub strict_acceptance: bool,
    /// Solve `lambda = 0` up front and stop as soon as an accepted midpoint
    /// reaches its sum. Costs one extra solve.
    pub early_exit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionStep {
    pub lambda: f64,
    pub sp: f64,
    pub srd: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionTrace {
    /// `min_k u(P_k) + sum_e |L(e)| u(e)`.
    pub u_bound: f64,
    /// Interval width at which the search stops.
    pub threshold: f64,
    pub steps: Vec<BisectionStep>,
    pub lambda_star: f64,
}

impl BisectionTrace {
    /// Iteration bound `ceil(2 log2 U) + 1`.
    pub fn iteration_bound(&self) -> usize {
        (-self.threshold.log2()).ceil() as usize + 1
    }
}

#[derive(Debug, Clone)]
pub struct DitOutcome {
    pub report: SolveReport,
    pub trace: Option<BisectionTrace>,
    /// The plan at `lambda*` missed `M` and an earlier feasible plan was used.
    pub guard_fallback: bool,
}

#[derive(Debug, Clone)]
struct Evaluated {
    lambda: f64,
    state: DpState,
    plan: UpgradePlan,
}

/// `min_k u(P_k) + sum_e |L(e)| u(e)`.
pub fn u_bound(inst: &TreeInstance) -> f64 {
    let u = inst.upper_bounds();
    tree::shortest_leaf(inst, &u).1 + tree::srd(inst, &u)
}

pub fn solve_dit(inst: &TreeInstance) -> Result<SolveReport> {
    Ok(solve_dit_traced(inst, DitOptions::default())?.report)
}

pub fn solve_dit_traced(inst: &TreeInstance, opts: DitOptions) -> Result<DitOutcome> {
    let start = Instant::now();
    let p = *inst.params();
    if p.n < 1 {
        return Err(Error::Precondition("double interdiction solver needs N >= 1".into()));
    }
    let ub = upper_weights(inst, p.k)?;
    let lc = leaf_control(inst);
    let budget = p.n as usize;
    let mut cit_calls = 0;
    let mut eval = |lambda: f64| -> Result<Evaluated> {
        cit_calls += 1;
        let sol = solve_cit_with(inst, &ub, &lc, budget, lambda)?;
        Ok(Evaluated { lambda, state: sol.state, plan: sol.plan })
    };

    let top = eval(1.0)?;
    if top.state.sp < p.m - EPS {
        let mut report = SolveReport::new(Problem::Dit, Status::Infeasible);
        report.witness_leaf = Some(tree::shortest_leaf(inst, &top.plan.weights).0);
        report.cit_calls = cit_calls;
        report.wall_time = start.elapsed();
        return Ok(DitOutcome { report, trace: None, guard_fallback: false });
    }

    let u = u_bound(inst);
    let threshold = if u <= 1.0 { 0.25 } else { 1.0 / (u * u) };
    let bottom_srd = if opts.early_exit { Some(eval(0.0)?.state.srd) } else { None };
    let accepts = |s: &DpState| if opts.strict_acceptance { s.sp - p.m > EPS } else { s.sp >= p.m - EPS };

    let mut steps = Vec::new();
    let (mut lr, mut rr) = (0.0f64, 1.0f64);
    // plans already solved, so the final solve at rr is a lookup
    let mut at_rr = top.clone();
    let mut feasible_seen = vec![top.clone()];
    while rr - lr > threshold {
        let mid = 0.5 * (lr + rr);
        let ev = eval(mid)?;
        let accepted = accepts(&ev.state);
        steps.push(BisectionStep { lambda: mid, sp: ev.state.sp, srd: ev.state.srd, accepted });
        if ev.state.sp >= p.m - EPS {
            feasible_seen.push(ev.clone());
        }
        if accepted {
            rr = mid;
            let done = bottom_srd.is_some_and(|b| ev.state.srd >= b - EPS);
            at_rr = ev;
            if done {
                break;
            }
        } else {
            lr = mid;
        }
    }
    debug_assert_eq!(at_rr.lambda, rr);

    let mut chosen = at_rr;
    let mut guard_fallback = false;
    if chosen.state.sp < p.m - EPS {
        let fallback = feasible_seen
            .iter()
            .min_by(|a, b| a.lambda.total_cmp(&b.lambda))
            .expect("lambda = 1 plan is feasible")
            .clone();
        warn!("plan at lambda* = {rr} misses M = {}; falling back to lambda = {}", p.m, fallback.lambda);
        chosen = fallback;
        guard_fallback = true;
    }

    let mut report = SolveReport::new(Problem::Dit, Status::Optimal);
    report.objective = Some(chosen.state.srd);
    report.lambda_star = Some(rr);
    report.plan = Some(chosen.plan);
    report.cit_calls = cit_calls;
    report.iterations = steps.len();
    report.wall_time = start.elapsed();
    let trace = BisectionTrace { u_bound: u, threshold, steps, lambda_star: rr };
    Ok(DitOutcome { report, trace: Some(trace), guard_fallback })
}
