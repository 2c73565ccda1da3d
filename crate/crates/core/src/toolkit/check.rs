//! Solver-versus-oracle sweeps with counterexample minimization.
//!
//! Case `id` uses a generator seed derived from `(seed, id)`, so a failing
//! case can be replayed on its own. Mismatching instances are shrunk by
//! dropping leaf edges and lowering `N` while the mismatch persists, then
//! written out as instance files.

use crate::cit::solve_cit;
use crate::dit::{solve_dit_traced, DitOptions};
use crate::error::{Error, Result};
use crate::greedy::solve_dit_n1;
use crate::mcdit::solve_mcdit;
use crate::oracle::{oracle_cit, oracle_dit, oracle_mcdit, oracle_single_edge};
use crate::report::{SolveReport, Status};
use crate::toolkit::bench::pool;
use crate::toolkit::format::instance_to_json;
use crate::toolkit::generate::{gen_instance, InstanceFamily};
use crate::tree::{ChildOrder, RawEdge, TreeInstance, EPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

pub const LAMBDA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckProblem {
    Cit,
    Dit,
    Dit1,
    Mcdit,
}

impl CheckProblem {
    pub fn name(self) -> &'static str {
        match self {
            CheckProblem::Cit => "cit",
            CheckProblem::Dit => "dit",
            CheckProblem::Dit1 => "dit1",
            CheckProblem::Mcdit => "mcdit",
        }
    }
}

impl FromStr for CheckProblem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [CheckProblem::Cit, CheckProblem::Dit, CheckProblem::Dit1, CheckProblem::Mcdit]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown problem `{s}` (expected cit, dit, dit1 or mcdit)"))
    }
}

/// Deliberate solver breakage for testing the harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// The solver sees the last edge with `u = w`.
    CapLastEdge,
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub problem: CheckProblem,
    pub count: usize,
    pub max_n: usize,
    pub seed: u64,
    pub mutation: Option<Mutation>,
    pub dit: DitOptions,
    /// Where minimized counterexamples go; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl CheckConfig {
    pub fn new(problem: CheckProblem, count: usize, max_n: usize, seed: u64) -> Self {
        CheckConfig { problem, count, max_n, seed, mutation: None, dit: DitOptions::default(), out_dir: None, workers: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub id: usize,
    pub seed: u64,
    pub n: usize,
    pub lambda: Option<f64>,
    pub solver: Option<f64>,
    pub oracle: Option<f64>,
    pub ok: bool,
    pub detail: String,
    pub counterexample: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub problem: CheckProblem,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub mismatches: Vec<CaseResult>,
}

impl CheckSummary {
    pub fn all_passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Generator seed for case `id`.
pub fn case_seed(seed: u64, id: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id as u64)
}

/// The instance checked as case `id`.
pub fn case_instance(cfg: &CheckConfig, id: usize) -> Result<TreeInstance> {
    let s = case_seed(cfg.seed, id);
    let n = ChaCha8Rng::seed_from_u64(s ^ 0x5EED).gen_range(1..=cfg.max_n.max(1));
    let family = match cfg.problem {
        CheckProblem::Dit1 => InstanceFamily::single_upgrade(n, s),
        _ => InstanceFamily::integer(n, s),
    };
    gen_instance(&family)
}

fn rebuild(inst: &TreeInstance, mut f: impl FnMut(&mut Vec<RawEdge>)) -> Result<TreeInstance> {
    let (root, mut raw) = inst.to_raw();
    f(&mut raw);
    TreeInstance::build(root, &raw, *inst.params(), ChildOrder::Ascending)
}

fn mutate(inst: &TreeInstance, m: Option<Mutation>) -> Result<TreeInstance> {
    match m {
        None => Ok(inst.clone()),
        Some(Mutation::CapLastEdge) => rebuild(inst, |raw| {
            if let Some(e) = raw.iter_mut().max_by_key(|e| e.child) {
                e.u = e.w;
            }
        }),
    }
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())),
        (None, None) => true,
        _ => false,
    }
}

/// Budget and bound checks on a reported plan, against the original instance.
fn plan_violation(inst: &TreeInstance, r: &SolveReport) -> Option<String> {
    let p = inst.params();
    let plan = r.plan.as_ref()?;
    if plan.hamming_cost(inst) > u64::from(p.n) {
        return Some(format!("Hamming cost {} exceeds N = {}", plan.hamming_cost(inst), p.n));
    }
    if plan.linf_cost(inst) > p.k + EPS {
        return Some(format!("cost {} exceeds K = {}", plan.linf_cost(inst), p.k));
    }
    if plan.shortest_path(inst) < p.m - EPS {
        return Some(format!("shortest path {} below M = {}", plan.shortest_path(inst), p.m));
    }
    if inst.edge_ids().any(|v| plan.weights[v] > inst.edge(v).u + EPS || plan.weights[v] < inst.edge(v).w - EPS) {
        return Some("weights outside [w, u]".into());
    }
    None
}

struct Verdict {
    lambda: Option<f64>,
    solver: Option<f64>,
    oracle: Option<f64>,
    ok: bool,
    detail: String,
}

fn judge(cfg: &CheckConfig, id: usize, inst: &TreeInstance) -> Result<Verdict> {
    let solver_inst = mutate(inst, cfg.mutation)?;
    let p = *inst.params();
    let objective = |r: &SolveReport| if r.status == Status::Optimal { r.objective } else { None };
    let v = match cfg.problem {
        CheckProblem::Cit => {
            let lambda = LAMBDA_GRID[id % LAMBDA_GRID.len()];
            let got = solve_cit(&solver_inst, p.k, i64::from(p.n), lambda)?.state.h;
            let want = oracle_cit(inst, p.k, u64::from(p.n), lambda)?.best_value;
            let ok = close(Some(got), want);
            Verdict { lambda: Some(lambda), solver: Some(got), oracle: want, ok, detail: String::new() }
        }
        CheckProblem::Dit => {
            let r = solve_dit_traced(&solver_inst, cfg.dit)?.report;
            let want = oracle_dit(inst)?.best_value;
            let got = objective(&r);
            let violation = plan_violation(inst, &r);
            let ok = close(got, want) && violation.is_none();
            Verdict { lambda: r.lambda_star, solver: got, oracle: want, ok, detail: violation.unwrap_or_default() }
        }
        CheckProblem::Dit1 => {
            let r = solve_dit_n1(&solver_inst)?;
            let want = oracle_single_edge(inst)?.best_value;
            let got = objective(&r);
            let violation = plan_violation(inst, &r);
            let ok = close(got, want) && violation.is_none();
            Verdict { lambda: None, solver: got, oracle: want, ok, detail: violation.unwrap_or_default() }
        }
        CheckProblem::Mcdit => {
            let r = solve_mcdit(&solver_inst)?;
            let want = oracle_mcdit(inst)?.best_value;
            let got = objective(&r);
            Verdict { lambda: None, solver: got, oracle: want, ok: close(got, want), detail: String::new() }
        }
    };
    Ok(v)
}

/// Shrinks a failing instance while it keeps failing.
pub fn minimize(cfg: &CheckConfig, id: usize, inst: &TreeInstance) -> TreeInstance {
    let fails = |t: &TreeInstance| judge(cfg, id, t).map(|v| !v.ok).unwrap_or(false);
    let mut cur = inst.clone();
    loop {
        let mut next = None;
        for leaf in cur.leaves() {
            if cur.edge_count() == 1 {
                break;
            }
            let label = cur.labels()[leaf];
            if let Ok(t) = rebuild(&cur, |raw| raw.retain(|e| e.child != label)) {
                if fails(&t) {
                    next = Some(t);
                    break;
                }
            }
        }
        if next.is_none() && cur.params().n > 1 {
            let mut p = *cur.params();
            p.n -= 1;
            if let Ok(t) = cur.with_params(p) {
                if fails(&t) {
                    next = Some(t);
                }
            }
        }
        match next {
            Some(t) => cur = t,
            None => return cur,
        }
    }
}

fn run_case(cfg: &CheckConfig, id: usize) -> Result<CaseResult> {
    let inst = case_instance(cfg, id)?;
    let v = judge(cfg, id, &inst)?;
    let mut counterexample = None;
    if !v.ok {
        if let Some(dir) = &cfg.out_dir {
            let small = minimize(cfg, id, &inst);
            std::fs::create_dir_all(dir).map_err(|e| Error::Precondition(format!("{}: {e}", dir.display())))?;
            let path = dir.join(format!("{}-seed{}-case{id}.json", cfg.problem.name(), cfg.seed));
            std::fs::write(&path, instance_to_json(&small))
                .map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
            counterexample = Some(path);
        }
    }
    Ok(CaseResult {
        id,
        seed: case_seed(cfg.seed, id),
        n: inst.edge_count(),
        lambda: v.lambda,
        solver: v.solver,
        oracle: v.oracle,
        ok: v.ok,
        detail: v.detail,
        counterexample,
    })
}

pub fn run_check(cfg: &CheckConfig) -> Result<CheckSummary> {
    let default = std::thread::available_parallelism().map_or(1, |n| n.get());
    let pool = pool(cfg.workers, default)?;
    let mut cases: Vec<CaseResult> =
        pool.install(|| (0..cfg.count).into_par_iter().map(|id| run_case(cfg, id)).collect::<Result<_>>())?;
    cases.sort_by_key(|c| c.id);
    let passed = cases.iter().filter(|c| c.ok).count();
    Ok(CheckSummary {
        problem: cfg.problem,
        seed: cfg.seed,
        count: cfg.count,
        passed,
        mismatches: cases.into_iter().filter(|c| !c.ok).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_sweeps_pass() {
        for problem in [CheckProblem::Cit, CheckProblem::Dit, CheckProblem::Dit1, CheckProblem::Mcdit] {
            let s = run_check(&CheckConfig::new(problem, 20, 7, 11)).unwrap();
            assert!(s.all_passed(), "{problem:?}: {:?}", s.mismatches);
        }
    }

    #[test]
    fn mutation_is_caught_and_minimized() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = CheckConfig::new(CheckProblem::Cit, 40, 8, 5);
        cfg.mutation = Some(Mutation::CapLastEdge);
        cfg.out_dir = Some(dir.path().to_path_buf());
        let s = run_check(&cfg).unwrap();
        assert!(!s.all_passed());
        let bad = &s.mismatches[0];
        let text = std::fs::read_to_string(bad.counterexample.as_ref().unwrap()).unwrap();
        let small = crate::toolkit::format::parse_instance(&text).unwrap();
        assert!(small.edge_count() <= bad.n);
        assert!(!judge(&cfg, bad.id, &small).unwrap().ok);
    }

    #[test]
    fn case_instances_replay() {
        let cfg = CheckConfig::new(CheckProblem::Dit, 5, 10, 3);
        assert_eq!(case_instance(&cfg, 4).unwrap(), case_instance(&cfg, 4).unwrap());
    }
}
