//! Minimum cost budget: bisection over integer `K` calling the double
//! interdiction solver, accepting `K` when its plan meets both `M` and `D`.

use crate::dit::{solve_dit_traced, DitOptions};
use crate::error::Result;
use crate::report::{Problem, SolveReport, Status};
use crate::tree::{TreeInstance, EPS};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct McditOptions {
    /// After the integer search, try the real breakpoints `c(e)(u(e) - w(e))`
    /// inside `(K* - 1, K*)`.
    pub refine_real: bool,
    pub dit: DitOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetProbe {
    pub k: f64,
    pub feasible: bool,
    pub srd: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct McditOutcome {
    pub report: SolveReport,
    /// Every distinct budget evaluated, in evaluation order.
    pub probes: Vec<BudgetProbe>,
    /// Upper end of the integer search range.
    pub k_upper: f64,
}

/// Upper end of the search range: `ceil(max_e c(e)(u(e) - w(e)))`.
pub fn budget_upper(inst: &TreeInstance) -> f64 {
    inst.edge_ids()
        .map(|v| {
            let e = inst.edge(v);
            e.c * (e.u - e.w)
        })
        .fold(0.0, f64::max)
        .ceil()
}

struct Search<'a> {
    inst: &'a TreeInstance,
    opts: DitOptions,
    cache: BTreeMap<u64, (BudgetProbe, SolveReport)>,
    probes: Vec<BudgetProbe>,
    cit_calls: usize,
}

impl Search<'_> {
    fn probe(&mut self, k: f64) -> Result<bool> {
        let key = k.to_bits();
        if let Some((p, _)) = self.cache.get(&key) {
            return Ok(p.passed);
        }
        let at_k = self.inst.with_cost_budget(k)?;
        let out = solve_dit_traced(&at_k, self.opts)?;
        self.cit_calls += out.report.cit_calls;
        let feasible = out.report.is_feasible();
        let srd = out.report.objective;
        let passed = feasible && srd.is_some_and(|s| s >= self.inst.params().d - EPS);
        let p = BudgetProbe { k, feasible, srd, passed };
        self.probes.push(p);
        self.cache.insert(key, (p, out.report));
        Ok(passed)
    }
}

pub fn solve_mcdit(inst: &TreeInstance) -> Result<SolveReport> {
    Ok(solve_mcdit_traced(inst, McditOptions::default())?.report)
}

pub fn solve_mcdit_traced(inst: &TreeInstance, opts: McditOptions) -> Result<McditOutcome> {
    let start = Instant::now();
    let k_upper = budget_upper(inst);
    let mut s = Search { inst, opts: opts.dit, cache: BTreeMap::new(), probes: Vec::new(), cit_calls: 0 };

    let finish = |s: Search, k_star: Option<f64>| {
        let mut report = match k_star {
            Some(k) => {
                let (_, dit) = &s.cache[&k.to_bits()];
                let mut r = SolveReport::new(Problem::Mcdit, Status::Optimal);
                r.objective = Some(k);
                r.k_star = Some(k);
                r.plan = dit.plan.clone();
                r.lambda_star = dit.lambda_star;
                r
            }
            None => SolveReport::new(Problem::Mcdit, Status::Infeasible),
        };
        report.dit_calls = s.probes.len();
        report.cit_calls = s.cit_calls;
        report.iterations = s.probes.len().saturating_sub(1);
        report.wall_time = start.elapsed();
        McditOutcome { report, probes: s.probes, k_upper }
    };

    if !s.probe(k_upper)? {
        return Ok(finish(s, None));
    }
    let (mut lo, mut hi) = (0u64, k_upper as u64);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if s.probe(mid as f64)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // the loop never looks at the lower end when it stays at 0
    let mut k_star = hi as f64;
    if lo < hi && s.probe(lo as f64)? {
        k_star = lo as f64;
    }

    if opts.refine_real && k_star > 0.0 {
        let mut critical: Vec<f64> = inst
            .edge_ids()
            .map(|v| {
                let e = inst.edge(v);
                e.c * (e.u - e.w)
            })
            .filter(|&x| x > k_star - 1.0 && x < k_star)
            .collect();
        critical.sort_by(f64::total_cmp);
        critical.dedup();
        for x in critical {
            if s.probe(x)? {
                k_star = x;
                break;
            }
        }
    }
    Ok(finish(s, Some(k_star)))
}
