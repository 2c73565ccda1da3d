//! The l-infinity relaxation: without the Hamming budget every edge can be
//! raised to its capped weight independently.

use crate::error::{Error, Result};
use crate::report::{Problem, SolveReport, Status, UpgradePlan};
use crate::tree::{self, leaf_control, TreeInstance, EPS};
use std::time::Instant;

/// Capped upgraded weights for a given cost budget.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperWeights {
    /// `min(w + K/c, u)` per edge.
    pub bar_w: Vec<f64>,
    /// SRD gain of upgrading the edge alone: `|L(e)| * slack(e)`.
    pub increment: Vec<f64>,
    /// `bar_w - w` per edge.
    pub slack: Vec<f64>,
}

pub fn upper_weights(inst: &TreeInstance, k: f64) -> Result<UpperWeights> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::InvalidParameter { name: "K", value: k, reason: "must be finite and >= 0" });
    }
    let lc = leaf_control(inst);
    let n = inst.node_count();
    let mut bar_w = vec![0.0; n];
    let mut increment = vec![0.0; n];
    let mut slack = vec![0.0; n];
    for v in inst.edge_ids() {
        let e = inst.edge(v);
        bar_w[v] = (e.w + k / e.c).min(e.u);
        slack[v] = bar_w[v] - e.w;
        increment[v] = lc.count(v) as f64 * slack[v];
    }
    Ok(UpperWeights { bar_w, increment, slack })
}

/// Solves the relaxation at budget `k`: raise every edge to its cap, then check
/// the shortest-path bound. Infeasible reports carry the shortest leaf.
pub fn solve_dit_inf(inst: &TreeInstance, k: f64) -> Result<SolveReport> {
    let start = Instant::now();
    let ub = upper_weights(inst, k)?;
    let (leaf, shortest) = tree::shortest_leaf(inst, &ub.bar_w);
    let mut report;
    if shortest < inst.params().m - EPS {
        report = SolveReport::new(Problem::Relax, Status::Infeasible);
    } else {
        report = SolveReport::new(Problem::Relax, Status::Optimal);
        let upgraded = inst.edge_ids().filter(|&v| ub.slack[v] > 0.0).collect();
        let plan = UpgradePlan { upgraded, weights: ub.bar_w.clone() };
        report.objective = Some(tree::srd(inst, &plan.weights));
        report.plan = Some(plan);
    }
    report.witness_leaf = Some(leaf);
    report.wall_time = start.elapsed();
    Ok(report)
}
