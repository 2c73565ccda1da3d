//! Linear-time greedy solver for the single-upgrade case (`N = 1`, `r = 1`).

use crate::error::{Error, Result};
use crate::relax::upper_weights;
use crate::report::{Problem, SolveReport, Status, UpgradePlan};
use crate::tree::{self, SubtreeIntervals, TreeInstance, EPS, ROOT};
use std::time::Instant;

/// The chosen edge and the plan that raises only that edge to its cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleUpgrade {
    pub edge: usize,
    pub plan: UpgradePlan,
    pub objective: f64,
}

/// Which branch of the case analysis produced the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyCase {
    /// All paths already meet `M`; the largest increment wins.
    AlreadyFeasible,
    /// One violated leaf; best qualifying edge on its path.
    SingleViolation,
    /// Several violated leaves sharing a qualifying ancestor edge.
    SharedEdge,
    /// No edge on the shortest path has enough slack.
    InsufficientSlack,
    /// Several violated leaves with no common qualifying edge.
    NoCommonEdge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub case: GreedyCase,
    pub shortest_leaf: usize,
    pub upgrade: Option<SingleUpgrade>,
}

fn argmax_increment(candidates: impl Iterator<Item = usize>, increment: &[f64]) -> Option<usize> {
    // strict comparison keeps the smallest index on ties
    candidates.fold(None, |best, e| match best {
        Some(b) if increment[b] >= increment[e] => Some(b),
        _ => Some(e),
    })
}

pub fn greedy_single_upgrade(inst: &TreeInstance) -> Result<GreedyOutcome> {
    let p = inst.params();
    if p.n != 1 {
        return Err(Error::Precondition(format!("single-upgrade solver needs N = 1, got {}", p.n)));
    }
    if let Some(v) = inst.edge_ids().find(|&v| inst.edge(v).r != 1) {
        return Err(Error::Precondition(format!("single-upgrade solver needs r = 1, edge {v} has r = {}", inst.edge(v).r)));
    }
    let ub = upper_weights(inst, p.k)?;
    let depth = tree::depths(inst, &inst.weights());
    let (k_star, shortest) = tree::shortest_leaf(inst, &inst.weights());

    let finish = |case, edge: Option<usize>| {
        let upgrade = edge.map(|e| {
            let plan = UpgradePlan::from_edges(inst, &ub.bar_w, vec![e]);
            let objective = plan.srd(inst);
            SingleUpgrade { edge: e, plan, objective }
        });
        GreedyOutcome { case, shortest_leaf: k_star, upgrade }
    };

    if shortest >= p.m - EPS {
        let e = argmax_increment(inst.edge_ids(), &ub.increment);
        return Ok(finish(GreedyCase::AlreadyFeasible, e));
    }

    let need = p.m - shortest;
    let mut on_path = Vec::new();
    let mut v = k_star;
    while v != ROOT {
        on_path.push(v);
        v = inst.parent(v);
    }
    on_path.reverse();
    let max_slack = on_path.iter().map(|&e| ub.slack[e]).fold(f64::NEG_INFINITY, f64::max);
    if max_slack < need - EPS {
        return Ok(finish(GreedyCase::InsufficientSlack, None));
    }

    let violated: Vec<usize> = inst.edge_ids().filter(|&t| inst.is_leaf(t) && depth[t] < p.m - EPS).collect();
    let iv = SubtreeIntervals::new(inst);
    let lo = violated.iter().map(|&t| iv.entry[t]).min().unwrap_or(0);
    let hi = violated.iter().map(|&t| iv.entry[t]).max().unwrap_or(0);
    let qualifies = |e: usize| ub.slack[e] >= need - EPS && iv.entry[e] <= lo && hi <= iv.exit[e];
    let best = argmax_increment(on_path.iter().copied().filter(|&e| qualifies(e)), &ub.increment);

    let case = if violated.len() == 1 { GreedyCase::SingleViolation } else { GreedyCase::SharedEdge };
    match best {
        Some(e) => Ok(finish(case, Some(e))),
        None => Ok(finish(GreedyCase::NoCommonEdge, None)),
    }
}

/// Runs the greedy and packages the result as a [`SolveReport`].
pub fn solve_dit_n1(inst: &TreeInstance) -> Result<SolveReport> {
    let start = Instant::now();
    let out = greedy_single_upgrade(inst)?;
    let mut report = match out.upgrade {
        Some(up) => {
            let mut r = SolveReport::new(Problem::Dit1, Status::Optimal);
            r.objective = Some(up.objective);
            r.plan = Some(up.plan);
            r
        }
        None => {
            let mut r = SolveReport::new(Problem::Dit1, Status::Infeasible);
            r.witness_leaf = Some(out.shortest_leaf);
            r
        }
    };
    report.wall_time = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{ChildOrder, Params, RawEdge};

    fn example(m: f64) -> TreeInstance {
        let e = |child, parent, w, u, c| RawEdge { child, parent, w, u, c, r: 1.0 };
        TreeInstance::build(
            0,
            &[e(1, 0, 2.0, 6.0, 1.0), e(2, 1, 3.0, 4.0, 2.0), e(3, 0, 1.0, 10.0, 1.0)],
            Params { m, k: 4.0, n: 1, d: 0.0 },
            ChildOrder::Ascending,
        )
        .unwrap()
    }

    #[test]
    fn single_violation_upgrades_short_leaf() {
        let out = greedy_single_upgrade(&example(4.0)).unwrap();
        assert_eq!(out.case, GreedyCase::SingleViolation);
        let up = out.upgrade.unwrap();
        assert_eq!(up.edge, 3);
        assert_eq!(up.plan.weights[3], 5.0);
        assert_eq!(up.objective, 10.0);
    }

    #[test]
    fn feasible_start_takes_largest_increment_lowest_index() {
        let out = greedy_single_upgrade(&example(0.0)).unwrap();
        assert_eq!(out.case, GreedyCase::AlreadyFeasible);
        let up = out.upgrade.unwrap();
        assert_eq!(up.edge, 1);
        assert_eq!(up.objective, 10.0);
    }

    #[test]
    fn insufficient_slack_is_infeasible() {
        let out = greedy_single_upgrade(&example(6.0)).unwrap();
        assert_eq!(out.case, GreedyCase::InsufficientSlack);
        let r = solve_dit_n1(&example(6.0)).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert_eq!(r.witness_leaf, Some(3));
    }

    #[test]
    fn two_short_leaves_without_common_edge() {
        // s -> a (w 1), s -> b (w 1), both below M = 3 with ample slack
        let e = |child, parent| RawEdge { child, parent, w: 1.0, u: 10.0, c: 1.0, r: 1.0 };
        let t = TreeInstance::build(0, &[e(1, 0), e(2, 0)], Params { m: 3.0, k: 5.0, n: 1, d: 0.0 }, ChildOrder::Ascending)
            .unwrap();
        let out = greedy_single_upgrade(&t).unwrap();
        assert_eq!(out.case, GreedyCase::NoCommonEdge);
        assert!(out.upgrade.is_none());
    }

    #[test]
    fn violated_leaves_in_different_branches() {
        // s -> a -> {b, c}, s -> d
        let e = |child, parent, u| RawEdge { child, parent, w: 1.0, u, c: 1.0, r: 1.0 };
        let t = TreeInstance::build(
            0,
            &[e(1, 0, 10.0), e(2, 1, 1.0), e(3, 1, 1.0), e(4, 0, 10.0)],
            Params { m: 4.0, k: 5.0, n: 1, d: 0.0 },
            ChildOrder::Ascending,
        )
        .unwrap();
        // leaf 4 has path 1 < 4 too, so three leaves violate and nothing covers all
        assert_eq!(greedy_single_upgrade(&t).unwrap().case, GreedyCase::NoCommonEdge);
        let t = t.with_params(Params { m: 2.0, ..*t.params() }).unwrap();
        let out = greedy_single_upgrade(&t).unwrap();
        assert_eq!(out.case, GreedyCase::SingleViolation);
        assert_eq!(out.upgrade.unwrap().edge, 4);
    }

    #[test]
    fn shared_edge_case() {
        // s -> a -> {b, c} with a long sibling leaf d
        let e = |child, parent, w, u| RawEdge { child, parent, w, u, c: 1.0, r: 1.0 };
        let t = TreeInstance::build(
            0,
            &[e(1, 0, 1.0, 10.0), e(2, 1, 1.0, 1.0), e(3, 1, 1.0, 1.0), e(4, 0, 5.0, 5.0)],
            Params { m: 4.0, k: 5.0, n: 1, d: 0.0 },
            ChildOrder::Ascending,
        )
        .unwrap();
        let out = greedy_single_upgrade(&t).unwrap();
        assert_eq!(out.case, GreedyCase::SharedEdge);
        let up = out.upgrade.unwrap();
        assert_eq!(up.edge, 1);
        assert_eq!(up.objective, 7.0 + 7.0 + 5.0);
    }

    #[test]
    fn rejects_general_budgets() {
        let t = example(0.0);
        let t2 = t.with_params(Params { n: 2, ..*t.params() }).unwrap();
        assert!(matches!(solve_dit_n1(&t2), Err(Error::Precondition(_))));
        let e = |child, parent, r| RawEdge { child, parent, w: 1.0, u: 2.0, c: 1.0, r };
        let t3 = TreeInstance::build(0, &[e(1, 0, 2.0)], Params { n: 1, ..Params::default() }, ChildOrder::Ascending).unwrap();
        assert!(matches!(solve_dit_n1(&t3), Err(Error::Precondition(_))));
    }
}
