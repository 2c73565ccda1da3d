use crate::tree::{self, TreeInstance};
use std::fmt;
use std::time::Duration;

/// The decision: which edges are upgraded and the resulting weights.
#[derive(Debug, Clone, PartialEq)]
pub struct UpgradePlan {
    /// Upgraded edge ids, ascending.
    pub upgraded: Vec<usize>,
    /// Per-edge weights after the upgrade (slot 0 unused).
    pub weights: Vec<f64>,
}

impl UpgradePlan {
    /// Plan that sets every edge in `upgraded` to `capped[e]` and leaves the
    /// rest at their original weight.
    pub fn from_edges(inst: &TreeInstance, capped: &[f64], mut upgraded: Vec<usize>) -> Self {
        upgraded.sort_unstable();
        upgraded.dedup();
        let mut weights = inst.weights();
        for &e in &upgraded {
            weights[e] = capped[e];
        }
        UpgradePlan { upgraded, weights }
    }

    pub fn unchanged(inst: &TreeInstance) -> Self {
        UpgradePlan { upgraded: Vec::new(), weights: inst.weights() }
    }

    pub fn hamming_cost(&self, inst: &TreeInstance) -> u64 {
        self.upgraded.iter().map(|&e| u64::from(inst.edge(e).r)).sum()
    }

    /// Largest weighted l-infinity modification cost.
    pub fn linf_cost(&self, inst: &TreeInstance) -> f64 {
        inst.edge_ids()
            .map(|e| inst.edge(e).c * (self.weights[e] - inst.edge(e).w))
            .fold(0.0, f64::max)
    }

    pub fn shortest_path(&self, inst: &TreeInstance) -> f64 {
        tree::shortest_leaf(inst, &self.weights).1
    }

    pub fn srd(&self, inst: &TreeInstance) -> f64 {
        tree::srd(inst, &self.weights)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// l-infinity relaxation without the Hamming budget.
    Relax,
    /// Single-upgrade greedy case.
    Dit1,
    /// Scalarized problem at a fixed lambda.
    Cit,
    /// Double interdiction with both budgets.
    Dit,
    /// Minimum cost variant.
    Mcdit,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Relax => "relax",
            Problem::Dit1 => "dit1",
            Problem::Cit => "cit",
            Problem::Dit => "dit",
            Problem::Mcdit => "mcdit",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
}

/// Uniform result record produced by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub problem: Problem,
    pub status: Status,
    /// Sum of root-leaf distances of the plan (scalarized value for `Cit`,
    /// minimum budget for `Mcdit`).
    pub objective: Option<f64>,
    pub plan: Option<UpgradePlan>,
    pub lambda_star: Option<f64>,
    pub k_star: Option<f64>,
    /// Leaf whose path certifies infeasibility, when one exists.
    pub witness_leaf: Option<usize>,
    /// Number of scalarized dynamic programs solved.
    pub cit_calls: usize,
    /// Number of double interdiction solves (minimum cost search only).
    pub dit_calls: usize,
    /// Bisection steps taken.
    pub iterations: usize,
    pub wall_time: Duration,
}

impl SolveReport {
    pub(crate) fn new(problem: Problem, status: Status) -> Self {
        SolveReport {
            problem,
            status,
            objective: None,
            plan: None,
            lambda_star: None,
            k_star: None,
            witness_leaf: None,
            cit_calls: 0,
            dit_calls: 0,
            iterations: 0,
            wall_time: Duration::ZERO,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Optimal
    }
}
