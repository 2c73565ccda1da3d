//! JSON instance and report files.
//!
//! Instance:
//!
//! ```json
//! {"root": 0,
//!  "edges": [{"child": 1, "parent": 0, "w": 2, "u": 6, "c": 1, "r": 1}],
//!  "params": {"M": 4, "K": 4, "N": 2, "D": 0}}
//! ```
//!
//! Unknown fields are rejected. `D` may be omitted and defaults to 0.

use crate::error::Error;
use crate::oracle::OracleResult;
use crate::report::{Problem, SolveReport, Status};
use crate::tree::{ChildOrder, Params, RawEdge, TreeInstance};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(#[from] Error),
    #[error("params.N = {0} must be a nonnegative integer")]
    Budget(f64),
}

fn compact<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        s.serialize_i64(*x as i64)
    } else {
        s.serialize_f64(*x)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    child: u64,
    parent: u64,
    #[serde(serialize_with = "compact")]
    w: f64,
    #[serde(serialize_with = "compact")]
    u: f64,
    #[serde(serialize_with = "compact")]
    c: f64,
    #[serde(serialize_with = "compact")]
    r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsRecord {
    #[serde(rename = "M", serialize_with = "compact")]
    m: f64,
    #[serde(rename = "K", serialize_with = "compact")]
    k: f64,
    #[serde(rename = "N", serialize_with = "compact")]
    n: f64,
    #[serde(rename = "D", default, serialize_with = "compact")]
    d: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    root: u64,
    edges: Vec<EdgeRecord>,
    params: ParamsRecord,
}

pub fn parse_instance(text: &str) -> Result<TreeInstance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let p = &file.params;
    if !(p.n >= 0.0 && p.n.fract() == 0.0 && p.n <= f64::from(u32::MAX)) {
        return Err(FormatError::Budget(p.n));
    }
    let params = Params { m: p.m, k: p.k, n: p.n as u32, d: p.d };
    let edges: Vec<RawEdge> = file
        .edges
        .iter()
        .map(|e| RawEdge { child: e.child, parent: e.parent, w: e.w, u: e.u, c: e.c, r: e.r })
        .collect();
    Ok(TreeInstance::build(file.root, &edges, params, ChildOrder::Ascending)?)
}

pub fn instance_to_json(inst: &TreeInstance) -> String {
    let (root, raw) = inst.to_raw();
    let p = inst.params();
    let file = InstanceFile {
        root,
        edges: raw
            .into_iter()
            .map(|e| EdgeRecord { child: e.child, parent: e.parent, w: e.w, u: e.u, c: e.c, r: e.r })
            .collect(),
        params: ParamsRecord { m: p.m, k: p.k, n: f64::from(p.n), d: p.d },
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}

#[derive(Debug, Clone, Serialize)]
struct WeightRecord {
    child: u64,
    #[serde(serialize_with = "compact")]
    w_hat: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ReportRecord {
    problem: &'static str,
    status: &'static str,
    objective: Option<f64>,
    upgrades: Vec<u64>,
    weights: Vec<WeightRecord>,
    lambda_star: Option<f64>,
    k_star: Option<f64>,
    witness_leaf: Option<u64>,
    cit_calls: usize,
    dit_calls: usize,
    iterations: usize,
    wall_time_ms: f64,
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Optimal => "optimal",
        Status::Infeasible => "infeasible",
    }
}

/// Report as JSON, with edges named by their external child ids.
pub fn report_to_json(inst: &TreeInstance, r: &SolveReport) -> serde_json::Value {
    let labels = inst.labels();
    let (upgrades, weights) = match &r.plan {
        Some(plan) => (
            plan.upgraded.iter().map(|&e| labels[e]).collect(),
            inst.edge_ids().map(|e| WeightRecord { child: labels[e], w_hat: plan.weights[e] }).collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    let rec = ReportRecord {
        problem: r.problem.name(),
        status: status_name(r.status),
        objective: r.objective,
        upgrades,
        weights,
        lambda_star: r.lambda_star,
        k_star: r.k_star,
        witness_leaf: r.witness_leaf.map(|v| labels[v]),
        cit_calls: r.cit_calls,
        dit_calls: r.dit_calls,
        iterations: r.iterations,
        wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
    };
    serde_json::to_value(rec).expect("report serializes")
}

pub fn oracle_to_json(inst: &TreeInstance, problem: Problem, r: &OracleResult) -> serde_json::Value {
    let labels = inst.labels();
    serde_json::json!({
        "problem": problem.name(),
        "status": if r.is_feasible() { "optimal" } else { "infeasible" },
        "best_value": r.best_value,
        "best_sets": r.best_sets.iter().map(|s| s.iter().map(|&e| labels[e]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "enumerated": r.enumerated,
    })
}
