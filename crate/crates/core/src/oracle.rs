//! Exhaustive ground truth for small instances.
//!
//! Every subset of edges is visited in Gray-code order; flipping one edge
//! updates the Hamming total, the sum of distances and the paths of the
//! leaves below it incrementally. Upgraded edges sit at `min(w + K/c, u)`.
//! Nothing here calls into the solvers or their helpers: leaf sets, capped
//! weights and path lengths are recomputed from the raw instance.

use crate::error::{Error, Result};
use crate::tree::TreeInstance;

/// Default cap on the number of edges.
pub const DEFAULT_CAP: usize = 16;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Optimal value, `None` when no subset qualifies.
    pub best_value: Option<f64>,
    /// All optimal subsets as ascending edge-id lists.
    pub best_sets: Vec<Vec<usize>>,
    /// Number of subsets within the Hamming budget.
    pub enumerated: u64,
}

impl OracleResult {
    pub fn is_feasible(&self) -> bool {
        self.best_value.is_some()
    }
}

/// Value assigned to a subset, or `None` when the subset does not qualify.
struct Walk<'a> {
    inst: &'a TreeInstance,
    /// Leaves below each edge, as positions into `leaves`.
    below: Vec<Vec<usize>>,
    leaves: Vec<usize>,
    gain: Vec<f64>,
}

impl<'a> Walk<'a> {
    fn new(inst: &'a TreeInstance, k: f64, cap: usize) -> Result<Self> {
        let n = inst.edge_count();
        if n > cap || n > 30 {
            return Err(Error::OracleCap { n, cap: cap.min(30) });
        }
        let leaves: Vec<usize> = (1..=n).filter(|&v| inst.children(v).is_empty()).collect();
        let mut below = vec![Vec::new(); n + 1];
        for (pos, &t) in leaves.iter().enumerate() {
            let mut v = t;
            while v != 0 {
                below[v].push(pos);
                v = inst.parent(v);
            }
        }
        let gain = (0..=n)
            .map(|v| {
                if v == 0 {
                    return 0.0;
                }
                let e = inst.edge(v);
                (e.w + k / e.c).min(e.u) - e.w
            })
            .collect();
        Ok(Walk { inst, below, leaves, gain })
    }

    /// Visits every subset; `score(hamming, srd, min_path)` returns the value
    /// of a subset or `None` to skip it.
    fn run(&self, budget: u64, score: impl Fn(f64, f64) -> Option<f64>) -> OracleResult {
        let n = self.inst.edge_count();
        let mut path = vec![0.0; self.leaves.len()];
        for (pos, &t) in self.leaves.iter().enumerate() {
            let mut v = t;
            while v != 0 {
                path[pos] += self.inst.edge(v).w;
                v = self.inst.parent(v);
            }
        }
        let mut total: f64 = path.iter().sum();
        let mut hamming: u64 = 0;
        let mut mask: u32 = 0;

        let mut result = OracleResult { best_value: None, best_sets: Vec::new(), enumerated: 0 };
        let mut best_masks: Vec<u32> = Vec::new();
        let mut visit = |mask: u32, hamming: u64, total: f64, path: &[f64]| {
            if hamming > budget {
                return;
            }
            result.enumerated += 1;
            let shortest = path.iter().copied().fold(f64::INFINITY, f64::min);
            let Some(value) = score(total, shortest) else { return };
            match result.best_value {
                Some(b) if value < b - TOL => {}
                Some(b) if value <= b + TOL => best_masks.push(mask),
                _ => {
                    result.best_value = Some(value);
                    best_masks.clear();
                    best_masks.push(mask);
                }
            }
        };

        visit(mask, hamming, total, &path);
        for i in 1u64..(1u64 << n) {
            let bit = i.trailing_zeros() as usize;
            let v = bit + 1;
            let delta = if mask & (1 << bit) == 0 { self.gain[v] } else { -self.gain[v] };
            mask ^= 1 << bit;
            let r = u64::from(self.inst.edge(v).r);
            hamming = if mask & (1 << bit) != 0 { hamming + r } else { hamming - r };
            for &pos in &self.below[v] {
                path[pos] += delta;
            }
            total += delta * self.below[v].len() as f64;
            visit(mask, hamming, total, &path);
        }

        best_masks.sort_unstable_by_key(|m| (m.count_ones(), m.reverse_bits()));
        result.best_sets = best_masks.into_iter().map(|m| (0..n).filter(|b| m & (1 << b) != 0).map(|b| b + 1).collect()).collect();
        result
    }
}

/// Maximum of `lambda * shortest + (1 - lambda) * srd` over subsets within
/// the Hamming budget.
pub fn oracle_cit(inst: &TreeInstance, k: f64, budget: u64, lambda: f64) -> Result<OracleResult> {
    oracle_cit_capped(inst, k, budget, lambda, DEFAULT_CAP)
}

pub fn oracle_cit_capped(inst: &TreeInstance, k: f64, budget: u64, lambda: f64, cap: usize) -> Result<OracleResult> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let walk = Walk::new(inst, k, cap)?;
    Ok(walk.run(budget, |total, shortest| Some(lambda * shortest + (1.0 - lambda) * total)))
}

/// Maximum sum of distances over subsets within the Hamming budget whose
/// shortest path is at least `M`, using the instance's own parameters.
pub fn oracle_dit(inst: &TreeInstance) -> Result<OracleResult> {
    oracle_dit_capped(inst, DEFAULT_CAP)
}

pub fn oracle_dit_capped(inst: &TreeInstance, cap: usize) -> Result<OracleResult> {
    let p = inst.params();
    let walk = Walk::new(inst, p.k, cap)?;
    Ok(walk.run(u64::from(p.n), |total, shortest| (shortest >= p.m - TOL).then_some(total)))
}

/// Like [`oracle_dit`] restricted to plans that upgrade at most one edge,
/// ignoring `r` and `N`.
pub fn oracle_single_edge(inst: &TreeInstance) -> Result<OracleResult> {
    let p = inst.params();
    let n = inst.edge_count();
    let k = p.k;
    let mut result = OracleResult { best_value: None, best_sets: Vec::new(), enumerated: 0 };
    let leaves: Vec<usize> = (1..=n).filter(|&v| inst.children(v).is_empty()).collect();
    let path_to = |t: usize, raised: Option<usize>| {
        let mut total = 0.0;
        let mut v = t;
        while v != 0 {
            let e = inst.edge(v);
            total += if Some(v) == raised { (e.w + k / e.c).min(e.u) } else { e.w };
            v = inst.parent(v);
        }
        total
    };
    for raised in std::iter::once(None).chain((1..=n).map(Some)) {
        result.enumerated += 1;
        let paths: Vec<f64> = leaves.iter().map(|&t| path_to(t, raised)).collect();
        let shortest = paths.iter().copied().fold(f64::INFINITY, f64::min);
        if shortest < p.m - TOL {
            continue;
        }
        let total: f64 = paths.iter().sum();
        let set: Vec<usize> = raised.into_iter().collect();
        match result.best_value {
            Some(b) if total < b - TOL => {}
            Some(b) if total <= b + TOL => result.best_sets.push(set),
            _ => {
                result.best_value = Some(total);
                result.best_sets = vec![set];
            }
        }
    }
    Ok(result)
}

/// Smallest integer `K` in `[0, ceil(max c(u - w))]` whose exhaustive optimum
/// meets both `M` and `D`, by linear scan. `best_sets` holds the optimal
/// subsets at that budget.
pub fn oracle_mcdit(inst: &TreeInstance) -> Result<OracleResult> {
    let p = *inst.params();
    let n = inst.edge_count();
    if n > DEFAULT_CAP {
        return Err(Error::OracleCap { n, cap: DEFAULT_CAP });
    }
    let top = (1..=n)
        .map(|v| {
            let e = inst.edge(v);
            e.c * (e.u - e.w)
        })
        .fold(0.0, f64::max)
        .ceil() as u64;
    let mut enumerated = 0;
    for k in 0..=top {
        let at_k = inst.with_cost_budget(k as f64)?;
        let res = oracle_dit(&at_k)?;
        enumerated += res.enumerated;
        if res.best_value.is_some_and(|v| v >= p.d - TOL) {
            return Ok(OracleResult { best_value: Some(k as f64), best_sets: res.best_sets, enumerated });
        }
    }
    Ok(OracleResult { best_value: None, best_sets: Vec::new(), enumerated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{ChildOrder, Params, RawEdge};

    fn example(m: f64, n: u32, d: f64) -> TreeInstance {
        let e = |child, parent, w, u, c, r| RawEdge { child, parent, w, u, c, r };
        TreeInstance::build(
            0,
            &[e(1, 0, 2.0, 6.0, 1.0, 1.0), e(2, 1, 3.0, 4.0, 2.0, 2.0), e(3, 0, 1.0, 10.0, 1.0, 1.0)],
            Params { m, k: 4.0, n, d },
            ChildOrder::Ascending,
        )
        .unwrap()
    }

    #[test]
    fn cit_by_hand() {
        let t = example(0.0, 2, 0.0);
        let r = oracle_cit(&t, 4.0, 2, 0.0).unwrap();
        assert_eq!(r.best_value, Some(14.0));
        assert_eq!(r.best_sets, vec![vec![1, 3]]);
        // subsets with sum r <= 2: {}, {1}, {2}, {3}, {1,3}
        assert_eq!(r.enumerated, 5);
        let r = oracle_cit(&t, 4.0, 0, 1.0).unwrap();
        assert_eq!(r.best_value, Some(1.0));
        let r = oracle_cit(&t, 4.0, 4, 0.5).unwrap();
        // everything upgraded: paths 10 and 5
        assert_eq!(r.best_value, Some(0.5 * 5.0 + 0.5 * 15.0));
    }

    #[test]
    fn dit_by_hand() {
        assert_eq!(oracle_dit(&example(4.0, 2, 0.0)).unwrap().best_value, Some(14.0));
        assert_eq!(oracle_dit(&example(4.0, 2, 0.0)).unwrap().best_sets, vec![vec![1, 3]]);
        assert_eq!(oracle_dit(&example(6.0, 2, 0.0)).unwrap().best_value, None);
        let t = example(0.0, 0, 0.0);
        assert_eq!(oracle_dit(&t).unwrap().best_value, Some(6.0));
    }

    #[test]
    fn single_edge_by_hand() {
        let r = oracle_single_edge(&example(4.0, 1, 0.0)).unwrap();
        assert_eq!(r.best_value, Some(10.0));
        assert_eq!(r.best_sets, vec![vec![3]]);
        let r = oracle_single_edge(&example(0.0, 1, 0.0)).unwrap();
        assert_eq!(r.best_sets, vec![vec![1], vec![3]]);
        assert_eq!(oracle_single_edge(&example(6.0, 1, 0.0)).unwrap().best_value, None);
    }

    #[test]
    fn mcdit_by_scan() {
        assert_eq!(oracle_mcdit(&example(4.0, 2, 14.0)).unwrap().best_value, Some(4.0));
        assert_eq!(oracle_mcdit(&example(1.0, 2, 6.0)).unwrap().best_value, Some(0.0));
        assert_eq!(oracle_mcdit(&example(0.0, 2, 21.0)).unwrap().best_value, None);
    }

    #[test]
    fn cap_enforced() {
        let edges: Vec<RawEdge> =
            (1..=17).map(|v| RawEdge { child: v, parent: 0, w: 1.0, u: 2.0, c: 1.0, r: 1.0 }).collect();
        let t = TreeInstance::build(0, &edges, Params::default(), ChildOrder::Ascending).unwrap();
        assert!(matches!(oracle_dit(&t), Err(Error::OracleCap { .. })));
    }

    #[test]
    fn enumeration_count_matches_binomials() {
        let edges: Vec<RawEdge> =
            (1..=10).map(|v| RawEdge { child: v, parent: (v - 1) / 3, w: 1.0, u: 2.0, c: 1.0, r: 1.0 }).collect();
        let t = TreeInstance::build(0, &edges, Params::default(), ChildOrder::Ascending).unwrap();
        let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        for budget in 0..=4 {
            let r = oracle_cit(&t, 1.0, budget, 0.5).unwrap();
            let expected: u64 = (0..=budget).map(|j| binom(10, j)).sum();
            assert_eq!(r.enumerated, expected);
        }
    }
}
