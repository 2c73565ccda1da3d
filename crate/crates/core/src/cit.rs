//! Dynamic program for the scalarized problem
//!
//! ```text
//! max  lambda * StRD(w^) + (1 - lambda) * SRD(w^)
//! s.t. sum of r(e) over upgraded edges <= N,  upgraded edges set to bar_w(e)
//! ```
//!
//! States follow the left-subtree decomposition: for node `v`, child position
//! `p` and budget `k` the table holds the single-child state `(v, p:p, k)` and
//! the prefix state `(v, 1:p, k)`. A single-child state either keeps or
//! upgrades the edge into child `p` on top of that child's full state; a
//! prefix state splits the budget between `(v, 1:p-1)` and `(v, p:p)`.
//!
//! A state does not keep only its best `(sp, srd)` pair. Under the `min` in
//! the objective a sibling with a shorter path can make a subtree's own
//! shortest path irrelevant, at which point a pair with a larger sum wins. Each
//! state therefore holds the labels that no other label of the same state
//! beats for every completion. Label `a` beats `b` when
//!
//! * `a.sp >= b.sp` and `a.srd >= b.srd`, or
//! * `a.sp < b.sp` and `h(a) > h(b)`;
//!
//! the second rule holds because `min(sp, x)` is 1-Lipschitz in `sp`, so `b`
//! can gain at most `lambda * (b.sp - a.sp)` over `a` in any completion while
//! losing `(1 - lambda) * (a.srd - b.srd)`. Surviving labels have strictly
//! decreasing `sp`, strictly increasing `srd` and strictly decreasing `h`. At
//! `lambda = 0` a single label survives per state.

use crate::error::{Error, Result};
use crate::relax::{upper_weights, UpperWeights};
use crate::report::{Problem, SolveReport, Status, UpgradePlan};
use crate::tree::{leaf_control, LeafControl, SubtreeIndex, TreeInstance, ROOT};
use std::cmp::Ordering;
use std::time::Instant;

/// Value of one DP state: shortest path from the subtree root to its leaves,
/// the weighted edge sum of the subtree and the edges realizing them.
#[derive(Debug, Clone, PartialEq)]
pub struct DpState {
    pub sp: f64,
    pub srd: f64,
    pub h: f64,
    pub upgrades: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// `(v, p:p, k)`
    Single,
    /// `(v, 1:p, k)`
    Prefix,
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    Leaf,
    Extend { child: u32, edge: u32, upgraded: bool },
    Join { left: u32, right: u32 },
}

#[derive(Debug, Clone, Copy)]
struct Label {
    sp: f64,
    srd: f64,
    count: u32,
    origin: Origin,
}

/// Memo table of one solve. Labels live in an arena; each state stores the
/// ids of its surviving labels ordered by decreasing `sp`.
#[derive(Debug, Clone)]
pub struct CitTable {
    lambda: f64,
    budget: usize,
    cap: usize,
    labels: Vec<Label>,
    offset: Vec<usize>,
    single: Vec<Vec<u32>>,
    prefix: Vec<Vec<u32>>,
    leaf: u32,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::LambdaOutOfRange(lambda))
    }
}

impl CitTable {
    /// Fills the table bottom-up for budget `budget` at weight `lambda`.
    pub fn build(inst: &TreeInstance, ub: &UpperWeights, lc: &LeafControl, budget: usize, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let total_r: usize = inst.edge_ids().map(|e| inst.edge(e).r as usize).sum();
        // budgets above the total Hamming weight behave like the total
        let cap = budget.min(total_r);
        let width = cap + 1;

        let mut offset = vec![0; inst.node_count() + 1];
        for v in 0..inst.node_count() {
            offset[v + 1] = offset[v] + inst.children(v).len();
        }
        let slots = offset[inst.node_count()] * width;
        let mut table = CitTable {
            lambda,
            budget,
            cap,
            labels: vec![Label { sp: 0.0, srd: 0.0, count: 0, origin: Origin::Leaf }],
            offset,
            single: vec![Vec::new(); slots],
            prefix: vec![Vec::new(); slots],
            leaf: 0,
        };

        let mut scratch: Vec<Label> = Vec::new();
        for v in inst.postorder() {
            let kids = inst.children(v);
            for (pi, &child) in kids.iter().enumerate() {
                let e = inst.edge(child);
                let r = e.r as usize;
                let count = lc.count(child) as f64;
                let (w, wb) = (e.w, ub.bar_w[child]);
                for k in 0..width {
                    scratch.clear();
                    for &id in table.full(inst, child, k) {
                        let l = table.labels[id as usize];
                        scratch.push(Label {
                            sp: l.sp + w,
                            srd: l.srd + count * w,
                            count: l.count,
                            origin: Origin::Extend { child: id, edge: child as u32, upgraded: false },
                        });
                    }
                    if k >= r {
                        for &id in table.full(inst, child, k - r) {
                            let l = table.labels[id as usize];
                            scratch.push(Label {
                                sp: l.sp + wb,
                                srd: l.srd + count * wb,
                                count: l.count + 1,
                                origin: Origin::Extend { child: id, edge: child as u32, upgraded: true },
                            });
                        }
                    }
                    let ids = table.commit(&mut scratch);
                    let slot = table.slot(v, pi + 1, k);
                    table.single[slot] = ids;
                }
                for k in 0..width {
                    let slot = table.slot(v, pi + 1, k);
                    if pi == 0 {
                        table.prefix[slot] = table.single[slot].clone();
                        continue;
                    }
                    scratch.clear();
                    for k1 in 0..=k {
                        let left = &table.prefix[table.slot(v, pi, k1)];
                        let right = &table.single[table.slot(v, pi + 1, k - k1)];
                        for &a in left {
                            let la = table.labels[a as usize];
                            for &b in right {
                                let lb = table.labels[b as usize];
                                scratch.push(Label {
                                    sp: la.sp.min(lb.sp),
                                    srd: la.srd + lb.srd,
                                    count: la.count + lb.count,
                                    origin: Origin::Join { left: a, right: b },
                                });
                            }
                        }
                    }
                    let ids = table.commit(&mut scratch);
                    table.prefix[slot] = ids;
                }
            }
        }
        Ok(table)
    }

    fn slot(&self, v: usize, p: usize, k: usize) -> usize {
        (self.offset[v] + p - 1) * (self.cap + 1) + k.min(self.cap)
    }

    fn h(&self, l: &Label) -> f64 {
        self.lambda * l.sp + (1.0 - self.lambda) * l.srd
    }

    /// Labels of the full subtree `(v, 1:|S(v)|, k)`.
    fn full(&self, inst: &TreeInstance, v: usize, k: usize) -> &[u32] {
        let d = inst.children(v).len();
        if d == 0 {
            std::slice::from_ref(&self.leaf)
        } else {
            &self.prefix[self.slot(v, d, k)]
        }
    }

    /// Drops beaten candidates and moves the survivors into the arena.
    fn commit(&mut self, cands: &mut [Label]) -> Vec<u32> {
        cands.sort_by(|a, b| {
            b.sp.partial_cmp(&a.sp)
                .unwrap_or(Ordering::Equal)
                .then(b.srd.partial_cmp(&a.srd).unwrap_or(Ordering::Equal))
                .then(a.count.cmp(&b.count))
        });
        let mut kept: Vec<Label> = Vec::with_capacity(cands.len());
        let mut best_srd = f64::NEG_INFINITY;
        for l in cands.iter() {
            if l.srd > best_srd {
                best_srd = l.srd;
                kept.push(*l);
            }
        }
        let mut alive = vec![true; kept.len()];
        let mut best_h = f64::NEG_INFINITY;
        for i in (0..kept.len()).rev() {
            let h = self.h(&kept[i]);
            if best_h > h {
                alive[i] = false;
            }
            best_h = best_h.max(h);
        }
        let mut ids = Vec::new();
        for (l, keep) in kept.into_iter().zip(alive) {
            if keep {
                ids.push(self.labels.len() as u32);
                self.labels.push(l);
            }
        }
        ids
    }

    fn best_label(&self, ids: &[u32]) -> Option<u32> {
        // ids are ordered by decreasing sp, so strict improvement keeps the
        // larger sp on ties
        let mut best: Option<(u32, f64)> = None;
        for &id in ids {
            let h = self.h(&self.labels[id as usize]);
            if best.is_none_or(|(_, bh)| h > bh) {
                best = Some((id, h));
            }
        }
        best.map(|(id, _)| id)
    }

    fn upgrades_of(&self, id: u32) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(id) = stack.pop() {
            match self.labels[id as usize].origin {
                Origin::Leaf => {}
                Origin::Extend { child, edge, upgraded } => {
                    if upgraded {
                        out.push(edge as usize);
                    }
                    stack.push(child);
                }
                Origin::Join { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn state_of(&self, id: u32) -> DpState {
        let l = &self.labels[id as usize];
        DpState { sp: l.sp, srd: l.srd, h: self.h(l), upgrades: self.upgrades_of(id) }
    }

    /// Best state of `(v, p:p, k)` or `(v, 1:p, k)`; `None` for a leaf or an
    /// out-of-range position.
    pub fn best_state(&self, inst: &TreeInstance, v: usize, p: usize, k: usize, kind: StateKind) -> Option<DpState> {
        if p == 0 || p > inst.children(v).len() {
            return None;
        }
        let slot = self.slot(v, p, k);
        let ids = match kind {
            StateKind::Single => &self.single[slot],
            StateKind::Prefix => &self.prefix[slot],
        };
        self.best_label(ids).map(|id| self.state_of(id))
    }

    /// Optimum of the whole tree.
    pub fn root_state(&self, inst: &TreeInstance) -> DpState {
        let id = self.best_label(self.full(inst, ROOT, self.budget)).expect("root state has a label");
        self.state_of(id)
    }

    /// Subtree described by a state key.
    pub fn subtree(inst: &TreeInstance, v: usize, p: usize, kind: StateKind) -> SubtreeIndex {
        match kind {
            StateKind::Single => SubtreeIndex::new(v, p, p),
            StateKind::Prefix => SubtreeIndex::new(v, 1, p),
        }
        .clamp_to(inst)
    }

    /// Number of `(node, position, budget)` keys memoized.
    pub fn state_count(&self) -> usize {
        self.single.len() + self.prefix.len()
    }

    /// Labels stored across all states.
    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Largest label set of any state.
    pub fn max_labels_per_state(&self) -> usize {
        self.single.iter().chain(&self.prefix).map(Vec::len).max().unwrap_or(1)
    }

    /// Effective budget after clamping to the total Hamming weight.
    pub fn budget_cap(&self) -> usize {
        self.cap
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl SubtreeIndex {
    fn clamp_to(self, inst: &TreeInstance) -> Self {
        let d = inst.children(self.node).len();
        SubtreeIndex { q: self.q.min(d), ..self }
    }
}

/// Root optimum together with its plan.
#[derive(Debug, Clone)]
pub struct CitSolution {
    pub state: DpState,
    pub plan: UpgradePlan,
    pub table: CitTable,
}

/// Solves with precomputed capped weights and leaf counts.
pub fn solve_cit_with(inst: &TreeInstance, ub: &UpperWeights, lc: &LeafControl, budget: usize, lambda: f64) -> Result<CitSolution> {
    let table = CitTable::build(inst, ub, lc, budget, lambda)?;
    let state = table.root_state(inst);
    let plan = UpgradePlan::from_edges(inst, &ub.bar_w, state.upgrades.clone());
    Ok(CitSolution { state, plan, table })
}

/// Solves the scalarized problem at cost budget `k`, Hamming budget `budget`
/// and weight `lambda`.
pub fn solve_cit(inst: &TreeInstance, k: f64, budget: i64, lambda: f64) -> Result<CitSolution> {
    check_lambda(lambda)?;
    if budget < 0 {
        return Err(Error::InvalidParameter { name: "N", value: budget as f64, reason: "must be >= 0" });
    }
    let ub = upper_weights(inst, k)?;
    let lc = leaf_control(inst);
    solve_cit_with(inst, &ub, &lc, budget as usize, lambda)
}

/// [`solve_cit`] with the instance's own `K` and `N`, as a report whose
/// objective is the scalarized value `h`.
pub fn solve_cit_report(inst: &TreeInstance, lambda: f64) -> Result<SolveReport> {
    let start = Instant::now();
    let p = inst.params();
    let sol = solve_cit(inst, p.k, i64::from(p.n), lambda)?;
    let mut report = SolveReport::new(Problem::Cit, Status::Optimal);
    report.objective = Some(sol.state.h);
    report.lambda_star = Some(lambda);
    report.plan = Some(sol.plan);
    report.cit_calls = 1;
    report.wall_time = start.elapsed();
    Ok(report)
}
