//! Rooted edge-weighted trees.
//!
//! Nodes are dense indices `0..=n` with `0` the root. Every non-root node `v`
//! owns exactly one edge, the edge from its parent into `v`, so edge ids and
//! non-root node ids coincide. Per-edge vectors are therefore indexed by child
//! node and have length `n + 1`; slot `0` is unused and kept at zero.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Index of the root node.
pub const ROOT: usize = 0;

/// Absolute tolerance used by floating comparisons across the crate.
pub const EPS: f64 = 1e-9;

/// Per-edge attributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeData {
    /// Original weight.
    pub w: f64,
    /// Upper bound on the upgraded weight.
    pub u: f64,
    /// Unit cost of the weighted l-infinity budget.
    pub c: f64,
    /// Weight in the Hamming budget.
    pub r: u32,
}

/// Problem parameters shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Lower bound on the shortest root-leaf distance.
    pub m: f64,
    /// Cost budget under the weighted l-infinity norm.
    pub k: f64,
    /// Hamming budget.
    pub n: u32,
    /// Target sum of root-leaf distances (minimum cost problem only).
    pub d: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { m: 0.0, k: 0.0, n: 0, d: 0.0 }
    }
}

impl Params {
    fn validate(&self) -> Result<()> {
        if !self.k.is_finite() || self.k < 0.0 {
            return Err(Error::InvalidParameter { name: "K", value: self.k, reason: "must be finite and >= 0" });
        }
        if !self.m.is_finite() {
            return Err(Error::InvalidParameter { name: "M", value: self.m, reason: "must be finite" });
        }
        if !self.d.is_finite() {
            return Err(Error::InvalidParameter { name: "D", value: self.d, reason: "must be finite" });
        }
        Ok(())
    }
}

/// One edge as read from an external source, keyed by external node ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawEdge {
    pub child: u64,
    pub parent: u64,
    pub w: f64,
    pub u: f64,
    pub c: f64,
    pub r: f64,
}

/// How the children of every node are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChildOrder {
    /// Ascending dense node index.
    #[default]
    Ascending,
    /// Order in which the edge records were listed.
    AsListed,
}

/// A validated rooted tree with edge attributes and problem parameters.
///
/// Immutable once built; the `with_*` methods return modified copies.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeInstance {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    edges: Vec<EdgeData>,
    params: Params,
    labels: Vec<u64>,
}

fn finite(child: u64, field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { child, field, value })
    }
}

impl TreeInstance {
    /// Validates raw records and builds an instance.
    ///
    /// The root keeps dense index 0; the remaining external ids are mapped to
    /// `1..=n` in ascending order.
    pub fn build(root: u64, raw: &[RawEdge], params: Params, order: ChildOrder) -> Result<Self> {
        params.validate()?;
        if raw.is_empty() {
            return Err(Error::Empty);
        }
        let mut seen: HashMap<u64, usize> = HashMap::with_capacity(raw.len());
        for (i, e) in raw.iter().enumerate() {
            if e.child == root {
                return Err(Error::RootHasParent(root));
            }
            if seen.insert(e.child, i).is_some() {
                return Err(Error::DuplicateEdge(e.child));
            }
        }
        for e in raw {
            if e.parent != root && !seen.contains_key(&e.parent) {
                return Err(Error::UnknownNode { parent: e.parent, child: e.child });
            }
        }

        let mut ids: Vec<u64> = seen.keys().copied().collect();
        ids.sort_unstable();
        let mut labels = Vec::with_capacity(ids.len() + 1);
        labels.push(root);
        labels.extend(ids);
        let dense: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &id)| (id, i)).collect();

        let n = raw.len();
        let mut parent = vec![ROOT; n + 1];
        let mut edges = vec![EdgeData { w: 0.0, u: 0.0, c: 1.0, r: 1 }; n + 1];
        for e in raw {
            let v = dense[&e.child];
            parent[v] = dense[&e.parent];
            let w = finite(e.child, "w", e.w)?;
            let u = finite(e.child, "u", e.u)?;
            let c = finite(e.child, "c", e.c)?;
            let r = finite(e.child, "r", e.r)?;
            if w < 0.0 {
                return Err(Error::NegativeWeight { child: e.child, w });
            }
            if w > u {
                return Err(Error::WeightAboveBound { child: e.child, w, u });
            }
            if c <= 0.0 {
                return Err(Error::NonPositiveCost { child: e.child, c });
            }
            if r < 1.0 || r.fract() != 0.0 || r > f64::from(u32::MAX) {
                return Err(Error::InvalidHamming { child: e.child, r });
            }
            edges[v] = EdgeData { w, u, c, r: r as u32 };
        }

        // Every node must reach the root without revisiting a node.
        let mut state = vec![0u8; n + 1]; // 0 = unvisited, 1 = on stack, 2 = done
        state[ROOT] = 2;
        let mut stack = Vec::new();
        for start in 1..=n {
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                stack.push(v);
                v = parent[v];
            }
            if state[v] == 1 {
                return Err(Error::Cycle(labels[v]));
            }
            for x in stack.drain(..) {
                state[x] = 2;
            }
        }

        let mut children = vec![Vec::new(); n + 1];
        match order {
            ChildOrder::Ascending => {
                for v in 1..=n {
                    children[parent[v]].push(v);
                }
            }
            ChildOrder::AsListed => {
                for e in raw {
                    let v = dense[&e.child];
                    children[parent[v]].push(v);
                }
            }
        }

        Ok(TreeInstance { parent, children, edges, params, labels })
    }

    /// Number of edges (non-root nodes).
    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent of a non-root node.
    pub fn parent(&self, v: usize) -> usize {
        debug_assert!(v != ROOT);
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v != ROOT && self.children[v].is_empty()
    }

    /// Attributes of the edge entering `v`.
    pub fn edge(&self, v: usize) -> &EdgeData {
        debug_assert!(v != ROOT);
        &self.edges[v]
    }

    /// Edge ids `1..=n`.
    pub fn edge_ids(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.edge_count()
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// External id of every dense node.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Original weights as a per-edge vector.
    pub fn weights(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.edges.iter().map(|e| e.w).collect();
        w[ROOT] = 0.0;
        w
    }

    /// Upper bounds as a per-edge vector.
    pub fn upper_bounds(&self) -> Vec<f64> {
        let mut u: Vec<f64> = self.edges.iter().map(|e| e.u).collect();
        u[ROOT] = 0.0;
        u
    }

    /// External root id and edge records in dense node order.
    pub fn to_raw(&self) -> (u64, Vec<RawEdge>) {
        let edges = self
            .edge_ids()
            .map(|v| {
                let e = &self.edges[v];
                RawEdge {
                    child: self.labels[v],
                    parent: self.labels[self.parent[v]],
                    w: e.w,
                    u: e.u,
                    c: e.c,
                    r: f64::from(e.r),
                }
            })
            .collect();
        (self.labels[ROOT], edges)
    }

    pub fn with_params(&self, params: Params) -> Result<Self> {
        params.validate()?;
        Ok(TreeInstance { params, ..self.clone() })
    }

    /// Copy with a different cost budget `K`.
    pub fn with_cost_budget(&self, k: f64) -> Result<Self> {
        self.with_params(Params { k, ..self.params })
    }

    /// Copy whose child lists are permuted by `f`. `f` must only reorder.
    pub fn with_children_reordered(&self, mut f: impl FnMut(usize, &mut Vec<usize>)) -> Self {
        let mut out = self.clone();
        for (v, kids) in out.children.iter_mut().enumerate() {
            let mut sorted_before = kids.clone();
            f(v, kids);
            let mut sorted_after = kids.clone();
            sorted_before.sort_unstable();
            sorted_after.sort_unstable();
            assert_eq!(sorted_before, sorted_after, "child reordering must be a permutation");
        }
        out
    }

    /// Nodes in depth-first preorder, children visited in list order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.node_count());
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// Nodes ordered so that every child precedes its parent.
    pub fn postorder(&self) -> Vec<usize> {
        let mut order = self.preorder();
        order.reverse();
        order
    }

    /// Leaves in preorder.
    pub fn leaves(&self) -> Vec<usize> {
        self.preorder().into_iter().filter(|&v| self.is_leaf(v)).collect()
    }

    /// True when every number is integral and every capped weight
    /// `min(w + K/c, u)` is integral as well, so solver values can be compared
    /// exactly.
    pub fn is_integral(&self) -> bool {
        let int = |x: f64| x.fract() == 0.0;
        let p = &self.params;
        if !(int(p.k) && int(p.m) && int(p.d)) {
            return false;
        }
        self.edge_ids().all(|v| {
            let e = &self.edges[v];
            int(e.w) && int(e.u) && int(e.c) && (e.w + p.k / e.c >= e.u || int(p.k / e.c))
        })
    }
}

/// Leaf counts per edge: `|L(e)|` is the number of leaves whose root path
/// uses `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafControl {
    /// Leaves in traversal order.
    pub leaves: Vec<usize>,
    /// `control_count[v]` = `|L(e_v)|`; slot 0 holds the total leaf count.
    pub control_count: Vec<usize>,
    /// Controlled leaves per edge, only when requested.
    pub leaf_sets: Option<Vec<Vec<usize>>>,
}

impl LeafControl {
    pub fn count(&self, edge: usize) -> usize {
        self.control_count[edge]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

/// Computes `|L(e)|` for every edge in one post-order pass.
pub fn leaf_control(inst: &TreeInstance) -> LeafControl {
    let mut count = vec![0usize; inst.node_count()];
    for v in inst.postorder() {
        if inst.is_leaf(v) {
            count[v] = 1;
        } else {
            count[v] = inst.children(v).iter().map(|&c| count[c]).sum();
        }
    }
    LeafControl { leaves: inst.leaves(), control_count: count, leaf_sets: None }
}

/// Like [`leaf_control`], additionally materializing the leaf set of every edge.
pub fn leaf_control_with_sets(inst: &TreeInstance) -> LeafControl {
    let mut lc = leaf_control(inst);
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); inst.node_count()];
    for v in inst.postorder() {
        if inst.is_leaf(v) {
            sets[v] = vec![v];
        } else {
            let mut s: Vec<usize> = inst.children(v).iter().flat_map(|&c| sets[c].iter().copied()).collect();
            s.sort_unstable();
            sets[v] = s;
        }
    }
    lc.leaf_sets = Some(sets);
    lc
}

/// Left `p:q`-subtree of a node: the subtrees of children `p..=q` (1-based)
/// together with the node itself. `q < p` encodes the empty subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubtreeIndex {
    pub node: usize,
    pub p: usize,
    pub q: usize,
}

impl SubtreeIndex {
    pub fn new(node: usize, p: usize, q: usize) -> Self {
        SubtreeIndex { node, p, q }
    }

    /// The whole subtree rooted at `node`.
    pub fn full(inst: &TreeInstance, node: usize) -> Self {
        SubtreeIndex { node, p: 1, q: inst.children(node).len() }
    }

    pub fn is_empty(&self) -> bool {
        self.q < self.p || self.q == 0
    }

    /// Children of `node` whose subtrees belong to this left subtree.
    pub fn child_nodes<'a>(&self, inst: &'a TreeInstance) -> &'a [usize] {
        if self.is_empty() {
            &[]
        } else {
            &inst.children(self.node)[self.p - 1..self.q]
        }
    }

    /// All edge ids contained in the subtree, in preorder.
    pub fn edges(&self, inst: &TreeInstance) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.child_nodes(inst).iter().rev().copied().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(inst.children(v).iter().rev());
        }
        out
    }
}

/// Preorder interval labels: the leaves below `v` are exactly the leaves
/// whose entry time lies in `[entry[v], exit[v]]`.
#[derive(Debug, Clone)]
pub struct SubtreeIntervals {
    pub entry: Vec<usize>,
    pub exit: Vec<usize>,
}

impl SubtreeIntervals {
    pub fn new(inst: &TreeInstance) -> Self {
        let order = inst.preorder();
        let mut entry = vec![0; inst.node_count()];
        for (t, &v) in order.iter().enumerate() {
            entry[v] = t;
        }
        let mut exit = entry.clone();
        for &v in order.iter().rev() {
            if let Some(&last) = inst.children(v).last() {
                exit[v] = exit[last];
            }
        }
        SubtreeIntervals { entry, exit }
    }

    pub fn contains(&self, ancestor: usize, v: usize) -> bool {
        self.entry[ancestor] <= self.entry[v] && self.entry[v] <= self.exit[ancestor]
    }
}

fn check_len(inst: &TreeInstance, weights: &[f64]) -> Result<()> {
    if weights.len() != inst.node_count() {
        return Err(Error::WeightLength { got: weights.len(), expected: inst.node_count() });
    }
    Ok(())
}

/// Weight of the root path to `leaf` under `weights`.
pub fn path_weight(inst: &TreeInstance, weights: &[f64], leaf: usize) -> Result<f64> {
    check_len(inst, weights)?;
    if leaf >= inst.node_count() || !inst.is_leaf(leaf) {
        return Err(Error::NotALeaf(leaf));
    }
    let mut total = 0.0;
    let mut v = leaf;
    while v != ROOT {
        total += weights[v];
        v = inst.parent(v);
    }
    Ok(total)
}

/// Distance from the root to every node under `weights`.
pub fn depths(inst: &TreeInstance, weights: &[f64]) -> Vec<f64> {
    let mut depth = vec![0.0; inst.node_count()];
    for v in inst.preorder().into_iter().skip(1) {
        depth[v] = depth[inst.parent(v)] + weights[v];
    }
    depth
}

/// Shortest root-leaf distance and a leaf attaining it (smallest index on ties).
pub fn shortest_leaf(inst: &TreeInstance, weights: &[f64]) -> (usize, f64) {
    let depth = depths(inst, weights);
    let mut best = (usize::MAX, f64::INFINITY);
    for v in inst.edge_ids() {
        if inst.is_leaf(v) && (depth[v] < best.1 || (depth[v] == best.1 && v < best.0)) {
            best = (v, depth[v]);
        }
    }
    best
}

/// Sum of root-leaf distances, `sum_e |L(e)| * weights(e)`.
///
/// Debug builds also sum the individual leaf paths and check both agree.
pub fn srd(inst: &TreeInstance, weights: &[f64]) -> f64 {
    assert_eq!(weights.len(), inst.node_count(), "weight vector length");
    let lc = leaf_control(inst);
    srd_with(inst, &lc, weights)
}

/// [`srd`] with precomputed leaf counts.
pub fn srd_with(inst: &TreeInstance, lc: &LeafControl, weights: &[f64]) -> f64 {
    let total: f64 = inst.edge_ids().map(|v| lc.count(v) as f64 * weights[v]).sum();
    debug_assert!({
        let depth = depths(inst, weights);
        let by_paths: f64 = lc.leaves.iter().map(|&t| depth[t]).sum();
        (by_paths - total).abs() <= EPS * (1.0 + total.abs())
    });
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(child: u64, parent: u64, w: f64) -> RawEdge {
        RawEdge { child, parent, w, u: w + 10.0, c: 1.0, r: 1.0 }
    }

    fn chain() -> TreeInstance {
        TreeInstance::build(0, &[raw(1, 0, 2.0), raw(2, 1, 3.0)], Params::default(), ChildOrder::Ascending).unwrap()
    }

    // s -> a -> b, s -> t
    fn small() -> TreeInstance {
        TreeInstance::build(0, &[raw(1, 0, 2.0), raw(2, 1, 3.0), raw(3, 0, 1.0)], Params::default(), ChildOrder::Ascending)
            .unwrap()
    }

    #[test]
    fn chain_has_single_leaf() {
        let t = chain();
        let lc = leaf_control(&t);
        assert_eq!(lc.leaves, vec![2]);
        assert_eq!(lc.count(1), 1);
        assert_eq!(lc.count(2), 1);
        assert_eq!(path_weight(&t, &t.weights(), 2).unwrap(), 5.0);
        assert_eq!(path_weight(&t, &[0.0, 6.0, 4.0], 2).unwrap(), 10.0);
        assert_eq!(srd(&t, &t.weights()), 5.0);
    }

    #[test]
    fn star_counts() {
        let t = TreeInstance::build(0, &[raw(1, 0, 1.0), raw(2, 0, 4.0)], Params::default(), ChildOrder::Ascending).unwrap();
        let lc = leaf_control(&t);
        assert_eq!(lc.leaf_count(), 2);
        assert_eq!((lc.count(1), lc.count(2)), (1, 1));
        assert_eq!(path_weight(&t, &t.weights(), 1).unwrap(), 1.0);
    }

    #[test]
    fn small_tree_counts_and_srd() {
        let t = small();
        let lc = leaf_control_with_sets(&t);
        assert_eq!(lc.leaves, vec![2, 3]);
        assert_eq!(&lc.control_count[1..], &[1, 1, 1]);
        assert_eq!(lc.control_count[0], 2);
        assert_eq!(lc.leaf_sets.as_ref().unwrap()[1], vec![2]);
        assert_eq!(srd(&t, &t.weights()), 6.0);
        assert_eq!(srd(&t, &[0.0; 4]), 0.0);
    }

    #[test]
    fn binary_tree_depth_two() {
        let edges: Vec<RawEdge> = (1..=6).map(|v| raw(v, (v - 1) / 2, 1.0)).collect();
        let t = TreeInstance::build(0, &edges, Params::default(), ChildOrder::Ascending).unwrap();
        let lc = leaf_control(&t);
        assert_eq!((lc.count(1), lc.count(2)), (2, 2));
        assert!((3..=6).all(|v| lc.count(v) == 1));
    }

    #[test]
    fn path_weight_rejects_internal_node() {
        let t = small();
        assert_eq!(path_weight(&t, &t.weights(), 1), Err(Error::NotALeaf(1)));
        assert_eq!(path_weight(&t, &t.weights(), 0), Err(Error::NotALeaf(0)));
    }

    #[test]
    fn build_errors() {
        let p = Params::default();
        let o = ChildOrder::Ascending;
        let bad_wu = RawEdge { child: 1, parent: 0, w: 5.0, u: 3.0, c: 1.0, r: 1.0 };
        assert!(matches!(TreeInstance::build(0, &[bad_wu], p, o), Err(Error::WeightAboveBound { .. })));
        let bad_c = RawEdge { c: 0.0, ..raw(1, 0, 1.0) };
        assert!(matches!(TreeInstance::build(0, &[bad_c], p, o), Err(Error::NonPositiveCost { .. })));
        let bad_r = RawEdge { r: 1.5, ..raw(1, 0, 1.0) };
        assert!(matches!(TreeInstance::build(0, &[bad_r], p, o), Err(Error::InvalidHamming { .. })));
        let zero_r = RawEdge { r: 0.0, ..raw(1, 0, 1.0) };
        assert!(matches!(TreeInstance::build(0, &[zero_r], p, o), Err(Error::InvalidHamming { .. })));
        assert_eq!(TreeInstance::build(0, &[raw(1, 0, 1.0), raw(1, 0, 2.0)], p, o), Err(Error::DuplicateEdge(1)));
        assert_eq!(TreeInstance::build(0, &[raw(1, 7, 1.0)], p, o), Err(Error::UnknownNode { parent: 7, child: 1 }));
        assert!(matches!(TreeInstance::build(0, &[raw(1, 0, 1.0), raw(2, 3, 1.0), raw(3, 2, 1.0)], p, o), Err(Error::Cycle(_))));
        assert_eq!(TreeInstance::build(0, &[raw(0, 1, 1.0)], p, o), Err(Error::RootHasParent(0)));
        assert_eq!(TreeInstance::build(0, &[], p, o), Err(Error::Empty));
        let neg_k = Params { k: -1.0, ..p };
        assert!(matches!(TreeInstance::build(0, &[raw(1, 0, 1.0)], neg_k, o), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn external_ids_are_mapped_densely() {
        let edges = [raw(40, 10, 1.0), raw(30, 10, 2.0), raw(50, 30, 3.0)];
        let t = TreeInstance::build(10, &edges, Params::default(), ChildOrder::Ascending).unwrap();
        assert_eq!(t.labels(), &[10, 30, 40, 50]);
        assert_eq!(t.children(ROOT), &[1, 2]);
        assert_eq!(t.parent(3), 1);
        let listed = TreeInstance::build(10, &edges, Params::default(), ChildOrder::AsListed).unwrap();
        assert_eq!(listed.children(ROOT), &[2, 1]);
    }

    #[test]
    fn subtree_index_edges() {
        let t = small();
        let full = SubtreeIndex::full(&t, ROOT);
        assert_eq!(full.edges(&t), vec![1, 2, 3]);
        assert_eq!(SubtreeIndex::new(ROOT, 2, 2).edges(&t), vec![3]);
        assert!(SubtreeIndex::new(ROOT, 1, 0).is_empty());
        assert!(SubtreeIndex::new(ROOT, 1, 0).edges(&t).is_empty());
    }

    #[test]
    fn intervals_cover_leaves() {
        let t = small();
        let iv = SubtreeIntervals::new(&t);
        assert!(iv.contains(1, 2));
        assert!(!iv.contains(1, 3));
        assert!(iv.contains(ROOT, 3));
    }

    #[test]
    fn integral_detection() {
        let p = Params { k: 4.0, m: 4.0, n: 2, d: 0.0 };
        let e = |child, parent, w, u, c| RawEdge { child, parent, w, u, c, r: 1.0 };
        let t = TreeInstance::build(0, &[e(1, 0, 2.0, 6.0, 1.0), e(2, 1, 3.0, 4.0, 3.0)], p, ChildOrder::Ascending).unwrap();
        // 3 + 4/3 > 4, so the cap binds on edge 2
        assert!(t.is_integral());
        let t = TreeInstance::build(0, &[e(1, 0, 2.0, 9.0, 3.0)], p, ChildOrder::Ascending).unwrap();
        assert!(!t.is_integral());
    }
}
