use proptest::prelude::*;
use srd_interdiction::cit::{solve_cit, StateKind};
use srd_interdiction::dit::solve_dit;
use srd_interdiction::mcdit::{solve_mcdit_traced, McditOptions};
use srd_interdiction::oracle::{oracle_dit, oracle_mcdit};
use srd_interdiction::relax::{solve_dit_inf, upper_weights};
use srd_interdiction::toolkit::{gen_instance, instance_to_json, parse_instance, InstanceFamily};
use srd_interdiction::tree::{self, ChildOrder, Params, RawEdge, TreeInstance, EPS};
use srd_interdiction::Status;

fn instance(max_n: usize) -> impl Strategy<Value = TreeInstance> {
    (1..=max_n, any::<u64>(), any::<bool>()).prop_map(|(n, seed, integral)| {
        let f = if integral { InstanceFamily::integer(n, seed) } else { InstanceFamily::real(n, seed) };
        gen_instance(&f).unwrap()
    })
}

fn integer_instance(max_n: usize) -> impl Strategy<Value = TreeInstance> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| gen_instance(&InstanceFamily::integer(n, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn srd_two_ways(t in instance(40)) {
        for w in [t.weights(), t.upper_bounds()] {
            let by_paths: f64 = t.leaves().iter().map(|&l| tree::path_weight(&t, &w, l).unwrap()).sum();
            let by_edges = tree::srd(&t, &w);
            prop_assert!((by_paths - by_edges).abs() <= 1e-9 * (1.0 + by_paths.abs()));
        }
    }

    #[test]
    fn leaf_counts_conserved(t in instance(40)) {
        let lc = tree::leaf_control(&t);
        prop_assert_eq!(lc.leaf_count(), t.leaves().len());
        let top: usize = t.children(tree::ROOT).iter().map(|&c| lc.count(c)).sum();
        prop_assert_eq!(top, lc.leaf_count());
        for v in t.edge_ids() {
            let below: usize = t.children(v).iter().map(|&c| lc.count(c)).sum();
            prop_assert_eq!(lc.count(v), if t.is_leaf(v) { 1 } else { below });
        }
    }

    #[test]
    fn build_rejects_duplicate_children(t in instance(20), pick in any::<prop::sample::Index>()) {
        let (root, mut raw) = t.to_raw();
        let dup = raw[pick.index(raw.len())];
        raw.push(dup);
        prop_assert!(TreeInstance::build(root, &raw, *t.params(), ChildOrder::Ascending).is_err());
    }

    #[test]
    fn build_rejects_cycles(t in instance(20), pick in any::<prop::sample::Index>()) {
        // re-hang a node below one of its own descendants
        let (root, mut raw) = t.to_raw();
        let v = 1 + pick.index(t.edge_count());
        let mut leaf = v;
        while !t.is_leaf(leaf) {
            leaf = t.children(leaf)[0];
        }
        let (v_label, leaf_label) = (t.labels()[v], t.labels()[leaf]);
        for e in raw.iter_mut().filter(|e| e.child == v_label) {
            e.parent = leaf_label;
        }
        prop_assert!(TreeInstance::build(root, &raw, *t.params(), ChildOrder::Ascending).is_err());
    }

    #[test]
    fn round_trip_is_field_exact(t in instance(30)) {
        let back = parse_instance(&instance_to_json(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn relaxation_monotone_in_budget(t in instance(30), k1 in 0.0..40.0f64, dk in 0.0..40.0f64) {
        let lo = upper_weights(&t, k1).unwrap();
        let hi = upper_weights(&t, k1 + dk).unwrap();
        for v in t.edge_ids() {
            prop_assert!(lo.bar_w[v] <= hi.bar_w[v]);
            prop_assert!(hi.bar_w[v] <= t.edge(v).u);
            prop_assert!(lo.bar_w[v] >= t.edge(v).w);
        }
        let a = solve_dit_inf(&t, k1).unwrap();
        let b = solve_dit_inf(&t, k1 + dk).unwrap();
        if a.status == Status::Optimal {
            prop_assert_eq!(b.status, Status::Optimal);
            prop_assert!(a.objective.unwrap() <= b.objective.unwrap() + EPS);
        }
    }

    #[test]
    fn cit_state_identity_and_budget(t in instance(25), lambda in 0.0..=1.0f64) {
        let p = *t.params();
        let sol = solve_cit(&t, p.k, i64::from(p.n), lambda).unwrap();
        let s = &sol.state;
        prop_assert!((s.h - (lambda * s.sp + (1.0 - lambda) * s.srd)).abs() < 1e-9 * (1.0 + s.h.abs()));
        prop_assert!(sol.plan.hamming_cost(&t) <= u64::from(p.n));
        prop_assert!(sol.plan.linf_cost(&t) <= p.k + EPS);
        prop_assert!((sol.plan.srd(&t) - s.srd).abs() < 1e-9 * (1.0 + s.srd));
        prop_assert!((sol.plan.shortest_path(&t) - s.sp).abs() < 1e-9 * (1.0 + s.sp));
        prop_assert_eq!(&sol.plan.upgraded, &s.upgrades);
    }

    #[test]
    fn cit_memo_is_linear(t in instance(40)) {
        let p = *t.params();
        let sol = solve_cit(&t, p.k, i64::from(p.n), 0.5).unwrap();
        let cap = sol.table.budget_cap();
        prop_assert!(cap <= p.n as usize);
        prop_assert!(sol.table.state_count() <= 2 * t.edge_count() * (cap + 1));
        let root = t.children(tree::ROOT).len();
        let full = sol.table.best_state(&t, tree::ROOT, root, cap, StateKind::Prefix).unwrap();
        prop_assert_eq!(full.h, sol.state.h);
    }

    #[test]
    fn cit_ignores_child_order(t in instance(20), lambda in 0.0..=1.0f64) {
        let p = *t.params();
        let flipped = t.with_children_reordered(|_, kids| kids.reverse());
        let a = solve_cit(&t, p.k, i64::from(p.n), lambda).unwrap().state.h;
        let b = solve_cit(&flipped, p.k, i64::from(p.n), lambda).unwrap().state.h;
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn cit_monotone_in_lambda(t in instance(20)) {
        let p = *t.params();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=10 {
            let s = solve_cit(&t, p.k, i64::from(p.n), f64::from(i) / 10.0).unwrap().state;
            if let Some((sp, srd)) = prev {
                prop_assert!(s.sp >= sp - 1e-9, "sp fell at lambda {}", i);
                prop_assert!(s.srd <= srd + 1e-9, "srd rose at lambda {}", i);
            }
            prev = Some((s.sp, s.srd));
        }
    }

    #[test]
    fn dit_is_feasible_and_bounded_by_oracle(t in integer_instance(10)) {
        let r = solve_dit(&t).unwrap();
        let o = oracle_dit(&t).unwrap();
        match r.status {
            Status::Infeasible => prop_assert!(!o.is_feasible()),
            Status::Optimal => {
                let p = t.params();
                let plan = r.plan.as_ref().unwrap();
                prop_assert!(plan.shortest_path(&t) >= p.m - EPS);
                prop_assert!(plan.hamming_cost(&t) <= u64::from(p.n));
                prop_assert!(plan.linf_cost(&t) <= p.k + EPS);
                prop_assert!(r.objective.unwrap() <= o.best_value.unwrap() + EPS);
            }
        }
    }

    #[test]
    fn mcdit_never_undercuts_ground_truth(t in integer_instance(8)) {
        let out = solve_mcdit_traced(&t, McditOptions::default()).unwrap();
        let truth = oracle_mcdit(&t).unwrap().best_value;
        if let Some(k) = out.report.k_star {
            prop_assert!(out.probes.iter().any(|p| p.k == k && p.passed));
            prop_assert!(truth.is_some_and(|o| k >= o));
        }
    }
}

#[test]
fn build_rejects_bad_attributes() {
    let e = |w: f64, u: f64, c: f64, r: f64| [RawEdge { child: 1, parent: 0, w, u, c, r }];
    let p = Params::default();
    for raw in [e(2.0, 1.0, 1.0, 1.0), e(-1.0, 1.0, 1.0, 1.0), e(0.0, 1.0, 0.0, 1.0), e(0.0, 1.0, 1.0, 0.5), e(0.0, f64::NAN, 1.0, 1.0)] {
        assert!(TreeInstance::build(0, &raw, p, ChildOrder::Ascending).is_err());
    }
    assert!(TreeInstance::build(0, &[], p, ChildOrder::Ascending).is_err());
    let detached = [RawEdge { child: 1, parent: 0, w: 0.0, u: 1.0, c: 1.0, r: 1.0 }, RawEdge { child: 3, parent: 2, w: 0.0, u: 1.0, c: 1.0, r: 1.0 }];
    assert!(TreeInstance::build(0, &detached, p, ChildOrder::Ascending).is_err());
}
