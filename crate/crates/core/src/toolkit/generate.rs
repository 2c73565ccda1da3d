//! Random benchmark instances.
//!
//! Topology is uniform attachment: node `i` picks its parent uniformly among
//! `0..i`. Parameters are drawn from the generated tree:
//!
//! * `N` uniform in `1..=min(budget_max, ceil(n / 2))`, or `fixed_budget`;
//! * `K = a * max_e c(e)(u(e) - w(e))`, `a` uniform in `k_fraction`; in
//!   integral mode `K` is rounded down to a multiple of `lcm(c)`;
//! * `M = lo + b * (hi - lo)` with `lo` the shortest original path, `hi` the
//!   shortest capped path and `b` uniform in `m_fraction`;
//! * `D = w(T) + d * (u(T) - w(T))`, `d` uniform in `d_fraction`.
//!
//! Integral mode rounds `M` and `D` to the nearest integer.

use crate::error::{Error, Result};
use crate::relax::upper_weights;
use crate::tree::{self, ChildOrder, Params, RawEdge, TreeInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRules {
    pub budget_max: u32,
    pub fixed_budget: Option<u32>,
    pub k_fraction: (f64, f64),
    pub m_fraction: (f64, f64),
    pub d_fraction: (f64, f64),
}

impl Default for ParamRules {
    fn default() -> Self {
        ParamRules {
            budget_max: 4,
            fixed_budget: None,
            k_fraction: (0.2, 0.8),
            m_fraction: (0.0, 1.2),
            d_fraction: (0.1, 0.6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceFamily {
    /// Number of edges.
    pub n: usize,
    pub seed: u64,
    pub w_range: (f64, f64),
    /// Upper bounds are drawn from this range and lifted to `w` when below it.
    pub u_range: (f64, f64),
    pub c_range: (f64, f64),
    pub r_range: (u32, u32),
    /// Integer-valued data with integral capped weights.
    pub integral: bool,
    pub rules: ParamRules,
}

impl InstanceFamily {
    /// Integral family used by the oracle sweeps.
    pub fn integer(n: usize, seed: u64) -> Self {
        InstanceFamily {
            n,
            seed,
            w_range: (0.0, 10.0),
            u_range: (10.0, 20.0),
            c_range: (1.0, 4.0),
            r_range: (1, 3),
            integral: true,
            rules: ParamRules::default(),
        }
    }

    /// Real-valued family.
    pub fn real(n: usize, seed: u64) -> Self {
        InstanceFamily { c_range: (0.5, 4.0), integral: false, ..Self::integer(n, seed) }
    }

    /// Family for the single-upgrade case: `r = 1`, `N = 1`.
    pub fn single_upgrade(n: usize, seed: u64) -> Self {
        let mut f = Self::integer(n, seed);
        f.r_range = (1, 1);
        f.rules.fixed_budget = Some(1);
        f
    }

    fn validate(&self) -> Result<()> {
        let range = |name: &str, (lo, hi): (f64, f64)| {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                Err(Error::InvalidRange(format!("{name} range ({lo}, {hi})")))
            } else {
                Ok(())
            }
        };
        range("w", self.w_range)?;
        range("u", self.u_range)?;
        range("c", self.c_range)?;
        if self.n == 0 {
            return Err(Error::InvalidRange("n must be at least 1".into()));
        }
        if self.w_range.0 < 0.0 {
            return Err(Error::InvalidRange("w range must be nonnegative".into()));
        }
        if self.u_range.1 < self.w_range.0 {
            return Err(Error::InvalidRange(format!("u range {:?} lies below w range {:?}", self.u_range, self.w_range)));
        }
        if self.c_range.0 <= 0.0 {
            return Err(Error::InvalidRange("c range must be positive".into()));
        }
        if self.integral && self.c_range.1.floor() < self.c_range.0.ceil().max(1.0) {
            return Err(Error::InvalidRange("c range holds no positive integer".into()));
        }
        if self.r_range.0 < 1 || self.r_range.0 > self.r_range.1 {
            return Err(Error::InvalidRange(format!("r range {:?}", self.r_range)));
        }
        for (name, (lo, hi)) in [("K", self.rules.k_fraction), ("M", self.rules.m_fraction), ("D", self.rules.d_fraction)] {
            range(name, (lo, hi))?;
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64), integral: bool) -> f64 {
    if integral {
        let (lo, hi) = (lo.ceil() as i64, hi.floor() as i64);
        rng.gen_range(lo..=hi) as f64
    } else if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Generates one instance; identical families give identical instances.
pub fn gen_instance(family: &InstanceFamily) -> Result<TreeInstance> {
    family.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(family.seed);
    let integral = family.integral;
    let c_range = if integral { (family.c_range.0.max(1.0), family.c_range.1) } else { family.c_range };
    let mut edges = Vec::with_capacity(family.n);
    for v in 1..=family.n as u64 {
        let parent = rng.gen_range(0..v);
        let w = draw(&mut rng, family.w_range, integral);
        let u = draw(&mut rng, family.u_range, integral).max(w);
        let c = draw(&mut rng, c_range, integral);
        let r = rng.gen_range(family.r_range.0..=family.r_range.1);
        edges.push(RawEdge { child: v, parent, w, u, c, r: f64::from(r) });
    }
    let bare = TreeInstance::build(0, &edges, Params::default(), ChildOrder::Ascending)?;

    let rules = &family.rules;
    let n = match rules.fixed_budget {
        Some(b) => b,
        None => {
            let hi = rules.budget_max.min(family.n.div_ceil(2) as u32).max(1);
            rng.gen_range(1..=hi)
        }
    };
    let k_top = edges.iter().map(|e| e.c * (e.u - e.w)).fold(0.0, f64::max);
    let mut k = k_top * draw(&mut rng, rules.k_fraction, false);
    if integral {
        let step = edges.iter().map(|e| e.c as u64).fold(1, |l, c| l / gcd(l, c) * c) as f64;
        k = (k / step).floor() * step;
    }
    let w = bare.weights();
    let lo = tree::shortest_leaf(&bare, &w).1;
    let hi = tree::shortest_leaf(&bare, &upper_weights(&bare, k)?.bar_w).1;
    let mut m = lo + draw(&mut rng, rules.m_fraction, false) * (hi - lo);
    let w_total = tree::srd(&bare, &w);
    let u_total = tree::srd(&bare, &bare.upper_bounds());
    let mut d = w_total + draw(&mut rng, rules.d_fraction, false) * (u_total - w_total);
    if integral {
        m = m.round();
        d = d.round();
    }
    bare.with_params(Params { m, k, n, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_under_seed() {
        let f = InstanceFamily::integer(10, 1);
        assert_eq!(gen_instance(&f).unwrap(), gen_instance(&f).unwrap());
        let g = InstanceFamily::integer(10, 2);
        assert_ne!(gen_instance(&f).unwrap(), gen_instance(&g).unwrap());
    }

    #[test]
    fn disjoint_ranges_keep_w_below_u() {
        for seed in 0..20 {
            let t = gen_instance(&InstanceFamily::real(30, seed)).unwrap();
            assert!(t.edge_ids().all(|v| t.edge(v).w <= t.edge(v).u));
        }
    }

    #[test]
    fn integral_family_is_integral() {
        for seed in 0..50 {
            let t = gen_instance(&InstanceFamily::integer(12, seed)).unwrap();
            assert!(t.is_integral(), "seed {seed}");
            assert!((1..=4).contains(&t.params().n));
        }
    }

    #[test]
    fn large_instance_is_quick() {
        let start = std::time::Instant::now();
        let t = gen_instance(&InstanceFamily::integer(500, 3)).unwrap();
        assert_eq!(t.edge_count(), 500);
        assert!(start.elapsed().as_secs_f64() < 0.1);
    }

    #[test]
    fn invalid_ranges_rejected() {
        let mut f = InstanceFamily::integer(5, 0);
        f.u_range = (0.0, -1.0);
        assert!(gen_instance(&f).is_err());
        let mut f = InstanceFamily::integer(5, 0);
        f.w_range = (5.0, 10.0);
        f.u_range = (1.0, 4.0);
        assert!(matches!(gen_instance(&f), Err(Error::InvalidRange(_))));
        let mut f = InstanceFamily::integer(5, 0);
        f.c_range = (0.0, 1.0);
        assert!(gen_instance(&f).is_err());
        let mut f = InstanceFamily::integer(5, 0);
        f.r_range = (0, 2);
        assert!(gen_instance(&f).is_err());
    }
}
