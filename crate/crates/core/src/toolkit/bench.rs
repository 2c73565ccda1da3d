//! Timing harness: one row per (algorithm, n) with mean/max/min wall time.
//!
//! Only the solve is timed; generation happens outside the clock. Runs are
//! spread over a rayon pool whose size comes from [`WORKERS_ENV`] unless set
//! explicitly. Use one worker when the timings matter.

use crate::cit::solve_cit;
use crate::dit::solve_dit;
use crate::error::{Error, Result};
use crate::greedy::solve_dit_n1;
use crate::mcdit::solve_mcdit;
use crate::report::Status;
use crate::toolkit::generate::{gen_instance, InstanceFamily};
use crate::tree::TreeInstance;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

/// Environment variable holding the worker count for `bench` and `check`.
pub const WORKERS_ENV: &str = "SRDI_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    N1,
    Cit,
    Dit,
    Mcdit,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::N1, Algorithm::Cit, Algorithm::Dit, Algorithm::Mcdit];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::N1 => "n1",
            Algorithm::Cit => "cit",
            Algorithm::Dit => "dit",
            Algorithm::Mcdit => "mcdit",
        }
    }

    /// Family for size `n`; the single-upgrade greedy needs `r = 1, N = 1`.
    pub fn family(self, n: usize, seed: u64, fixed_budget: Option<u32>) -> InstanceFamily {
        let mut f = match self {
            Algorithm::N1 => return InstanceFamily::single_upgrade(n, seed),
            _ => InstanceFamily::integer(n, seed),
        };
        f.rules.fixed_budget = fixed_budget;
        f
    }

    /// Solves `inst` once, returning the elapsed time and the status.
    pub fn run(self, inst: &TreeInstance) -> Result<(Duration, Status)> {
        let start = Instant::now();
        let status = match self {
            Algorithm::N1 => solve_dit_n1(inst)?.status,
            Algorithm::Cit => {
                let p = inst.params();
                solve_cit(inst, p.k, i64::from(p.n), 0.5)?;
                Status::Optimal
            }
            Algorithm::Dit => solve_dit(inst)?.status,
            Algorithm::Mcdit => solve_mcdit(inst)?.status,
        };
        Ok((start.elapsed(), status))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected n1, cit, dit or mcdit)"))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub reps: usize,
    pub seed: u64,
    /// Hamming budget for every instance; drawn per instance when `None`.
    pub fixed_budget: Option<u32>,
    /// Pool size; falls back to [`WORKERS_ENV`], then to 1.
    pub workers: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10, 50, 100, 300, 500],
            algorithms: Algorithm::ALL.to_vec(),
            reps: 5,
            seed: 0,
            fixed_budget: Some(3),
            workers: None,
        }
    }
}

/// Timings in milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub median: f64,
    pub reps: usize,
    pub optimal: usize,
    pub infeasible: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, algorithm: Algorithm, n: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.n == n)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("algorithm\tn\tmean\tmax\tmin\treps\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{}\n", r.algorithm, r.n, r.mean, r.max, r.min, r.reps));
        }
        out
    }
}

/// Worker count from the environment, if set to a positive integer.
pub fn env_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&w| w > 0)
}

pub(crate) fn pool(workers: Option<usize>, default: usize) -> Result<rayon::ThreadPool> {
    let n = workers.or_else(env_workers).unwrap_or(default).max(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))
}

fn summarize(algorithm: Algorithm, n: usize, runs: &[(Duration, Status)]) -> BenchRow {
    let mut ms: Vec<f64> = runs.iter().map(|(d, _)| d.as_secs_f64() * 1e3).collect();
    ms.sort_by(f64::total_cmp);
    let k = ms.len();
    let median = if k % 2 == 1 { ms[k / 2] } else { 0.5 * (ms[k / 2 - 1] + ms[k / 2]) };
    let mean = (ms.iter().sum::<f64>() / k as f64).clamp(ms[0], ms[k - 1]);
    BenchRow {
        algorithm,
        n,
        mean,
        max: ms[k - 1],
        min: ms[0],
        median,
        reps: k,
        optimal: runs.iter().filter(|(_, s)| *s == Status::Optimal).count(),
        infeasible: runs.iter().filter(|(_, s)| *s == Status::Infeasible).count(),
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.reps == 0 {
        return Err(Error::InvalidRange("reps must be at least 1".into()));
    }
    let mut instances = Vec::new();
    for &alg in &cfg.algorithms {
        for &n in &cfg.sizes {
            for rep in 0..cfg.reps {
                let seed = cfg.seed.wrapping_add(rep as u64);
                instances.push((alg, n, gen_instance(&alg.family(n, seed, cfg.fixed_budget))?));
            }
        }
    }
    let pool = pool(cfg.workers, 1)?;
    let timed: Vec<Result<(Duration, Status)>> =
        pool.install(|| instances.par_iter().map(|(alg, _, inst)| alg.run(inst)).collect());

    let mut rows = Vec::new();
    let mut it = timed.into_iter();
    for &alg in &cfg.algorithms {
        for &n in &cfg.sizes {
            let runs = it.by_ref().take(cfg.reps).collect::<Result<Vec<_>>>()?;
            rows.push(summarize(alg, n, &runs));
        }
    }
    Ok(BenchReport { seed: cfg.seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rep_collapses_statistics() {
        let cfg = BenchConfig { sizes: vec![8], reps: 1, ..Default::default() };
        let rep = run_bench(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 4);
        for r in &rep.rows {
            assert_eq!(r.mean, r.min);
            assert_eq!(r.mean, r.max);
            assert_eq!(r.optimal + r.infeasible, 1);
        }
    }

    #[test]
    fn tsv_layout() {
        let cfg = BenchConfig { sizes: vec![5, 10], algorithms: vec![Algorithm::Cit], reps: 3, ..Default::default() };
        let tsv = run_bench(&cfg).unwrap().to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "algorithm\tn\tmean\tmax\tmin\treps");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("cit\t10\t"));
        assert!(lines[2].ends_with("\t3"));
    }

    #[test]
    fn zero_reps_rejected() {
        assert!(run_bench(&BenchConfig { reps: 0, ..Default::default() }).is_err());
    }

    #[test]
    fn parses_algorithm_names() {
        assert_eq!("mcdit".parse::<Algorithm>(), Ok(Algorithm::Mcdit));
        assert!("dp".parse::<Algorithm>().is_err());
    }
}
