use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use srd_interdiction::cit::solve_cit_report;
use srd_interdiction::dit::{solve_dit_traced, DitOptions};
use srd_interdiction::greedy::solve_dit_n1;
use srd_interdiction::mcdit::{solve_mcdit_traced, McditOptions};
use srd_interdiction::oracle::{oracle_cit, oracle_dit, oracle_mcdit, oracle_single_edge};
use srd_interdiction::relax::solve_dit_inf;
use srd_interdiction::report::Problem;
use srd_interdiction::toolkit::{
    gen_instance, instance_to_json, parse_instance, report_to_json, run_bench, run_check, Algorithm, BenchConfig,
    CheckConfig, CheckProblem, InstanceFamily, Mutation,
};
use srd_interdiction::tree::TreeInstance;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Tree edge-upgrade solvers.
///
/// Exit codes: 0 success, 1 error, 2 infeasible, 3 check mismatches.
#[derive(Parser)]
#[command(name = "srdi", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Solve an instance and print the report as JSON.
    Solve(SolveArgs),
    /// Solve an instance by exhaustive enumeration (at most 16 edges).
    Oracle(OracleArgs),
    /// Compare solvers with the oracles on random instances.
    Check(CheckArgs),
    /// Time the solvers on random instances and print a TSV table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Integer,
    Real,
    Single,
}

#[derive(Args)]
struct GenArgs {
    /// Number of edges.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "integer")]
    family: FamilyKind,
    /// Fixed Hamming budget N.
    #[arg(long)]
    budget: Option<u32>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveProblem {
    Relax,
    Dit1,
    Cit,
    Dit,
    Mcdit,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: SolveProblem,
    file: PathBuf,
    /// Scalarization weight for `cit`.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Accept a bisection step only when the shortest path exceeds M.
    #[arg(long)]
    strict: bool,
    /// Stop the bisection once the sum matches its unconstrained maximum.
    #[arg(long)]
    early_exit: bool,
    /// Try fractional budgets below the integer optimum (`mcdit`).
    #[arg(long)]
    refine_real: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleProblem {
    Cit,
    Dit,
    Dit1,
    Mcdit,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    problem: OracleProblem,
    file: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    CapLastEdge,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    problem: CheckProblem,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 12)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Break the solver on purpose to test the harness.
    #[arg(long, value_enum)]
    mutate: Option<MutationArg>,
    #[arg(long)]
    strict: bool,
    /// Directory for minimized counterexamples.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: SRDI_WORKERS, then all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Print the full summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,50,100,300,500")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "n1,cit,dit,mcdit")]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hamming budget for every instance.
    #[arg(long, default_value_t = 3)]
    budget: u32,
    /// Worker threads (default: SRDI_WORKERS, then 1).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    json: bool,
}

fn load(path: &Path) -> anyhow::Result<TreeInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("{}", path.display()))
}

fn print_json(v: &impl serde::Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn gen(a: GenArgs) -> anyhow::Result<u8> {
    let mut family = match a.family {
        FamilyKind::Integer => InstanceFamily::integer(a.n, a.seed),
        FamilyKind::Real => InstanceFamily::real(a.n, a.seed),
        FamilyKind::Single => InstanceFamily::single_upgrade(a.n, a.seed),
    };
    if a.budget.is_some() {
        family.rules.fixed_budget = a.budget;
    }
    let text = instance_to_json(&gen_instance(&family)?);
    match a.out {
        Some(p) => std::fs::write(&p, text + "\n").with_context(|| format!("cannot write {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn solve(a: SolveArgs) -> anyhow::Result<u8> {
    let inst = load(&a.file)?;
    let dit = DitOptions { strict_acceptance: a.strict, early_exit: a.early_exit };
    let report = match a.problem {
        SolveProblem::Relax => solve_dit_inf(&inst, inst.params().k)?,
        SolveProblem::Dit1 => solve_dit_n1(&inst)?,
        SolveProblem::Cit => solve_cit_report(&inst, a.lambda)?,
        SolveProblem::Dit => solve_dit_traced(&inst, dit)?.report,
        SolveProblem::Mcdit => solve_mcdit_traced(&inst, McditOptions { refine_real: a.refine_real, dit })?.report,
    };
    print_json(&report_to_json(&inst, &report))?;
    Ok(if report.is_feasible() { 0 } else { EXIT_INFEASIBLE })
}

fn oracle(a: OracleArgs) -> anyhow::Result<u8> {
    let inst = load(&a.file)?;
    let p = *inst.params();
    let (problem, res) = match a.problem {
        OracleProblem::Cit => (Problem::Cit, oracle_cit(&inst, p.k, u64::from(p.n), a.lambda)?),
        OracleProblem::Dit => (Problem::Dit, oracle_dit(&inst)?),
        OracleProblem::Dit1 => (Problem::Dit1, oracle_single_edge(&inst)?),
        OracleProblem::Mcdit => (Problem::Mcdit, oracle_mcdit(&inst)?),
    };
    print_json(&srd_interdiction::toolkit::format::oracle_to_json(&inst, problem, &res))?;
    Ok(if res.is_feasible() { 0 } else { EXIT_INFEASIBLE })
}

fn check(a: CheckArgs) -> anyhow::Result<u8> {
    if a.max_n == 0 {
        bail!("--max-n must be at least 1");
    }
    let mut cfg = CheckConfig::new(a.problem, a.count, a.max_n, a.seed);
    cfg.mutation = a.mutate.map(|MutationArg::CapLastEdge| Mutation::CapLastEdge);
    cfg.dit.strict_acceptance = a.strict;
    cfg.out_dir = a.out;
    cfg.workers = a.workers;
    let s = run_check(&cfg)?;
    if a.json {
        print_json(&s)?;
    } else {
        for m in &s.mismatches {
            let file = m.counterexample.as_ref().map(|p| format!(" -> {}", p.display())).unwrap_or_default();
            println!(
                "MISMATCH case {} (seed {}, n {}): solver {:?}, oracle {:?} {}{file}",
                m.id, m.seed, m.n, m.solver, m.oracle, m.detail
            );
        }
        println!(
            "{} seed {}: {}/{} passed, {} mismatches",
            s.problem.name(),
            s.seed,
            s.passed,
            s.count,
            s.mismatches.len()
        );
    }
    Ok(if s.all_passed() { 0 } else { EXIT_MISMATCH })
}

fn bench(a: BenchArgs) -> anyhow::Result<u8> {
    let cfg = BenchConfig {
        sizes: a.sizes,
        algorithms: a.algorithms,
        reps: a.reps,
        seed: a.seed,
        fixed_budget: Some(a.budget),
        workers: a.workers,
    };
    let rep = run_bench(&cfg)?;
    if a.json {
        print_json(&rep)?;
    } else {
        eprintln!("# seed {}, N = {}, times in ms", rep.seed, a.budget);
        print!("{}", rep.to_tsv());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let out = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Solve(a) => solve(a),
        Cmd::Oracle(a) => oracle(a),
        Cmd::Check(a) => check(a),
        Cmd::Bench(a) => bench(a),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
