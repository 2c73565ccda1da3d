//! Generation, file formats, sweeps and benchmarks.

pub mod bench;
pub mod check;
pub mod format;
pub mod generate;

pub use bench::{run_bench, Algorithm, BenchConfig, BenchReport, BenchRow};
pub use check::{run_check, CheckConfig, CheckProblem, CheckSummary, Mutation};
pub use format::{instance_to_json, parse_instance, report_to_json, FormatError};
pub use generate::{gen_instance, InstanceFamily, ParamRules};
