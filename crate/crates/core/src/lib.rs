//! Upgrading edge weights of a rooted tree to lengthen root-leaf paths.
//!
//! The leader raises edge weights `w <= w' <= u`, paying `c(e)(w' - w)` per
//! edge (bounded by `K` in the max norm) and `r(e)` per touched edge (bounded
//! by `N`). Solvers:
//!
//! * [`relax::solve_dit_inf`]: no Hamming budget;
//! * [`greedy::solve_dit_n1`]: one upgrade, `r = 1`;
//! * [`cit::solve_cit`]: weighted sum `lambda * shortest + (1 - lambda) * sum`;
//! * [`dit::solve_dit`]: maximum sum with shortest path at least `M`;
//! * [`mcdit::solve_mcdit`]: least `K` meeting both `M` and a sum target `D`.
//!
//! [`oracle`] holds brute-force counterparts for small trees.

pub mod cit;
pub mod dit;
pub mod error;
pub mod greedy;
pub mod mcdit;
pub mod oracle;
pub mod relax;
pub mod report;
pub mod toolkit;
pub mod tree;

pub use error::{Error, Result};
pub use report::{Problem, SolveReport, Status, UpgradePlan};
pub use tree::{ChildOrder, EdgeData, Params, RawEdge, TreeInstance};
