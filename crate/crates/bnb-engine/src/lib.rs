//! Branch and bound over MILP instances with pluggable node-comparison
//! (`NodeComparator`) and node-selection (`NodeSelector`) policies.
//!
//! The engine keeps a priority list of open nodes ordered by the comparator
//! (FIFO among equals) and lets the selector pick which open node to focus
//! next. Child relaxations are solved at creation, so every open node carries
//! its dual bound and best-estimate value; pseudocost statistics accumulate
//! as branching proceeds.

mod comparators;
mod engine;
mod node;
mod pseudocost;
mod selectors;
mod trace;

pub use comparators::{
    best_first_comp, dfs_comp, estimate_comp, BestFirstComparator, CompareContext, CompareError,
    DfsComparator, EstimateComparator, NodeComparator, OracleComparator, OracleJudgement,
};
pub use engine::{
    solve, solve_traced, SolveError, SolveLimits, SolveStats, SolveStatus, TreeStats,
};
pub use node::{most_fractional_var, BnbNode, BranchDirection, CompDecision, NodeId, INT_TOL};
pub use pseudocost::{compute_estimate, PseudocostTable};
pub use selectors::{HybridSelector, NodeSelector, PlainSelector, ScipLikeSelector, SelectView};
