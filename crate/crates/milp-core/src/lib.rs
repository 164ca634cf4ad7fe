//! Canonical MILP data model and reference tooling.
//!
//! Everything downstream (the LP solver, the branch-and-bound engine, the
//! instance generators) speaks the types defined here. The crate also ships
//! [`brute_force_solve`], an exhaustive enumeration solver used as the
//! correctness oracle in tests: it is deliberately simple and independent of
//! the branch-and-bound code paths it is used to check.
//!
//! All problems are minimization problems; generators for maximization
//! families negate their objectives before construction.

mod brute;
mod instance;
mod io;

pub use brute::{
    brute_force_solve, BruteForceError, EnumerationLimits, FixedAssignmentOnly, RelaxationSolver,
    RelaxedSolve, SolverFailure,
};
pub use instance::{
    check_feasible, eval_objective, InstanceError, MilpInstance, RowSense, Solution, SparseRow,
    VarType, DEFAULT_FEAS_TOL,
};
pub use io::{read_instance, read_instance_str, write_instance, write_instance_string, ParseError};

/// Bound magnitude written to instance files in place of an infinity.
/// In-memory instances keep true `f64::INFINITY` bounds.
pub const BOUND_SENTINEL: f64 = 1e20;
