use thiserror::Error;

use crate::instance::{check_feasible, MilpInstance, Solution, DEFAULT_FEAS_TOL};

/// Caps for exhaustive enumeration.
#[derive(Clone, Debug)]
pub struct EnumerationLimits {
    /// Maximum product of integer domain sizes.
    pub max_assignments: u128,
    /// Feasibility tolerance for the direct (pure-integer) evaluation path.
    pub feas_tol: f64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_assignments: 1_000_000,
            feas_tol: DEFAULT_FEAS_TOL,
        }
    }
}

/// Outcome of solving the continuous relaxation of a (partially fixed)
/// instance.
#[derive(Clone, Debug)]
pub enum RelaxedSolve {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error)]
#[error("relaxation solver failed: {0}")]
pub struct SolverFailure(pub String);

/// LP backend used by [`brute_force_solve`] for instances with continuous
/// variables. The brute-force loop fixes every integer variable (by pinching
/// its bounds) and hands the residual problem to this solver.
pub trait RelaxationSolver {
    fn solve_relaxation(&self, inst: &MilpInstance) -> Result<RelaxedSolve, SolverFailure>;
}

#[derive(Debug, Error)]
pub enum BruteForceError {
    #[error("integer variable {var} has an infinite bound; enumeration requires finite domains")]
    InfiniteIntegerDomain { var: usize },
    #[error("enumeration would visit {required} assignments, cap is {cap}")]
    CapExceeded { required: u128, cap: u128 },
    #[error("residual LP is unbounded under a fixed integer assignment")]
    UnboundedResidual,
    #[error(transparent)]
    Backend(#[from] SolverFailure),
}

/// Exhaustively enumerates every integer assignment and returns a globally
/// optimal solution, or `None` when the instance is infeasible.
///
/// For each assignment the integer variables are fixed; if the instance has
/// continuous variables the residual LP is delegated to `relaxation`,
/// otherwise the fully fixed point is evaluated directly. Ties on the
/// objective keep the lexicographically first assignment, which makes the
/// result deterministic.
pub fn brute_force_solve(
    inst: &MilpInstance,
    limits: &EnumerationLimits,
    relaxation: &dyn RelaxationSolver,
) -> Result<Option<Solution>, BruteForceError> {
    let int_vars: Vec<usize> = (0..inst.num_vars)
        .filter(|&j| inst.vtypes[j].is_integral())
        .collect();

    // Integer domain of each enumerated variable, derived from its bounds.
    let mut domains: Vec<(i64, i64)> = Vec::with_capacity(int_vars.len());
    let mut count: u128 = 1;
    for &j in &int_vars {
        let (lb, ub) = (inst.lower[j], inst.upper[j]);
        if !lb.is_finite() || !ub.is_finite() {
            return Err(BruteForceError::InfiniteIntegerDomain { var: j });
        }
        let lo = (lb - 1e-9).ceil() as i64;
        let hi = (ub + 1e-9).floor() as i64;
        if lo > hi {
            return Ok(None); // empty integer domain: trivially infeasible
        }
        domains.push((lo, hi));
        count = count.saturating_mul((hi - lo + 1) as u128);
        if count > limits.max_assignments {
            return Err(BruteForceError::CapExceeded {
                required: count,
                cap: limits.max_assignments,
            });
        }
    }

    let pure_integer = inst.num_continuous_vars() == 0;
    let mut best: Option<Solution> = None;
    let mut assignment: Vec<i64> = domains.iter().map(|&(lo, _)| lo).collect();

    loop {
        let candidate = if pure_integer {
            let mut x = vec![0.0; inst.num_vars];
            for (k, &j) in int_vars.iter().enumerate() {
                x[j] = assignment[k] as f64;
            }
            if check_feasible(inst, &x, limits.feas_tol) {
                Some(Solution::from_values(inst, x).expect("dimensions match"))
            } else {
                None
            }
        } else {
            let mut fixed = inst.clone();
            for (k, &j) in int_vars.iter().enumerate() {
                let v = assignment[k] as f64;
                fixed.lower[j] = v;
                fixed.upper[j] = v;
            }
            match relaxation.solve_relaxation(&fixed)? {
                RelaxedSolve::Optimal { x, objective } => Some(Solution { values: x, objective }),
                RelaxedSolve::Infeasible => None,
                RelaxedSolve::Unbounded => return Err(BruteForceError::UnboundedResidual),
            }
        };

        if let Some(sol) = candidate {
            let improves = match &best {
                Some(b) => sol.objective < b.objective,
                None => true,
            };
            if improves {
                best = Some(sol);
            }
        }

        // Odometer increment over the integer domains.
        let mut k = assignment.len();
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            if assignment[k] < domains[k].1 {
                assignment[k] += 1;
                for (a, &(lo, _)) in assignment.iter_mut().zip(domains.iter()).skip(k + 1) {
                    *a = lo;
                }
                break;
            }
        }
    }
}

/// Relaxation backend that only handles fully fixed instances (every variable
/// with `lb == ub`). Sufficient for pure-integer tests inside this crate;
/// real mixed instances should use the simplex-backed implementation.
pub struct FixedAssignmentOnly;

impl RelaxationSolver for FixedAssignmentOnly {
    fn solve_relaxation(&self, inst: &MilpInstance) -> Result<RelaxedSolve, SolverFailure> {
        let mut x = Vec::with_capacity(inst.num_vars);
        for j in 0..inst.num_vars {
            if inst.lower[j] != inst.upper[j] {
                return Err(SolverFailure(format!(
                    "variable {j} is not fixed; this backend only evaluates fixed assignments"
                )));
            }
            x.push(inst.lower[j]);
        }
        if check_feasible(inst, &x, DEFAULT_FEAS_TOL) {
            let objective = crate::instance::eval_objective(inst, &x).expect("dimensions match");
            Ok(RelaxedSolve::Optimal { x, objective })
        } else {
            Ok(RelaxedSolve::Infeasible)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{RowSense, SparseRow, VarType};

    fn int_box(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> MilpInstance {
        let n = objective.len();
        MilpInstance::new(
            "t",
            n,
            objective,
            vec![],
            vec![],
            vec![],
            lower,
            upper,
            vec![VarType::Integer; n],
        )
        .unwrap()
    }

    #[test]
    fn unconstrained_minimum_is_lowest_domain_value() {
        let inst = int_box(vec![1.0], vec![0.0], vec![2.0]);
        let sol = brute_force_solve(&inst, &EnumerationLimits::default(), &FixedAssignmentOnly)
            .unwrap()
            .unwrap();
        assert_eq!(sol.values, vec![0.0]);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn conflicting_rows_yield_none() {
        let inst = MilpInstance::new(
            "t",
            1,
            vec![1.0],
            vec![
                SparseRow::new(vec![(0, 1.0)]),
                SparseRow::new(vec![(0, 1.0)]),
            ],
            vec![RowSense::Ge, RowSense::Le],
            vec![1.0, 0.0],
            vec![-5.0],
            vec![5.0],
            vec![VarType::Integer],
        )
        .unwrap();
        let sol =
            brute_force_solve(&inst, &EnumerationLimits::default(), &FixedAssignmentOnly).unwrap();
        assert!(sol.is_none());
    }

    #[test]
    fn cap_exceeded_errors() {
        let inst = int_box(vec![1.0, 1.0], vec![0.0, 0.0], vec![1000.0, 1000.0]);
        let limits = EnumerationLimits {
            max_assignments: 1000,
            ..Default::default()
        };
        let err = brute_force_solve(&inst, &limits, &FixedAssignmentOnly).unwrap_err();
        assert!(matches!(err, BruteForceError::CapExceeded { .. }));
    }

    #[test]
    fn infinite_integer_bound_errors() {
        let inst = MilpInstance::new(
            "t",
            1,
            vec![1.0],
            vec![],
            vec![],
            vec![],
            vec![0.0],
            vec![f64::INFINITY],
            vec![VarType::Integer],
        )
        .unwrap();
        let err = brute_force_solve(&inst, &EnumerationLimits::default(), &FixedAssignmentOnly)
            .unwrap_err();
        assert!(matches!(err, BruteForceError::InfiniteIntegerDomain { var: 0 }));
    }

    #[test]
    fn knapsack_optimum_found() {
        // min -3x0 - 4x1 - 2x2  s.t.  2x0 + 3x1 + x2 <= 4, x binary
        let inst = MilpInstance::new(
            "knap",
            3,
            vec![-3.0, -4.0, -2.0],
            vec![SparseRow::new(vec![(0, 2.0), (1, 3.0), (2, 1.0)])],
            vec![RowSense::Le],
            vec![4.0],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![VarType::Binary; 3],
        )
        .unwrap();
        let sol = brute_force_solve(&inst, &EnumerationLimits::default(), &FixedAssignmentOnly)
            .unwrap()
            .unwrap();
        // Best is x1 + x2 (weight 4, value 6).
        assert_eq!(sol.values, vec![0.0, 1.0, 1.0]);
        assert_eq!(sol.objective, -6.0);
    }
}
