use thiserror::Error;

/// Default absolute feasibility tolerance used across the workspace.
pub const DEFAULT_FEAS_TOL: f64 = 1e-6;

/// Variable integrality class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarType {
    Binary,
    Integer,
    Continuous,
}

impl VarType {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarType::Continuous)
    }
}

/// Row sense for `a'x {>=, <=, =} b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Ge,
    Le,
    Eq,
}

/// One constraint row, stored sparsely as `(column, coefficient)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow {
    pub entries: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn new(entries: Vec<(usize, f64)>) -> Self {
        Self { entries }
    }

    /// Row activity `a'x`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

/// A minimization MILP in row form: `min c'x` subject to sparse rows with
/// senses, variable bounds, and per-variable integrality.
#[derive(Clone, Debug, PartialEq)]
pub struct MilpInstance {
    pub name: String,
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<SparseRow>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub vtypes: Vec<VarType>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("field `{field}` has length {got}, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("row {row}: column index {col} out of range (num_vars = {num_vars})")]
    ColumnOutOfRange {
        row: usize,
        col: usize,
        num_vars: usize,
    },
    #[error("row {row}: duplicate column index {col}")]
    DuplicateColumn { row: usize, col: usize },
    #[error("row {row}: stored coefficient for column {col} is zero")]
    ZeroCoefficient { row: usize, col: usize },
    #[error("variable {var}: lower bound {lb} exceeds upper bound {ub}")]
    BoundOrder { var: usize, lb: f64, ub: f64 },
    #[error("binary variable {var} has bounds [{lb}, {ub}] outside [0, 1]")]
    BinaryBounds { var: usize, lb: f64, ub: f64 },
    #[error("non-finite value in field `{field}` at index {index}")]
    NonFinite { field: &'static str, index: usize },
}

impl MilpInstance {
    /// Validates all structural invariants and returns the instance.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        num_vars: usize,
        objective: Vec<f64>,
        rows: Vec<SparseRow>,
        senses: Vec<RowSense>,
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        vtypes: Vec<VarType>,
    ) -> Result<Self, InstanceError> {
        let inst = Self {
            name: name.into(),
            num_vars,
            objective,
            rows,
            senses,
            rhs,
            lower,
            upper,
            vtypes,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn num_cons(&self) -> usize {
        self.rows.len()
    }

    pub fn num_integer_vars(&self) -> usize {
        self.vtypes.iter().filter(|t| t.is_integral()).count()
    }

    pub fn num_continuous_vars(&self) -> usize {
        self.num_vars - self.num_integer_vars()
    }

    /// Total number of nonzeros in the constraint matrix.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseRow::nnz).sum()
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let check_len = |field: &'static str, got: usize, expected: usize| {
            if got == expected {
                Ok(())
            } else {
                Err(InstanceError::LengthMismatch {
                    field,
                    expected,
                    got,
                })
            }
        };
        check_len("objective", self.objective.len(), self.num_vars)?;
        check_len("lower", self.lower.len(), self.num_vars)?;
        check_len("upper", self.upper.len(), self.num_vars)?;
        check_len("vtypes", self.vtypes.len(), self.num_vars)?;
        check_len("senses", self.senses.len(), self.rows.len())?;
        check_len("rhs", self.rhs.len(), self.rows.len())?;

        for (j, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(InstanceError::NonFinite {
                    field: "objective",
                    index: j,
                });
            }
        }
        for (i, &b) in self.rhs.iter().enumerate() {
            if !b.is_finite() {
                return Err(InstanceError::NonFinite {
                    field: "rhs",
                    index: i,
                });
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let mut seen = vec![false; self.num_vars];
            for &(j, a) in &row.entries {
                if j >= self.num_vars {
                    return Err(InstanceError::ColumnOutOfRange {
                        row: i,
                        col: j,
                        num_vars: self.num_vars,
                    });
                }
                if seen[j] {
                    return Err(InstanceError::DuplicateColumn { row: i, col: j });
                }
                seen[j] = true;
                if a == 0.0 {
                    return Err(InstanceError::ZeroCoefficient { row: i, col: j });
                }
                if !a.is_finite() {
                    return Err(InstanceError::NonFinite {
                        field: "rows",
                        index: i,
                    });
                }
            }
        }
        for j in 0..self.num_vars {
            let (lb, ub) = (self.lower[j], self.upper[j]);
            if lb.is_nan() || ub.is_nan() {
                return Err(InstanceError::NonFinite {
                    field: "bounds",
                    index: j,
                });
            }
            if lb > ub {
                return Err(InstanceError::BoundOrder {
                    var: j,
                    lb,
                    ub,
                });
            }
            if self.vtypes[j] == VarType::Binary && (lb < 0.0 || ub > 1.0) {
                return Err(InstanceError::BinaryBounds { var: j, lb, ub });
            }
        }
        Ok(())
    }
}

/// A feasible point together with its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective: f64,
}

impl Solution {
    /// Builds a solution, computing the objective from the instance so the
    /// `objective == c'x` invariant holds by construction.
    pub fn from_values(inst: &MilpInstance, values: Vec<f64>) -> Result<Self, InstanceError> {
        let objective = eval_objective(inst, &values)?;
        Ok(Self { values, objective })
    }
}

/// Objective value `c'x`.
pub fn eval_objective(inst: &MilpInstance, x: &[f64]) -> Result<f64, InstanceError> {
    if x.len() != inst.num_vars {
        return Err(InstanceError::LengthMismatch {
            field: "x",
            expected: inst.num_vars,
            got: x.len(),
        });
    }
    Ok(inst
        .objective
        .iter()
        .zip(x.iter())
        .map(|(c, v)| c * v)
        .sum())
}

/// True iff `x` satisfies every row, every bound, and every integrality
/// restriction within the absolute tolerance `tol`. Any NaN in `x` fails.
pub fn check_feasible(inst: &MilpInstance, x: &[f64], tol: f64) -> bool {
    assert!(tol > 0.0, "tolerance must be positive");
    if x.len() != inst.num_vars || x.iter().any(|v| v.is_nan()) {
        return false;
    }
    for j in 0..inst.num_vars {
        if x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol {
            return false;
        }
        if inst.vtypes[j].is_integral() && (x[j] - x[j].round()).abs() > tol {
            return false;
        }
    }
    for (i, row) in inst.rows.iter().enumerate() {
        let activity = row.dot(x);
        let ok = match inst.senses[i] {
            RowSense::Ge => activity >= inst.rhs[i] - tol,
            RowSense::Le => activity <= inst.rhs[i] + tol,
            RowSense::Eq => (activity - inst.rhs[i]).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_instance(num_vars: usize, objective: Vec<f64>) -> MilpInstance {
        MilpInstance::new(
            "t",
            num_vars,
            objective,
            vec![],
            vec![],
            vec![],
            vec![f64::NEG_INFINITY; num_vars],
            vec![f64::INFINITY; num_vars],
            vec![VarType::Continuous; num_vars],
        )
        .unwrap()
    }

    #[test]
    fn zero_objective_evaluates_to_zero() {
        let inst = free_instance(3, vec![0.0, 0.0, 0.0]);
        assert_eq!(eval_objective(&inst, &[5.0, -2.0, 7.5]).unwrap(), 0.0);
    }

    #[test]
    fn objective_is_dot_product() {
        let inst = free_instance(2, vec![1.0, 2.0]);
        assert_eq!(eval_objective(&inst, &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn objective_dimension_mismatch_errors() {
        let inst = free_instance(2, vec![1.0, 2.0]);
        assert!(eval_objective(&inst, &[1.0]).is_err());
    }

    #[test]
    fn empty_constraint_set_is_feasible_within_bounds() {
        let inst = free_instance(2, vec![0.0, 0.0]);
        assert!(check_feasible(&inst, &[1.0, -3.0], 1e-6));
    }

    #[test]
    fn violated_row_is_infeasible() {
        let inst = MilpInstance::new(
            "t",
            2,
            vec![0.0, 0.0],
            vec![SparseRow::new(vec![(0, 1.0), (1, 1.0)])],
            vec![RowSense::Ge],
            vec![3.0],
            vec![0.0, 0.0],
            vec![10.0, 10.0],
            vec![VarType::Continuous, VarType::Continuous],
        )
        .unwrap();
        assert!(!check_feasible(&inst, &[1.0, 1.0], 1e-6));
        assert!(check_feasible(&inst, &[1.0, 2.0], 1e-6));
    }

    #[test]
    fn fractional_integer_is_infeasible() {
        let inst = MilpInstance::new(
            "t",
            1,
            vec![0.0],
            vec![],
            vec![],
            vec![],
            vec![0.0],
            vec![1.0],
            vec![VarType::Integer],
        )
        .unwrap();
        assert!(!check_feasible(&inst, &[0.5], 1e-6));
        assert!(check_feasible(&inst, &[1.0], 1e-6));
    }

    #[test]
    fn nan_is_infeasible() {
        let inst = free_instance(1, vec![1.0]);
        assert!(!check_feasible(&inst, &[f64::NAN], 1e-6));
    }

    #[test]
    fn validation_rejects_duplicate_column() {
        let err = MilpInstance::new(
            "t",
            2,
            vec![0.0, 0.0],
            vec![SparseRow::new(vec![(1, 1.0), (1, 2.0)])],
            vec![RowSense::Le],
            vec![1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![VarType::Continuous, VarType::Continuous],
        )
        .unwrap_err();
        assert!(matches!(err, InstanceError::DuplicateColumn { row: 0, col: 1 }));
    }

    #[test]
    fn validation_rejects_binary_outside_unit_box() {
        let err = MilpInstance::new(
            "t",
            1,
            vec![0.0],
            vec![],
            vec![],
            vec![],
            vec![0.0],
            vec![2.0],
            vec![VarType::Binary],
        )
        .unwrap_err();
        assert!(matches!(err, InstanceError::BinaryBounds { .. }));
    }

    #[test]
    fn solution_objective_matches_dot() {
        let inst = free_instance(2, vec![2.0, -1.0]);
        let sol = Solution::from_values(&inst, vec![1.5, 4.0]).unwrap();
        assert!((sol.objective - (2.0 * 1.5 - 4.0)).abs() < 1e-9);
    }
}
