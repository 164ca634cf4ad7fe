use milp_core::MilpInstance;

use crate::node::{BranchDirection, INT_TOL};

/// Per-variable history of objective gain per unit of fractionality, split by
/// branching direction. Uninitialized entries fall back to the average over
/// all initialized ones, or 1.0 when nothing has been observed yet.
#[derive(Clone, Debug)]
pub struct PseudocostTable {
    down_sum: Vec<f64>,
    down_count: Vec<u64>,
    up_sum: Vec<f64>,
    up_count: Vec<u64>,
    global_sum: f64,
    global_count: u64,
}

impl PseudocostTable {
    pub fn new(num_vars: usize) -> Self {
        Self {
            down_sum: vec![0.0; num_vars],
            down_count: vec![0; num_vars],
            up_sum: vec![0.0; num_vars],
            up_count: vec![0; num_vars],
            global_sum: 0.0,
            global_count: 0,
        }
    }

    /// Records the dual-bound gain observed when branching `var` in
    /// `direction` with LP fraction `fraction` in the parent. Negative gains
    /// (numerical noise) clamp to zero.
    pub fn update(
        &mut self,
        var: usize,
        direction: BranchDirection,
        parent_bound: f64,
        child_bound: f64,
        fraction: f64,
    ) {
        debug_assert!(fraction > 0.0 && fraction < 1.0);
        let gain = (child_bound - parent_bound).max(0.0);
        let per_unit = match direction {
            BranchDirection::Down => gain / fraction,
            BranchDirection::Up => gain / (1.0 - fraction),
        };
        let (sum, count) = match direction {
            BranchDirection::Down => (&mut self.down_sum[var], &mut self.down_count[var]),
            BranchDirection::Up => (&mut self.up_sum[var], &mut self.up_count[var]),
        };
        *sum += per_unit;
        *count += 1;
        self.global_sum += per_unit;
        self.global_count += 1;
    }

    /// Average gain per unit fraction for a variable and direction.
    pub fn average(&self, var: usize, direction: BranchDirection) -> f64 {
        let (sum, count) = match direction {
            BranchDirection::Down => (self.down_sum[var], self.down_count[var]),
            BranchDirection::Up => (self.up_sum[var], self.up_count[var]),
        };
        if count > 0 {
            sum / count as f64
        } else if self.global_count > 0 {
            self.global_sum / self.global_count as f64
        } else {
            1.0
        }
    }
}

/// Best-estimate value of a node: its dual bound plus, for every fractional
/// integer variable, the cheaper pseudocost-predicted cost of restoring
/// integrality.
pub fn compute_estimate(
    inst: &MilpInstance,
    dual_bound: f64,
    x: &[f64],
    pc: &PseudocostTable,
) -> f64 {
    let mut estimate = dual_bound;
    for j in 0..inst.num_vars {
        if !inst.vtypes[j].is_integral() {
            continue;
        }
        let f = x[j] - x[j].floor();
        if f.min(1.0 - f) <= INT_TOL {
            continue;
        }
        let down = pc.average(j, BranchDirection::Down) * f;
        let up = pc.average(j, BranchDirection::Up) * (1.0 - f);
        estimate += down.min(up);
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use milp_core::{MilpInstance, VarType};

    fn toy(n: usize) -> MilpInstance {
        MilpInstance::new(
            "t",
            n,
            vec![0.0; n],
            vec![],
            vec![],
            vec![],
            vec![0.0; n],
            vec![10.0; n],
            vec![VarType::Integer; n],
        )
        .unwrap()
    }

    #[test]
    fn update_records_gain_per_unit() {
        let mut pc = PseudocostTable::new(1);
        pc.update(0, BranchDirection::Down, 10.0, 12.0, 0.5);
        assert_eq!(pc.average(0, BranchDirection::Down), 4.0);
    }

    #[test]
    fn zero_gain_recorded_as_zero() {
        let mut pc = PseudocostTable::new(1);
        pc.update(0, BranchDirection::Up, 10.0, 10.0, 0.25);
        assert_eq!(pc.average(0, BranchDirection::Up), 0.0);
    }

    #[test]
    fn negative_gain_clamps() {
        let mut pc = PseudocostTable::new(1);
        pc.update(0, BranchDirection::Down, 10.0, 9.0, 0.5);
        assert_eq!(pc.average(0, BranchDirection::Down), 0.0);
    }

    #[test]
    fn average_is_clamped_mean() {
        let mut pc = PseudocostTable::new(1);
        pc.update(0, BranchDirection::Down, 0.0, 2.0, 0.5); // 4 per unit
        pc.update(0, BranchDirection::Down, 0.0, 1.0, 0.5); // 2 per unit
        assert_eq!(pc.average(0, BranchDirection::Down), 3.0);
    }

    #[test]
    fn unobserved_direction_uses_global_average() {
        let mut pc = PseudocostTable::new(2);
        pc.update(0, BranchDirection::Down, 0.0, 3.0, 0.5); // 6 per unit
        assert_eq!(pc.average(1, BranchDirection::Up), 6.0);
    }

    #[test]
    fn empty_table_defaults_to_one() {
        let pc = PseudocostTable::new(2);
        assert_eq!(pc.average(1, BranchDirection::Down), 1.0);
    }

    #[test]
    fn integral_solution_estimate_equals_bound() {
        let inst = toy(2);
        let pc = PseudocostTable::new(2);
        assert_eq!(compute_estimate(&inst, 7.5, &[1.0, 3.0], &pc), 7.5);
    }

    #[test]
    fn estimate_adds_cheaper_direction() {
        let inst = toy(1);
        let mut pc = PseudocostTable::new(1);
        // psi_down = 2, psi_up = 4 via two updates at f = 0.5.
        pc.update(0, BranchDirection::Down, 0.0, 1.0, 0.5);
        pc.update(0, BranchDirection::Up, 0.0, 2.0, 0.5);
        let e = compute_estimate(&inst, 10.0, &[3.5], &pc);
        // min(2 * 0.5, 4 * 0.5) = 1.
        assert_eq!(e, 11.0);
    }

    #[test]
    fn estimate_never_below_bound() {
        let inst = toy(3);
        let mut pc = PseudocostTable::new(3);
        pc.update(0, BranchDirection::Down, 5.0, 4.0, 0.5);
        let e = compute_estimate(&inst, 5.0, &[0.5, 0.25, 0.75], &pc);
        assert!(e >= 5.0 - 1e-9);
    }
}
