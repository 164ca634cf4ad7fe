use std::collections::BTreeMap;

use milp_core::MilpInstance;

/// Sparse per-variable bound overrides layered on top of an instance's global
/// bounds. Overrides only ever tighten; a branch-and-bound node is defined by
/// the overrides accumulated along its path from the root.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LocalBounds {
    overrides: BTreeMap<usize, (f64, f64)>,
}

impl LocalBounds {
    pub fn new() -> Self {
        Self::default()
    }

    /// Effective `(lb, ub)` of variable `j` under these overrides.
    pub fn effective(&self, inst: &MilpInstance, j: usize) -> (f64, f64) {
        match self.overrides.get(&j) {
            Some(&b) => b,
            None => (inst.lower[j], inst.upper[j]),
        }
    }

    /// Returns a copy with variable `j` further restricted to `[lb, ub]`
    /// (intersected with the current effective bounds), or `None` when the
    /// intersection is empty.
    pub fn tightened(
        &self,
        inst: &MilpInstance,
        j: usize,
        lb: f64,
        ub: f64,
    ) -> Option<LocalBounds> {
        let (cur_lb, cur_ub) = self.effective(inst, j);
        let new_lb = cur_lb.max(lb);
        let new_ub = cur_ub.min(ub);
        if new_lb > new_ub {
            return None;
        }
        let mut next = self.clone();
        next.overrides.insert(j, (new_lb, new_ub));
        Some(next)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, (f64, f64))> + '_ {
        self.overrides.iter().map(|(&j, &b)| (j, b))
    }

    pub fn len(&self) -> usize {
        self.overrides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }

    /// True iff `x` satisfies every override within `tol`. Global bounds are
    /// not re-checked here; they hold for any point feasible in the parent.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.overrides
            .iter()
            .all(|(&j, &(lb, ub))| x[j] >= lb - tol && x[j] <= ub + tol)
    }
}
