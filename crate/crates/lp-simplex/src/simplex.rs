use thiserror::Error;

use milp_core::{MilpInstance, RelaxationSolver, RelaxedSolve, RowSense, SolverFailure};

use crate::bounds::LocalBounds;

/// Primal feasibility tolerance (rows and bounds of the standard-form system).
const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
const COST_TOL: f64 = 1e-9;
/// Smallest pivot element accepted in the ratio test and factorization.
const PIVOT_TOL: f64 = 1e-9;
/// Step length below which an iteration counts as degenerate.
const DEGEN_TOL: f64 = 1e-9;
/// Consecutive degenerate iterations before Bland's rule engages.
const BLAND_THRESHOLD: usize = 40;
/// Pivots between refactorizations of the basis inverse.
const REFACTOR_EVERY: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of an LP relaxation solve. `x` and `objective` are present exactly
/// when the status is `Optimal`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub x: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub iterations: usize,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn terminal(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            x: None,
            objective: None,
            iterations,
        }
    }
}

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("numerical breakdown: {0}")]
    Breakdown(String),
    #[error("lp_lower_bound requires an OPTIMAL result, got {0:?}")]
    NotOptimal(LpStatus),
}

/// The node's dual bound: the objective of its LP relaxation.
pub fn lp_lower_bound(result: &LpResult) -> Result<f64, SimplexError> {
    match result.status {
        LpStatus::Optimal => Ok(result.objective.expect("optimal result has objective")),
        other => Err(SimplexError::NotOptimal(other)),
    }
}

/// Solves the LP relaxation of `inst` under the local bound overrides.
///
/// Bounded-variable revised simplex with a two-phase start: slacks are added
/// per row (`Ax + s = b` with sense-dependent slack bounds) and artificial
/// variables are introduced only when the all-slack basis is infeasible.
/// Pricing is Dantzig's rule, switching to Bland's rule after a run of
/// degenerate iterations. The basis inverse is kept dense and refactorized
/// periodically. The procedure is fully deterministic.
pub fn solve_lp(inst: &MilpInstance, bounds: &LocalBounds) -> Result<LpResult, SimplexError> {
    // Empty local bound intervals make the node infeasible without any
    // simplex work.
    for j in 0..inst.num_vars {
        let (lb, ub) = bounds.effective(inst, j);
        if lb > ub {
            return Ok(LpResult::terminal(LpStatus::Infeasible, 0));
        }
    }
    Worker::new(inst, bounds).run()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NbState {
    AtLower,
    AtUpper,
    Free,
    Basic,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    Moved,
}

struct Worker {
    m: usize,
    n_struct: usize,
    /// Sparse columns of the standard-form matrix: structural columns, then
    /// slack columns, then any artificial columns appended by phase 1.
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// Active (phase-dependent) cost vector.
    cost: Vec<f64>,
    /// True structural objective, restored after phase 1.
    objective: Vec<f64>,
    rhs: Vec<f64>,
    /// Column values: nonbasic columns sit exactly at a bound (or zero when
    /// free); basic column values mirror `xb`.
    xval: Vec<f64>,
    state: Vec<NbState>,
    basis: Vec<usize>,
    /// Values of the basic variables, by row.
    xb: Vec<f64>,
    /// Dense basis inverse, row-major m x m.
    binv: Vec<f64>,
    iterations: usize,
    pivots_since_refactor: usize,
    degenerate_streak: usize,
}

impl Worker {
    fn new(inst: &MilpInstance, bounds: &LocalBounds) -> Self {
        let m = inst.num_cons();
        let n = inst.num_vars;

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
        for (i, row) in inst.rows.iter().enumerate() {
            for &(j, a) in &row.entries {
                cols[j].push((i, a));
            }
        }
        let mut lb = Vec::with_capacity(n + m);
        let mut ub = Vec::with_capacity(n + m);
        for j in 0..n {
            let (l, u) = bounds.effective(inst, j);
            lb.push(l);
            ub.push(u);
        }
        for i in 0..m {
            cols[n + i].push((i, 1.0));
            let (l, u) = match inst.senses[i] {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
        }
        let mut cost = vec![0.0; n + m];
        cost[..n].copy_from_slice(&inst.objective);

        // Every column starts nonbasic at the finite bound nearest zero.
        let mut xval = Vec::with_capacity(n + m);
        let mut state = Vec::with_capacity(n + m);
        for j in 0..n + m {
            if lb[j].is_finite() {
                xval.push(lb[j]);
                state.push(NbState::AtLower);
            } else if ub[j].is_finite() {
                xval.push(ub[j]);
                state.push(NbState::AtUpper);
            } else {
                xval.push(0.0);
                state.push(NbState::Free);
            }
        }

        Worker {
            m,
            n_struct: n,
            cols,
            lb,
            ub,
            cost,
            objective: inst.objective.clone(),
            rhs: inst.rhs.clone(),
            xval,
            state,
            basis: Vec::new(),
            xb: Vec::new(),
            binv: Vec::new(),
            iterations: 0,
            pivots_since_refactor: 0,
            degenerate_streak: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct + self.m
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lb[j] == self.ub[j]
    }

    fn run(mut self) -> Result<LpResult, SimplexError> {
        if !self.try_slack_basis() {
            self.start_phase_one();
            loop {
                match self.step()? {
                    StepOutcome::Optimal => break,
                    StepOutcome::Unbounded => {
                        return Err(SimplexError::Breakdown(
                            "phase-1 objective unbounded below".into(),
                        ))
                    }
                    StepOutcome::Moved => {}
                }
            }
            let infeasibility: f64 = (self.n_struct + self.m..self.ncols())
                .map(|j| self.xval[j].abs())
                .sum();
            if infeasibility > FEAS_TOL {
                return Ok(LpResult::terminal(LpStatus::Infeasible, self.iterations));
            }
            self.finish_phase_one()?;
        }

        loop {
            match self.step()? {
                StepOutcome::Optimal => break,
                StepOutcome::Unbounded => {
                    return Ok(LpResult::terminal(LpStatus::Unbounded, self.iterations))
                }
                StepOutcome::Moved => {}
            }
        }

        // Refresh the factorization once and verify the solution is clean.
        self.refactorize()?;
        self.check_primal_feasible()?;
        let x: Vec<f64> = self.xval[..self.n_struct].to_vec();
        let objective = self
            .objective
            .iter()
            .zip(x.iter())
            .map(|(c, v)| c * v)
            .sum();
        Ok(LpResult {
            status: LpStatus::Optimal,
            x: Some(x),
            objective: Some(objective),
            iterations: self.iterations,
        })
    }

    /// Installs the all-slack basis if it is primal feasible. Returns false
    /// when artificial variables are needed.
    fn try_slack_basis(&mut self) -> bool {
        let m = self.m;
        let n = self.n_struct;
        let mut residual = self.rhs.clone();
        for j in 0..n {
            if self.xval[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    residual[i] -= a * self.xval[j];
                }
            }
        }
        for i in 0..m {
            let s = n + i;
            if residual[i] < self.lb[s] - FEAS_TOL || residual[i] > self.ub[s] + FEAS_TOL {
                return false;
            }
        }
        self.basis = (n..n + m).collect();
        self.xb = residual;
        for i in 0..m {
            self.xval[n + i] = self.xb[i];
            self.state[n + i] = NbState::Basic;
        }
        self.binv = identity(m);
        true
    }

    /// Adds one artificial column per row, signed so the artificial basis is
    /// feasible with nonnegative values, and switches to the phase-1 cost.
    fn start_phase_one(&mut self) {
        let m = self.m;
        let n = self.n_struct;
        let mut residual = self.rhs.clone();
        for j in 0..n + m {
            if self.xval[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    residual[i] -= a * self.xval[j];
                }
            }
        }
        self.basis = Vec::with_capacity(m);
        self.xb = Vec::with_capacity(m);
        self.binv = vec![0.0; m * m];
        for (i, &r) in residual.iter().enumerate() {
            let sigma = if r >= 0.0 { 1.0 } else { -1.0 };
            let col = self.ncols();
            self.cols.push(vec![(i, sigma)]);
            self.lb.push(0.0);
            self.ub.push(f64::INFINITY);
            self.xval.push(r.abs());
            self.state.push(NbState::Basic);
            self.basis.push(col);
            self.xb.push(r.abs());
            self.binv[i * m + i] = sigma;
        }
        self.cost = vec![0.0; self.ncols()];
        for j in n + m..self.ncols() {
            self.cost[j] = 1.0;
        }
    }

    /// Pivots leftover artificials out of the basis (or leaves them pinned at
    /// zero on redundant rows) and restores the true objective.
    fn finish_phase_one(&mut self) -> Result<(), SimplexError> {
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            // Any non-artificial nonbasic column with a usable pivot element
            // in this row can replace the artificial via a zero-length pivot.
            let mut entering = None;
            for j in 0..self.n_struct + self.m {
                if self.state[j] == NbState::Basic {
                    continue;
                }
                let wr: f64 = self.cols[j]
                    .iter()
                    .map(|&(i, a)| self.binv[r * self.m + i] * a)
                    .sum();
                if wr.abs() > 1e-7 {
                    entering = Some(j);
                    break;
                }
            }
            if let Some(j) = entering {
                let w = self.ftran(j);
                let value = self.xval[j];
                self.pivot_leave(r, true);
                self.pivot_install(j, r, &w, value)?;
            }
            // Otherwise the row is redundant; the artificial stays basic at
            // zero and its bounds are pinned below so it can never move.
        }
        for j in self.n_struct + self.m..self.ncols() {
            self.lb[j] = 0.0;
            self.ub[j] = 0.0;
            if self.state[j] != NbState::Basic {
                self.xval[j] = 0.0;
                self.state[j] = NbState::AtLower;
            }
        }
        self.cost = vec![0.0; self.ncols()];
        self.cost[..self.n_struct].copy_from_slice(&self.objective);
        self.degenerate_streak = 0;
        Ok(())
    }

    /// One simplex iteration: price, ratio test, then either a bound flip or
    /// a basis change.
    fn step(&mut self) -> Result<StepOutcome, SimplexError> {
        self.iterations += 1;
        if self.iterations > 50_000 {
            return Err(SimplexError::Breakdown("iteration limit exceeded".into()));
        }
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactorize()?;
        }

        let m = self.m;
        // y' = c_B' B^-1
        let mut y = vec![0.0; m];
        for i in 0..m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (r, &v) in row.iter().enumerate() {
                    y[r] += cb * v;
                }
            }
        }

        let bland = self.degenerate_streak >= BLAND_THRESHOLD;
        let mut entering: Option<(usize, f64, f64)> = None; // (col, |d|, direction)
        for j in 0..self.ncols() {
            if self.state[j] == NbState::Basic || self.is_fixed(j) {
                continue;
            }
            let d: f64 =
                self.cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
            let dir = match self.state[j] {
                NbState::AtLower if d < -COST_TOL => 1.0,
                NbState::AtUpper if d > COST_TOL => -1.0,
                NbState::Free if d < -COST_TOL => 1.0,
                NbState::Free if d > COST_TOL => -1.0,
                _ => continue,
            };
            if bland {
                entering = Some((j, d.abs(), dir));
                break;
            }
            match entering {
                Some((_, best, _)) if d.abs() <= best => {}
                _ => entering = Some((j, d.abs(), dir)),
            }
        }

        let Some((j, _, dir)) = entering else {
            return Ok(StepOutcome::Optimal);
        };

        let w = self.ftran(j);

        // Step limit from the entering variable's own range (a bound flip),
        // possibly tightened by a blocking basic variable.
        let mut t_best = self.ub[j] - self.lb[j];
        let mut blocking: Option<usize> = None;
        for i in 0..m {
            if w[i].abs() <= PIVOT_TOL {
                continue;
            }
            let delta = -dir * w[i]; // change of xb[i] per unit step
            let k = self.basis[i];
            let limit = if delta < 0.0 {
                if !self.lb[k].is_finite() {
                    continue;
                }
                (self.xb[i] - self.lb[k]).max(0.0) / -delta
            } else {
                if !self.ub[k].is_finite() {
                    continue;
                }
                (self.ub[k] - self.xb[i]).max(0.0) / delta
            };
            let take = if limit < t_best - 1e-12 {
                true
            } else if limit <= t_best + 1e-12 {
                match blocking {
                    None => limit < t_best,
                    Some(r) => {
                        if bland {
                            self.basis[i] < self.basis[r]
                        } else {
                            w[i].abs() > w[r].abs()
                        }
                    }
                }
            } else {
                false
            };
            if take {
                t_best = t_best.min(limit);
                blocking = Some(i);
            }
        }

        if t_best.is_infinite() {
            return Ok(StepOutcome::Unbounded);
        }
        let t = t_best.max(0.0);

        match blocking {
            // The entering variable reaches its opposite bound: a bound flip.
            None => {
                self.apply_move(t, dir, &w);
                self.xval[j] += dir * t;
                self.state[j] = match self.state[j] {
                    NbState::AtLower => NbState::AtUpper,
                    NbState::AtUpper => NbState::AtLower,
                    other => other,
                };
                self.note_progress(t);
                Ok(StepOutcome::Moved)
            }
            Some(r) => {
                let enter_val = self.xval[j] + dir * t;
                let leave_to_lower = -dir * w[r] < 0.0;
                self.apply_move(t, dir, &w);
                self.pivot_leave(r, leave_to_lower);
                self.pivot_install(j, r, &w, enter_val)?;
                self.note_progress(t);
                Ok(StepOutcome::Moved)
            }
        }
    }

    fn note_progress(&mut self, t: f64) {
        if t <= DEGEN_TOL {
            self.degenerate_streak += 1;
        } else {
            self.degenerate_streak = 0;
        }
    }

    fn apply_move(&mut self, t: f64, dir: f64, w: &[f64]) {
        if t > 0.0 {
            for i in 0..self.m {
                self.xb[i] -= dir * t * w[i];
                self.xval[self.basis[i]] = self.xb[i];
            }
        }
    }

    /// Marks the variable basic in row `r` nonbasic at the bound it reached.
    fn pivot_leave(&mut self, r: usize, to_lower: bool) {
        let k = self.basis[r];
        if to_lower {
            self.xval[k] = self.lb[k];
            self.state[k] = NbState::AtLower;
        } else {
            self.xval[k] = self.ub[k];
            self.state[k] = NbState::AtUpper;
        }
        // Artificials are pinned at zero once they leave the basis.
        if self.is_artificial(k) {
            self.lb[k] = 0.0;
            self.ub[k] = 0.0;
            self.xval[k] = 0.0;
            self.state[k] = NbState::AtLower;
        }
    }

    /// Installs `j` as the basic variable of row `r` and applies the eta
    /// update to the dense inverse.
    fn pivot_install(
        &mut self,
        j: usize,
        r: usize,
        w: &[f64],
        value: f64,
    ) -> Result<(), SimplexError> {
        let m = self.m;
        let pivot = w[r];
        if pivot.abs() <= PIVOT_TOL {
            return Err(SimplexError::Breakdown(format!(
                "pivot element {pivot:.3e} below tolerance"
            )));
        }
        self.basis[r] = j;
        self.xb[r] = value;
        self.xval[j] = value;
        self.state[j] = NbState::Basic;

        let inv_pivot = 1.0 / pivot;
        let row_r: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
        for i in 0..m {
            if i == r {
                continue;
            }
            let factor = w[i] * inv_pivot;
            if factor != 0.0 {
                let row_i = &mut self.binv[i * m..(i + 1) * m];
                for (v, &p) in row_i.iter_mut().zip(row_r.iter()) {
                    *v -= factor * p;
                }
            }
        }
        for (v, &p) in self.binv[r * m..(r + 1) * m].iter_mut().zip(row_r.iter()) {
            *v = p * inv_pivot;
        }
        self.pivots_since_refactor += 1;
        Ok(())
    }

    /// w = B^-1 A_j
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for &(i, a) in &self.cols[j] {
            for r in 0..m {
                w[r] += self.binv[r * m + i] * a;
            }
        }
        w
    }

    /// Rebuilds the dense inverse from the basis columns and recomputes the
    /// basic variable values from scratch.
    fn refactorize(&mut self) -> Result<(), SimplexError> {
        let m = self.m;
        self.pivots_since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut mat = vec![0.0; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                mat[i * m + r] = a;
            }
        }
        self.binv = invert(&mat, m).ok_or_else(|| {
            SimplexError::Breakdown("singular basis during refactorization".into())
        })?;

        let mut residual = self.rhs.clone();
        for j in 0..self.ncols() {
            if self.state[j] != NbState::Basic && self.xval[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    residual[i] -= a * self.xval[j];
                }
            }
        }
        for r in 0..m {
            let mut v = 0.0;
            for i in 0..m {
                v += self.binv[r * m + i] * residual[i];
            }
            self.xb[r] = v;
            self.xval[self.basis[r]] = v;
        }
        Ok(())
    }

    fn check_primal_feasible(&self) -> Result<(), SimplexError> {
        for r in 0..self.m {
            let k = self.basis[r];
            if self.xb[r] < self.lb[k] - FEAS_TOL || self.xb[r] > self.ub[k] + FEAS_TOL {
                return Err(SimplexError::Breakdown(format!(
                    "basic variable {k} out of bounds after solve"
                )));
            }
        }
        Ok(())
    }
}

fn identity(m: usize) -> Vec<f64> {
    let mut id = vec![0.0; m * m];
    for i in 0..m {
        id[i * m + i] = 1.0;
    }
    id
}

/// Dense Gauss-Jordan inversion with partial pivoting. Returns `None` for a
/// numerically singular matrix.
fn invert(mat: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut a = mat.to_vec();
    let mut inv = identity(m);
    for col in 0..m {
        let mut piv = col;
        for r in col + 1..m {
            if a[r * m + col].abs() > a[piv * m + col].abs() {
                piv = r;
            }
        }
        if a[piv * m + col].abs() < 1e-11 {
            return None;
        }
        if piv != col {
            for c in 0..m {
                a.swap(piv * m + c, col * m + c);
                inv.swap(piv * m + c, col * m + c);
            }
        }
        let d = a[col * m + col];
        for c in 0..m {
            a[col * m + c] /= d;
            inv[col * m + c] /= d;
        }
        for r in 0..m {
            if r != col {
                let f = a[r * m + col];
                if f != 0.0 {
                    for c in 0..m {
                        a[r * m + c] -= f * a[col * m + c];
                        inv[r * m + c] -= f * inv[col * m + c];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Simplex-backed relaxation solver for the brute-force oracle.
pub struct SimplexRelaxation;

impl RelaxationSolver for SimplexRelaxation {
    fn solve_relaxation(&self, inst: &MilpInstance) -> Result<RelaxedSolve, SolverFailure> {
        match solve_lp(inst, &LocalBounds::new()) {
            Ok(res) => Ok(match res.status {
                LpStatus::Optimal => RelaxedSolve::Optimal {
                    x: res.x.expect("optimal"),
                    objective: res.objective.expect("optimal"),
                },
                LpStatus::Infeasible => RelaxedSolve::Infeasible,
                LpStatus::Unbounded => RelaxedSolve::Unbounded,
            }),
            Err(e) => Err(SolverFailure(e.to_string())),
        }
    }
}
