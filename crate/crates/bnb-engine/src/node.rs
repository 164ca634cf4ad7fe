use lp_simplex::{LocalBounds, LpResult};

pub type NodeId = usize;

/// Integrality tolerance: an LP value within this of an integer counts as
/// integral.
pub const INT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchDirection {
    Down,
    Up,
}

/// Outcome of a pairwise node comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompDecision {
    FirstBetter,
    SecondBetter,
    Equal,
}

impl CompDecision {
    pub fn opposite(self) -> CompDecision {
        match self {
            CompDecision::FirstBetter => CompDecision::SecondBetter,
            CompDecision::SecondBetter => CompDecision::FirstBetter,
            CompDecision::Equal => CompDecision::Equal,
        }
    }
}

/// One subproblem of the search tree. Nodes are immutable once created: the
/// LP relaxation is solved eagerly at creation so every open node carries its
/// dual bound and estimate.
#[derive(Clone, Debug)]
pub struct BnbNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    /// Root has depth 0.
    pub depth: usize,
    /// Cumulative bound overrides along the path from the root.
    pub bounds: LocalBounds,
    pub lp: LpResult,
    /// Objective of this node's LP relaxation.
    pub dual_bound: f64,
    /// Dual bound plus pseudocost-predicted degradation (best-estimate value).
    pub estimate: f64,
    pub branch_var: Option<usize>,
    pub branch_dir: Option<BranchDirection>,
    /// LP fraction of the branched variable in the parent's relaxation.
    pub branch_fraction: f64,
    /// Fractional integer variables over total integer variables in the
    /// parent's relaxation.
    pub parent_frac_ratio: f64,
}

impl BnbNode {
    /// LP solution of this node's relaxation.
    pub fn lp_x(&self) -> &[f64] {
        self.lp.x.as_deref().expect("open nodes carry optimal LPs")
    }
}

/// Most fractional integer variable of `x` (tie-break: lowest index), or
/// `None` when `x` is integral within `tol`.
pub fn most_fractional_var(
    vtypes: &[milp_core::VarType],
    x: &[f64],
    tol: f64,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None; // (var, value, fractionality)
    for (j, (&t, &v)) in vtypes.iter().zip(x.iter()).enumerate() {
        if !t.is_integral() {
            continue;
        }
        let frac = v - v.floor();
        let dist = frac.min(1.0 - frac);
        if dist <= tol {
            continue;
        }
        match best {
            Some((_, _, best_dist)) if dist <= best_dist => {}
            _ => best = Some((j, v, dist)),
        }
    }
    best.map(|(j, v, _)| (j, v))
}
