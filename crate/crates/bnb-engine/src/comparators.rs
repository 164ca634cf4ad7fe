use thiserror::Error;

use milp_core::MilpInstance;

use crate::engine::TreeStats;
use crate::node::{BnbNode, CompDecision, NodeId};

/// Context handed to a comparator at every comparison: the instance being
/// solved and a snapshot of global tree state.
pub struct CompareContext<'a> {
    pub instance: &'a MilpInstance,
    pub tree: &'a TreeStats,
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("optimal solution lies in both node {a} and node {b}; open nodes must be disjoint")]
    BothContainOptimal { a: NodeId, b: NodeId },
    #[error("comparator failed: {0}")]
    Other(String),
}

/// Pairwise node-comparison policy ordering the open list.
pub trait NodeComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError>;
}

fn by_key(ka: f64, kb: f64) -> CompDecision {
    if ka < kb {
        CompDecision::FirstBetter
    } else if ka > kb {
        CompDecision::SecondBetter
    } else {
        CompDecision::Equal
    }
}

/// Best estimate search: prefer the lower estimate.
pub fn estimate_comp(a: &BnbNode, b: &BnbNode) -> CompDecision {
    by_key(a.estimate, b.estimate)
}

/// Best-first search: prefer the lower dual bound.
pub fn best_first_comp(a: &BnbNode, b: &BnbNode) -> CompDecision {
    by_key(a.dual_bound, b.dual_bound)
}

/// Depth-first search: prefer the deeper node.
pub fn dfs_comp(a: &BnbNode, b: &BnbNode) -> CompDecision {
    // Greater depth wins, so compare negated depths through the shared key
    // helper.
    by_key(-(a.depth as f64), -(b.depth as f64))
}

pub struct EstimateComparator;

impl NodeComparator for EstimateComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        _ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError> {
        Ok(estimate_comp(a, b))
    }
}

pub struct BestFirstComparator;

impl NodeComparator for BestFirstComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        _ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError> {
        Ok(best_first_comp(a, b))
    }
}

pub struct DfsComparator;

impl NodeComparator for DfsComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        _ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError> {
        Ok(dfs_comp(a, b))
    }
}

/// What the diving oracle concluded about a pair of nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleJudgement {
    FirstContains,
    SecondContains,
    /// Neither node contains the optimum; the oracle defers to best estimate.
    Fallback(CompDecision),
}

impl OracleJudgement {
    pub fn decision(self) -> CompDecision {
        match self {
            OracleJudgement::FirstContains => CompDecision::FirstBetter,
            OracleJudgement::SecondContains => CompDecision::SecondBetter,
            OracleJudgement::Fallback(d) => d,
        }
    }

    /// True when the oracle expressed a containment preference rather than
    /// falling back.
    pub fn is_preference(self) -> bool {
        !matches!(self, OracleJudgement::Fallback(_))
    }
}

/// The diving oracle: prefers the node whose feasible region contains a known
/// optimal solution, falling back to best estimate when neither qualifies.
/// Open nodes partition the unexplored space, so at most one can contain the
/// optimum; both containing is an invariant violation and an error.
pub struct OracleComparator {
    x_star: Vec<f64>,
    tol: f64,
}

impl OracleComparator {
    pub fn new(x_star: Vec<f64>) -> Self {
        Self {
            x_star,
            tol: 1e-6,
        }
    }

    pub fn judge(&self, a: &BnbNode, b: &BnbNode) -> Result<OracleJudgement, CompareError> {
        let in_a = a.bounds.contains(&self.x_star, self.tol);
        let in_b = b.bounds.contains(&self.x_star, self.tol);
        match (in_a, in_b) {
            (true, true) => Err(CompareError::BothContainOptimal { a: a.id, b: b.id }),
            (true, false) => Ok(OracleJudgement::FirstContains),
            (false, true) => Ok(OracleJudgement::SecondContains),
            (false, false) => Ok(OracleJudgement::Fallback(estimate_comp(a, b))),
        }
    }
}

impl NodeComparator for OracleComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        _ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError> {
        Ok(self.judge(a, b)?.decision())
    }
}
