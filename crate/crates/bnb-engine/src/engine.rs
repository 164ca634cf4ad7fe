use std::io::Write;
use std::time::Instant;

use thiserror::Error;

use lp_simplex::{solve_lp, LocalBounds, LpStatus, SimplexError};
use milp_core::{check_feasible, eval_objective, MilpInstance, Solution};

use crate::comparators::{CompareContext, CompareError, NodeComparator};
use crate::node::{most_fractional_var, BnbNode, BranchDirection, CompDecision, NodeId, INT_TOL};
use crate::pseudocost::{compute_estimate, PseudocostTable};
use crate::selectors::{NodeSelector, SelectView};
use crate::trace::{emit, TraceEvent};

/// Strict-improvement margin for incumbent updates and pruning.
const PRUNE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveLimits {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl SolveLimits {
    pub fn nodes(max_nodes: u64) -> Self {
        Self {
            max_nodes: Some(max_nodes),
            max_seconds: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    TimeLimit,
}

#[derive(Clone, Debug)]
pub struct SolveStats {
    pub status: SolveStatus,
    pub incumbent: Option<Solution>,
    pub nodes_processed: u64,
    pub comp_calls: u64,
    pub wall_time: f64,
    /// Proven lower bound at termination (equals the incumbent objective on
    /// optimal completion).
    pub global_dual_bound: f64,
}

/// Snapshot of global search state, rebuilt whenever comparators or
/// selectors need one.
#[derive(Clone, Debug)]
pub struct TreeStats {
    pub root_dual_bound: f64,
    pub incumbent_objective: Option<f64>,
    pub incumbent_count: usize,
    pub open_count: usize,
    pub nodes_processed: u64,
    /// Consecutive child-of-focused selections.
    pub plunge_depth: usize,
    pub global_dual_bound: f64,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("LP failure at node {node}: {source}")]
    Lp {
        node: NodeId,
        #[source]
        source: SimplexError,
    },
    #[error("root relaxation is unbounded")]
    UnboundedRelaxation,
    #[error("child relaxation unbounded under a bounded parent (numerical failure)")]
    UnboundedChild,
    #[error(transparent)]
    Compare(#[from] CompareError),
}

/// Runs branch and bound on `inst` with the given node-comparison and
/// node-selection policies.
pub fn solve(
    inst: &MilpInstance,
    comparator: &mut dyn NodeComparator,
    selector: &mut dyn NodeSelector,
    limits: &SolveLimits,
) -> Result<SolveStats, SolveError> {
    solve_traced(inst, comparator, selector, limits, None)
}

/// As [`solve`], optionally writing a JSON-lines trace of search events.
pub fn solve_traced(
    inst: &MilpInstance,
    comparator: &mut dyn NodeComparator,
    selector: &mut dyn NodeSelector,
    limits: &SolveLimits,
    trace: Option<&mut dyn Write>,
) -> Result<SolveStats, SolveError> {
    let start = Instant::now();
    let mut search = Search {
        inst,
        arena: Vec::new(),
        open: Vec::new(),
        pc: PseudocostTable::new(inst.num_vars),
        incumbent: None,
        incumbent_count: 0,
        nodes_processed: 0,
        comp_calls: 0,
        last_focused: None,
        plunge_depth: 0,
        root_dual_bound: 0.0,
        trace,
    };
    search
        .run(comparator, selector, limits, &start)
        .map(|mut stats| {
            stats.wall_time = start.elapsed().as_secs_f64();
            stats
        })
}

struct Search<'i, 't> {
    inst: &'i MilpInstance,
    /// Every materialized node, indexed by id (root and all inserted children).
    arena: Vec<BnbNode>,
    /// Open node ids, sorted best-first under the comparator.
    open: Vec<NodeId>,
    pc: PseudocostTable,
    incumbent: Option<Solution>,
    incumbent_count: usize,
    nodes_processed: u64,
    comp_calls: u64,
    last_focused: Option<NodeId>,
    plunge_depth: usize,
    root_dual_bound: f64,
    trace: Option<&'t mut dyn Write>,
}

impl Search<'_, '_> {
    fn run(
        &mut self,
        comparator: &mut dyn NodeComparator,
        selector: &mut dyn NodeSelector,
        limits: &SolveLimits,
        start: &Instant,
    ) -> Result<SolveStats, SolveError> {
        let root_lp = solve_lp(self.inst, &LocalBounds::new())
            .map_err(|source| SolveError::Lp { node: 0, source })?;
        match root_lp.status {
            LpStatus::Infeasible => {
                self.nodes_processed = 1;
                return Ok(self.finish(SolveStatus::Infeasible));
            }
            LpStatus::Unbounded => return Err(SolveError::UnboundedRelaxation),
            LpStatus::Optimal => {}
        }
        let root_bound = root_lp.objective.expect("optimal");
        self.root_dual_bound = root_bound;
        let root_x = root_lp.x.clone().expect("optimal");

        if most_fractional_var(&self.inst.vtypes, &root_x, INT_TOL).is_none() {
            self.nodes_processed = 1;
            self.try_incumbent(root_x);
            return Ok(self.finish(SolveStatus::Optimal));
        }

        let root_estimate = compute_estimate(self.inst, root_bound, &root_x, &self.pc);
        let root = BnbNode {
            id: 0,
            parent: None,
            depth: 0,
            bounds: LocalBounds::new(),
            lp: root_lp,
            dual_bound: root_bound,
            estimate: root_estimate,
            branch_var: None,
            branch_dir: None,
            branch_fraction: 0.0,
            parent_frac_ratio: 0.0,
        };
        emit(
            &mut self.trace,
            &TraceEvent {
                node: Some(0),
                depth: Some(0),
                bound: Some(root_bound),
                estimate: Some(root_estimate),
                ..TraceEvent::new("create")
            },
        );
        self.arena.push(root);
        self.open.push(0);

        loop {
            if self.open.is_empty() {
                let status = if self.incumbent.is_some() {
                    SolveStatus::Optimal
                } else {
                    SolveStatus::Infeasible
                };
                return Ok(self.finish(status));
            }
            if let Some(max) = limits.max_nodes {
                if self.nodes_processed >= max {
                    return Ok(self.finish(SolveStatus::NodeLimit));
                }
            }
            if let Some(max) = limits.max_seconds {
                if start.elapsed().as_secs_f64() > max {
                    return Ok(self.finish(SolveStatus::TimeLimit));
                }
            }

            let id = {
                let tree = self.tree_stats();
                let view = SelectView {
                    ordered: &self.open,
                    arena: &self.arena,
                    tree: &tree,
                    last_focused: self.last_focused.map(|id| &self.arena[id]),
                };
                selector.select(&view)
            };
            let pos = self
                .open
                .iter()
                .position(|&v| v == id)
                .expect("selector returns an open node");
            self.open.remove(pos);

            if self.arena[id].parent == self.last_focused && self.last_focused.is_some() {
                self.plunge_depth += 1;
            } else {
                self.plunge_depth = 0;
            }
            self.last_focused = Some(id);
            self.nodes_processed += 1;

            // The incumbent may have improved since insertion.
            if let Some(inc) = &self.incumbent {
                if self.arena[id].dual_bound >= inc.objective - PRUNE_EPS {
                    emit(
                        &mut self.trace,
                        &TraceEvent {
                            node: Some(id),
                            ..TraceEvent::new("prune")
                        },
                    );
                    continue;
                }
            }
            emit(
                &mut self.trace,
                &TraceEvent {
                    node: Some(id),
                    depth: Some(self.arena[id].depth),
                    bound: Some(self.arena[id].dual_bound),
                    estimate: Some(self.arena[id].estimate),
                    ..TraceEvent::new("focus")
                },
            );

            self.branch(id, comparator)?;
        }
    }

    /// Expands a focused node: solves both child relaxations, records
    /// pseudocosts, prunes, captures incumbents, and inserts surviving
    /// children into the open list.
    fn branch(
        &mut self,
        id: NodeId,
        comparator: &mut dyn NodeComparator,
    ) -> Result<(), SolveError> {
        let (var, value, parent_bound, parent_depth, frac_ratio) = {
            let node = &self.arena[id];
            let x = node.lp_x();
            let (var, _) = most_fractional_var(&self.inst.vtypes, x, INT_TOL)
                .expect("only fractional nodes are inserted");
            let total_int = self.inst.num_integer_vars();
            let frac_count = (0..self.inst.num_vars)
                .filter(|&j| {
                    self.inst.vtypes[j].is_integral() && {
                        let f = x[j] - x[j].floor();
                        f.min(1.0 - f) > INT_TOL
                    }
                })
                .count();
            let ratio = if total_int > 0 {
                frac_count as f64 / total_int as f64
            } else {
                0.0
            };
            (var, x[var], node.dual_bound, node.depth, ratio)
        };
        let fraction = value - value.floor();
        let floor = value.floor();

        for dir in [BranchDirection::Down, BranchDirection::Up] {
            let bounds = {
                let node = &self.arena[id];
                match dir {
                    BranchDirection::Down => {
                        node.bounds
                            .tightened(self.inst, var, f64::NEG_INFINITY, floor)
                    }
                    BranchDirection::Up => {
                        node.bounds
                            .tightened(self.inst, var, floor + 1.0, f64::INFINITY)
                    }
                }
            };
            let Some(bounds) = bounds else {
                emit(
                    &mut self.trace,
                    &TraceEvent {
                        parent: Some(id),
                        action: Some("empty_child"),
                        ..TraceEvent::new("prune")
                    },
                );
                continue;
            };
            let lp = solve_lp(self.inst, &bounds).map_err(|source| SolveError::Lp {
                node: id,
                source,
            })?;
            match lp.status {
                LpStatus::Infeasible => {
                    emit(
                        &mut self.trace,
                        &TraceEvent {
                            parent: Some(id),
                            action: Some("infeasible_child"),
                            ..TraceEvent::new("prune")
                        },
                    );
                    continue;
                }
                LpStatus::Unbounded => return Err(SolveError::UnboundedChild),
                LpStatus::Optimal => {}
            }
            let child_bound = lp.objective.expect("optimal");
            self.pc.update(var, dir, parent_bound, child_bound, fraction);

            if let Some(inc) = &self.incumbent {
                if child_bound >= inc.objective - PRUNE_EPS {
                    emit(
                        &mut self.trace,
                        &TraceEvent {
                            parent: Some(id),
                            bound: Some(child_bound),
                            action: Some("bound_child"),
                            ..TraceEvent::new("prune")
                        },
                    );
                    continue;
                }
            }

            let x = lp.x.clone().expect("optimal");
            if most_fractional_var(&self.inst.vtypes, &x, INT_TOL).is_none() {
                self.try_incumbent(x);
                continue;
            }

            let estimate = compute_estimate(self.inst, child_bound, &x, &self.pc);
            let child = BnbNode {
                id: self.arena.len(),
                parent: Some(id),
                depth: parent_depth + 1,
                bounds,
                lp,
                dual_bound: child_bound,
                estimate,
                branch_var: Some(var),
                branch_dir: Some(dir),
                branch_fraction: fraction,
                parent_frac_ratio: frac_ratio,
            };
            emit(
                &mut self.trace,
                &TraceEvent {
                    node: Some(child.id),
                    parent: Some(id),
                    depth: Some(child.depth),
                    bound: Some(child_bound),
                    estimate: Some(estimate),
                    ..TraceEvent::new("create")
                },
            );
            self.arena.push(child);
            let child_id = self.arena.len() - 1;
            self.insert(child_id, comparator)?;
        }
        Ok(())
    }

    /// Binary insertion into the comparator-ordered open list. Among equal
    /// nodes the newcomer goes last (FIFO). Argument order alternates per
    /// comparison so policies observe pair states from both sides, the way
    /// heap-backed priority lists do; the result is mapped back to the
    /// newcomer's perspective.
    fn insert(
        &mut self,
        id: NodeId,
        comparator: &mut dyn NodeComparator,
    ) -> Result<(), SolveError> {
        let tree = self.tree_stats();
        let ctx = CompareContext {
            instance: self.inst,
            tree: &tree,
        };
        let mut lo = 0;
        let mut hi = self.open.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let flip = self.comp_calls % 2 == 1;
            let (first, second) = if flip {
                (self.open[mid], id)
            } else {
                (id, self.open[mid])
            };
            let decision = comparator.compare(&self.arena[first], &self.arena[second], &ctx)?;
            let ordinal = self.comp_calls;
            self.comp_calls += 1;
            emit(
                &mut self.trace,
                &TraceEvent {
                    first: Some(first),
                    second: Some(second),
                    action: Some(match decision {
                        CompDecision::FirstBetter => "first",
                        CompDecision::SecondBetter => "second",
                        CompDecision::Equal => "equal",
                    }),
                    ordinal: Some(ordinal),
                    ..TraceEvent::new("comp")
                },
            );
            let newcomer_better = if flip { decision.opposite() } else { decision };
            match newcomer_better {
                CompDecision::FirstBetter => hi = mid,
                CompDecision::SecondBetter | CompDecision::Equal => lo = mid + 1,
            }
        }
        self.open.insert(lo, id);
        Ok(())
    }

    /// Accepts an integral LP solution as the new incumbent when it strictly
    /// improves. Integer variables are snapped to exact integers when the
    /// snapped point stays feasible.
    fn try_incumbent(&mut self, x: Vec<f64>) {
        let mut snapped = x.clone();
        for j in 0..self.inst.num_vars {
            if self.inst.vtypes[j].is_integral() {
                snapped[j] = snapped[j].round();
            }
        }
        let values = if check_feasible(self.inst, &snapped, milp_core::DEFAULT_FEAS_TOL) {
            snapped
        } else {
            x
        };
        let objective = eval_objective(self.inst, &values).expect("dimensions match");
        let improves = match &self.incumbent {
            Some(inc) => objective < inc.objective - PRUNE_EPS,
            None => true,
        };
        if improves {
            emit(
                &mut self.trace,
                &TraceEvent {
                    objective: Some(objective),
                    ..TraceEvent::new("incumbent")
                },
            );
            self.incumbent = Some(Solution { values, objective });
            self.incumbent_count += 1;
        }
    }

    fn tree_stats(&self) -> TreeStats {
        let open_bound = self
            .open
            .iter()
            .map(|&id| self.arena[id].dual_bound)
            .fold(f64::INFINITY, f64::min);
        let global_dual_bound = if self.open.is_empty() {
            match &self.incumbent {
                Some(inc) => inc.objective,
                None => self.root_dual_bound,
            }
        } else {
            open_bound
        };
        TreeStats {
            root_dual_bound: self.root_dual_bound,
            incumbent_objective: self.incumbent.as_ref().map(|s| s.objective),
            incumbent_count: self.incumbent_count,
            open_count: self.open.len(),
            nodes_processed: self.nodes_processed,
            plunge_depth: self.plunge_depth,
            global_dual_bound,
        }
    }

    fn finish(&mut self, status: SolveStatus) -> SolveStats {
        let tree = self.tree_stats();
        SolveStats {
            status,
            incumbent: self.incumbent.clone(),
            nodes_processed: self.nodes_processed,
            comp_calls: self.comp_calls,
            wall_time: 0.0,
            global_dual_bound: tree.global_dual_bound,
        }
    }
}
