use rayon::prelude::*;
use thiserror::Error;

use bnb_engine::{
    solve, BnbNode, CompDecision, CompareContext, CompareError, EstimateComparator,
    NodeComparator, OracleComparator, PlainSelector, SolveError, SolveLimits, SolveStatus,
};
use encoding::{encode_bipartite, encode_fixed};
use milp_core::MilpInstance;

use crate::sample::{
    sample_weight, NodeRepr, Provenance, Sample, SampleDataset, SampleMeta, SplitTag, WeightScheme,
};

#[derive(Clone, Debug)]
pub struct CollectConfig {
    /// Limits for the first solve that discovers the optimal solution.
    pub limits: SolveLimits,
    pub weight_scheme: WeightScheme,
    /// The collecting solve inherits the first solve's node limit scaled by
    /// this factor, bounding the cost of the deliberate mistakes.
    pub collection_node_factor: u64,
    pub seed: u64,
}

impl Default for CollectConfig {
    fn default() -> Self {
        Self {
            limits: SolveLimits::nodes(100_000),
            weight_scheme: WeightScheme::default(),
            collection_node_factor: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum CollectError {
    #[error("solve failed on instance {id}: {source}")]
    Solve {
        id: String,
        #[source]
        source: SolveError,
    },
}

/// Comparator wrapper that queries the diving oracle at every comparison.
/// When the oracle expresses a containment preference the state and label
/// are recorded and the *opposite* decision is returned to the engine,
/// steering the search into states a trained (imperfect) policy would visit.
/// Fallback decisions pass through unrecorded.
pub struct CollectingComparator {
    oracle: OracleComparator,
    scheme: WeightScheme,
    instance_id: String,
    ordinal: u64,
    samples: Vec<Sample>,
}

impl CollectingComparator {
    pub fn new(x_star: Vec<f64>, instance_id: impl Into<String>, scheme: WeightScheme) -> Self {
        Self {
            oracle: OracleComparator::new(x_star),
            scheme,
            instance_id: instance_id.into(),
            ordinal: 0,
            samples: Vec::new(),
        }
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    fn encode(
        &self,
        node: &BnbNode,
        ctx: &CompareContext<'_>,
    ) -> Result<NodeRepr, CompareError> {
        let graph = encode_bipartite(ctx.instance, node, ctx.tree)
            .map_err(|e| CompareError::Other(e.to_string()))?;
        let fixed = encode_fixed(ctx.instance, node, ctx.tree);
        Ok(NodeRepr { graph, fixed })
    }
}

impl NodeComparator for CollectingComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError> {
        let judgement = self.oracle.judge(a, b)?;
        let ordinal = self.ordinal;
        self.ordinal += 1;
        if !judgement.is_preference() {
            return Ok(judgement.decision());
        }
        let label = match judgement.decision() {
            CompDecision::FirstBetter => 0,
            CompDecision::SecondBetter => 1,
            CompDecision::Equal => unreachable!("preferences are never equal"),
        };
        self.samples.push(Sample {
            first: self.encode(a, ctx)?,
            second: self.encode(b, ctx)?,
            label,
            weight: sample_weight(self.scheme, a.depth, b.depth),
            meta: SampleMeta {
                instance_id: self.instance_id.clone(),
                depth_first: a.depth as u32,
                depth_second: b.depth as u32,
                ordinal,
            },
        });
        // The deliberate mistake: act against the expert.
        Ok(judgement.decision().opposite())
    }
}

/// Collects expert samples from one instance, or `None` when either solve
/// hits its limits (the instance is skipped with a warning).
pub fn collect_instance(
    inst: &MilpInstance,
    instance_id: &str,
    config: &CollectConfig,
) -> Result<Option<Vec<Sample>>, CollectError> {
    let wrap = |source| CollectError::Solve {
        id: instance_id.to_string(),
        source,
    };
    // First pass: find the optimal solution with the estimate rule.
    let stats = solve(
        inst,
        &mut EstimateComparator,
        &mut PlainSelector,
        &config.limits,
    )
    .map_err(wrap)?;
    if stats.status != SolveStatus::Optimal {
        log::warn!("skipping {instance_id}: first solve ended with {:?}", stats.status);
        return Ok(None);
    }
    let Some(x_star) = stats.incumbent.map(|s| s.values) else {
        log::warn!("skipping {instance_id}: no feasible solution exists");
        return Ok(None);
    };

    // Second pass: plain selection, oracle-opposite comparator.
    let collect_limits = SolveLimits {
        max_nodes: config
            .limits
            .max_nodes
            .map(|n| n.saturating_mul(config.collection_node_factor)),
        max_seconds: config.limits.max_seconds,
    };
    let mut comparator =
        CollectingComparator::new(x_star, instance_id, config.weight_scheme);
    let stats = solve(inst, &mut comparator, &mut PlainSelector, &collect_limits)
        .map_err(wrap)?;
    if stats.status != SolveStatus::Optimal {
        log::warn!(
            "skipping {instance_id}: collecting solve ended with {:?}",
            stats.status
        );
        return Ok(None);
    }
    Ok(Some(comparator.into_samples()))
}

/// Collects a dataset over many instances. Instances run in parallel; the
/// result is a deterministic ordered concatenation in input order.
pub fn collect(
    instances: &[(String, MilpInstance)],
    config: &CollectConfig,
    split: SplitTag,
) -> Result<SampleDataset, CollectError> {
    let per_instance: Vec<Option<Vec<Sample>>> = instances
        .par_iter()
        .map(|(id, inst)| collect_instance(inst, id, config))
        .collect::<Result<_, _>>()?;
    let samples: Vec<Sample> = per_instance.into_iter().flatten().flatten().collect();
    Ok(SampleDataset {
        samples,
        split,
        provenance: Provenance {
            seed: config.seed,
            weight_scheme: config.weight_scheme,
            description: format!(
                "opposite-action collection over {} instances (estimate first pass)",
                instances.len()
            ),
        },
    })
}

/// Splits instances into train/test by id with a hard disjointness check.
pub fn split_instances<T>(
    mut instances: Vec<(String, T)>,
    test_count: usize,
) -> (Vec<(String, T)>, Vec<(String, T)>) {
    assert!(test_count <= instances.len());
    let test = instances.split_off(instances.len() - test_count);
    let train_ids: std::collections::HashSet<&str> =
        instances.iter().map(|(id, _)| id.as_str()).collect();
    for (id, _) in &test {
        assert!(
            !train_ids.contains(id.as_str()),
            "instance {id} appears in both train and test"
        );
    }
    (instances, test)
}
