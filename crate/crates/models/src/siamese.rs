use bnb_engine::{BnbNode, CompDecision, CompareContext, CompareError, NodeComparator};
use encoding::{encode_bipartite, encode_fixed};
use imitation::{NodeRepr, Sample};

use crate::checkpoint::TrainedModel;
use crate::scorer::{gnn_score, mlp_score, svm_score, ScorerKind, ScorerParams};

/// Siamese comparison probability: `sigmoid(g(a) - g(b))`. Symmetric by
/// construction, `f(a, b) + f(b, a) = 1`.
pub fn siamese_prob<R>(score: impl Fn(&R) -> f64, a: &R, b: &R) -> f64 {
    sigmoid(score(a) - score(b))
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Maps a comparison probability to a decision: the first node wins at or
/// below one half (the boundary is inclusive), so the lower score wins and
/// the decision is never "equal".
pub fn prob_to_decision(f: f64) -> CompDecision {
    if f <= 0.5 {
        CompDecision::FirstBetter
    } else {
        CompDecision::SecondBetter
    }
}

/// Scores one side of a stored sample with the model's preferred encoding.
pub fn score_repr(model: &TrainedModel, repr: &NodeRepr) -> f64 {
    score_parts(&model.params, repr)
}

fn score_parts(params: &ScorerParams, repr: &NodeRepr) -> f64 {
    match params.kind {
        ScorerKind::Gnn => gnn_score(params, &repr.graph),
        ScorerKind::Mlp => mlp_score(params, &repr.fixed),
        ScorerKind::Svm => svm_score(params, &repr.fixed),
    }
}

/// Decision of a trained model on a stored sample.
pub fn sample_decision(model: &TrainedModel, sample: &Sample) -> CompDecision {
    let f = siamese_prob(|r| score_repr(model, r), &sample.first, &sample.second);
    prob_to_decision(f)
}

/// Comparator backed by a trained model: encodes both nodes on the fly and
/// prefers the lower-scoring one via the siamese probability.
///
/// One comparator serves exactly one solve (node ids index its cache). The
/// GNN's encoding depends only on the node and the root bound, so its scores
/// are memoized per node; the fixed features fold in mutable tree state and
/// are recomputed at every comparison.
pub struct ModelComparator {
    model: TrainedModel,
    gnn_cache: std::collections::HashMap<usize, f64>,
}

impl ModelComparator {
    pub fn new(model: TrainedModel) -> Self {
        Self {
            model,
            gnn_cache: std::collections::HashMap::new(),
        }
    }

    pub fn model(&self) -> &TrainedModel {
        &self.model
    }

    fn score(&mut self, node: &BnbNode, ctx: &CompareContext<'_>) -> Result<f64, CompareError> {
        Ok(match self.model.params.kind {
            ScorerKind::Gnn => {
                if let Some(&cached) = self.gnn_cache.get(&node.id) {
                    cached
                } else {
                    let graph = encode_bipartite(ctx.instance, node, ctx.tree)
                        .map_err(|e| CompareError::Other(e.to_string()))?;
                    let s = gnn_score(&self.model.params, &graph);
                    self.gnn_cache.insert(node.id, s);
                    s
                }
            }
            ScorerKind::Mlp => {
                mlp_score(&self.model.params, &encode_fixed(ctx.instance, node, ctx.tree))
            }
            ScorerKind::Svm => {
                svm_score(&self.model.params, &encode_fixed(ctx.instance, node, ctx.tree))
            }
        })
    }
}

impl NodeComparator for ModelComparator {
    fn compare(
        &mut self,
        a: &BnbNode,
        b: &BnbNode,
        ctx: &CompareContext<'_>,
    ) -> Result<CompDecision, CompareError> {
        let f = sigmoid(self.score(a, ctx)? - self.score(b, ctx)?);
        Ok(prob_to_decision(f))
    }
}
