//! Node-scoring models and the siamese comparison adapter.
//!
//! Three scoring functions `g` share one decision rule: a pair of nodes is
//! compared through `f = sigmoid(g(first) - g(second))`, the first node
//! winning when `f <= 0.5`. The GNN scores the bipartite graph encoding; the
//! MLP and linear SVM score the fixed 12-dimensional features. All three
//! train from the same oracle-imitation datasets.

mod checkpoint;
mod scorer;
mod siamese;
mod train;

pub use checkpoint::{
    architecture_dims, describe, load_model, manifest_for, save_model, ModelIoError,
    ModelManifest, TrainMeta, TrainedModel,
};
pub use scorer::{
    gnn_score, gnn_score_tape, mlp_score, mlp_score_tape, param_layout, svm_score, KindParseError,
    ParamError, ScorerKind, ScorerParams, CONV_DIMS, EMBED_DIM, MLP_HIDDEN,
};
pub use siamese::{
    prob_to_decision, sample_decision, score_repr, siamese_prob, sigmoid, ModelComparator,
};
pub use train::{
    gnn_train, mlp_train, model_accuracy, train_model, TrainConfig, TrainError,
};
