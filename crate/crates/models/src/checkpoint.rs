use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scorer::{param_layout, ParamError, ScorerKind, ScorerParams};

/// Training summary stored alongside the parameters. Contains only
/// deterministic quantities so checkpoint bytes reproduce exactly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub epochs_run: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub final_train_loss: f64,
    pub best_val_accuracy: f64,
    pub train_samples: usize,
    pub val_samples: usize,
    pub dataset_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub format_version: u32,
    pub kind: ScorerKind,
    /// Architecture widths: embeddings/convs for the GNN, layer sizes for
    /// the MLP, feature count for the SVM.
    pub dims: Vec<usize>,
    /// Pooled-side concatenation order feeding the final norm.
    pub concat_order: String,
    pub normalization_version: u32,
    pub bound_clip: f64,
    pub seed: u64,
    pub training: TrainMeta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub manifest: ModelManifest,
    pub params: ScorerParams,
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error(transparent)]
    Checkpoint(#[from] tensor_nn::CheckpointError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("manifest does not deserialize: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error(
        "checkpoint was produced under normalization v{got} (clip {got_clip}), \
         this build uses v{expected} (clip {expected_clip})"
    )]
    NormalizationMismatch {
        got: u32,
        expected: u32,
        got_clip: f64,
        expected_clip: f64,
    },
}

pub fn architecture_dims(kind: ScorerKind) -> Vec<usize> {
    match kind {
        ScorerKind::Gnn => {
            let mut dims = vec![crate::scorer::EMBED_DIM];
            dims.extend_from_slice(&crate::scorer::CONV_DIMS);
            dims
        }
        ScorerKind::Mlp => vec![
            encoding::FIXED_FEAT_DIM,
            crate::scorer::MLP_HIDDEN,
            1,
        ],
        ScorerKind::Svm => vec![encoding::FIXED_FEAT_DIM],
    }
}

pub fn manifest_for(kind: ScorerKind, seed: u64, training: TrainMeta) -> ModelManifest {
    ModelManifest {
        format_version: 1,
        kind,
        dims: architecture_dims(kind),
        concat_order: "cons_pool|var_pool|globals".into(),
        normalization_version: encoding::NORMALIZATION_VERSION,
        bound_clip: encoding::BOUND_CLIP,
        seed,
        training,
    }
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
    let manifest = serde_json::to_value(&model.manifest)?;
    tensor_nn::save_checkpoint(path, &manifest, &model.params.named())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel, ModelIoError> {
    let (manifest_value, named) = tensor_nn::load_checkpoint(path)?;
    let manifest: ModelManifest = serde_json::from_value(manifest_value)?;
    if manifest.normalization_version != encoding::NORMALIZATION_VERSION
        || manifest.bound_clip != encoding::BOUND_CLIP
    {
        return Err(ModelIoError::NormalizationMismatch {
            got: manifest.normalization_version,
            expected: encoding::NORMALIZATION_VERSION,
            got_clip: manifest.bound_clip,
            expected_clip: encoding::BOUND_CLIP,
        });
    }
    let params = ScorerParams::from_named(manifest.kind, named)?;
    Ok(TrainedModel { manifest, params })
}

/// Human-readable architecture and normalization summary.
pub fn describe(model: &TrainedModel) -> String {
    let m = &model.manifest;
    let mut out = String::new();
    out.push_str(&format!("kind: {}\n", m.kind.label()));
    out.push_str(&format!("dims: {:?}\n", m.dims));
    out.push_str(&format!("concat order: {}\n", m.concat_order));
    out.push_str(&format!(
        "normalization: v{} (bound clip {})\n",
        m.normalization_version, m.bound_clip
    ));
    out.push_str(&format!("seed: {}\n", m.seed));
    out.push_str(&format!(
        "training: epochs {} batch {} lr {} final loss {:.6} best val acc {:.4}\n",
        m.training.epochs_run,
        m.training.batch_size,
        m.training.learning_rate,
        m.training.final_train_loss,
        m.training.best_val_accuracy
    ));
    out.push_str("parameters:\n");
    for ((name, _, _), tensor) in param_layout(m.kind).iter().zip(model.params.tensors.iter()) {
        out.push_str(&format!("  {name}: {}x{}\n", tensor.rows, tensor.cols));
    }
    out
}
