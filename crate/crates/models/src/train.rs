use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use imitation::{dataset_content_hash, decision_matches_label, Sample, SampleDataset};
use tensor_nn::{adam_step, AdamError, AdamState, Tape, Tensor, ValueId};

use crate::checkpoint::{manifest_for, TrainMeta, TrainedModel};
use crate::scorer::{gnn_score_tape, mlp_score_tape, ScorerKind, ScorerParams};
use crate::siamese::sample_decision;

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Fraction of *instances* (not samples) held out for checkpoint
    /// selection, avoiding leakage between correlated samples of one solve.
    pub val_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 16,
            learning_rate: 1e-3,
            seed: 0,
            val_fraction: 0.1,
        }
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("sample {index} has label {label}, expected 0 or 1")]
    BadLabel { index: usize, label: u8 },
    #[error("sample {index} has non-positive weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error(transparent)]
    Adam(#[from] AdamError),
    #[error(transparent)]
    DatasetHash(#[from] imitation::DatasetIoError),
}

pub fn gnn_train(ds: &SampleDataset, config: &TrainConfig) -> Result<TrainedModel, TrainError> {
    train_nn(ScorerKind::Gnn, ds, config)
}

pub fn mlp_train(ds: &SampleDataset, config: &TrainConfig) -> Result<TrainedModel, TrainError> {
    train_nn(ScorerKind::Mlp, ds, config)
}

pub fn train_model(
    kind: ScorerKind,
    ds: &SampleDataset,
    config: &TrainConfig,
) -> Result<TrainedModel, TrainError> {
    match kind {
        ScorerKind::Svm => svm_train(ds, config),
        _ => train_nn(kind, ds, config),
    }
}

fn validate(ds: &SampleDataset) -> Result<(), TrainError> {
    if ds.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    for (index, s) in ds.samples.iter().enumerate() {
        if s.label > 1 {
            return Err(TrainError::BadLabel {
                index,
                label: s.label,
            });
        }
        if !(s.weight > 0.0) {
            return Err(TrainError::BadWeight {
                index,
                weight: s.weight,
            });
        }
    }
    Ok(())
}

/// Splits sample indices into train/validation by instance id, seeded.
fn split_by_instance(
    ds: &SampleDataset,
    config: &TrainConfig,
) -> (Vec<usize>, Vec<usize>) {
    let mut ids: Vec<&str> = ds.instance_ids();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5117);
    ids.shuffle(&mut rng);
    let val_count = if ids.len() >= 2 {
        ((ids.len() as f64 * config.val_fraction).round() as usize).clamp(1, ids.len() - 1)
    } else {
        0
    };
    let val_ids: HashSet<&str> = ids[ids.len() - val_count..].iter().copied().collect();
    let mut train = Vec::new();
    let mut val = Vec::new();
    for (i, s) in ds.samples.iter().enumerate() {
        if val_ids.contains(s.meta.instance_id.as_str()) {
            val.push(i);
        } else {
            train.push(i);
        }
    }
    (train, val)
}

/// Builds the siamese loss of one sample on a fresh tape.
fn sample_loss_tape(
    kind: ScorerKind,
    params: &ScorerParams,
    sample: &Sample,
) -> (Tape, Vec<ValueId>, ValueId) {
    let mut tape = Tape::new();
    let ids: Vec<ValueId> = params.tensors.iter().map(|t| tape.leaf(t.clone())).collect();
    let (ga, gb) = match kind {
        ScorerKind::Gnn => (
            gnn_score_tape(&mut tape, &ids, &sample.first.graph),
            gnn_score_tape(&mut tape, &ids, &sample.second.graph),
        ),
        ScorerKind::Mlp => (
            mlp_score_tape(&mut tape, &ids, &sample.first.fixed),
            mlp_score_tape(&mut tape, &ids, &sample.second.fixed),
        ),
        ScorerKind::Svm => unreachable!("the SVM trains by subgradient descent"),
    };
    let diff = tape.sub(ga, gb);
    let f = tape.sigmoid(diff);
    let loss = tape.weighted_bce(f, sample.label as f64, sample.weight);
    (tape, ids, loss)
}

fn sample_loss(kind: ScorerKind, params: &ScorerParams, sample: &Sample) -> f64 {
    let (tape, _, loss) = sample_loss_tape(kind, params, sample);
    tape.value(loss).item()
}

/// Loss and per-parameter gradients; the gradient is seeded with
/// `1 / total_batch_weight` so accumulating over the batch yields the
/// gradient of the weight-normalized batch loss.
fn sample_loss_and_grads(
    kind: ScorerKind,
    params: &ScorerParams,
    sample: &Sample,
    seed_scale: f64,
) -> (f64, Vec<Tensor>) {
    let (mut tape, ids, loss) = sample_loss_tape(kind, params, sample);
    let loss_value = tape.value(loss).item();
    tape.backward(loss, seed_scale);
    let grads = ids
        .iter()
        .zip(params.tensors.iter())
        .map(|(&id, t)| {
            tape.grad(id)
                .cloned()
                .unwrap_or_else(|| Tensor::zeros(t.rows, t.cols))
        })
        .collect();
    (loss_value, grads)
}

fn train_nn(
    kind: ScorerKind,
    ds: &SampleDataset,
    config: &TrainConfig,
) -> Result<TrainedModel, TrainError> {
    validate(ds)?;
    let (train_idx, val_idx) = split_by_instance(ds, config);
    let mut params = ScorerParams::init(kind, config.seed);
    let mut adam = AdamState::new(&params.tensors, config.learning_rate);

    let mut best_params = params.clone();
    let mut best_val_loss = f64::INFINITY;
    let mut best_val_acc = 0.0;
    let mut final_train_loss = f64::NAN;

    for epoch in 0..config.epochs {
        let mut order = train_idx.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(
            config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ epoch as u64,
        );
        order.shuffle(&mut rng);

        let mut epoch_loss = 0.0;
        let mut epoch_weight = 0.0;
        for batch in order.chunks(config.batch_size) {
            let batch_weight: f64 = batch.iter().map(|&i| ds.samples[i].weight).sum();
            let seed_scale = 1.0 / batch_weight;
            let mut grads: Vec<Tensor> = params
                .tensors
                .iter()
                .map(|t| Tensor::zeros(t.rows, t.cols))
                .collect();
            for &i in batch {
                let (loss, sample_grads) =
                    sample_loss_and_grads(kind, &params, &ds.samples[i], seed_scale);
                if !loss.is_finite() {
                    return Err(TrainError::NonFiniteLoss { epoch });
                }
                epoch_loss += loss;
                for (g, sg) in grads.iter_mut().zip(sample_grads) {
                    for (a, b) in g.data.iter_mut().zip(sg.data) {
                        *a += b;
                    }
                }
            }
            epoch_weight += batch_weight;
            adam_step(&mut params.tensors, &grads, &mut adam)?;
        }
        final_train_loss = epoch_loss / epoch_weight.max(1e-300);

        if !val_idx.is_empty() {
            // Checkpoint on validation loss: accuracy over a handful of held
            // out samples saturates immediately and would freeze an early
            // epoch; the weighted loss keeps discriminating.
            let model = TrainedModel {
                manifest: manifest_for(kind, config.seed, TrainMeta::default()),
                params: params.clone(),
            };
            let mut val_loss = 0.0;
            let mut val_weight = 0.0;
            let mut correct = 0usize;
            for &i in &val_idx {
                let s = &ds.samples[i];
                val_loss += sample_loss(kind, &params, s);
                val_weight += s.weight;
                if decision_matches_label(sample_decision(&model, s), s.label) {
                    correct += 1;
                }
            }
            val_loss /= val_weight.max(1e-300);
            if val_loss < best_val_loss {
                best_val_loss = val_loss;
                best_val_acc = correct as f64 / val_idx.len() as f64;
                best_params = params.clone();
            }
        }
    }

    if val_idx.is_empty() {
        best_params = params;
    }
    let training = TrainMeta {
        epochs_run: config.epochs,
        batch_size: config.batch_size,
        learning_rate: config.learning_rate,
        final_train_loss,
        best_val_accuracy: best_val_acc,
        train_samples: train_idx.len(),
        val_samples: val_idx.len(),
        dataset_hash: dataset_content_hash(ds)?,
    };
    Ok(TrainedModel {
        manifest: manifest_for(kind, config.seed, training),
        params: best_params,
    })
}

/// Linear SVM on difference features `phi(first) - phi(second)` with hinge
/// loss and L2 regularization, by deterministic full-batch subgradient
/// descent. Sample weights scale the hinge terms.
fn svm_train(ds: &SampleDataset, config: &TrainConfig) -> Result<TrainedModel, TrainError> {
    validate(ds)?;
    let (train_idx, val_idx) = split_by_instance(ds, config);
    let lambda = 1e-4;
    let dim = encoding::FIXED_FEAT_DIM;

    let features: Vec<(Vec<f64>, f64, f64)> = train_idx
        .iter()
        .map(|&i| {
            let s = &ds.samples[i];
            let diff: Vec<f64> = s
                .first
                .fixed
                .as_slice()
                .iter()
                .zip(s.second.fixed.as_slice())
                .map(|(a, b)| a - b)
                .collect();
            // Label 0 (first better) demands a negative margin w . diff.
            let y = if s.label == 0 { -1.0 } else { 1.0 };
            (diff, y, s.weight)
        })
        .collect();
    let total_weight: f64 = features.iter().map(|(_, _, w)| w).sum();

    let mut w = vec![0.0; dim];
    let iterations = (config.epochs * 20).max(200);
    let mut final_loss = f64::NAN;
    for t in 0..iterations {
        let lr = 1.0 / (1.0 + 0.01 * t as f64);
        let mut grad = vec![0.0; dim];
        let mut loss = 0.0;
        for (phi, y, weight) in &features {
            let margin = y * dot(&w, phi);
            if margin < 1.0 {
                loss += weight * (1.0 - margin);
                for (g, &x) in grad.iter_mut().zip(phi.iter()) {
                    *g -= weight * y * x;
                }
            }
        }
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        loss = loss / total_weight + 0.5 * lambda * norm_sq;
        if !loss.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch: t });
        }
        final_loss = loss;
        for (wv, g) in w.iter_mut().zip(grad.iter()) {
            *wv -= lr * (g / total_weight + lambda * *wv);
        }
    }

    let params = ScorerParams::from_named(
        ScorerKind::Svm,
        vec![
            ("weights".into(), Tensor::row(&w)),
            ("bias".into(), Tensor::scalar(0.0)),
        ],
    )
    .expect("layout is fixed");
    let model = TrainedModel {
        manifest: manifest_for(ScorerKind::Svm, config.seed, TrainMeta::default()),
        params,
    };
    let val_acc = if val_idx.is_empty() {
        0.0
    } else {
        val_idx
            .iter()
            .filter(|&&i| {
                decision_matches_label(sample_decision(&model, &ds.samples[i]), ds.samples[i].label)
            })
            .count() as f64
            / val_idx.len() as f64
    };
    let training = TrainMeta {
        epochs_run: iterations,
        batch_size: train_idx.len(),
        learning_rate: 1.0,
        final_train_loss: final_loss,
        best_val_accuracy: val_acc,
        train_samples: train_idx.len(),
        val_samples: val_idx.len(),
        dataset_hash: dataset_content_hash(ds)?,
    };
    Ok(TrainedModel {
        manifest: manifest_for(ScorerKind::Svm, config.seed, training),
        params: model.params,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Accuracy of a trained model over a dataset, via the stored encodings.
pub fn model_accuracy(model: &TrainedModel, ds: &SampleDataset) -> f64 {
    imitation::evaluate_accuracy(|s| sample_decision(model, s), ds)
}
