use bnb_engine::CompDecision;

use crate::sample::{Sample, SampleDataset};

/// Unweighted fraction of samples on which a decision function agrees with
/// the oracle label (0 = first better, 1 = second better).
pub fn evaluate_accuracy<F>(mut decide: F, ds: &SampleDataset) -> f64
where
    F: FnMut(&Sample) -> CompDecision,
{
    assert!(!ds.is_empty(), "accuracy over an empty dataset is undefined");
    let correct = ds
        .samples
        .iter()
        .filter(|s| decision_matches_label(decide(s), s.label))
        .count();
    correct as f64 / ds.len() as f64
}

pub fn decision_matches_label(decision: CompDecision, label: u8) -> bool {
    matches!(
        (decision, label),
        (CompDecision::FirstBetter, 0) | (CompDecision::SecondBetter, 1)
    )
}

/// Fraction of samples labeled "second better"; 0.5 means a balanced set.
pub fn label_balance(ds: &SampleDataset) -> f64 {
    if ds.is_empty() {
        return 0.0;
    }
    ds.samples.iter().filter(|s| s.label == 1).count() as f64 / ds.len() as f64
}
