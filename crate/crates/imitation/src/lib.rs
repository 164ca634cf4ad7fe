//! Imitation-learning pipeline for the diving oracle.
//!
//! An instance is first solved to optimality to obtain its optimal solution,
//! then re-solved with a plain highest-rank selector while the comparator
//! consults the oracle: whenever the oracle prefers a node (because it
//! contains the optimum), the state and label are recorded and the opposite
//! action is taken on purpose, broadening the visited state distribution.
//! Samples carry exponentially depth-decaying weights.

mod accuracy;
mod collect;
mod dataset_io;
mod sample;

pub use accuracy::{decision_matches_label, evaluate_accuracy, label_balance};
pub use collect::{
    collect, collect_instance, split_instances, CollectConfig, CollectError, CollectingComparator,
};
pub use dataset_io::{dataset_content_hash, load_dataset, save_dataset, DatasetIoError};
pub use sample::{
    sample_weight, NodeRepr, Provenance, Sample, SampleDataset, SampleMeta, SplitTag, WeightScheme,
};
