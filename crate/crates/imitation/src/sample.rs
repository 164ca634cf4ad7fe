use serde::{Deserialize, Serialize};

use encoding::{FixedFeatures, NodeBipartiteGraph};

/// How the exponentially decreasing sample weight is parsed from depths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// `exp((1 + |d1 - d2|) / min(d1, d2))`, the depth ratio inside the
    /// exponential. Decays toward `e^0 = 1` as the pair gets deeper.
    #[default]
    RatioInExponent,
    /// `exp(1 + |d1 - d2|) / min(d1, d2)`: exponential of the depth gap,
    /// scaled down by depth. Kept for ablation.
    ExponentOverMin,
}

/// Training weight of a comparison between nodes at depths `d1` and `d2`.
/// Mistakes near the root are costly, so shallow comparisons weigh more;
/// the minimum depth is clamped to 1 to keep root comparisons finite.
pub fn sample_weight(scheme: WeightScheme, d1: usize, d2: usize) -> f64 {
    let gap = d1.abs_diff(d2) as f64;
    let min_depth = d1.min(d2).max(1) as f64;
    match scheme {
        WeightScheme::RatioInExponent => ((1.0 + gap) / min_depth).exp(),
        WeightScheme::ExponentOverMin => (1.0 + gap).exp() / min_depth,
    }
}

/// Both encodings of one node, captured at comparison time so every model
/// family trains from the same dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRepr {
    pub graph: NodeBipartiteGraph,
    pub fixed: FixedFeatures,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleMeta {
    pub instance_id: String,
    pub depth_first: u32,
    pub depth_second: u32,
    /// Comparison ordinal within the collecting solve (matches the engine's
    /// comparator-call counter).
    pub ordinal: u64,
}

/// One expert sample: the state seen by the comparator and the oracle's
/// preference. The label records the oracle's decision, not the (opposite)
/// action the collector actually took.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub first: NodeRepr,
    pub second: NodeRepr,
    /// 0 when the oracle preferred the first node, 1 for the second.
    pub label: u8,
    pub weight: f64,
    pub meta: SampleMeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitTag {
    Train,
    Test,
}

impl SplitTag {
    pub fn label(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Test => "test",
        }
    }
}

/// Where a dataset came from: enough to regenerate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub weight_scheme: WeightScheme,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleDataset {
    pub samples: Vec<Sample>,
    pub split: SplitTag,
    pub provenance: Provenance,
}

impl SampleDataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distinct instance ids in first-appearance order.
    pub fn instance_ids(&self) -> Vec<&str> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for s in &self.samples {
            if seen.insert(s.meta.instance_id.as_str()) {
                out.push(s.meta.instance_id.as_str());
            }
        }
        out
    }
}
