use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node-comparison method of the evaluation roster. Serialized names are
/// the config-file identifiers; report labels follow the conventional
/// lowercase roster names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SCIP_LIKE_ESTIMATE")]
    ScipLikeEstimate,
    #[serde(rename = "PLAIN_ESTIMATE")]
    PlainEstimate,
    #[serde(rename = "ORACLE")]
    Oracle,
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "MLP")]
    Mlp,
    #[serde(rename = "GNN")]
    Gnn,
}

impl Method {
    /// Label used in result rows.
    pub fn report_label(self) -> &'static str {
        match self {
            Method::ScipLikeEstimate => "scip",
            Method::PlainEstimate => "estimate",
            Method::Oracle => "oracle",
            Method::Svm => "svm",
            Method::Mlp => "mlp",
            Method::Gnn => "gnn",
        }
    }

    pub fn needs_checkpoint(self) -> bool {
        matches!(self, Method::Svm | Method::Mlp | Method::Gnn)
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct LimitsSpec {
    pub nodes: Option<u64>,
    pub seconds: Option<f64>,
}

/// One evaluation group: a directory of instances tagged with family and
/// split labels for reporting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitSpec {
    pub family: String,
    pub split: String,
    pub dir: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Checkpoint per learned method.
    #[serde(default)]
    pub checkpoints: BTreeMap<Method, PathBuf>,
    #[serde(default)]
    pub limits: LimitsSpec,
    /// Instance-level solve parallelism.
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// When false, wall times are reported as zero, making result files a
    /// pure function of the inputs (used by reproducibility checks).
    #[serde(default = "default_true")]
    pub measure_time: bool,
    pub output: PathBuf,
    pub splits: Vec<SplitSpec>,
}

fn default_jobs() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported config version {0}, expected 1")]
    Version(u32),
    #[error("method {0:?} requires a checkpoint path")]
    MissingCheckpoint(Method),
    #[error("limits must be positive")]
    BadLimits,
    #[error("no methods configured")]
    NoMethods,
    #[error("no instance splits configured")]
    NoSplits,
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != 1 {
            return Err(ConfigError::Version(self.version));
        }
        if self.methods.is_empty() {
            return Err(ConfigError::NoMethods);
        }
        if self.splits.is_empty() {
            return Err(ConfigError::NoSplits);
        }
        if self.limits.nodes == Some(0) || self.limits.seconds.is_some_and(|s| s <= 0.0) {
            return Err(ConfigError::BadLimits);
        }
        for &m in &self.methods {
            if m.needs_checkpoint() && !self.checkpoints.contains_key(&m) {
                return Err(ConfigError::MissingCheckpoint(m));
            }
        }
        Ok(())
    }
}
