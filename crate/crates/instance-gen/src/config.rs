use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fcmcnf,
    Maxsat,
    Gisp,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Fcmcnf => "fcmcnf",
            Family::Maxsat => "maxsat",
            Family::Gisp => "gisp",
        }
    }

    /// Default edge probability of the underlying random graph.
    pub fn default_edge_prob(self) -> f64 {
        match self {
            Family::Fcmcnf => 0.3,
            Family::Maxsat | Family::Gisp => 0.6,
        }
    }
}

#[derive(Debug, Error)]
#[error("unknown family `{0}`, expected fcmcnf, maxsat, or gisp")]
pub struct FamilyParseError(String);

impl std::str::FromStr for Family {
    type Err = FamilyParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fcmcnf" => Ok(Family::Fcmcnf),
            "maxsat" => Ok(Family::Maxsat),
            "gisp" => Ok(Family::Gisp),
            other => Err(FamilyParseError(other.to_string())),
        }
    }
}

/// Instance size class: training/test sizes, or the strictly larger transfer
/// sizes used to probe generalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    TrainTest,
    Transfer,
}

impl SizeClass {
    pub fn label(self) -> &'static str {
        match self {
            SizeClass::TrainTest => "test",
            SizeClass::Transfer => "transfer",
        }
    }
}

/// Tunable constants of the FCMCNF formulation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FcmcnfParams {
    /// Commodity count as a multiple of the node count.
    pub commodity_factor: f64,
    /// Per-arc-and-commodity routing cost range (inclusive integers).
    pub routing_cost: (u64, u64),
    /// Per-arc fixed charge range (inclusive integers).
    pub fixed_charge: (u64, u64),
    /// Arc capacity range as fractions of the commodity count.
    pub capacity_frac: (f64, f64),
    /// Upper bound on the undirected edge count; draws above it are
    /// regenerated. Each edge contributes two arcs (two binaries), so this
    /// caps the instance's enumeration size for brute-force cross-checks.
    #[serde(default)]
    pub max_edges: Option<usize>,
    /// Graph regeneration attempts before giving up.
    pub max_retries: usize,
}

impl Default for FcmcnfParams {
    fn default() -> Self {
        Self {
            commodity_factor: 1.5,
            routing_cost: (10, 100),
            fixed_charge: (10, 100),
            capacity_frac: (0.5, 1.0),
            max_edges: None,
            max_retries: 50,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GispParams {
    /// Probability that an edge is removable.
    pub removable_prob: f64,
    pub node_revenue: f64,
    pub removal_cost: f64,
}

impl Default for GispParams {
    fn default() -> Self {
        Self {
            removable_prob: 0.5,
            node_revenue: 100.0,
            removal_cost: 1.0,
        }
    }
}

/// Configuration for generating a suite of instances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenConfig {
    pub family: Family,
    pub n_min: usize,
    pub n_max: usize,
    /// Edge probability; `None` uses the family default.
    pub p: Option<f64>,
    pub seed: u64,
    pub count: usize,
    pub size_class: SizeClass,
    #[serde(default)]
    pub fcmcnf: FcmcnfParams,
    #[serde(default)]
    pub gisp: GispParams,
}

impl GenConfig {
    pub fn new(family: Family, n_min: usize, n_max: usize, seed: u64, count: usize) -> Self {
        Self {
            family,
            n_min,
            n_max,
            p: None,
            seed,
            count,
            size_class: SizeClass::TrainTest,
            fcmcnf: FcmcnfParams::default(),
            gisp: GispParams::default(),
        }
    }

    pub fn edge_prob(&self) -> f64 {
        self.p.unwrap_or_else(|| self.family.default_edge_prob())
    }
}
