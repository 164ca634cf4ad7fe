//! Node state encodings for learned comparators: a variable-size bipartite
//! graph over constraints and variables, and a fixed 12-dimensional summary
//! vector for the linear/feedforward baselines.
//!
//! Both encodings read the node's *local* bounds and are normalized to be
//! scale-free across instances. The normalization constants are versioned so
//! model checkpoints can assert they were trained under the same scheme.

mod bipartite;
mod fixed;

pub use bipartite::{encode_bipartite, EncodeError, NodeBipartiteGraph};
pub use fixed::{encode_fixed, FixedFeatures};

/// Bump when any normalization rule below changes; checkpoints record it.
pub const NORMALIZATION_VERSION: u32 = 2;
/// Variable bounds are clipped to this magnitude before squashing.
pub const BOUND_CLIP: f64 = 1e4;
/// Scale of the tanh squashing applied to clipped bounds.
pub const BOUND_SQUASH: f64 = 8.0;

pub const CONS_FEAT_DIM: usize = 3;
pub const VAR_FEAT_DIM: usize = 6;
pub const GLOBAL_FEAT_DIM: usize = 2;
pub const FIXED_FEAT_DIM: usize = 12;
