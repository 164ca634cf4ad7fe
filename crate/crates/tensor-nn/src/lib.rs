//! Minimal tensor kernel with reverse-mode differentiation.
//!
//! The op set is closed over exactly what the node-scoring models need:
//! dense affine layers, ReLU, sigmoid, l2 norm, mean pooling, concatenation,
//! weighted binary cross-entropy, and a coefficient-weighted bipartite graph
//! convolution. Plus Adam, seeded Glorot initialization, and a binary
//! checkpoint format (JSON manifest + named f64 arrays).

mod adam;
mod checkpoint;
pub mod gradcheck;
mod init;
mod tape;
mod tensor;

pub use adam::{adam_step, AdamError, AdamState};
pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointError};
pub use init::ParamInit;
pub use tape::{Tape, ValueId};
pub use tensor::Tensor;
