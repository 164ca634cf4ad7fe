//! Bounded-variable revised simplex solver for LP relaxations.
//!
//! Branch-and-bound nodes are plain bound changes on a shared instance, so
//! the solver takes the instance together with a [`LocalBounds`] overlay and
//! never mutates either.

mod bounds;
mod simplex;
pub mod vertex_oracle;

pub use bounds::LocalBounds;
pub use simplex::{lp_lower_bound, solve_lp, LpResult, LpStatus, SimplexError, SimplexRelaxation};
