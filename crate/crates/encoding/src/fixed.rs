use std::io::{Read, Write};

use bnb_engine::{BnbNode, BranchDirection, TreeStats};
use milp_core::MilpInstance;

use crate::bipartite::{node_scale, EncodeError};
use crate::FIXED_FEAT_DIM;

/// Fixed-dimensional node summary for the linear and feedforward baselines.
///
/// Layout:
/// 0. depth
/// 1. dual bound (normalized by the root bound)
/// 2. estimate (same normalization)
/// 3. gap to incumbent (0 when there is none; slot 8 doubles as the
///    presence flag since it is 0 exactly when no incumbent exists)
/// 4. branch direction (+1 up / -1 down / 0 root)
/// 5. branch variable's LP fraction at the parent
/// 6. fractional integer variables over integer variables at the parent LP
/// 7. plunge depth since the last backtrack
/// 8. incumbent count
/// 9. log(1 + open nodes)
/// 10. log(1 + nodes processed)
/// 11. fraction of the root gap closed so far
#[derive(Clone, Debug, PartialEq)]
pub struct FixedFeatures(pub [f64; FIXED_FEAT_DIM]);

impl FixedFeatures {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for v in &self.0 {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, EncodeError> {
        let mut values = [0.0; FIXED_FEAT_DIM];
        for v in values.iter_mut() {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)
                .map_err(|e| EncodeError::Malformed(format!("truncated input: {e}")))?;
            *v = f64::from_bits(u64::from_le_bytes(buf));
        }
        Ok(Self(values))
    }
}

/// Encodes a solved node as the 12-vector above.
pub fn encode_fixed(_inst: &MilpInstance, node: &BnbNode, tree: &TreeStats) -> FixedFeatures {
    let scale = node_scale(tree);
    let gap = match tree.incumbent_objective {
        Some(inc) => (inc - node.dual_bound) / scale,
        None => 0.0,
    };
    let direction = match node.branch_dir {
        Some(BranchDirection::Up) => 1.0,
        Some(BranchDirection::Down) => -1.0,
        None => 0.0,
    };
    let gap_closed = match tree.incumbent_objective {
        Some(inc) if inc - tree.root_dual_bound > 1e-12 => {
            let closed = (tree.global_dual_bound - tree.root_dual_bound)
                / (inc - tree.root_dual_bound);
            closed.clamp(0.0, 1.0)
        }
        _ => 0.0,
    };
    FixedFeatures([
        node.depth as f64,
        node.dual_bound / scale,
        node.estimate / scale,
        gap,
        direction,
        node.branch_fraction,
        node.parent_frac_ratio,
        tree.plunge_depth as f64,
        tree.incumbent_count as f64,
        (1.0 + tree.open_count as f64).ln(),
        (1.0 + tree.nodes_processed as f64).ln(),
        gap_closed,
    ])
}
