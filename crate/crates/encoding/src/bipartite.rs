use std::io::{Read, Write};

use thiserror::Error;

use bnb_engine::{BnbNode, TreeStats};
use milp_core::{MilpInstance, RowSense, VarType};

use crate::{BOUND_CLIP, BOUND_SQUASH, CONS_FEAT_DIM, GLOBAL_FEAT_DIM, VAR_FEAT_DIM};

/// Bipartite-graph state of one node: constraint vertices with 3 features,
/// variable vertices with 6 features, coefficient-weighted edges, and two
/// whole-node global features (estimate and dual bound).
#[derive(Clone, Debug, PartialEq)]
pub struct NodeBipartiteGraph {
    pub num_cons: usize,
    pub num_vars: usize,
    /// Row-major `[num_cons x 3]`: normalized rhs, is-ge, is-le (both set
    /// for equality rows).
    pub cons_feats: Vec<f64>,
    /// Row-major `[num_vars x 6]`: normalized objective coefficient, clipped
    /// local lower/upper bound, and a binary/integer/continuous one-hot.
    pub var_feats: Vec<f64>,
    /// `(constraint, variable, normalized coefficient)` per nonzero.
    pub edges: Vec<(u32, u32, f64)>,
    /// Normalized node estimate and dual bound.
    pub global_feats: [f64; GLOBAL_FEAT_DIM],
}

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("node {0} has no optimal LP relaxation; encode after solving it")]
    UnsolvedNode(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed graph blob: {0}")]
    Malformed(String),
}

fn guarded(norm: f64) -> f64 {
    if norm > 1e-12 {
        norm
    } else {
        1.0
    }
}

// Bounds are clipped for outliers (infinities arrive as +-BOUND_CLIP) and
// then tanh-compressed. Dividing by the clip instead would flatten unit-box
// bounds to 1e-4 and starve the graph model of the branching signal.
fn clip_bound(v: f64) -> f64 {
    (v.clamp(-BOUND_CLIP, BOUND_CLIP) / BOUND_SQUASH).tanh()
}

/// Encodes a solved node as its bipartite graph. Deterministic, and
/// equivariant under relabeling of variables or constraints.
pub fn encode_bipartite(
    inst: &MilpInstance,
    node: &BnbNode,
    tree: &TreeStats,
) -> Result<NodeBipartiteGraph, EncodeError> {
    if !node.lp.is_optimal() {
        return Err(EncodeError::UnsolvedNode(node.id));
    }
    let nc = inst.num_cons();
    let nv = inst.num_vars;

    let obj_norm = guarded(inst.objective.iter().map(|c| c * c).sum::<f64>().sqrt());

    let mut cons_feats = vec![0.0; nc * CONS_FEAT_DIM];
    let mut edges = Vec::with_capacity(inst.nnz());
    for (i, row) in inst.rows.iter().enumerate() {
        // Rows are scaled by the l2 norm of their coefficients augmented
        // with the rhs, making row features invariant to row scaling.
        let row_norm = guarded(
            (row.entries.iter().map(|&(_, a)| a * a).sum::<f64>() + inst.rhs[i] * inst.rhs[i])
                .sqrt(),
        );
        let (ge, le) = match inst.senses[i] {
            RowSense::Ge => (1.0, 0.0),
            RowSense::Le => (0.0, 1.0),
            RowSense::Eq => (1.0, 1.0),
        };
        cons_feats[i * CONS_FEAT_DIM] = inst.rhs[i] / row_norm;
        cons_feats[i * CONS_FEAT_DIM + 1] = ge;
        cons_feats[i * CONS_FEAT_DIM + 2] = le;
        for &(j, a) in &row.entries {
            edges.push((i as u32, j as u32, a / row_norm));
        }
    }

    let mut var_feats = vec![0.0; nv * VAR_FEAT_DIM];
    for j in 0..nv {
        let (lb, ub) = node.bounds.effective(inst, j);
        let base = j * VAR_FEAT_DIM;
        var_feats[base] = inst.objective[j] / obj_norm;
        var_feats[base + 1] = clip_bound(lb);
        var_feats[base + 2] = clip_bound(ub);
        let t = match inst.vtypes[j] {
            VarType::Binary => 3,
            VarType::Integer => 4,
            VarType::Continuous => 5,
        };
        var_feats[base + t] = 1.0;
    }

    let scale = node_scale(tree);
    Ok(NodeBipartiteGraph {
        num_cons: nc,
        num_vars: nv,
        cons_feats,
        var_feats,
        edges,
        global_feats: [node.estimate / scale, node.dual_bound / scale],
    })
}

/// Normalizer shared by the global features: magnitude of the root dual
/// bound, shifted to stay away from zero.
pub(crate) fn node_scale(tree: &TreeStats) -> f64 {
    tree.root_dual_bound.abs() + 1.0
}

impl NodeBipartiteGraph {
    /// Dimensions header, row-major feature blocks, then the edge triplet
    /// list; indices and lengths as little-endian u64, features as
    /// little-endian f64.
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for dim in [self.num_cons as u64, self.num_vars as u64, self.edges.len() as u64] {
            w.write_all(&dim.to_le_bytes())?;
        }
        for &v in self.cons_feats.iter().chain(self.var_feats.iter()) {
            w.write_all(&v.to_le_bytes())?;
        }
        for &(c, j, a) in &self.edges {
            w.write_all(&(c as u64).to_le_bytes())?;
            w.write_all(&(j as u64).to_le_bytes())?;
            w.write_all(&a.to_le_bytes())?;
        }
        for &g in &self.global_feats {
            w.write_all(&g.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, EncodeError> {
        let num_cons = read_u64(r)? as usize;
        let num_vars = read_u64(r)? as usize;
        let num_edges = read_u64(r)? as usize;
        const SANITY_CAP: usize = 100_000_000;
        if num_cons > SANITY_CAP || num_vars > SANITY_CAP || num_edges > SANITY_CAP {
            return Err(EncodeError::Malformed("dimension header too large".into()));
        }
        let mut cons_feats = vec![0.0; num_cons * CONS_FEAT_DIM];
        let mut var_feats = vec![0.0; num_vars * VAR_FEAT_DIM];
        for v in cons_feats.iter_mut().chain(var_feats.iter_mut()) {
            *v = read_f64(r)?;
        }
        let mut edges = Vec::with_capacity(num_edges);
        for _ in 0..num_edges {
            let c = read_u64(r)?;
            let j = read_u64(r)?;
            let a = read_f64(r)?;
            if c as usize >= num_cons || j as usize >= num_vars {
                return Err(EncodeError::Malformed(format!(
                    "edge ({c}, {j}) out of range"
                )));
            }
            edges.push((c as u32, j as u32, a));
        }
        let mut global_feats = [0.0; GLOBAL_FEAT_DIM];
        for g in global_feats.iter_mut() {
            *g = read_f64(r)?;
        }
        Ok(Self {
            num_cons,
            num_vars,
            cons_feats,
            var_feats,
            edges,
            global_feats,
        })
    }

    pub fn all_finite(&self) -> bool {
        self.cons_feats
            .iter()
            .chain(self.var_feats.iter())
            .chain(self.edges.iter().map(|(_, _, a)| a))
            .chain(self.global_feats.iter())
            .all(|v| v.is_finite())
    }
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, EncodeError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)
        .map_err(|e| EncodeError::Malformed(format!("truncated input: {e}")))?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, EncodeError> {
    Ok(f64::from_bits(read_u64(r)?))
}
