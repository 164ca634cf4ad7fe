use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use encoding::{FixedFeatures, NodeBipartiteGraph, CONS_FEAT_DIM, FIXED_FEAT_DIM, VAR_FEAT_DIM};
use tensor_nn::{ParamInit, Tape, Tensor, ValueId};

/// Embedding width shared by both vertex sides.
pub const EMBED_DIM: usize = 32;
/// Output widths of the three graph convolutions.
pub const CONV_DIMS: [usize; 3] = [8, 4, 4];
/// MLP hidden width.
pub const MLP_HIDDEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Gnn,
    Mlp,
    Svm,
}

impl ScorerKind {
    pub fn label(self) -> &'static str {
        match self {
            ScorerKind::Gnn => "gnn",
            ScorerKind::Mlp => "mlp",
            ScorerKind::Svm => "svm",
        }
    }
}

#[derive(Debug, Error)]
#[error("unknown model kind `{0}`, expected gnn, mlp, or svm")]
pub struct KindParseError(String);

impl std::str::FromStr for ScorerKind {
    type Err = KindParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gnn" => Ok(ScorerKind::Gnn),
            "mlp" => Ok(ScorerKind::Mlp),
            "svm" => Ok(ScorerKind::Svm),
            other => Err(KindParseError(other.to_string())),
        }
    }
}

/// Ordered, named parameter tensors of one scoring function.
#[derive(Clone, Debug, PartialEq)]
pub struct ScorerParams {
    pub kind: ScorerKind,
    names: Vec<String>,
    pub tensors: Vec<Tensor>,
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("parameter {index} ({name}) has shape {got:?}, expected {expected:?}")]
    Shape {
        index: usize,
        name: String,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("expected {expected} parameters for {kind:?}, got {got}")]
    Count {
        kind: ScorerKind,
        expected: usize,
        got: usize,
    },
    #[error("parameter {index} is named `{got}`, expected `{expected}`")]
    Name {
        index: usize,
        expected: String,
        got: String,
    },
}

/// `(name, rows, cols)` of every parameter, in serialization order.
pub fn param_layout(kind: ScorerKind) -> Vec<(String, usize, usize)> {
    match kind {
        ScorerKind::Gnn => {
            let mut layout = vec![
                ("cons_embed.w".into(), CONS_FEAT_DIM, EMBED_DIM),
                ("cons_embed.b".into(), 1, EMBED_DIM),
                ("var_embed.w".into(), VAR_FEAT_DIM, EMBED_DIM),
                ("var_embed.b".into(), 1, EMBED_DIM),
            ];
            let mut in_c = EMBED_DIM;
            let mut in_v = EMBED_DIM;
            for (i, &w) in CONV_DIMS.iter().enumerate() {
                layout.push((format!("conv{i}.cons_self.w"), in_c, w));
                layout.push((format!("conv{i}.cons_neigh.w"), in_v, w));
                layout.push((format!("conv{i}.cons.b"), 1, w));
                layout.push((format!("conv{i}.var_self.w"), in_v, w));
                layout.push((format!("conv{i}.var_neigh.w"), w, w));
                layout.push((format!("conv{i}.var.b"), 1, w));
                in_c = w;
                in_v = w;
            }
            layout
        }
        ScorerKind::Mlp => vec![
            ("dense0.w".into(), FIXED_FEAT_DIM, MLP_HIDDEN),
            ("dense0.b".into(), 1, MLP_HIDDEN),
            ("dense1.w".into(), MLP_HIDDEN, 1),
            ("dense1.b".into(), 1, 1),
        ],
        ScorerKind::Svm => vec![
            ("weights".into(), 1, FIXED_FEAT_DIM),
            ("bias".into(), 1, 1),
        ],
    }
}

impl ScorerParams {
    /// Fresh parameters, deterministically initialized from the seed.
    /// Weight matrices are Glorot-uniform; biases start at zero.
    pub fn init(kind: ScorerKind, seed: u64) -> Self {
        let mut init = ParamInit::new(seed);
        let layout = param_layout(kind);
        let mut names = Vec::with_capacity(layout.len());
        let mut tensors = Vec::with_capacity(layout.len());
        for (name, rows, cols) in layout {
            let t = if name.ends_with(".b") || name == "bias" {
                init.zeros(rows, cols)
            } else {
                init.glorot(rows, cols)
            };
            names.push(name);
            tensors.push(t);
        }
        Self {
            kind,
            names,
            tensors,
        }
    }

    /// Wraps named tensors, validating count, names, and shapes.
    pub fn from_named(kind: ScorerKind, named: Vec<(String, Tensor)>) -> Result<Self, ParamError> {
        let layout = param_layout(kind);
        if named.len() != layout.len() {
            return Err(ParamError::Count {
                kind,
                expected: layout.len(),
                got: named.len(),
            });
        }
        let mut names = Vec::with_capacity(named.len());
        let mut tensors = Vec::with_capacity(named.len());
        for (index, ((name, tensor), (want_name, rows, cols))) in
            named.into_iter().zip(layout).enumerate()
        {
            if name != want_name {
                return Err(ParamError::Name {
                    index,
                    expected: want_name,
                    got: name,
                });
            }
            if tensor.shape() != (rows, cols) {
                return Err(ParamError::Shape {
                    index,
                    name,
                    expected: (rows, cols),
                    got: tensor.shape(),
                });
            }
            names.push(name);
            tensors.push(tensor);
        }
        Ok(Self {
            kind,
            names,
            tensors,
        })
    }

    pub fn named(&self) -> Vec<(String, Tensor)> {
        self.names
            .iter()
            .cloned()
            .zip(self.tensors.iter().cloned())
            .collect()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Builds the GNN scoring graph on a tape: embed both sides, run three
/// convolutions, mean-pool each side, concatenate with the two global
/// features, and take the l2 norm. Returns the scalar score id.
pub fn gnn_score_tape(
    tape: &mut Tape,
    params: &[ValueId],
    graph: &NodeBipartiteGraph,
) -> ValueId {
    assert_eq!(params.len(), param_layout(ScorerKind::Gnn).len());
    let cons_in = tape.leaf(Tensor::from_vec(
        graph.num_cons,
        CONS_FEAT_DIM,
        graph.cons_feats.clone(),
    ));
    let var_in = tape.leaf(Tensor::from_vec(
        graph.num_vars,
        VAR_FEAT_DIM,
        graph.var_feats.clone(),
    ));
    let edges: Rc<Vec<(u32, u32, f64)>> = Rc::new(graph.edges.clone());

    let ce = tape.dense(cons_in, params[0], params[1]);
    let mut cons_h = tape.relu(ce);
    let ve = tape.dense(var_in, params[2], params[3]);
    let mut var_h = tape.relu(ve);

    for i in 0..CONV_DIMS.len() {
        let base = 4 + i * 6;
        let (c, v) = tape.bipartite_conv(
            cons_h,
            var_h,
            edges.clone(),
            params[base],
            params[base + 1],
            params[base + 2],
            params[base + 3],
            params[base + 4],
            params[base + 5],
        );
        cons_h = c;
        var_h = v;
    }

    let cons_pool = tape.mean_rows(cons_h);
    let var_pool = tape.mean_rows(var_h);
    let globals = tape.leaf(Tensor::row(&graph.global_feats));
    let cat = tape.concat_cols(cons_pool, var_pool);
    let full = tape.concat_cols(cat, globals);
    tape.l2_norm(full)
}

/// MLP score graph over the fixed features: dense(12 -> 32), ReLU,
/// dense(32 -> 1).
pub fn mlp_score_tape(tape: &mut Tape, params: &[ValueId], fixed: &FixedFeatures) -> ValueId {
    assert_eq!(params.len(), param_layout(ScorerKind::Mlp).len());
    let x = tape.leaf(Tensor::row(fixed.as_slice()));
    let h = tape.dense(x, params[0], params[1]);
    let r = tape.relu(h);
    tape.dense(r, params[2], params[3])
}

/// Nonnegative GNN score of one node graph.
pub fn gnn_score(params: &ScorerParams, graph: &NodeBipartiteGraph) -> f64 {
    debug_assert_eq!(params.kind, ScorerKind::Gnn);
    let mut tape = Tape::new();
    let ids: Vec<ValueId> = params.tensors.iter().map(|t| tape.leaf(t.clone())).collect();
    let s = gnn_score_tape(&mut tape, &ids, graph);
    tape.value(s).item()
}

pub fn mlp_score(params: &ScorerParams, fixed: &FixedFeatures) -> f64 {
    debug_assert_eq!(params.kind, ScorerKind::Mlp);
    let mut tape = Tape::new();
    let ids: Vec<ValueId> = params.tensors.iter().map(|t| tape.leaf(t.clone())).collect();
    let s = mlp_score_tape(&mut tape, &ids, fixed);
    tape.value(s).item()
}

/// Linear score `w . phi`. The stored bias cancels in score differences and
/// is kept only for completeness.
pub fn svm_score(params: &ScorerParams, fixed: &FixedFeatures) -> f64 {
    debug_assert_eq!(params.kind, ScorerKind::Svm);
    params.tensors[0]
        .data
        .iter()
        .zip(fixed.as_slice())
        .map(|(w, x)| w * x)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_params(kind: ScorerKind) -> ScorerParams {
        let layout = param_layout(kind);
        let named = layout
            .into_iter()
            .map(|(name, r, c)| (name, Tensor::zeros(r, c)))
            .collect();
        ScorerParams::from_named(kind, named).unwrap()
    }

    fn tiny_graph(globals: [f64; 2]) -> NodeBipartiteGraph {
        NodeBipartiteGraph {
            num_cons: 2,
            num_vars: 3,
            cons_feats: vec![0.5, 1.0, 0.0, -0.3, 0.0, 1.0],
            var_feats: vec![
                0.1, 0.0, 1.0, 1.0, 0.0, 0.0, //
                -0.2, 0.0, 0.5, 0.0, 1.0, 0.0, //
                0.3, -1.0, 1.0, 0.0, 0.0, 1.0,
            ],
            edges: vec![(0, 0, 0.4), (0, 2, -0.6), (1, 1, 0.9)],
            global_feats: globals,
        }
    }

    #[test]
    fn zero_parameters_score_is_global_norm() {
        let params = zero_params(ScorerKind::Gnn);
        let g = tiny_graph([0.6, -0.8]);
        let score = gnn_score(&params, &g);
        // Zeros propagate through embeddings and convolutions; only the two
        // global features survive into the final norm.
        assert!((score - 1.0).abs() < 1e-12); // sqrt(0.36 + 0.64)
    }

    #[test]
    fn gnn_score_is_nonnegative() {
        let params = ScorerParams::init(ScorerKind::Gnn, 3);
        let g = tiny_graph([0.1, 0.2]);
        assert!(gnn_score(&params, &g) >= 0.0);
    }

    #[test]
    fn init_is_deterministic() {
        let a = ScorerParams::init(ScorerKind::Gnn, 9);
        let b = ScorerParams::init(ScorerKind::Gnn, 9);
        assert_eq!(a, b);
        let c = ScorerParams::init(ScorerKind::Gnn, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn layout_round_trips_through_from_named() {
        for kind in [ScorerKind::Gnn, ScorerKind::Mlp, ScorerKind::Svm] {
            let p = ScorerParams::init(kind, 1);
            let back = ScorerParams::from_named(kind, p.named()).unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn wrong_shape_rejected() {
        let mut named = ScorerParams::init(ScorerKind::Mlp, 1).named();
        named[0].1 = Tensor::zeros(3, 3);
        assert!(ScorerParams::from_named(ScorerKind::Mlp, named).is_err());
    }
}
