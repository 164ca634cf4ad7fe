use std::rc::Rc;

use crate::tensor::Tensor;

/// Handle to a value on the tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValueId(usize);

/// Probability clamp for the cross-entropy loss.
const BCE_CLAMP: f64 = 1e-12;

type Edges = Rc<Vec<(u32, u32, f64)>>;

enum Op {
    Leaf,
    MatMul(ValueId, ValueId),
    Add(ValueId, ValueId),
    Sub(ValueId, ValueId),
    /// Broadcast-add a `1 x c` row vector to every row of a matrix.
    AddRow(ValueId, ValueId),
    Relu(ValueId),
    Sigmoid(ValueId),
    L2Norm(ValueId),
    MeanRows(ValueId),
    ConcatCols(ValueId, ValueId),
    /// Weighted sum over bipartite edges. With `reverse = false` the output
    /// row `l` accumulates `w * h[r]` over edges `(l, r, w)`; with
    /// `reverse = true` the output row `r` accumulates `w * h[l]`.
    EdgeAggregate {
        edges: Edges,
        reverse: bool,
        input: ValueId,
    },
    WeightedBce {
        prob: ValueId,
        label: f64,
        weight: f64,
    },
    Scale(ValueId, f64),
}

struct Node {
    value: Tensor,
    grad: Option<Tensor>,
    op: Op,
}

/// Reverse-mode tape over the closed op set needed by the scoring models.
/// Values are recorded in evaluation order; `backward` walks them in reverse
/// and accumulates gradients into every reachable leaf.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self, id: ValueId) -> &Tensor {
        &self.nodes[id.0].value
    }

    /// Gradient accumulated for `id` by the last `backward` call.
    pub fn grad(&self, id: ValueId) -> Option<&Tensor> {
        self.nodes[id.0].grad.as_ref()
    }

    fn push(&mut self, value: Tensor, op: Op) -> ValueId {
        self.nodes.push(Node {
            value,
            grad: None,
            op,
        });
        ValueId(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor) -> ValueId {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: ValueId, b: ValueId) -> ValueId {
        let (ar, ac) = self.value(a).shape();
        let (br, bc) = self.value(b).shape();
        assert_eq!(ac, br, "matmul inner dimensions {ac} vs {br}");
        let mut out = Tensor::zeros(ar, bc);
        let (ta, tb) = (self.value(a), self.value(b));
        for i in 0..ar {
            for k in 0..ac {
                let aik = ta.data[i * ac + k];
                if aik != 0.0 {
                    for j in 0..bc {
                        out.data[i * bc + j] += aik * tb.data[k * bc + j];
                    }
                }
            }
        }
        self.push(out, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: ValueId, b: ValueId) -> ValueId {
        assert_eq!(self.value(a).shape(), self.value(b).shape(), "add shapes");
        let mut out = self.value(a).clone();
        for (o, &v) in out.data.iter_mut().zip(self.value(b).data.iter()) {
            *o += v;
        }
        self.push(out, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: ValueId, b: ValueId) -> ValueId {
        assert_eq!(self.value(a).shape(), self.value(b).shape(), "sub shapes");
        let mut out = self.value(a).clone();
        for (o, &v) in out.data.iter_mut().zip(self.value(b).data.iter()) {
            *o -= v;
        }
        self.push(out, Op::Sub(a, b))
    }

    pub fn add_row(&mut self, m: ValueId, v: ValueId) -> ValueId {
        let (rows, cols) = self.value(m).shape();
        assert_eq!(self.value(v).shape(), (1, cols), "bias must be 1 x cols");
        let mut out = self.value(m).clone();
        let bias = self.value(v).data.clone();
        for r in 0..rows {
            for c in 0..cols {
                out.data[r * cols + c] += bias[c];
            }
        }
        self.push(out, Op::AddRow(m, v))
    }

    /// Affine layer `x W + b`.
    pub fn dense(&mut self, x: ValueId, w: ValueId, b: ValueId) -> ValueId {
        let xw = self.matmul(x, w);
        self.add_row(xw, b)
    }

    pub fn relu(&mut self, a: ValueId) -> ValueId {
        let mut out = self.value(a).clone();
        for v in out.data.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        self.push(out, Op::Relu(a))
    }

    pub fn sigmoid(&mut self, a: ValueId) -> ValueId {
        let mut out = self.value(a).clone();
        for v in out.data.iter_mut() {
            *v = 1.0 / (1.0 + (-*v).exp());
        }
        self.push(out, Op::Sigmoid(a))
    }

    /// Euclidean norm of a vector, as a scalar.
    pub fn l2_norm(&mut self, a: ValueId) -> ValueId {
        let norm = self.value(a).data.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.push(Tensor::scalar(norm), Op::L2Norm(a))
    }

    /// Column means over rows; an empty matrix pools to zeros.
    pub fn mean_rows(&mut self, a: ValueId) -> ValueId {
        let (rows, cols) = self.value(a).shape();
        let mut out = Tensor::zeros(1, cols);
        if rows > 0 {
            let t = self.value(a);
            for r in 0..rows {
                for c in 0..cols {
                    out.data[c] += t.data[r * cols + c];
                }
            }
            for v in out.data.iter_mut() {
                *v /= rows as f64;
            }
        }
        self.push(out, Op::MeanRows(a))
    }

    pub fn concat_cols(&mut self, a: ValueId, b: ValueId) -> ValueId {
        let (ar, ac) = self.value(a).shape();
        let (br, bc) = self.value(b).shape();
        assert_eq!(ar, 1, "concat expects row vectors");
        assert_eq!(br, 1, "concat expects row vectors");
        let mut data = self.value(a).data.clone();
        data.extend_from_slice(&self.value(b).data);
        self.push(Tensor::from_vec(1, ac + bc, data), Op::ConcatCols(a, b))
    }

    /// Weighted neighbor sum across bipartite edges; see [`Op::EdgeAggregate`].
    pub fn edge_aggregate(
        &mut self,
        edges: Edges,
        reverse: bool,
        input: ValueId,
        out_rows: usize,
    ) -> ValueId {
        let (in_rows, cols) = self.value(input).shape();
        let mut out = Tensor::zeros(out_rows, cols);
        {
            let h = self.value(input);
            for &(l, r, w) in edges.iter() {
                let (dst, src) = if reverse {
                    (r as usize, l as usize)
                } else {
                    (l as usize, r as usize)
                };
                assert!(src < in_rows, "edge endpoint {src} out of range {in_rows}");
                assert!(dst < out_rows, "edge endpoint {dst} out of range {out_rows}");
                for c in 0..cols {
                    out.data[dst * cols + c] += w * h.data[src * cols + c];
                }
            }
        }
        self.push(
            out,
            Op::EdgeAggregate {
                edges,
                reverse,
                input,
            },
        )
    }

    /// Weighted binary cross-entropy of a scalar probability against a 0/1
    /// label; the probability is clamped away from 0 and 1.
    pub fn weighted_bce(&mut self, prob: ValueId, label: f64, weight: f64) -> ValueId {
        let p = self.value(prob).item().clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        let loss = -weight * (label * p.ln() + (1.0 - label) * (1.0 - p).ln());
        self.push(Tensor::scalar(loss), Op::WeightedBce { prob, label, weight })
    }

    pub fn scale(&mut self, a: ValueId, k: f64) -> ValueId {
        let mut out = self.value(a).clone();
        for v in out.data.iter_mut() {
            *v *= k;
        }
        self.push(out, Op::Scale(a, k))
    }

    /// One full bipartite convolution: left-side update from right-side
    /// neighbors, then right-side update from the fresh left features.
    /// `w_left_*`/`w_right_*` are the self/neighbor weights and biases of the
    /// two half-passes.
    #[allow(clippy::too_many_arguments)]
    pub fn bipartite_conv(
        &mut self,
        left_h: ValueId,
        right_h: ValueId,
        edges: Edges,
        w_left_self: ValueId,
        w_left_neigh: ValueId,
        b_left: ValueId,
        w_right_self: ValueId,
        w_right_neigh: ValueId,
        b_right: ValueId,
    ) -> (ValueId, ValueId) {
        let n_left = self.value(left_h).rows;
        let n_right = self.value(right_h).rows;

        let msg_left = self.edge_aggregate(edges.clone(), false, right_h, n_left);
        let self_left = self.matmul(left_h, w_left_self);
        let neigh_left = self.matmul(msg_left, w_left_neigh);
        let sum_left = self.add(self_left, neigh_left);
        let affine_left = self.add_row(sum_left, b_left);
        let new_left = self.relu(affine_left);

        let msg_right = self.edge_aggregate(edges, true, new_left, n_right);
        let self_right = self.matmul(right_h, w_right_self);
        let neigh_right = self.matmul(msg_right, w_right_neigh);
        let sum_right = self.add(self_right, neigh_right);
        let affine_right = self.add_row(sum_right, b_right);
        let new_right = self.relu(affine_right);

        (new_left, new_right)
    }

    /// Accumulates `seed * d(out)/d(node)` into every node's gradient buffer.
    /// `out` must be scalar.
    pub fn backward(&mut self, out: ValueId, seed: f64) {
        assert_eq!(self.value(out).numel(), 1, "backward requires a scalar");
        for node in self.nodes.iter_mut() {
            node.grad = None;
        }
        self.nodes[out.0].grad = Some(Tensor::scalar(seed));

        for idx in (0..self.nodes.len()).rev() {
            let Some(grad_out) = self.nodes[idx].grad.clone() else {
                continue;
            };
            match &self.nodes[idx].op {
                Op::Leaf => {}
                &Op::MatMul(a, b) => {
                    let (ar, ac) = self.nodes[a.0].value.shape();
                    let (_, bc) = self.nodes[b.0].value.shape();
                    let ta = self.nodes[a.0].value.clone();
                    let tb = self.nodes[b.0].value.clone();
                    // dA = dC B^T
                    let mut da = Tensor::zeros(ar, ac);
                    for i in 0..ar {
                        for k in 0..ac {
                            let mut s = 0.0;
                            for j in 0..bc {
                                s += grad_out.data[i * bc + j] * tb.data[k * bc + j];
                            }
                            da.data[i * ac + k] = s;
                        }
                    }
                    self.accumulate(a, &da);
                    // dB = A^T dC
                    let mut db = Tensor::zeros(ac, bc);
                    for k in 0..ac {
                        for j in 0..bc {
                            let mut s = 0.0;
                            for i in 0..ar {
                                s += ta.data[i * ac + k] * grad_out.data[i * bc + j];
                            }
                            db.data[k * bc + j] = s;
                        }
                    }
                    self.accumulate(b, &db);
                }
                &Op::Add(a, b) => {
                    self.accumulate(a, &grad_out);
                    self.accumulate(b, &grad_out);
                }
                &Op::Sub(a, b) => {
                    self.accumulate(a, &grad_out);
                    let mut neg = grad_out.clone();
                    for v in neg.data.iter_mut() {
                        *v = -*v;
                    }
                    self.accumulate(b, &neg);
                }
                &Op::AddRow(m, v) => {
                    self.accumulate(m, &grad_out);
                    let (rows, cols) = grad_out.shape();
                    let mut dv = Tensor::zeros(1, cols);
                    for r in 0..rows {
                        for c in 0..cols {
                            dv.data[c] += grad_out.data[r * cols + c];
                        }
                    }
                    self.accumulate(v, &dv);
                }
                &Op::Relu(a) => {
                    let mut da = grad_out.clone();
                    let input = &self.nodes[a.0].value;
                    for (g, &x) in da.data.iter_mut().zip(input.data.iter()) {
                        if x <= 0.0 {
                            *g = 0.0; // subgradient 0 at the kink
                        }
                    }
                    self.accumulate(a, &da);
                }
                &Op::Sigmoid(a) => {
                    let mut da = grad_out.clone();
                    let out_vals = self.nodes[idx].value.clone();
                    for (g, &s) in da.data.iter_mut().zip(out_vals.data.iter()) {
                        *g *= s * (1.0 - s);
                    }
                    self.accumulate(a, &da);
                }
                &Op::L2Norm(a) => {
                    let norm = self.nodes[idx].value.item();
                    let g = grad_out.item();
                    let input = self.nodes[a.0].value.clone();
                    let mut da = Tensor::zeros(input.rows, input.cols);
                    if norm > 1e-300 {
                        for (d, &x) in da.data.iter_mut().zip(input.data.iter()) {
                            *d = g * x / norm;
                        }
                    }
                    self.accumulate(a, &da);
                }
                &Op::MeanRows(a) => {
                    let (rows, cols) = self.nodes[a.0].value.shape();
                    let mut da = Tensor::zeros(rows, cols);
                    if rows > 0 {
                        let inv = 1.0 / rows as f64;
                        for r in 0..rows {
                            for c in 0..cols {
                                da.data[r * cols + c] = grad_out.data[c] * inv;
                            }
                        }
                    }
                    self.accumulate(a, &da);
                }
                &Op::ConcatCols(a, b) => {
                    let ac = self.nodes[a.0].value.cols;
                    let bc = self.nodes[b.0].value.cols;
                    let da = Tensor::from_vec(1, ac, grad_out.data[..ac].to_vec());
                    let db = Tensor::from_vec(1, bc, grad_out.data[ac..ac + bc].to_vec());
                    self.accumulate(a, &da);
                    self.accumulate(b, &db);
                }
                Op::EdgeAggregate {
                    edges,
                    reverse,
                    input,
                } => {
                    let edges = edges.clone();
                    let reverse = *reverse;
                    let input = *input;
                    let (in_rows, cols) = self.nodes[input.0].value.shape();
                    let mut da = Tensor::zeros(in_rows, cols);
                    for &(l, r, w) in edges.iter() {
                        let (dst, src) = if reverse {
                            (r as usize, l as usize)
                        } else {
                            (l as usize, r as usize)
                        };
                        for c in 0..cols {
                            da.data[src * cols + c] += w * grad_out.data[dst * cols + c];
                        }
                    }
                    self.accumulate(input, &da);
                }
                &Op::WeightedBce {
                    prob,
                    label,
                    weight,
                } => {
                    let p_raw = self.nodes[prob.0].value.item();
                    let p = p_raw.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
                    // Inside the clamp the derivative is the usual one; at
                    // the clamp boundary the loss is locally constant.
                    let dp = if p_raw > BCE_CLAMP && p_raw < 1.0 - BCE_CLAMP {
                        -weight * (label / p - (1.0 - label) / (1.0 - p))
                    } else {
                        0.0
                    };
                    self.accumulate(prob, &Tensor::scalar(dp * grad_out.item()));
                }
                &Op::Scale(a, k) => {
                    let mut da = grad_out.clone();
                    for v in da.data.iter_mut() {
                        *v *= k;
                    }
                    self.accumulate(a, &da);
                }
            }
        }
    }

    /// Smallest distance of any recorded value from a point of
    /// non-differentiability: ReLU inputs from 0 and l2-norm arguments from
    /// the zero vector. Finite-difference probes are only trustworthy at
    /// configurations where this stays well above the probe step.
    pub fn min_kink_distance(&self) -> f64 {
        let mut min = f64::INFINITY;
        for node in &self.nodes {
            match node.op {
                Op::Relu(a) => {
                    for &v in &self.nodes[a.0].value.data {
                        min = min.min(v.abs());
                    }
                }
                Op::L2Norm(_) => {
                    min = min.min(node.value.item().abs());
                }
                _ => {}
            }
        }
        min
    }

    fn accumulate(&mut self, id: ValueId, grad: &Tensor) {
        let node = &mut self.nodes[id.0];
        match &mut node.grad {
            Some(g) => {
                debug_assert_eq!(g.shape(), grad.shape());
                for (a, &b) in g.data.iter_mut().zip(grad.data.iter()) {
                    *a += b;
                }
            }
            None => node.grad = Some(grad.clone()),
        }
    }
}
