use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use milp_core::{MilpInstance, RowSense, SparseRow, VarType};

use crate::config::GispParams;
use crate::graph::{derive_seed, gen_er_graph};

/// Generalized independent set: pick nodes for revenue, optionally paying to
/// remove conflicting edges. Permanent edges enforce `x_u + x_v <= 1`;
/// removable edges relax to `x_u + x_v - y_e <= 1` at cost `y_e`.
///
/// The removal indicators `y_e` live in `[0, 1]` as continuous variables:
/// with integral `x` the LP sets `y_e = max(0, x_u + x_v - 1)`, which is
/// integral, so the optimum is unchanged and branching stays on the nodes.
pub fn gen_gisp(n: usize, seed: u64, p: f64, params: &GispParams) -> MilpInstance {
    assert!(n >= 2);
    let graph = gen_er_graph(n, p, derive_seed(seed, 0x615));
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x616));
    let removable: Vec<bool> = graph
        .edges
        .iter()
        .map(|_| rng.random_bool(params.removable_prob))
        .collect();
    build_gisp(
        format!("gisp_n{n}_s{seed}"),
        n,
        &graph.edges,
        &removable,
        params,
    )
}

pub fn build_gisp(
    name: String,
    n: usize,
    edges: &[(usize, usize)],
    removable: &[bool],
    params: &GispParams,
) -> MilpInstance {
    let num_removable = removable.iter().filter(|&&r| r).count();
    let num_vars = n + num_removable;

    let mut objective = vec![0.0; num_vars];
    for v in 0..n {
        objective[v] = -params.node_revenue;
    }
    for j in n..num_vars {
        objective[j] = params.removal_cost;
    }

    let mut rows = Vec::with_capacity(edges.len());
    let mut senses = Vec::with_capacity(edges.len());
    let mut rhs = Vec::with_capacity(edges.len());
    let mut next_y = n;
    for (e, &(u, v)) in edges.iter().enumerate() {
        let mut entries = vec![(u, 1.0), (v, 1.0)];
        if removable[e] {
            entries.push((next_y, -1.0));
            next_y += 1;
        }
        rows.push(SparseRow::new(entries));
        senses.push(RowSense::Le);
        rhs.push(1.0);
    }

    let lower = vec![0.0; num_vars];
    let upper = vec![1.0; num_vars];
    let mut vtypes = vec![VarType::Continuous; num_vars];
    for t in vtypes.iter_mut().take(n) {
        *t = VarType::Binary;
    }

    MilpInstance::new(
        name, num_vars, objective, rows, senses, rhs, lower, upper, vtypes,
    )
    .expect("generator produces valid instances")
}
