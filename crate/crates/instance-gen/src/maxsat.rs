use milp_core::{MilpInstance, RowSense, SparseRow, VarType};

use crate::graph::{derive_seed, gen_er_graph};

/// Weighted MAXSAT over an Erdős–Rényi graph: one boolean per graph node and,
/// per edge `(u, v)`, the two unit-weight clauses `(u or v)` and
/// `(not u or not v)`. Satisfying both means 2-coloring the edge.
///
/// MILP encoding: binary `x_v` per boolean, one satisfaction indicator `z_c`
/// in `[0, 1]` per clause with `z_c <= sum of satisfied literals`, objective
/// `min -sum z_c`. With the `x` integral the LP drives each `z_c` to the
/// integral `min(1, count)`, so relaxing `z` keeps the optimum exact while
/// confining branching (and enumeration) to the `x` variables.
pub fn gen_maxsat(n: usize, seed: u64, p: f64) -> MilpInstance {
    assert!(n >= 3);
    let graph = gen_er_graph(n, p, derive_seed(seed, 0x5A7));
    let num_clauses = 2 * graph.num_edges();
    let num_vars = n + num_clauses;
    let z = |c: usize| n + c;

    let mut objective = vec![0.0; num_vars];
    for c in 0..num_clauses {
        objective[z(c)] = -1.0; // unit clause weights
    }

    let mut rows = Vec::with_capacity(num_clauses);
    let mut senses = Vec::with_capacity(num_clauses);
    let mut rhs = Vec::with_capacity(num_clauses);
    for (e, &(u, v)) in graph.edges.iter().enumerate() {
        // (u or v): z <= x_u + x_v
        rows.push(SparseRow::new(vec![
            (z(2 * e), 1.0),
            (u, -1.0),
            (v, -1.0),
        ]));
        senses.push(RowSense::Le);
        rhs.push(0.0);
        // (not u or not v): z <= (1 - x_u) + (1 - x_v)
        rows.push(SparseRow::new(vec![
            (z(2 * e + 1), 1.0),
            (u, 1.0),
            (v, 1.0),
        ]));
        senses.push(RowSense::Le);
        rhs.push(2.0);
    }

    let lower = vec![0.0; num_vars];
    let upper = vec![1.0; num_vars];
    let mut vtypes = vec![VarType::Continuous; num_vars];
    for t in vtypes.iter_mut().take(n) {
        *t = VarType::Binary;
    }

    MilpInstance::new(
        format!("maxsat_n{n}_s{seed}"),
        num_vars,
        objective,
        rows,
        senses,
        rhs,
        lower,
        upper,
        vtypes,
    )
    .expect("generator produces valid instances")
}
