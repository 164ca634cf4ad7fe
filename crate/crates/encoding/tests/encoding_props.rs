//! Structural and equivariance properties of the node encodings.

use bnb_engine::{BnbNode, TreeStats};
use encoding::{encode_bipartite, encode_fixed, FIXED_FEAT_DIM};
use lp_simplex::{solve_lp, LocalBounds, LpResult, LpStatus};
use milp_core::{MilpInstance, RowSense, SparseRow, VarType};

fn tree_stats(root: f64) -> TreeStats {
    TreeStats {
        root_dual_bound: root,
        incumbent_objective: None,
        incumbent_count: 0,
        open_count: 0,
        nodes_processed: 1,
        plunge_depth: 0,
        global_dual_bound: root,
    }
}

fn solved_node(inst: &MilpInstance, bounds: LocalBounds, id: usize, depth: usize) -> BnbNode {
    let lp = solve_lp(inst, &bounds).unwrap();
    assert_eq!(lp.status, LpStatus::Optimal);
    let dual = lp.objective.unwrap();
    BnbNode {
        id,
        parent: None,
        depth,
        bounds,
        lp,
        dual_bound: dual,
        estimate: dual,
        branch_var: None,
        branch_dir: None,
        branch_fraction: 0.0,
        parent_frac_ratio: 0.0,
    }
}

fn tiny_instance() -> MilpInstance {
    MilpInstance::new(
        "tiny",
        1,
        vec![1.0],
        vec![SparseRow::new(vec![(0, 1.0)])],
        vec![RowSense::Ge],
        vec![1.0],
        vec![0.0],
        vec![5.0],
        vec![VarType::Continuous],
    )
    .unwrap()
}

#[test]
fn counting_one_var_one_constraint() {
    let inst = tiny_instance();
    let tree = tree_stats(1.0);
    let node = solved_node(&inst, LocalBounds::new(), 0, 0);
    let g = encode_bipartite(&inst, &node, &tree).unwrap();
    assert_eq!(g.num_cons, 1);
    assert_eq!(g.num_vars, 1);
    assert_eq!(g.cons_feats.len(), 3);
    assert_eq!(g.var_feats.len(), 6);
    assert_eq!(g.edges.len(), 1);
    assert!(g.all_finite());
}

#[test]
fn unsolved_node_errors() {
    let inst = tiny_instance();
    let tree = tree_stats(1.0);
    let mut node = solved_node(&inst, LocalBounds::new(), 0, 0);
    node.lp = LpResult {
        status: LpStatus::Infeasible,
        x: None,
        objective: None,
        iterations: 0,
    };
    assert!(encode_bipartite(&inst, &node, &tree).is_err());
}

#[test]
fn edge_count_matches_nnz_on_family_instance() {
    let inst = instance_gen::gen_fcmcnf(4, 3, 0.3, &instance_gen::FcmcnfParams::default()).unwrap();
    let tree = tree_stats(0.0);
    let node = solved_node(&inst, LocalBounds::new(), 0, 0);
    let g = encode_bipartite(&inst, &node, &tree).unwrap();
    assert_eq!(g.edges.len(), inst.nnz());
    assert!(g.all_finite());
}

#[test]
fn child_differs_only_in_branched_variable_and_globals() {
    let inst = instance_gen::gen_gisp(6, 5, 0.6, &instance_gen::GispParams::default());
    let tree = tree_stats(-400.0);
    let root = solved_node(&inst, LocalBounds::new(), 0, 0);
    let child_bounds = LocalBounds::new()
        .tightened(&inst, 0, f64::NEG_INFINITY, 0.0)
        .unwrap();
    let child = solved_node(&inst, child_bounds, 1, 1);

    let ga = encode_bipartite(&inst, &root, &tree).unwrap();
    let gb = encode_bipartite(&inst, &child, &tree).unwrap();
    assert_eq!(ga.cons_feats, gb.cons_feats);
    assert_eq!(ga.edges, gb.edges);
    for j in 0..inst.num_vars {
        let a = &ga.var_feats[j * 6..(j + 1) * 6];
        let b = &gb.var_feats[j * 6..(j + 1) * 6];
        if j == 0 {
            assert_ne!(a, b, "branched variable's bounds must change");
        } else {
            assert_eq!(a, b, "untouched variable {j} must be identical");
        }
    }
}

/// Permuting variables and constraints permutes rows and edges and changes
/// nothing else.
#[test]
fn permutation_equivariance() {
    let inst = instance_gen::gen_maxsat(6, 2, 0.6);
    let nv = inst.num_vars;
    let nc = inst.num_cons();
    // Reversal as the permutation: var j -> nv-1-j, row i -> nc-1-i.
    let vperm: Vec<usize> = (0..nv).rev().collect();
    let cperm: Vec<usize> = (0..nc).rev().collect();

    let permuted = MilpInstance::new(
        inst.name.clone(),
        nv,
        {
            let mut c = vec![0.0; nv];
            for j in 0..nv {
                c[vperm[j]] = inst.objective[j];
            }
            c
        },
        cperm
            .iter()
            .map(|&src| {
                // Row at new position i comes from old row index where
                // cperm[old] == i; with reversal, old = nc-1-i.
                let row = &inst.rows[src];
                let mut entries: Vec<(usize, f64)> =
                    row.entries.iter().map(|&(j, a)| (vperm[j], a)).collect();
                entries.sort_by_key(|&(j, _)| j);
                SparseRow::new(entries)
            })
            .collect(),
        cperm.iter().map(|&src| inst.senses[src]).collect(),
        cperm.iter().map(|&src| inst.rhs[src]).collect(),
        {
            let mut l = vec![0.0; nv];
            for j in 0..nv {
                l[vperm[j]] = inst.lower[j];
            }
            l
        },
        {
            let mut u = vec![0.0; nv];
            for j in 0..nv {
                u[vperm[j]] = inst.upper[j];
            }
            u
        },
        {
            let mut t = vec![VarType::Continuous; nv];
            for j in 0..nv {
                t[vperm[j]] = inst.vtypes[j];
            }
            t
        },
    )
    .unwrap();

    let tree = tree_stats(-3.0);
    let node_a = solved_node(&inst, LocalBounds::new(), 0, 0);
    let node_b = solved_node(&permuted, LocalBounds::new(), 0, 0);
    let ga = encode_bipartite(&inst, &node_a, &tree).unwrap();
    let gb = encode_bipartite(&permuted, &node_b, &tree).unwrap();

    for j in 0..nv {
        assert_eq!(
            &ga.var_feats[j * 6..(j + 1) * 6],
            &gb.var_feats[vperm[j] * 6..(vperm[j] + 1) * 6],
            "var {j} features must move with the permutation"
        );
    }
    for i in 0..nc {
        assert_eq!(
            &ga.cons_feats[i * 3..(i + 1) * 3],
            &gb.cons_feats[cperm[i] * 3..(cperm[i] + 1) * 3]
        );
    }
    let mut mapped: Vec<(u32, u32, f64)> = ga
        .edges
        .iter()
        .map(|&(c, j, a)| (cperm[c as usize] as u32, vperm[j as usize] as u32, a))
        .collect();
    mapped.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut theirs = gb.edges.clone();
    theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(mapped, theirs);
}

#[test]
fn graph_round_trip() {
    let inst = instance_gen::gen_gisp(7, 9, 0.6, &instance_gen::GispParams::default());
    let tree = tree_stats(-500.0);
    let node = solved_node(&inst, LocalBounds::new(), 0, 0);
    let g = encode_bipartite(&inst, &node, &tree).unwrap();
    let mut buf = Vec::new();
    g.write_to(&mut buf).unwrap();
    let back = encoding::NodeBipartiteGraph::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(g, back);
}

#[test]
fn fixed_features_root_defaults() {
    let inst = tiny_instance();
    let tree = tree_stats(1.0);
    let node = solved_node(&inst, LocalBounds::new(), 0, 0);
    let f = encode_fixed(&inst, &node, &tree);
    assert_eq!(f.0.len(), FIXED_FEAT_DIM);
    assert_eq!(f.0[0], 0.0, "depth");
    assert_eq!(f.0[3], 0.0, "gap without incumbent");
    assert_eq!(f.0[4], 0.0, "direction at root");
    assert_eq!(f.0[8], 0.0, "incumbent count doubles as presence flag");
    assert!(f.all_finite());
}

#[test]
fn fixed_features_deterministic_and_depth_exact() {
    let inst = instance_gen::gen_maxsat(7, 4, 0.6);
    let tree = tree_stats(-10.0);
    let bounds = LocalBounds::new()
        .tightened(&inst, 0, 1.0, f64::INFINITY)
        .unwrap();
    let node = solved_node(&inst, bounds, 3, 2);
    let a = encode_fixed(&inst, &node, &tree);
    let b = encode_fixed(&inst, &node, &tree);
    assert_eq!(a, b);
    assert_eq!(a.0[0], 2.0);

    let mut buf = Vec::new();
    a.write_to(&mut buf).unwrap();
    let back = encoding::FixedFeatures::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(a, back);
}
