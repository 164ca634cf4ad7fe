//! Cross-checks the generated formulations against brute-force enumeration
//! and verifies that every generated instance is feasible and bounded.

use instance_gen::{gen_fcmcnf, gen_gisp, gen_maxsat, FcmcnfParams, GispParams};
use lp_simplex::{solve_lp, LocalBounds, LpStatus, SimplexRelaxation};
use milp_core::{brute_force_solve, check_feasible, EnumerationLimits, VarType};

#[test]
fn maxsat_triangle_optimum_is_minus_five() {
    // A near-complete graph on 3 nodes is a triangle: 6 clauses, 5 satisfiable.
    let inst = gen_maxsat(3, 1, 0.999);
    let sol = brute_force_solve(&inst, &EnumerationLimits::default(), &SimplexRelaxation)
        .unwrap()
        .unwrap();
    assert!((sol.objective + 5.0).abs() < 1e-9);
}

#[test]
fn maxsat_single_edge_objective_is_minus_two() {
    // n=3 with few edges; find a seed yielding exactly one edge.
    for seed in 0..200 {
        let inst = gen_maxsat(3, seed, 0.3);
        if inst.num_cons() == 2 {
            let sol =
                brute_force_solve(&inst, &EnumerationLimits::default(), &SimplexRelaxation)
                    .unwrap()
                    .unwrap();
            assert!((sol.objective + 2.0).abs() < 1e-9);
            return;
        }
    }
    panic!("no single-edge instance found in 200 seeds");
}

#[test]
fn gisp_no_edges_selects_all_nodes() {
    for seed in 0..200 {
        let inst = gen_gisp(4, seed, 0.05, &GispParams::default());
        if inst.num_cons() == 0 {
            let sol =
                brute_force_solve(&inst, &EnumerationLimits::default(), &SimplexRelaxation)
                    .unwrap()
                    .unwrap();
            assert!((sol.objective + 400.0).abs() < 1e-9);
            return;
        }
    }
    panic!("no edge-free instance found in 200 seeds");
}

#[test]
fn generated_instances_are_feasible_and_bounded() {
    let limits = EnumerationLimits::default();
    for seed in 0..10 {
        let fc = gen_fcmcnf(4, seed, 0.3, &FcmcnfParams::default()).unwrap();
        let ms = gen_maxsat(6, seed, 0.6);
        let gi = gen_gisp(6, seed, 0.6, &GispParams::default());
        for inst in [&fc, &ms, &gi] {
            let lp = solve_lp(inst, &LocalBounds::new()).unwrap();
            assert_eq!(lp.status, LpStatus::Optimal, "{} root LP", inst.name);
            let sol = brute_force_solve(inst, &limits, &SimplexRelaxation)
                .unwrap()
                .unwrap_or_else(|| panic!("{} should be feasible", inst.name));
            assert!(check_feasible(inst, &sol.values, 1e-6), "{}", inst.name);
            // Relaxation dominance.
            assert!(lp.objective.unwrap() <= sol.objective + 1e-6);
        }
    }
}

#[test]
fn fcmcnf_brute_force_matches_direct_structure() {
    // Every binary in FCMCNF is an arc indicator; flows are continuous.
    let inst = gen_fcmcnf(4, 5, 0.3, &FcmcnfParams::default()).unwrap();
    let binaries = inst
        .vtypes
        .iter()
        .filter(|t| **t == VarType::Binary)
        .count();
    assert!(binaries > 0);
    assert_eq!(inst.num_continuous_vars(), inst.num_vars - binaries);
}
