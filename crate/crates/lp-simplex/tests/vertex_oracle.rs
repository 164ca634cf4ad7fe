//! Randomized cross-check of the simplex against the independent
//! vertex-enumeration oracle (`lp_simplex::vertex_oracle`).

use lp_simplex::vertex_oracle::vertex_enumeration_optimum;
use lp_simplex::{solve_lp, LocalBounds, LpStatus};
use milp_core::{MilpInstance, RowSense, SparseRow, VarType};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_box_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MilpInstance {
    let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..0.0)).collect();
    let upper: Vec<f64> = lower
        .iter()
        .map(|&l| l + rng.random_range(0.5..6.0))
        .collect();
    let mut rows = Vec::new();
    let mut senses = Vec::new();
    let mut rhs = Vec::new();
    for _ in 0..m {
        let k = rng.random_range(1..=n);
        let mut cols: Vec<usize> = (0..n).collect();
        cols.shuffle(rng);
        cols.truncate(k);
        cols.sort_unstable();
        let entries: Vec<(usize, f64)> = cols
            .into_iter()
            .map(|j| {
                let mut a: f64 = rng.random_range(-5.0..5.0);
                if a.abs() < 0.1 {
                    a = if a >= 0.0 { 0.1 } else { -0.1 };
                }
                (j, a)
            })
            .collect();
        let sense = match rng.random_range(0..3) {
            0 => RowSense::Ge,
            1 => RowSense::Le,
            _ => RowSense::Eq,
        };
        rows.push(SparseRow::new(entries));
        senses.push(sense);
        rhs.push(rng.random_range(-8.0..8.0));
    }
    MilpInstance::new(
        "rand_lp",
        n,
        objective,
        rows,
        senses,
        rhs,
        lower,
        upper,
        vec![VarType::Continuous; n],
    )
    .unwrap()
}

/// 200 random bounded LPs: the simplex must agree with the oracle on both
/// feasibility and, when feasible, the optimal objective to 1e-7.
#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut feasible_count = 0;
    for case in 0..200 {
        // Mostly small instances, with some at the top of the size range.
        let (n, m) = if case % 10 == 9 {
            (rng.random_range(6..=8), rng.random_range(6..=10))
        } else {
            (rng.random_range(2..=5), rng.random_range(1..=6))
        };
        let inst = random_box_lp(&mut rng, n, m);
        let oracle = vertex_enumeration_optimum(&inst);
        let res = solve_lp(&inst, &LocalBounds::new()).unwrap();
        match (oracle, res.status) {
            (Some(best), LpStatus::Optimal) => {
                feasible_count += 1;
                let got = res.objective.unwrap();
                assert!(
                    (got - best).abs() <= 1e-7 * (1.0 + best.abs()),
                    "case {case}: simplex {got} vs oracle {best}\n{inst:?}"
                );
            }
            (None, LpStatus::Infeasible) => {}
            (oracle, status) => {
                panic!("case {case}: oracle {oracle:?} but simplex {status:?}\n{inst:?}")
            }
        }
    }
    // The generator should produce a healthy mix of feasible and infeasible.
    assert!(feasible_count >= 40, "only {feasible_count} feasible cases");
}

/// Local bound overrides must behave exactly like baked-in bounds.
#[test]
fn local_bounds_match_baked_in_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7_777);
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=5);
        let inst = random_box_lp(&mut rng, n, m);

        let j = rng.random_range(0..n);
        let (lb, ub) = (inst.lower[j], inst.upper[j]);
        let new_lb = lb + (ub - lb) * 0.25;
        let new_ub = ub - (ub - lb) * 0.25;
        let bounds = LocalBounds::new()
            .tightened(&inst, j, new_lb, new_ub)
            .unwrap();

        let mut baked = inst.clone();
        baked.lower[j] = new_lb;
        baked.upper[j] = new_ub;

        let a = solve_lp(&inst, &bounds).unwrap();
        let b = solve_lp(&baked, &LocalBounds::new()).unwrap();
        assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            assert!((a.objective.unwrap() - b.objective.unwrap()).abs() < 1e-7);
        }
    }
}
