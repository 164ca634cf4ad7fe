use milp_core::{
    check_feasible, eval_objective, read_instance, read_instance_str, write_instance,
    write_instance_string, MilpInstance, RowSense, SparseRow, VarType,
};
use proptest::prelude::*;

fn arb_bound() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![
        (-100.0..100.0f64, 0.0..100.0f64).prop_map(|(lb, w)| (lb, lb + w)),
        (-100.0..100.0f64).prop_map(|lb| (lb, f64::INFINITY)),
        (-100.0..100.0f64).prop_map(|ub| (f64::NEG_INFINITY, ub)),
        Just((f64::NEG_INFINITY, f64::INFINITY)),
    ]
}

fn arb_vtype() -> impl Strategy<Value = VarType> {
    prop_oneof![
        Just(VarType::Binary),
        Just(VarType::Integer),
        Just(VarType::Continuous),
    ]
}

fn arb_instance() -> impl Strategy<Value = MilpInstance> {
    (1usize..6, 0usize..5).prop_flat_map(|(nv, nc)| {
        let objective = proptest::collection::vec(-50.0..50.0f64, nv);
        let vars = proptest::collection::vec((arb_bound(), arb_vtype()), nv);
        let rows = proptest::collection::vec(
            (
                proptest::collection::btree_map(0..nv, -10.0..10.0f64, 1..=nv),
                prop_oneof![Just(RowSense::Ge), Just(RowSense::Le), Just(RowSense::Eq)],
                -20.0..20.0f64,
            ),
            nc,
        );
        (objective, vars, rows).prop_map(move |(objective, vars, rows)| {
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            let mut vtypes = Vec::new();
            for ((lb, ub), t) in vars {
                if t == VarType::Binary {
                    lower.push(0.0);
                    upper.push(1.0);
                } else {
                    lower.push(lb);
                    upper.push(ub);
                }
                vtypes.push(t);
            }
            let mut sparse = Vec::new();
            let mut senses = Vec::new();
            let mut rhs = Vec::new();
            for (entries, sense, b) in rows {
                let entries: Vec<(usize, f64)> = entries
                    .into_iter()
                    .filter(|&(_, a)| a != 0.0)
                    .collect();
                if entries.is_empty() {
                    continue;
                }
                sparse.push(SparseRow::new(entries));
                senses.push(sense);
                rhs.push(b);
            }
            MilpInstance::new(
                "prop", nv, objective, sparse, senses, rhs, lower, upper, vtypes,
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip_preserves_structure(inst in arb_instance()) {
        let text = write_instance_string(&inst);
        let back = read_instance_str(&text).unwrap();
        prop_assert_eq!(&inst, &back);
    }

    #[test]
    fn round_trip_preserves_evaluation(inst in arb_instance(), seed in 0u64..1000) {
        let back = read_instance_str(&write_instance_string(&inst)).unwrap();
        // A crude deterministic pseudo-point: values derived from the seed.
        let x: Vec<f64> = (0..inst.num_vars)
            .map(|j| ((seed.wrapping_mul(31).wrapping_add(j as u64) % 7) as f64) - 3.0)
            .collect();
        prop_assert_eq!(
            eval_objective(&inst, &x).unwrap().to_bits(),
            eval_objective(&back, &x).unwrap().to_bits()
        );
        prop_assert_eq!(
            check_feasible(&inst, &x, 1e-6),
            check_feasible(&back, &x, 1e-6)
        );
    }
}

#[test]
fn file_round_trip() {
    let inst = MilpInstance::new(
        "file_rt",
        2,
        vec![1.0, 2.0],
        vec![SparseRow::new(vec![(0, 1.0), (1, 1.0)])],
        vec![RowSense::Le],
        vec![3.0],
        vec![0.0, 0.0],
        vec![5.0, f64::INFINITY],
        vec![VarType::Integer, VarType::Continuous],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.milp");
    write_instance(&inst, &path).unwrap();
    let back = read_instance(&path).unwrap();
    assert_eq!(inst, back);
}
