//! Reference oracle for testing: brute-force vertex enumeration.
//!
//! For an LP whose variables all have finite bounds the feasible region is a
//! polytope, so an optimum (when the LP is feasible) is attained at a vertex,
//! i.e. a point where `n` constraints (rows treated as equalities, or
//! variable bounds) are active and linearly independent. This module
//! enumerates every candidate active set, solves the square system, filters
//! by feasibility, and minimizes directly. It shares nothing with the
//! simplex implementation and exists purely as an independent check.

use milp_core::{MilpInstance, RowSense};

const ORACLE_TOL: f64 = 1e-7;

#[derive(Clone, Copy)]
enum Active {
    Row(usize),
    VarLower(usize),
    VarUpper(usize),
}

fn solve_square(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-10 {
            return false;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        for r in 0..n {
            if r != col {
                let f = a[r * n + col] / a[col * n + col];
                if f != 0.0 {
                    for c in col..n {
                        a[r * n + c] -= f * a[col * n + c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    for col in 0..n {
        b[col] /= a[col * n + col];
    }
    true
}

fn feasible(inst: &MilpInstance, x: &[f64]) -> bool {
    for j in 0..inst.num_vars {
        if x[j] < inst.lower[j] - ORACLE_TOL || x[j] > inst.upper[j] + ORACLE_TOL {
            return false;
        }
    }
    for (i, row) in inst.rows.iter().enumerate() {
        let v = row.dot(x);
        let ok = match inst.senses[i] {
            RowSense::Ge => v >= inst.rhs[i] - ORACLE_TOL,
            RowSense::Le => v <= inst.rhs[i] + ORACLE_TOL,
            RowSense::Eq => (v - inst.rhs[i]).abs() <= ORACLE_TOL,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Minimum objective over all feasible vertices, or `None` when no vertex is
/// feasible (which, for a box-bounded LP, means the LP is infeasible).
/// Requires every variable bound to be finite.
pub fn vertex_enumeration_optimum(inst: &MilpInstance) -> Option<f64> {
    assert!(
        (0..inst.num_vars).all(|j| inst.lower[j].is_finite() && inst.upper[j].is_finite()),
        "vertex enumeration requires a box-bounded LP"
    );
    let n = inst.num_vars;
    let mut candidates: Vec<Active> = Vec::new();
    for i in 0..inst.num_cons() {
        candidates.push(Active::Row(i));
    }
    for j in 0..n {
        candidates.push(Active::VarLower(j));
        if inst.upper[j] > inst.lower[j] {
            candidates.push(Active::VarUpper(j));
        }
    }
    if candidates.len() < n {
        return None;
    }

    let mut best: Option<f64> = None;
    let mut choice: Vec<usize> = (0..n).collect();
    loop {
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for (r, &ci) in choice.iter().enumerate() {
            match candidates[ci] {
                Active::Row(i) => {
                    for &(j, v) in &inst.rows[i].entries {
                        a[r * n + j] = v;
                    }
                    b[r] = inst.rhs[i];
                }
                Active::VarLower(j) => {
                    a[r * n + j] = 1.0;
                    b[r] = inst.lower[j];
                }
                Active::VarUpper(j) => {
                    a[r * n + j] = 1.0;
                    b[r] = inst.upper[j];
                }
            }
        }
        if solve_square(&mut a, &mut b, n) && feasible(inst, &b) {
            let obj: f64 = inst
                .objective
                .iter()
                .zip(b.iter())
                .map(|(c, v)| c * v)
                .sum();
            best = Some(match best {
                Some(cur) => cur.min(obj),
                None => obj,
            });
        }

        // Next lexicographic n-combination of candidate indices.
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if choice[k] < candidates.len() - (n - k) {
                choice[k] += 1;
                for t in k + 1..n {
                    choice[t] = choice[t - 1] + 1;
                }
                break;
            }
        }
    }
}
