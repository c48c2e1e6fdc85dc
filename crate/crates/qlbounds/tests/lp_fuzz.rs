//! Randomized cross-check of the simplex against an independent
//! vertex-enumeration oracle.
//!
//! For small programs over nonnegative variables, the feasible set is a
//! pointed polyhedron: if it is nonempty it has a vertex, and if the
//! program is bounded the optimum is attained at one. The oracle
//! therefore enumerates every choice of `n` tight constraints among the
//! inequality rows and the coordinate planes, solves the little linear
//! system by elimination, keeps the feasible solutions, and maximizes
//! directly. No simplex machinery is shared with the production solver.

#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

use qlbounds::lp::{self, LinearProgram, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves `rows * x = rhs` for square systems by Gaussian elimination;
/// `None` when singular.
fn solve_square(mut rows: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for k in 0..n {
        let piv =
            (k..n).max_by(|&a, &b| rows[a][k].abs().partial_cmp(&rows[b][k].abs()).unwrap())?;
        if rows[piv][k].abs() < 1e-10 {
            return None;
        }
        rows.swap(k, piv);
        rhs.swap(k, piv);
        for i in (k + 1)..n {
            let f = rows[i][k] / rows[k][k];
            if f != 0.0 {
                for j in k..n {
                    rows[i][j] -= f * rows[k][j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for j in (k + 1)..n {
            acc -= rows[k][j] * x[j];
        }
        x[k] = acc / rows[k][k];
    }
    Some(x)
}

/// Best objective value over the vertices of `{Ax <= b, x >= 0}`, or
/// `None` when no feasible vertex exists (the set is empty, since it is
/// pointed). Equalities must already be expanded into inequality pairs.
fn vertex_oracle(n: usize, ineq: &[(Vec<f64>, f64)], objective: &[f64]) -> Option<f64> {
    // hyperplane catalogue: every inequality row plus every coordinate plane
    let mut planes: Vec<(Vec<f64>, f64)> = ineq.to_vec();
    for j in 0..n {
        let mut row = vec![0.0; n];
        row[j] = 1.0;
        planes.push((row, 0.0));
    }
    let feasible = |x: &[f64]| {
        x.iter().all(|&v| v >= -1e-7)
            && ineq
                .iter()
                .all(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= b + 1e-7)
    };
    let mut best: Option<f64> = None;
    let mut chosen = vec![0usize; n];

    fn visit(
        planes: &[(Vec<f64>, f64)],
        start: usize,
        depth: usize,
        chosen: &mut Vec<usize>,
        n: usize,
        feasible: &dyn Fn(&[f64]) -> bool,
        objective: &[f64],
        best: &mut Option<f64>,
    ) {
        if depth == n {
            let rows: Vec<Vec<f64>> = chosen.iter().map(|&i| planes[i].0.clone()).collect();
            let rhs: Vec<f64> = chosen.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = solve_square(rows, rhs) {
                if feasible(&x) {
                    let val = objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
                    if best.is_none_or(|b| val > b) {
                        *best = Some(val);
                    }
                }
            }
            return;
        }
        for i in start..planes.len() {
            chosen[depth] = i;
            visit(
                planes,
                i + 1,
                depth + 1,
                chosen,
                n,
                feasible,
                objective,
                best,
            );
        }
    }
    visit(
        &planes,
        0,
        0,
        &mut chosen,
        n,
        &feasible,
        objective,
        &mut best,
    );
    best
}

#[test]
fn simplex_agrees_with_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut optimal = 0;
    let mut infeasible = 0;
    for trial in 0..300 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=5);
        let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut prog = LinearProgram::new(n, objective.clone());
        let mut ineq: Vec<(Vec<f64>, f64)> = Vec::new();
        for _ in 0..m {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let rhs = rng.gen_range(-1.0..2.0);
            if rng.gen_bool(0.25) {
                // an equality, expanded for the oracle
                prog.push_eq(row.clone(), rhs);
                ineq.push((row.clone(), rhs));
                ineq.push((row.iter().map(|v| -v).collect(), -rhs));
            } else {
                prog.push_le(row.clone(), rhs);
                ineq.push((row, rhs));
            }
        }
        // a box keeps every program bounded, so the three-way contract
        // reduces to optimal-vs-infeasible here
        for j in 0..n {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            prog.push_le(row.clone(), 10.0);
            ineq.push((row, 10.0));
        }

        let out = lp::solve(&prog).unwrap();
        match vertex_oracle(n, &ineq, &objective) {
            Some(oracle_val) => {
                optimal += 1;
                let val = out.value().unwrap_or_else(|| {
                    panic!("trial {trial}: solver says {out:?}, oracle {oracle_val}")
                });
                assert!(
                    (val - oracle_val).abs() <= 1e-6,
                    "trial {trial}: simplex {val} vs vertex oracle {oracle_val}"
                );
            }
            None => {
                infeasible += 1;
                assert_eq!(
                    out,
                    lp::SolveOutcome::Infeasible,
                    "trial {trial}: oracle found no feasible vertex"
                );
            }
        }
    }
    assert!(
        optimal > 100 && infeasible > 20,
        "draw split {optimal}/{infeasible}"
    );
}

#[test]
fn solver_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let mut prog = LinearProgram::new(n, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        for _ in 0..rng.gen_range(1..=5) {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            match rng.gen_range(0..3) {
                0 => prog.push_eq(row, rng.gen_range(-0.5..1.0)),
                _ => prog.push_le(row, rng.gen_range(-0.5..1.5)),
            }
        }
        for j in 0..n {
            if rng.gen_bool(0.3) {
                prog.set_free(j);
            }
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            prog.push_le(row.clone(), 8.0);
            row[j] = -1.0;
            prog.push_le(row, 8.0);
        }
        let a = lp::solve(&prog).unwrap();
        let b = lp::solve(&prog).unwrap();
        match (&a, &b) {
            (
                lp::SolveOutcome::Optimal {
                    value: va,
                    solution: xa,
                },
                lp::SolveOutcome::Optimal {
                    value: vb,
                    solution: xb,
                },
            ) => {
                assert_eq!(va.to_bits(), vb.to_bits());
                assert_eq!(xa.len(), xb.len());
                for (u, v) in xa.iter().zip(xb) {
                    assert_eq!(u.to_bits(), v.to_bits());
                }
            }
            _ => assert_eq!(a, b),
        }
    }
}

#[test]
fn relation_enum_is_exposed() {
    // the canonical-form surface exports both relations
    let c = qlbounds::lp::Constraint {
        row: vec![1.0],
        relation: Relation::Eq,
        rhs: 1.0,
    };
    assert_eq!(c.relation, Relation::Eq);
    assert_ne!(Relation::Le, Relation::Eq);
}
