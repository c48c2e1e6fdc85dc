//! Minimal approximation error of a dataset and the rationalizability test.
//!
//! The minimal error is computed three independent ways: as a linear
//! program over utility numbers, as a maximum mean directed cycle over the
//! observation graph (Karp's algorithm), and by exhaustive cycle
//! enumeration at small `T`. The three routes agree within tolerance and
//! cross-check each other in the test suite.
//!
//! Graph convention: the complete digraph on observations with edge weight
//! `w(r -> s) = p^r . (x^r - x^s)`; a cycle's mean weight is the average of
//! its edge weights, and the minimal error is the largest cycle mean,
//! clamped at zero.

#![allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra

use crate::lp::{self, LinearProgram};
use crate::model::{dot, Dataset, Epsilon};
use crate::seq::for_each_cycle;
use crate::{Error, Result, VALUE_TOL};

/// Default cap on `T` for the exhaustive cycle oracle.
pub const BRUTEFORCE_CAP: usize = 8;

/// A directed cycle of observation indices (0-based, pairwise distinct)
/// together with its mean weight.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleCertificate {
    pub sequence: Vec<usize>,
    pub mean_weight: f64,
}

/// Mean edge weight of the directed cycle `sequence` in `d`, with
/// wraparound from the last index to the first.
pub fn cycle_mean(d: &Dataset, sequence: &[usize]) -> f64 {
    let m = sequence.len();
    assert!(m >= 2, "a cycle needs at least two observations");
    let mut total = 0.0;
    for i in 0..m {
        let r = sequence[i];
        let s = sequence[(i + 1) % m];
        let pr = d.price(r);
        total += dot(pr, d.quantity(r)) - dot(pr, d.quantity(s));
    }
    total / m as f64
}

/// Minimal rationalizing approximation error via the linear program over
/// utility numbers: minimize `e` subject to
/// `u^s <= u^r + p^r . (x^s - x^r) + e` for all pairs, `u, e >= 0`.
pub fn epsilon_star_lp(d: &Dataset) -> Result<Epsilon> {
    let t = d.t();
    let n = t + 1; // u^1..u^T and e
    let e_idx = t;
    let mut objective = vec![0.0; n];
    objective[e_idx] = 1.0;
    let mut lp = LinearProgram::new(n, objective);
    for r in 0..t {
        for s in 0..t {
            if r == s {
                continue;
            }
            let mut row = vec![0.0; n];
            row[s] += 1.0;
            row[r] -= 1.0;
            row[e_idx] = -1.0;
            let pr = d.price(r);
            let rhs = dot(pr, d.quantity(s)) - dot(pr, d.quantity(r));
            lp.push_le(row, rhs);
        }
    }
    match lp::solve_min(&lp)? {
        lp::SolveOutcome::Optimal { value, .. } => Epsilon::new(value.max(0.0)),
        other => {
            unreachable!("the minimal-error program is always feasible and bounded: {other:?}")
        }
    }
}

/// Minimal rationalizing approximation error via Karp's maximum mean cycle
/// algorithm, with an attaining cycle when the unclamped maximum is
/// positive.
pub fn epsilon_star_cycles(d: &Dataset) -> (Epsilon, Option<CycleCertificate>) {
    let t = d.t();
    if t < 2 {
        return (Epsilon::ZERO, None);
    }
    let w = edge_weights(d);
    let (lambda, cycle) = max_mean_cycle(&w);
    if lambda <= 0.0 {
        return (Epsilon::ZERO, None);
    }
    let mut sequence = cycle.unwrap_or_else(|| {
        find_cycle_above(&w, lambda - 1e-9)
            .expect("an attaining cycle exists for a positive maximum mean")
    });
    // canonical rotation: smallest index first, orientation preserved
    let lead = sequence
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap();
    sequence.rotate_left(lead);
    let mean_weight = cycle_mean(d, &sequence);
    (
        Epsilon::new(lambda).expect("positive mean"),
        Some(CycleCertificate {
            sequence,
            mean_weight,
        }),
    )
}

/// Minimal rationalizing approximation error by exhaustive enumeration of
/// all simple directed cycles. Test oracle only; refuses `T > cap`.
pub fn epsilon_star_bruteforce(d: &Dataset, cap: usize) -> Result<Epsilon> {
    let t = d.t();
    if t > cap {
        return Err(Error::CapExceeded { t, cap });
    }
    let mut best = 0.0f64;
    for_each_cycle(t, |cycle| {
        let m = cycle_mean(d, cycle);
        if m > best {
            best = m;
        }
    });
    Epsilon::new(best)
}

/// Production route for the minimal error: Karp's algorithm.
///
/// Note there is no pairwise shortcut even for a single good: the maximum
/// mean cycle can be attained only by a longer cycle (see the regression
/// test with a four-observation counterexample).
pub fn epsilon_star(d: &Dataset) -> Epsilon {
    epsilon_star_cycles(d).0
}

/// Largest violation of the pairwise approximate law of demand,
/// `max(0, max_{r,s} (p^r - p^s).(x^r - x^s) / 2)`. This is a lower bound
/// on the minimal error, cheap at `O(T^2 K)`.
pub fn pairwise_violation(d: &Dataset) -> f64 {
    let mut best = 0.0f64;
    for r in 0..d.t() {
        for s in (r + 1)..d.t() {
            let m = 0.5
                * (0..d.k())
                    .map(|k| {
                        (d.price(r)[k] - d.price(s)[k]) * (d.quantity(r)[k] - d.quantity(s)[k])
                    })
                    .sum::<f64>();
            if m > best {
                best = m;
            }
        }
    }
    best
}

/// Whether the dataset can be rationalized allowing error `epsilon`,
/// decided against the linear-program route at the documented tolerance.
pub fn is_rationalizable(d: &Dataset, epsilon: Epsilon) -> Result<bool> {
    let star = epsilon_star_lp(d)?;
    Ok(epsilon.value() >= star.value() - VALUE_TOL)
}

fn edge_weights(d: &Dataset) -> Vec<Vec<f64>> {
    let t = d.t();
    let mut w = vec![vec![0.0f64; t]; t];
    for r in 0..t {
        let pr = d.price(r);
        let own = dot(pr, d.quantity(r));
        for s in 0..t {
            if r != s {
                w[r][s] = own - dot(pr, d.quantity(s));
            }
        }
    }
    w
}

/// Karp's algorithm for the maximum mean cycle of a complete digraph given
/// by its weight matrix. Returns the maximum mean and, when the traceback
/// yields a cycle whose recomputed mean matches, that cycle.
fn max_mean_cycle(w: &[Vec<f64>]) -> (f64, Option<Vec<usize>>) {
    let n = w.len();
    debug_assert!(n >= 2);
    // dist[k][v]: maximum weight over walks of exactly k edges from node 0.
    let mut dist = vec![vec![f64::NEG_INFINITY; n]; n + 1];
    let mut pred = vec![vec![usize::MAX; n]; n + 1];
    dist[0][0] = 0.0;
    for k in 1..=n {
        for u in 0..n {
            let du = dist[k - 1][u];
            if du == f64::NEG_INFINITY {
                continue;
            }
            let wu = &w[u];
            for v in 0..n {
                if v == u {
                    continue;
                }
                let cand = du + wu[v];
                if cand > dist[k][v] {
                    dist[k][v] = cand;
                    pred[k][v] = u;
                }
            }
        }
    }

    let mut best: Option<(f64, usize)> = None;
    for v in 0..n {
        if dist[n][v] == f64::NEG_INFINITY {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..n {
            if dist[k][v] == f64::NEG_INFINITY {
                continue;
            }
            let ratio = (dist[n][v] - dist[k][v]) / (n - k) as f64;
            if ratio < worst {
                worst = ratio;
            }
        }
        match best {
            Some((b, _)) if b >= worst => {}
            _ => best = Some((worst, v)),
        }
    }
    let (lambda, v_star) = best.expect("complete digraph has walks of every length");

    // Trace the length-n walk back from the critical vertex and cut out a
    // cycle. The cycle on this walk is not guaranteed to attain the
    // maximum mean, so the caller verifies and falls back if needed.
    let mut walk = Vec::with_capacity(n + 1);
    let mut cur = v_star;
    walk.push(cur);
    for k in (1..=n).rev() {
        cur = pred[k][cur];
        walk.push(cur);
    }
    let cycle = cut_cycle(&walk).filter(|c| {
        let mean = c
            .iter()
            .enumerate()
            .map(|(i, &r)| w[r][c[(i + 1) % c.len()]])
            .sum::<f64>()
            / c.len() as f64;
        (mean - lambda).abs() <= 1e-9 * (1.0 + lambda.abs())
    });
    (lambda, cycle)
}

/// Extracts the first simple cycle from a walk (listed target-first) and
/// returns it in forward traversal order.
fn cut_cycle(walk: &[usize]) -> Option<Vec<usize>> {
    let mut seen = vec![false; walk.iter().copied().max()? + 1];
    let mut acc: Vec<usize> = Vec::new();
    for &node in walk {
        if seen[node] {
            let start = acc.iter().position(|&x| x == node).unwrap();
            let mut cycle = acc[start..].to_vec();
            cycle.reverse(); // the walk is stored target-first
            return Some(cycle);
        }
        seen[node] = true;
        acc.push(node);
    }
    None
}

/// Bellman-Ford negative-cycle extraction on costs `threshold - w`, which
/// finds a cycle whose mean weight exceeds `threshold` whenever one exists.
fn find_cycle_above(w: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = w.len();
    let mut dist = vec![0.0f64; n];
    let mut pred = vec![usize::MAX; n];
    let mut in_cycle = None;
    for _round in 0..n {
        let mut relaxed = None;
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let cand = dist[u] + (threshold - w[u][v]);
                if cand < dist[v] - 1e-15 {
                    dist[v] = cand;
                    pred[v] = u;
                    relaxed = Some(v);
                }
            }
        }
        relaxed?;
        in_cycle = relaxed;
    }
    // A vertex relaxed on round n sits on or leads into a negative cycle.
    let mut cur = in_cycle?;
    for _ in 0..n {
        cur = pred[cur];
    }
    let mut cycle = vec![cur];
    let mut node = pred[cur];
    while node != cur {
        cycle.push(node);
        node = pred[node];
    }
    cycle.reverse();
    Some(cycle)
}
