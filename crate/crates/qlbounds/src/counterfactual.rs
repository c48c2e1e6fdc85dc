//! Counterfactual demand at new prices: membership, extremal quantity
//! bounds, and finiteness of the upper bound.
//!
//! The production path for the bounds is a compact linear program with
//! `(T+1)^2` order constraints over the candidate bundle and one utility
//! number per observation. The test-only [`halfspace_system`] enumerates
//! the equivalent family of halfspaces indexed by acyclic observation
//! sequences; its extrema must coincide with the linear-program bounds.

use crate::lp::{self, LinearProgram, SolveOutcome};
use crate::model::{dot, BoundInterval, CandidatePoint, Dataset, Epsilon};
use crate::rationality::{epsilon_star, epsilon_star_lp};
use crate::seq::for_each_sequence;
use crate::{Error, Result, VALUE_TOL};

/// Default cap on `T` for the halfspace enumeration oracle.
pub const HALFSPACE_CAP: usize = 7;

/// Optional side conditions appended to the quantity-bound program:
/// bounds on expenditure `p_tilde . x_tilde` and per-good boxes.
#[derive(Clone, Debug, Default)]
pub struct ExpenditureConstraint {
    pub min_spend: Option<f64>,
    pub max_spend: Option<f64>,
    /// Per-good `[lo, hi]` bounds; use `f64::INFINITY` for an open top.
    pub quantity_box: Option<Vec<(f64, f64)>>,
}

impl ExpenditureConstraint {
    fn check(&self, k: usize) -> Result<()> {
        if let (Some(lo), Some(hi)) = (self.min_spend, self.max_spend) {
            if lo > hi {
                return Err(Error::InvalidInput(format!(
                    "expenditure bounds are crossed: {lo} > {hi}"
                )));
            }
        }
        if let Some(bx) = &self.quantity_box {
            if bx.len() != k {
                return Err(Error::InvalidInput(format!(
                    "quantity box has {} entries for {k} goods",
                    bx.len()
                )));
            }
            for &(lo, hi) in bx {
                if lo < 0.0 || lo > hi {
                    return Err(Error::InvalidInput(format!(
                        "invalid quantity box [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Whether the candidate tuple is consistent with the dataset at error
/// level `epsilon`: the augmented dataset's minimal error stays within
/// `epsilon` (up to the value tolerance).
pub fn member(d: &Dataset, epsilon: Epsilon, c: &CandidatePoint) -> Result<bool> {
    let augmented = d.augment(c)?;
    let star = epsilon_star_lp(&augmented)?;
    Ok(star.value() <= epsilon.value() + VALUE_TOL)
}

/// One halfspace `normal . x <= offset` generated by an acyclic sequence.
#[derive(Clone, Debug)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// The generating sequence of observation indices.
    pub sequence: Vec<usize>,
}

/// The full finite halfspace description of the counterfactual demand set
/// at a fixed price, together with the implicit `x >= 0` constraints.
#[derive(Clone, Debug)]
pub struct HalfspaceSystem {
    pub k: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl HalfspaceSystem {
    /// Membership test at absolute tolerance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter().all(|&v| v >= -tol)
            && self
                .halfspaces
                .iter()
                .all(|h| dot(&h.normal, x) <= h.offset + tol)
    }

    /// Extremal values of coordinate `good` over the system, solved as a
    /// small linear program in the bundle alone.
    pub fn coordinate_bounds(&self, good: usize) -> Result<BoundInterval> {
        let mut objective = vec![0.0; self.k];
        objective[good] = 1.0;
        let mut prog = LinearProgram::new(self.k, objective);
        for h in &self.halfspaces {
            prog.push_le(h.normal.clone(), h.offset);
        }
        let upper = match lp::solve(&prog)? {
            SolveOutcome::Optimal { value, .. } => value,
            SolveOutcome::Unbounded => f64::INFINITY,
            SolveOutcome::Infeasible => return Ok(BoundInterval::infeasible()),
        };
        let lower = match lp::solve_min(&prog)? {
            SolveOutcome::Optimal { value, .. } => value.max(0.0),
            SolveOutcome::Infeasible => return Ok(BoundInterval::infeasible()),
            SolveOutcome::Unbounded => unreachable!("coordinates are bounded below by zero"),
        };
        Ok(BoundInterval::feasible(lower, upper))
    }
}

/// Enumerates the halfspace description of the counterfactual demand set
/// (test oracle; refuses `T > cap`). One halfspace per acyclic sequence
/// `{t_m}` of length `M >= 1`:
///
/// ```text
/// (p~ - p^{t_M}) . x <= (M+1) e + p~ . x^{t_1} - p^{t_M} . x^{t_M}
///                       - sum_{m<M} p^{t_m} . (x^{t_m} - x^{t_{m+1}})
/// ```
pub fn halfspace_system(
    d: &Dataset,
    epsilon: Epsilon,
    p_tilde: &[f64],
    cap: usize,
) -> Result<HalfspaceSystem> {
    check_price(d, p_tilde)?;
    let t = d.t();
    if t > cap {
        return Err(Error::CapExceeded { t, cap });
    }
    // below the minimal error the data's own cycles already empty the
    // set, which no candidate halfspace can express
    let star = epsilon_star(d).value();
    if epsilon.value() < star - VALUE_TOL {
        return Err(Error::BelowMinimalEpsilon {
            epsilon: epsilon.value(),
            epsilon_star: star,
        });
    }
    let e = epsilon.value();
    let mut halfspaces = Vec::new();
    for_each_sequence(t, t, None, |seq| {
        let m = seq.len();
        let first = seq[0];
        let last = seq[m - 1];
        let p_last = d.price(last);
        let normal: Vec<f64> = p_tilde.iter().zip(p_last).map(|(a, b)| a - b).collect();
        let mut offset =
            (m as f64 + 1.0) * e + dot(p_tilde, d.quantity(first)) - dot(p_last, d.quantity(last));
        for i in 0..m - 1 {
            let pm = d.price(seq[i]);
            offset -= dot(pm, d.quantity(seq[i])) - dot(pm, d.quantity(seq[i + 1]));
        }
        halfspaces.push(Halfspace {
            normal,
            offset,
            sequence: seq.to_vec(),
        });
    });
    Ok(HalfspaceSystem {
        k: d.k(),
        halfspaces,
    })
}

/// Bounds together with bundles attaining the finite endpoints.
#[derive(Clone, Debug)]
pub struct QuantityBoundsDetail {
    pub interval: BoundInterval,
    /// A full bundle attaining the lower endpoint.
    pub argmin: Option<Vec<f64>>,
    /// A full bundle attaining the upper endpoint (absent when infinite).
    pub argmax: Option<Vec<f64>>,
}

/// Extremal quantities of good `good` at price `p_tilde` allowing error
/// `epsilon`, from the compact linear program over the candidate bundle
/// and per-observation utility numbers.
///
/// Returns an infeasible interval when `epsilon` is below the dataset's
/// minimal error, or when the extra constraints empty the set. An upper
/// endpoint of `+inf` records an unbounded program, never a large float.
pub fn quantity_bounds(
    d: &Dataset,
    epsilon: Epsilon,
    p_tilde: &[f64],
    good: usize,
    extra: Option<&ExpenditureConstraint>,
) -> Result<BoundInterval> {
    Ok(quantity_bounds_detail(d, epsilon, p_tilde, good, extra)?.interval)
}

/// As [`quantity_bounds`], also reporting bundles that attain the
/// endpoints. Any returned bundle is itself a consistent counterfactual
/// demand at `p_tilde`, which makes this the sampling device for members
/// of the counterfactual set.
pub fn quantity_bounds_detail(
    d: &Dataset,
    epsilon: Epsilon,
    p_tilde: &[f64],
    good: usize,
    extra: Option<&ExpenditureConstraint>,
) -> Result<QuantityBoundsDetail> {
    check_price(d, p_tilde)?;
    let k = d.k();
    if good >= k {
        return Err(Error::InvalidInput(format!(
            "good index {good} out of range for {k} goods"
        )));
    }
    if let Some(x) = extra {
        x.check(k)?;
    }
    if epsilon.value() < epsilon_star(d).value() - VALUE_TOL {
        return Ok(QuantityBoundsDetail {
            interval: BoundInterval::infeasible(),
            argmin: None,
            argmax: None,
        });
    }

    let base = candidate_program(d, epsilon.value(), p_tilde);
    let mut objective = vec![0.0; base.n_vars];
    objective[good] = 1.0;
    let mut prog = LinearProgram { objective, ..base };
    if let Some(x) = extra {
        append_extra(&mut prog, p_tilde, k, x);
    }

    let infeasible = QuantityBoundsDetail {
        interval: BoundInterval::infeasible(),
        argmin: None,
        argmax: None,
    };
    let (upper, argmax) = match lp::solve(&prog)? {
        SolveOutcome::Optimal { value, solution } => (value, Some(solution[..k].to_vec())),
        SolveOutcome::Unbounded => (f64::INFINITY, None),
        SolveOutcome::Infeasible => return Ok(infeasible),
    };
    let (lower, argmin) = match lp::solve_min(&prog)? {
        SolveOutcome::Optimal { value, solution } => (value.max(0.0), Some(solution[..k].to_vec())),
        SolveOutcome::Infeasible => return Ok(infeasible),
        SolveOutcome::Unbounded => unreachable!("quantities are bounded below by zero"),
    };
    Ok(QuantityBoundsDetail {
        interval: BoundInterval::feasible(lower, upper),
        argmin,
        argmax,
    })
}

/// Whether the upper quantity bound at `p_tilde` is finite: decided by the
/// separation program for membership of `p_tilde` in the interior of the
/// upper comprehensive convex hull of the observed prices.
pub fn upper_bound_finite(d: &Dataset, p_tilde: &[f64]) -> Result<bool> {
    check_price(d, p_tilde)?;
    Ok(cco_margin(d.prices(), p_tilde)? > 1e-9)
}

/// Maximal componentwise margin `delta` such that
/// `p_tilde >= sum a_t p^t + delta` over convex weights `a`; positive
/// inside the interior of the hull, nonnegative on the hull itself.
pub(crate) fn cco_margin(prices: &[Vec<f64>], p_tilde: &[f64]) -> Result<f64> {
    let t = prices.len();
    let k = p_tilde.len();
    if prices.iter().any(|p| p.len() != k) {
        return Err(Error::InvalidInput(format!(
            "margin query has {k} goods but the price set does not"
        )));
    }
    // variables: a_1..a_T >= 0, delta free
    let n = t + 1;
    let mut objective = vec![0.0; n];
    objective[t] = 1.0;
    let mut prog = LinearProgram::new(n, objective);
    prog.set_free(t);
    for dim in 0..k {
        let mut row = vec![0.0; n];
        for (j, p) in prices.iter().enumerate() {
            row[j] = p[dim];
        }
        row[t] = 1.0;
        prog.push_le(row, p_tilde[dim]);
    }
    let mut simplex_row = vec![1.0; n];
    simplex_row[t] = 0.0;
    prog.push_eq(simplex_row, 1.0);
    match lp::solve(&prog)? {
        SolveOutcome::Optimal { value, .. } => Ok(value),
        other => unreachable!("the margin program is feasible and bounded: {other:?}"),
    }
}

/// The shared constraint block of the candidate-bundle program:
/// variables `[x_1..x_K, u^1..u^T, u~]`, all nonnegative, no objective.
fn candidate_program(d: &Dataset, e: f64, p_tilde: &[f64]) -> LinearProgram {
    let t = d.t();
    let k = d.k();
    let n = k + t + 1;
    let u = |r: usize| k + r;
    let u_cand = k + t;
    let mut prog = LinearProgram::new(n, vec![0.0; n]);

    // pairwise data inequalities
    for r in 0..t {
        let pr = d.price(r);
        for s in 0..t {
            if r == s {
                continue;
            }
            let mut row = vec![0.0; n];
            row[u(s)] += 1.0;
            row[u(r)] -= 1.0;
            let rhs = dot(pr, d.quantity(s)) - dot(pr, d.quantity(r)) + e;
            prog.push_le(row, rhs);
        }
    }
    // candidate utility against each observation: u~ <= u^r + p^r.(x - x^r) + e
    for r in 0..t {
        let pr = d.price(r);
        let mut row = vec![0.0; n];
        row[u_cand] = 1.0;
        row[u(r)] = -1.0;
        for j in 0..k {
            row[j] = -pr[j];
        }
        prog.push_le(row, -dot(pr, d.quantity(r)) + e);
    }
    // each observation against the candidate price: u^r <= u~ + p~.(x^r - x) + e
    for r in 0..t {
        let mut row = vec![0.0; n];
        row[u(r)] = 1.0;
        row[u_cand] = -1.0;
        row[..k].copy_from_slice(p_tilde);
        prog.push_le(row, dot(p_tilde, d.quantity(r)) + e);
    }
    prog
}

fn append_extra(
    prog: &mut LinearProgram,
    p_tilde: &[f64],
    k: usize,
    extra: &ExpenditureConstraint,
) {
    let n = prog.n_vars;
    if let Some(hi) = extra.max_spend {
        let mut row = vec![0.0; n];
        row[..k].copy_from_slice(p_tilde);
        prog.push_le(row, hi);
    }
    if let Some(lo) = extra.min_spend {
        let mut row = vec![0.0; n];
        for j in 0..k {
            row[j] = -p_tilde[j];
        }
        prog.push_le(row, -lo);
    }
    if let Some(bx) = &extra.quantity_box {
        for (j, &(lo, hi)) in bx.iter().enumerate() {
            if lo > 0.0 {
                let mut row = vec![0.0; n];
                row[j] = -1.0;
                prog.push_le(row, -lo);
            }
            if hi.is_finite() {
                let mut row = vec![0.0; n];
                row[j] = 1.0;
                prog.push_le(row, hi);
            }
        }
    }
}

fn check_price(d: &Dataset, p_tilde: &[f64]) -> Result<()> {
    if p_tilde.len() != d.k() {
        return Err(Error::InvalidInput(format!(
            "price vector has {} entries for {} goods",
            p_tilde.len(),
            d.k()
        )));
    }
    if !p_tilde.iter().all(|&p| p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidInput(
            "counterfactual prices must be strictly positive".into(),
        ));
    }
    Ok(())
}
