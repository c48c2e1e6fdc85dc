//! Explicit rationalizing utilities and conjugate-duality round trips.
//!
//! [`build_rationalizing_utility`] materializes a min-of-affine utility
//! that witnesses feasibility at any error level at or above the minimal
//! one, built from acyclic observation sequences rooted at observation 0
//! (any root works and shifts the utility by a constant; see the docs on
//! the function). [`verify_rationalization`] checks the defining
//! inequalities by maximizing each observation's regret with a linear
//! program, independently of how the utility was produced.

use crate::lp::{self, LinearProgram, SolveOutcome};
use crate::model::{dot, Dataset, Epsilon};
use crate::rationality::epsilon_star;
use crate::seq::for_each_sequence;
use crate::{Error, Result, VALUE_TOL};

/// Default cap on `T` for the sequence-built utility.
pub const CONSTRUCT_CAP: usize = 7;

/// A concave piecewise-affine utility `u(x) = min_j (slope_j . x + b_j)`.
///
/// Evaluation is the exact minimum over pieces, no tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseAffineUtility {
    pieces: Vec<(Vec<f64>, f64)>,
}

impl PiecewiseAffineUtility {
    pub fn new(pieces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput("need at least one affine piece".into()));
        };
        let k = first.0.len();
        if pieces.iter().any(|(s, _)| s.len() != k) {
            return Err(Error::InvalidInput("pieces differ in dimension".into()));
        }
        Ok(PiecewiseAffineUtility { pieces })
    }

    pub fn k(&self) -> usize {
        self.pieces[0].0.len()
    }

    pub fn pieces(&self) -> &[(Vec<f64>, f64)] {
        &self.pieces
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|(s, b)| dot(s, x) + b)
            .fold(f64::INFINITY, f64::min)
    }
}

/// A convex piecewise-affine indirect utility `V(p) = max_j (a_j . p + b_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseAffineIndirect {
    pieces: Vec<(Vec<f64>, f64)>,
}

impl PiecewiseAffineIndirect {
    pub fn new(pieces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput("need at least one affine piece".into()));
        };
        let k = first.0.len();
        if pieces.iter().any(|(s, _)| s.len() != k) {
            return Err(Error::InvalidInput("pieces differ in dimension".into()));
        }
        Ok(PiecewiseAffineIndirect { pieces })
    }

    pub fn k(&self) -> usize {
        self.pieces[0].0.len()
    }

    pub fn evaluate(&self, p: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|(s, b)| dot(s, p) + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds a utility that rationalizes `d` at level `epsilon`: one affine
/// piece per acyclic sequence rooted at observation 0, with slope the last
/// observation's price and intercept accumulating the expenditure terms
/// plus `M * epsilon`.
///
/// The root is fixed at observation 0; rooting elsewhere shifts the whole
/// utility by a constant, which no bound or difference can see.
///
/// Refuses `epsilon` below the minimal error and `T` above `cap`.
pub fn build_rationalizing_utility(
    d: &Dataset,
    epsilon: Epsilon,
    cap: usize,
) -> Result<PiecewiseAffineUtility> {
    let t = d.t();
    if t > cap {
        return Err(Error::CapExceeded { t, cap });
    }
    let star = epsilon_star(d).value();
    if epsilon.value() < star - VALUE_TOL {
        return Err(Error::BelowMinimalEpsilon {
            epsilon: epsilon.value(),
            epsilon_star: star,
        });
    }
    let e = epsilon.value();
    let mut pieces = Vec::new();
    for_each_sequence(t, t, Some(0), |seq| {
        let m = seq.len();
        let last = seq[m - 1];
        let slope = d.price(last).to_vec();
        let mut intercept = -dot(d.price(last), d.quantity(last)) + m as f64 * e;
        for i in 0..m - 1 {
            let pm = d.price(seq[i]);
            intercept += dot(pm, d.quantity(seq[i + 1])) - dot(pm, d.quantity(seq[i]));
        }
        pieces.push((slope, intercept));
    });
    PiecewiseAffineUtility::new(pieces)
}

/// Detailed outcome of a rationalization check.
#[derive(Clone, Debug)]
pub struct VerifyDetail {
    /// Worst excess of the optimal regret over the allowed `epsilon`
    /// across observations (negative when all inequalities hold).
    pub worst_excess: f64,
    /// Observations at which the regret program is unbounded above.
    pub unbounded_at: Vec<usize>,
}

impl VerifyDetail {
    pub fn ok(&self) -> bool {
        self.unbounded_at.is_empty() && self.worst_excess <= VALUE_TOL
    }
}

/// Checks that `u` rationalizes `d` at level `epsilon`: for every
/// observation, the maximum of `u(x) - p^t . x` over the orthant (solved
/// as a linear program over the utility's hypograph) must not exceed the
/// attained value `u(x^t) - p^t . x^t` by more than `epsilon`.
pub fn verify_rationalization(
    u: &PiecewiseAffineUtility,
    d: &Dataset,
    epsilon: Epsilon,
) -> Result<bool> {
    Ok(verify_rationalization_detail(u, d, epsilon)?.ok())
}

/// As [`verify_rationalization`], reporting the worst violation and any
/// observations with an unbounded regret program.
pub fn verify_rationalization_detail(
    u: &PiecewiseAffineUtility,
    d: &Dataset,
    epsilon: Epsilon,
) -> Result<VerifyDetail> {
    if u.k() != d.k() {
        return Err(Error::InvalidInput(format!(
            "utility over {} goods, dataset has {}",
            u.k(),
            d.k()
        )));
    }
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut unbounded_at = Vec::new();
    for t in 0..d.t() {
        match hypograph_max(u, d.price(t))? {
            None => unbounded_at.push(t),
            Some(sup) => {
                let attained = u.evaluate(d.quantity(t)) - dot(d.price(t), d.quantity(t));
                worst = worst.max(sup - attained - epsilon.value());
            }
        }
    }
    Ok(VerifyDetail {
        worst_excess: if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        },
        unbounded_at,
    })
}

/// The indirect utility `sup_x u(x) - p . x`, or `+inf` when unbounded.
pub fn indirect_utility(u: &PiecewiseAffineUtility, p: &[f64]) -> Result<f64> {
    if p.len() != u.k() {
        return Err(Error::InvalidInput(format!(
            "price has {} entries, utility over {} goods",
            p.len(),
            u.k()
        )));
    }
    if !p.iter().all(|&v| v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(
            "prices must be strictly positive".into(),
        ));
    }
    Ok(hypograph_max(u, p)?.unwrap_or(f64::INFINITY))
}

/// Maximizes `z - p . x` over the hypograph `z <= slope_j . x + b_j`,
/// `x >= 0`; `None` when unbounded above.
fn hypograph_max(u: &PiecewiseAffineUtility, p: &[f64]) -> Result<Option<f64>> {
    let k = u.k();
    let n = k + 1;
    let z = k;
    let mut objective = vec![0.0; n];
    objective[z] = 1.0;
    for j in 0..k {
        objective[j] = -p[j];
    }
    let mut prog = LinearProgram::new(n, objective);
    prog.set_free(z);
    for (slope, intercept) in u.pieces() {
        let mut row = vec![0.0; n];
        row[z] = 1.0;
        for j in 0..k {
            row[j] = -slope[j];
        }
        prog.push_le(row, *intercept);
    }
    match lp::solve(&prog)? {
        SolveOutcome::Optimal { value, .. } => Ok(Some(value)),
        SolveOutcome::Unbounded => Ok(None),
        SolveOutcome::Infeasible => unreachable!("the hypograph is never empty"),
    }
}

/// Conjugate round trip for a weakly decreasing convex piecewise-affine
/// indirect utility over a single good: builds the dual utility
/// `u_V(x) = inf_{p >= 0} V(p) + p x` as an explicit min-of-affine
/// function sampled at the candidate prices where the infimum can bind
/// (zero, every kink, and a point beyond the grid), recomputes the
/// indirect utility of the result, and compares with `V` on the grid.
pub fn dual_roundtrip_check(v: &PiecewiseAffineIndirect, grid: &[f64], tol: f64) -> Result<bool> {
    let u = conjugate_utility(v, grid)?;
    for &p in grid {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidInput("grid prices must be positive".into()));
        }
        let back = indirect_utility(&u, &[p])?;
        if (back - v.evaluate(&[p])).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The dual utility of a single-good decreasing convex max-of-affine
/// function, as a min-of-affine utility exact on `[0, max grid price]`.
pub fn conjugate_utility(
    v: &PiecewiseAffineIndirect,
    grid: &[f64],
) -> Result<PiecewiseAffineUtility> {
    if v.k() != 1 {
        return Err(Error::InvalidInput(
            "the conjugate construction handles a single good".into(),
        ));
    }
    if v.pieces.iter().any(|(a, _)| a[0] > 0.0) {
        return Err(Error::InvalidInput(
            "the indirect utility must be weakly decreasing (nonpositive slopes)".into(),
        ));
    }
    // Candidate prices: zero, every pairwise intersection of pieces, and a
    // point beyond everything of interest so the grid range is bracketed.
    let mut candidates = vec![0.0f64];
    let pieces = &v.pieces;
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            let (ai, bi) = (pieces[i].0[0], pieces[i].1);
            let (aj, bj) = (pieces[j].0[0], pieces[j].1);
            if (ai - aj).abs() > 1e-14 {
                let p = (bj - bi) / (ai - aj);
                if p > 0.0 && p.is_finite() {
                    candidates.push(p);
                }
            }
        }
    }
    let far = 2.0
        * (grid.iter().copied().fold(1.0f64, f64::max)
            + candidates.iter().copied().fold(0.0f64, f64::max)
            + 1.0);
    candidates.push(far);
    let conj_pieces: Vec<(Vec<f64>, f64)> = candidates
        .into_iter()
        .map(|p| (vec![p], v.evaluate(&[p])))
        .collect();
    PiecewiseAffineUtility::new(conj_pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(prices: &[&[f64]], quantities: &[&[f64]]) -> Dataset {
        Dataset::new(
            prices.iter().map(|r| r.to_vec()).collect(),
            quantities.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn single_observation_construction() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let u = build_rationalizing_utility(&d, eps(0.0), CONSTRUCT_CAP).unwrap();
        assert_eq!(u.pieces().len(), 1);
        assert_eq!(u.pieces()[0], (vec![1.0], -2.0));
        assert!((u.evaluate(&[5.0]) - 3.0).abs() < 1e-12);
        assert!(verify_rationalization(&u, &d, eps(0.0)).unwrap());
    }

    #[test]
    fn piece_count_and_epsilon_shift() {
        let d = ds(&[&[1.0], &[2.0]], &[&[2.0], &[1.0]]);
        let u0 = build_rationalizing_utility(&d, eps(0.0), CONSTRUCT_CAP).unwrap();
        assert_eq!(u0.pieces().len(), 2); // sequences [0] and [0,1]
        let delta = 0.2;
        let u1 = build_rationalizing_utility(&d, eps(delta), CONSTRUCT_CAP).unwrap();
        for ((s0, b0), (s1, b1)) in u0.pieces().iter().zip(u1.pieces()) {
            assert_eq!(s0, s1);
            let m = if (b1 - b0 - delta).abs() < 1e-12 {
                1.0
            } else {
                2.0
            };
            assert!((b1 - b0 - m * delta).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_below_minimal_error() {
        let d = ds(&[&[1.0], &[2.0]], &[&[1.0], &[2.0]]); // minimal error 0.5
        assert!(matches!(
            build_rationalizing_utility(&d, eps(0.4), CONSTRUCT_CAP),
            Err(Error::BelowMinimalEpsilon { .. })
        ));
        let u = build_rationalizing_utility(&d, eps(0.5), CONSTRUCT_CAP).unwrap();
        assert!(verify_rationalization(&u, &d, eps(0.5)).unwrap());
        // the same utility fails once the allowance is cut below minimal
        assert!(!verify_rationalization(&u, &d, eps(0.3)).unwrap());
    }

    #[test]
    fn zero_utility_rationalizes_with_max_expenditure() {
        let d = ds(&[&[1.0], &[2.0]], &[&[3.0], &[1.5]]);
        let u = PiecewiseAffineUtility::new(vec![(vec![0.0], 0.0)]).unwrap();
        let max_spend = (0..d.t())
            .map(|t| dot(d.price(t), d.quantity(t)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(verify_rationalization(&u, &d, eps(max_spend)).unwrap());
        assert!(!verify_rationalization(&u, &d, eps(max_spend - 0.1)).unwrap());
    }

    #[test]
    fn indirect_utility_values() {
        let u = PiecewiseAffineUtility::new(vec![(vec![1.0], -2.0)]).unwrap();
        assert!((indirect_utility(&u, &[2.0]).unwrap() + 2.0).abs() < 1e-9);
        assert_eq!(indirect_utility(&u, &[0.5]).unwrap(), f64::INFINITY);
        let kinked =
            PiecewiseAffineUtility::new(vec![(vec![1.0], -2.0), (vec![0.5], 0.0)]).unwrap();
        assert!((indirect_utility(&kinked, &[0.75]).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_regret_is_reported() {
        // a utility growing faster than any observed price supports
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let steep = PiecewiseAffineUtility::new(vec![(vec![5.0], 0.0)]).unwrap();
        let detail = verify_rationalization_detail(&steep, &d, eps(0.0)).unwrap();
        assert_eq!(detail.unbounded_at, vec![0]);
        assert!(!detail.ok());
    }

    #[test]
    fn dual_roundtrip_examples() {
        // two decreasing pieces with a kink at p = 1
        let v = PiecewiseAffineIndirect::new(vec![(vec![-2.0], 0.0), (vec![0.0], -2.0)]).unwrap();
        assert!(dual_roundtrip_check(&v, &[0.5, 1.0, 2.0], 1e-6).unwrap());
        // a single decreasing piece
        let v = PiecewiseAffineIndirect::new(vec![(vec![-1.5], 3.0)]).unwrap();
        assert!(dual_roundtrip_check(&v, &[0.25, 1.0, 4.0], 1e-6).unwrap());
        // a constant is its own round trip
        let v = PiecewiseAffineIndirect::new(vec![(vec![0.0], 2.5)]).unwrap();
        assert!(dual_roundtrip_check(&v, &[0.5, 1.0, 3.0], 1e-6).unwrap());
        // increasing pieces are rejected
        let bad = PiecewiseAffineIndirect::new(vec![(vec![1.0], 0.0)]).unwrap();
        assert!(dual_roundtrip_check(&bad, &[1.0], 1e-6).is_err());
    }

    #[test]
    fn construction_reproduces_sequence_bound_from_root() {
        // the constructed utility evaluated at a bundle is by definition
        // the sequence-enumeration upper bound rooted at observation 0;
        // the difference form needs u(x^root) = 0, which holds at zero
        // error on consistent data (at positive error the root value sits
        // anywhere in [0, epsilon])
        let d = ds(&[&[1.0], &[2.0]], &[&[2.0], &[1.0]]);
        for e_val in [0.0, 0.1] {
            let e = eps(e_val);
            let u = build_rationalizing_utility(&d, e, CONSTRUCT_CAP).unwrap();
            let x1 = [1.25];
            let seq = crate::welfare::utility_diff_upper_sequences(
                &d,
                e,
                &x1,
                0,
                crate::welfare::SEQUENCE_CAP,
            )
            .unwrap();
            assert!((u.evaluate(&x1) - seq.value).abs() < 1e-9);
            let root_val = u.evaluate(d.quantity(0));
            assert!(root_val >= -1e-12 && root_val <= e_val + 1e-12);
            if e_val == 0.0 {
                assert!((u.evaluate(&x1) - root_val - seq.value).abs() < 1e-9);
            }
        }
    }
}
