//! Welfare bounds: utility differences between bundles and changes in
//! approximate indirect utility between prices.
//!
//! Utility-difference bounds are finite only when the reference bundle is
//! observed in the data; the bound is then the value of a linear program
//! over per-observation utility numbers, cross-checked by minimizing over
//! acyclic observation sequences. Indirect-utility bounds treat the two
//! query prices as two hypothetical extra observations and optimize the
//! attained surplus difference over all consistent configurations.

use crate::counterfactual::quantity_bounds;
use crate::lp::{self, LinearProgram, SolveOutcome};
use crate::model::{bundles_equal, dot, BoundInterval, Dataset, Epsilon};
use crate::rationality::epsilon_star;
use crate::seq::for_each_sequence;
use crate::{Error, Result, VALUE_TOL};

/// Default cap on `T` for the sequence-enumeration oracles.
pub const SEQUENCE_CAP: usize = 7;

/// A bound value together with the acyclic index sequence attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceBound {
    pub value: f64,
    pub sequence: Vec<usize>,
}

/// A pair of counterfactual prices and an error level: bound the change in
/// approximate indirect utility moving from `p0` to `p1`.
#[derive(Clone, Debug)]
pub struct WelfareQuery {
    pub p1: Vec<f64>,
    pub p0: Vec<f64>,
    pub epsilon: Epsilon,
}

impl WelfareQuery {
    pub fn new(p1: Vec<f64>, p0: Vec<f64>, epsilon: Epsilon) -> Result<Self> {
        let q = WelfareQuery { p1, p0, epsilon };
        if q.p1.len() != q.p0.len() {
            return Err(Error::InvalidInput(format!(
                "price vectors differ in length: {} vs {}",
                q.p1.len(),
                q.p0.len()
            )));
        }
        if !q.p1.iter().chain(&q.p0).all(|&p| p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidInput(
                "welfare query prices must be strictly positive".into(),
            ));
        }
        Ok(q)
    }
}

/// Where a query price sits relative to the finiteness guarantees of the
/// upper indirect-utility bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinitenessRegion {
    /// `p1` lies in the upper comprehensive convex hull of the observed
    /// prices: the upper bound is finite.
    GuaranteedFinite,
    /// `p1` lies outside the hull even after adjoining `p0`: the upper
    /// bound is infinite.
    GuaranteedInfinite,
    /// In between, no guarantee either way; the program's outcome is
    /// reported as computed.
    Indeterminate,
}

/// Bounds on `u(x1) - u(x0)` over all utilities consistent with the data
/// at error level `epsilon`.
///
/// The upper bound is finite exactly when `x0` is a bundle in the dataset
/// (then computed by linear program, with equality constraints tying the
/// candidate utility level to every observation whose bundle equals `x1`);
/// otherwise it is `+inf`. The lower bound is symmetric in `x1`. When the
/// two bundles coincide both bounds are zero.
pub fn utility_diff_bounds(
    d: &Dataset,
    epsilon: Epsilon,
    x1: &[f64],
    x0: &[f64],
) -> Result<BoundInterval> {
    check_bundle(d, x1)?;
    check_bundle(d, x0)?;
    if epsilon.value() < epsilon_star(d).value() - VALUE_TOL {
        return Ok(BoundInterval::infeasible());
    }
    if bundles_equal(x1, x0) {
        return Ok(BoundInterval::feasible(0.0, 0.0));
    }
    let matches0 = d.matching_quantity_rows(x0);
    let upper = match matches0.first() {
        Some(&s) => diff_upper_lp(d, epsilon.value(), x1, s)?,
        None => f64::INFINITY,
    };
    let matches1 = d.matching_quantity_rows(x1);
    let lower = match matches1.first() {
        Some(&f) => -diff_upper_lp(d, epsilon.value(), x0, f)?,
        None => f64::NEG_INFINITY,
    };
    Ok(BoundInterval::feasible(lower, upper))
}

/// The linear program for the upper bound on `u(target) - u(x^base)`:
/// maximize `u~ - u^base` subject to the pairwise data inequalities, the
/// candidate rows for `target`, and one equality per observation whose
/// bundle matches `target`.
fn diff_upper_lp(d: &Dataset, e: f64, target: &[f64], base: usize) -> Result<f64> {
    let t = d.t();
    let n = t + 1;
    let u_cand = t;
    let mut objective = vec![0.0; n];
    objective[u_cand] = 1.0;
    objective[base] -= 1.0;
    let mut prog = LinearProgram::new(n, objective);
    push_pairwise(&mut prog, d, e, 0);
    for r in 0..t {
        let pr = d.price(r);
        let mut row = vec![0.0; n];
        row[u_cand] = 1.0;
        row[r] -= 1.0;
        let rhs = dot(pr, target) - dot(pr, d.quantity(r)) + e;
        prog.push_le(row, rhs);
    }
    for r in d.matching_quantity_rows(target) {
        let mut row = vec![0.0; n];
        row[u_cand] = 1.0;
        row[r] -= 1.0;
        prog.push_eq(row, 0.0);
    }
    match lp::solve(&prog)? {
        SolveOutcome::Optimal { value, .. } => Ok(value),
        SolveOutcome::Unbounded => unreachable!(
            "the utility-difference program is bounded when the base bundle is observed"
        ),
        SolveOutcome::Infeasible => unreachable!(
            "the utility-difference program is feasible at epsilon above the minimal error"
        ),
    }
}

/// Sequence-enumeration oracle for the upper utility-difference bound:
/// minimizes over acyclic sequences starting at `base`
///
/// ```text
/// p^{s(M)} . (x1 - x^{s(M)}) + sum_{m<M} p^{s(m)} . (x^{s(m+1)} - x^{s(m)}) + M e
/// ```
///
/// Refuses `T > cap`; requires `x1` to differ from the base bundle.
pub fn utility_diff_upper_sequences(
    d: &Dataset,
    epsilon: Epsilon,
    x1: &[f64],
    base: usize,
    cap: usize,
) -> Result<SequenceBound> {
    check_bundle(d, x1)?;
    check_row(d, base)?;
    if d.t() > cap {
        return Err(Error::CapExceeded { t: d.t(), cap });
    }
    if bundles_equal(x1, d.quantity(base)) {
        return Err(Error::InvalidInput(
            "the query bundle coincides with the base observation's bundle".into(),
        ));
    }
    let e = epsilon.value();
    let mut best: Option<SequenceBound> = None;
    for_each_sequence(d.t(), d.t(), Some(base), |seq| {
        let m = seq.len();
        let last = seq[m - 1];
        let mut value =
            dot(d.price(last), x1) - dot(d.price(last), d.quantity(last)) + m as f64 * e;
        for i in 0..m - 1 {
            let pm = d.price(seq[i]);
            value += dot(pm, d.quantity(seq[i + 1])) - dot(pm, d.quantity(seq[i]));
        }
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(SequenceBound {
                value,
                sequence: seq.to_vec(),
            });
        }
    });
    Ok(best.expect("at least the singleton sequence exists"))
}

/// Sequence-enumeration estimate of the indirect-utility change from the
/// observed price `p^base` to `p0`: minimizes over acyclic sequences
/// starting at `base`
///
/// ```text
/// x^{s(M)} . (p0 - p^{s(M)}) + sum_{m<M} x^{s(m)} . (p^{s(m+1)} - p^{s(m)}) + M e
/// ```
///
/// The exact upper bound lies within `epsilon` of this value on either
/// side when `p1 = p^base`.
pub fn indirect_diff_sequences(
    d: &Dataset,
    epsilon: Epsilon,
    base: usize,
    p0: &[f64],
    cap: usize,
) -> Result<SequenceBound> {
    check_row(d, base)?;
    if p0.len() != d.k() {
        return Err(Error::InvalidInput(format!(
            "price vector has {} entries for {} goods",
            p0.len(),
            d.k()
        )));
    }
    if d.t() > cap {
        return Err(Error::CapExceeded { t: d.t(), cap });
    }
    let e = epsilon.value();
    let mut best: Option<SequenceBound> = None;
    for_each_sequence(d.t(), d.t(), Some(base), |seq| {
        let m = seq.len();
        let last = seq[m - 1];
        let xl = d.quantity(last);
        let mut value = dot(xl, p0) - dot(xl, d.price(last)) + m as f64 * e;
        for i in 0..m - 1 {
            let xm = d.quantity(seq[i]);
            value += dot(xm, d.price(seq[i + 1])) - dot(xm, d.price(seq[i]));
        }
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(SequenceBound {
                value,
                sequence: seq.to_vec(),
            });
        }
    });
    Ok(best.expect("at least the singleton sequence exists"))
}

/// Sharp bounds on the change in approximate indirect utility from `q.p0`
/// to `q.p1`, each the value of one linear program over two hypothetical
/// bundles and their utility levels. An unbounded program maps to the
/// corresponding infinity.
pub fn indirect_diff_bounds(d: &Dataset, q: &WelfareQuery) -> Result<BoundInterval> {
    if q.p1.len() != d.k() {
        return Err(Error::InvalidInput(format!(
            "query has {} goods, dataset has {}",
            q.p1.len(),
            d.k()
        )));
    }
    if q.epsilon.value() < epsilon_star(d).value() - VALUE_TOL {
        return Ok(BoundInterval::infeasible());
    }
    let prog = surplus_program(d, q);
    let upper = match lp::solve(&prog)? {
        SolveOutcome::Optimal { value, .. } => value,
        SolveOutcome::Unbounded => f64::INFINITY,
        SolveOutcome::Infeasible => return Ok(BoundInterval::infeasible()),
    };
    let lower = match lp::solve_min(&prog)? {
        SolveOutcome::Optimal { value, .. } => value,
        SolveOutcome::Unbounded => f64::NEG_INFINITY,
        SolveOutcome::Infeasible => return Ok(BoundInterval::infeasible()),
    };
    Ok(BoundInterval::feasible(lower, upper))
}

/// Classifies the query against the finiteness guarantees for the upper
/// bound: finite when `p1` is in the upper comprehensive convex hull of
/// the observed prices, infinite when outside the hull extended by `p0`.
pub fn finiteness_region(d: &Dataset, q: &WelfareQuery) -> Result<FinitenessRegion> {
    if q.p1.len() != d.k() {
        return Err(Error::InvalidInput(format!(
            "query has {} goods, dataset has {}",
            q.p1.len(),
            d.k()
        )));
    }
    let in_data_hull = crate::counterfactual::cco_margin(d.prices(), &q.p1)? >= -1e-9;
    if in_data_hull {
        return Ok(FinitenessRegion::GuaranteedFinite);
    }
    let mut extended = d.prices().to_vec();
    extended.push(q.p0.clone());
    let in_extended_hull = crate::counterfactual::cco_margin(&extended, &q.p1)? >= -1e-9;
    if in_extended_hull {
        Ok(FinitenessRegion::Indeterminate)
    } else {
        Ok(FinitenessRegion::GuaranteedInfinite)
    }
}

/// The shared program of the indirect-utility bounds: variables
/// `[xa (K), xb (K), u^1..u^T, ua, ub]`, all nonnegative, where slot `a`
/// carries the base price `p0` and slot `b` the new price `p1`. The
/// objective is the attained surplus difference `(ub - p1.xb) - (ua - p0.xa)`.
fn surplus_program(d: &Dataset, q: &WelfareQuery) -> LinearProgram {
    let t = d.t();
    let k = d.k();
    let e = q.epsilon.value();
    let n = 2 * k + t + 2;
    let xa = 0;
    let xb = k;
    let u = |r: usize| 2 * k + r;
    let ua = 2 * k + t;
    let ub = 2 * k + t + 1;

    let mut objective = vec![0.0; n];
    objective[ub] = 1.0;
    objective[ua] = -1.0;
    for j in 0..k {
        objective[xb + j] = -q.p1[j];
        objective[xa + j] = q.p0[j];
    }
    let mut prog = LinearProgram::new(n, objective);

    push_pairwise(&mut prog, d, e, 2 * k);

    for r in 0..t {
        let pr = d.price(r);
        let pr_xr = dot(pr, d.quantity(r));
        // ua <= u^r + p^r.(xa - x^r) + e and the same for ub
        for (cand_u, cand_x) in [(ua, xa), (ub, xb)] {
            let mut row = vec![0.0; n];
            row[cand_u] = 1.0;
            row[u(r)] -= 1.0;
            for j in 0..k {
                row[cand_x + j] = -pr[j];
            }
            prog.push_le(row, -pr_xr + e);
        }
        // u^r <= ua + p0.(x^r - xa) + e
        let mut row = vec![0.0; n];
        row[u(r)] = 1.0;
        row[ua] = -1.0;
        row[xa..xa + k].copy_from_slice(&q.p0);
        prog.push_le(row, dot(&q.p0, d.quantity(r)) + e);
        // u^r <= ub + p1.(x^r - xb) + e
        let mut row = vec![0.0; n];
        row[u(r)] = 1.0;
        row[ub] = -1.0;
        row[xb..xb + k].copy_from_slice(&q.p1);
        prog.push_le(row, dot(&q.p1, d.quantity(r)) + e);
    }
    // ua <= ub + p1.(xa - xb) + e
    let mut row = vec![0.0; n];
    row[ua] = 1.0;
    row[ub] = -1.0;
    for j in 0..k {
        row[xa + j] = -q.p1[j];
        row[xb + j] = q.p1[j];
    }
    prog.push_le(row, e);
    // ub <= ua + p0.(xb - xa) + e
    let mut row = vec![0.0; n];
    row[ub] = 1.0;
    row[ua] = -1.0;
    for j in 0..k {
        row[xb + j] = -q.p0[j];
        row[xa + j] = q.p0[j];
    }
    prog.push_le(row, e);

    prog
}

/// Trapezoidal consumer-surplus approximation for a single good on an
/// exactly consistent dataset: integrates the upper demand-bound curve
/// along the price segment from `p0` to `p1`,
/// `int_0^1 xbar(t p1 + (1-t) p0) (p0 - p1) dt`.
///
/// Used as a cross-check against the linear-program upper bound for price
/// decreases (`p1 <= p0`); for price increases the integrand would have to
/// be the lower curve instead, so the equality is not asserted there.
pub fn surplus_integral(d: &Dataset, p1: f64, p0: f64, n_steps: usize) -> Result<f64> {
    if d.k() != 1 {
        return Err(Error::InvalidInput(
            "the surplus integral is defined for a single good".into(),
        ));
    }
    if !(p1.is_finite() && p1 > 0.0 && p0.is_finite() && p0 > 0.0) {
        return Err(Error::InvalidInput(
            "integration endpoints must be strictly positive prices".into(),
        ));
    }
    if epsilon_star(d).value() > 1e-9 {
        return Err(Error::InvalidInput(
            "the surplus integral requires an exactly consistent dataset".into(),
        ));
    }
    let min_anchor = d.prices().iter().map(|p| p[0]).fold(p0, f64::min);
    if p1 <= min_anchor {
        return Err(Error::InvalidInput(format!(
            "p1 = {p1} must exceed the smallest of the observed prices and p0 ({min_anchor})"
        )));
    }
    if n_steps == 0 {
        return Err(Error::InvalidInput(
            "need at least one integration step".into(),
        ));
    }
    if p1 == p0 {
        return Ok(0.0);
    }
    let eps0 = Epsilon::ZERO;
    let upper_at = |t: f64| -> Result<f64> {
        let price = t * p1 + (1.0 - t) * p0;
        let b = quantity_bounds(d, eps0, &[price], 0, None)?;
        let up = b
            .upper()
            .expect("consistent dataset, epsilon 0 is feasible");
        if up.is_finite() {
            Ok(up)
        } else {
            Err(Error::InvalidInput(format!(
                "unbounded demand at grid price {price}; the integrand is infinite"
            )))
        }
    };
    let mut acc = 0.0;
    let mut prev = upper_at(0.0)?;
    for i in 1..=n_steps {
        let cur = upper_at(i as f64 / n_steps as f64)?;
        acc += 0.5 * (prev + cur) / n_steps as f64;
        prev = cur;
    }
    Ok(acc * (p0 - p1))
}

/// Appends the `T(T-1)` pairwise data inequalities
/// `u^s <= u^r + p^r.(x^s - x^r) + e` with utility variables starting at
/// column `u_offset`.
fn push_pairwise(prog: &mut LinearProgram, d: &Dataset, e: f64, u_offset: usize) {
    let t = d.t();
    let n = prog.n_vars;
    for r in 0..t {
        let pr = d.price(r);
        for s in 0..t {
            if r == s {
                continue;
            }
            let mut row = vec![0.0; n];
            row[u_offset + s] += 1.0;
            row[u_offset + r] -= 1.0;
            let rhs = dot(pr, d.quantity(s)) - dot(pr, d.quantity(r)) + e;
            prog.push_le(row, rhs);
        }
    }
}

fn check_bundle(d: &Dataset, x: &[f64]) -> Result<()> {
    if x.len() != d.k() {
        return Err(Error::InvalidInput(format!(
            "bundle has {} entries for {} goods",
            x.len(),
            d.k()
        )));
    }
    if !x.iter().all(|&v| v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput("bundles must be nonnegative".into()));
    }
    Ok(())
}

fn check_row(d: &Dataset, row: usize) -> Result<()> {
    if row >= d.t() {
        return Err(Error::InvalidInput(format!(
            "observation index {row} out of range for T = {}",
            d.t()
        )));
    }
    Ok(())
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
    fn utility_upper_single_observation() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let b = utility_diff_bounds(&d, eps(0.0), &[3.0], &[2.0]).unwrap();
        assert!((b.upper().unwrap() - 1.0).abs() < 1e-7);
        let b = utility_diff_bounds(&d, eps(0.25), &[3.0], &[2.0]).unwrap();
        assert!((b.upper().unwrap() - 1.25).abs() < 1e-7);
    }

    #[test]
    fn utility_upper_infinite_off_dataset() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let b = utility_diff_bounds(&d, eps(0.0), &[3.0], &[5.0]).unwrap();
        assert_eq!(b.upper(), Some(f64::INFINITY));
        // the lower bound is infinite too since 3.0 is not observed
        assert_eq!(b.lower(), Some(f64::NEG_INFINITY));
    }

    #[test]
    fn utility_bounds_zero_on_equal_bundles() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let b = utility_diff_bounds(&d, eps(0.5), &[2.0], &[2.0]).unwrap();
        assert_eq!((b.lower().unwrap(), b.upper().unwrap()), (0.0, 0.0));
    }

    #[test]
    fn utility_bounds_infeasible_below_minimal_error() {
        let d = ds(&[&[1.0], &[2.0]], &[&[1.0], &[2.0]]);
        let b = utility_diff_bounds(&d, eps(0.2), &[1.0], &[2.0]).unwrap();
        assert!(!b.is_feasible());
    }

    #[test]
    fn sequence_oracle_singleton() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let s = utility_diff_upper_sequences(&d, eps(0.0), &[3.0], 0, SEQUENCE_CAP).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.sequence, vec![0]);
        let s = utility_diff_upper_sequences(&d, eps(0.3), &[3.0], 0, SEQUENCE_CAP).unwrap();
        assert!((s.value - 1.3).abs() < 1e-12);
    }

    #[test]
    fn sequence_oracle_two_observations() {
        let d = ds(&[&[1.0], &[2.0]], &[&[2.0], &[1.0]]);
        let s = utility_diff_upper_sequences(&d, eps(0.0), &[1.0], 0, SEQUENCE_CAP).unwrap();
        assert!((s.value - (-1.0)).abs() < 1e-12);
        // LP route agrees
        let b = utility_diff_bounds(&d, eps(0.0), &[1.0], &[2.0]).unwrap();
        assert!((b.upper().unwrap() - s.value).abs() < 1e-7);
    }

    #[test]
    fn indirect_bounds_collapse_at_equal_prices() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        for e in [0.0, 0.3] {
            let q = WelfareQuery::new(vec![2.0], vec![2.0], eps(e)).unwrap();
            let b = indirect_diff_bounds(&d, &q).unwrap();
            assert!((b.upper().unwrap() - e).abs() < 1e-7, "upper at e={e}");
            assert!((b.lower().unwrap() + e).abs() < 1e-7, "lower at e={e}");
        }
    }

    #[test]
    fn indirect_upper_matches_sequence_estimate_at_zero_error() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let q = WelfareQuery::new(vec![1.0], vec![2.0], eps(0.0)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        assert!((b.upper().unwrap() - 2.0).abs() < 1e-7);
        let h = indirect_diff_sequences(&d, eps(0.0), 0, &[2.0], SEQUENCE_CAP).unwrap();
        assert!((h.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn indirect_upper_sandwiched_at_positive_error() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let e = 0.1;
        let q = WelfareQuery::new(vec![1.0], vec![2.0], eps(e)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        let h = indirect_diff_sequences(&d, eps(e), 0, &[2.0], SEQUENCE_CAP).unwrap();
        assert!((h.value - 2.1).abs() < 1e-12);
        let v = b.upper().unwrap();
        assert!(
            v >= h.value - e - 1e-7 && v <= h.value + e + 1e-7,
            "v = {v}"
        );
    }

    #[test]
    fn indirect_upper_unbounded_below_the_hull() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        let q = WelfareQuery::new(vec![0.5], vec![2.0], eps(0.0)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        assert_eq!(b.upper(), Some(f64::INFINITY));
        assert_eq!(
            finiteness_region(&d, &q).unwrap(),
            FinitenessRegion::GuaranteedInfinite
        );
        let fine = WelfareQuery::new(vec![1.5], vec![2.0], eps(0.0)).unwrap();
        assert_eq!(
            finiteness_region(&d, &fine).unwrap(),
            FinitenessRegion::GuaranteedFinite
        );
    }

    #[test]
    fn surplus_integral_piecewise_constant() {
        let d = ds(&[&[1.0]], &[&[2.0]]);
        // price decrease from 3 to 2: the formula's valid orientation
        let v = surplus_integral(&d, 2.0, 3.0, 100).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        let q = WelfareQuery::new(vec![2.0], vec![3.0], eps(0.0)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        assert!((b.upper().unwrap() - v).abs() < 1e-6);

        // price increase from 2 to 3: the integrand formula still evaluates
        // to -2, but the sharp upper bound is 0 (every consistent utility
        // has weakly decreasing indirect utility, and a flat demand of zero
        // above the observed price attains the supremum).
        let v = surplus_integral(&d, 3.0, 2.0, 100).unwrap();
        assert!((v + 2.0).abs() < 1e-9);
        let q = WelfareQuery::new(vec![3.0], vec![2.0], eps(0.0)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        assert!(b.upper().unwrap().abs() < 1e-7);
    }

    #[test]
    fn surplus_integral_two_observations() {
        let d = ds(&[&[1.0], &[2.0]], &[&[2.0], &[1.0]]);
        // spec layout, evaluated in the valid (price-decrease) orientation
        let v = surplus_integral(&d, 1.2, 2.0, 2000).unwrap();
        assert!((v - 1.6).abs() < 2.0 / 2000.0 * 2.0 + 1e-9);
        let q = WelfareQuery::new(vec![1.2], vec![2.0], eps(0.0)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        assert!((b.upper().unwrap() - 1.6).abs() < 1e-6);
        // reversed orientation: the upper bound follows the lower demand
        // curve (x = 1 on the segment), not the integrand's upper curve
        let q = WelfareQuery::new(vec![2.0], vec![1.2], eps(0.0)).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        assert!((b.upper().unwrap() + 0.8).abs() < 1e-6);
        let raw = surplus_integral(&d, 2.0, 1.2, 2000).unwrap();
        assert!((raw + 1.6).abs() < 2.0 / 2000.0 * 2.0 + 1e-9);
    }

    #[test]
    fn surplus_integral_preconditions() {
        let inconsistent = ds(&[&[1.0], &[2.0]], &[&[1.0], &[2.0]]);
        assert!(surplus_integral(&inconsistent, 1.5, 2.0, 10).is_err());
        let d = ds(&[&[1.0]], &[&[2.0]]);
        assert_eq!(surplus_integral(&d, 2.0, 2.0, 10).unwrap(), 0.0);
        // p1 must exceed the smallest anchor
        assert!(surplus_integral(&d, 0.9, 2.0, 10).is_err());
        // endpoints must be real positive prices
        assert!(surplus_integral(&d, 2.0, -1.0, 10).is_err());
        assert!(surplus_integral(&d, f64::NAN, 2.0, 10).is_err());
        let wide = ds(&[&[1.0, 1.0]], &[&[1.0, 1.0]]);
        assert!(surplus_integral(&wide, 1.5, 2.0, 10).is_err());
    }

    #[test]
    fn antisymmetry_of_indirect_bounds() {
        let d = ds(&[&[1.0], &[2.0]], &[&[2.5], &[1.0]]);
        let e = epsilon_star(&d);
        let q_fwd = WelfareQuery::new(vec![1.4], vec![2.2], e).unwrap();
        let q_rev = WelfareQuery::new(vec![2.2], vec![1.4], e).unwrap();
        let fwd = indirect_diff_bounds(&d, &q_fwd).unwrap();
        let rev = indirect_diff_bounds(&d, &q_rev).unwrap();
        assert!((fwd.upper().unwrap() + rev.lower().unwrap()).abs() < 1e-7);
        assert!((fwd.lower().unwrap() + rev.upper().unwrap()).abs() < 1e-7);
    }
}
