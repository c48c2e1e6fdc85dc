//! Dense linear programming with a strict three-outcome contract.
//!
//! Problems are stated as maximization over real variables with `<=` or `==`
//! constraints and per-variable nonnegativity flags. The solver is a
//! two-phase revised simplex with a dense basis inverse: Dantzig pricing by
//! default, switching permanently to Bland's rule once it detects stalling,
//! so every solve terminates and identical inputs produce identical output.
//!
//! Unboundedness is reported only when a pivot step exhibits an actual
//! improving ray, and infeasibility only when phase one terminates with a
//! positive artificial residual. There are no magnitude heuristics.

#![allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra

use thiserror::Error;

/// Absolute feasibility tolerance (constraint residuals, variable signs).
pub const FEAS_TOL: f64 = 1e-9;
/// Optimality tolerance on reduced costs.
pub const OPT_TOL: f64 = 1e-9;
/// Smallest pivot magnitude accepted in the ratio test.
const PIVOT_TOL: f64 = 1e-9;
/// Consecutive non-improving pivots tolerated before switching to Bland.
const STALL_LIMIT: usize = 64;
/// Pivots between dense refactorizations of the basis inverse.
const REFACTOR_EVERY: usize = 500;

/// Constraint sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

/// A single linear constraint `row . x <relation> rhs`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub row: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program in canonical maximization form.
///
/// `nonneg[j]` marks variable `j` as constrained to `x_j >= 0`; variables
/// with the flag cleared are free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

impl LinearProgram {
    /// A program over `n_vars` nonnegative variables with no constraints yet.
    pub fn new(n_vars: usize, objective: Vec<f64>) -> Self {
        Self {
            n_vars,
            objective,
            constraints: Vec::new(),
            nonneg: vec![true; n_vars],
        }
    }

    pub fn push_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint {
            row,
            relation: Relation::Le,
            rhs,
        });
    }

    pub fn push_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint {
            row,
            relation: Relation::Eq,
            rhs,
        });
    }

    /// Marks variable `j` as free (unrestricted in sign).
    pub fn set_free(&mut self, j: usize) {
        self.nonneg[j] = false;
    }

    fn check_shape(&self) -> Result<(), LpError> {
        if self.n_vars == 0 {
            return Err(LpError::NoVariables);
        }
        if self.objective.len() != self.n_vars || self.nonneg.len() != self.n_vars {
            return Err(LpError::DimensionMismatch {
                expected: self.n_vars,
                found: if self.objective.len() != self.n_vars {
                    self.objective.len()
                } else {
                    self.nonneg.len()
                },
            });
        }
        for c in &self.constraints {
            if c.row.len() != self.n_vars {
                return Err(LpError::DimensionMismatch {
                    expected: self.n_vars,
                    found: c.row.len(),
                });
            }
        }
        Ok(())
    }
}

/// Result of a solve: the supremum is attained, empty, or infinite.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Optimal { value: f64, solution: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl SolveOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            SolveOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            SolveOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

/// Structural failures, distinct from an infeasible feasible set.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error(
        "constraint or objective length does not match n_vars (expected {expected}, found {found})"
    )]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear program must have at least one variable")]
    NoVariables,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

/// Maximizes the program's objective.
pub fn solve(lp: &LinearProgram) -> Result<SolveOutcome, LpError> {
    lp.check_shape()?;
    Simplex::build(lp).run()
}

/// Minimizes the program's objective.
///
/// Negates the objective, solves, and negates the reported value.
/// `Unbounded` then means unbounded below.
pub fn solve_min(lp: &LinearProgram) -> Result<SolveOutcome, LpError> {
    let mut flipped = lp.clone();
    for c in &mut flipped.objective {
        *c = -*c;
    }
    Ok(match solve(&flipped)? {
        SolveOutcome::Optimal { value, solution } => SolveOutcome::Optimal {
            value: -value,
            solution,
        },
        other => other,
    })
}

/// Column identity in the standard-form (equality) system.
#[derive(Clone, Copy, Debug)]
enum Col {
    /// Structural column: original variable index and sign multiplier
    /// (free variables are split into a positive and a negative part).
    Structural {
        orig: usize,
        sign: f64,
    },
    /// Slack of a `<=` row; `sign` is -1 if the row was negated.
    Slack {
        row: usize,
        sign: f64,
    },
    Artificial {
        row: usize,
    },
}

struct Simplex {
    m: usize,
    n_orig: usize,
    /// Structural columns, column-major, length `m` each.
    struct_cols: Vec<Vec<f64>>,
    cols: Vec<Col>,
    n_real: usize, // structural + slack count; artificials come after
    b: Vec<f64>,
    /// Phase-2 objective per column (0 for slacks and artificials).
    obj: Vec<f64>,
    binv: Vec<f64>, // m x m row-major
    x_b: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    bland: bool,
    pivots_since_refactor: usize,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();

        // Split free variables into two nonnegative parts.
        let mut cols: Vec<Col> = Vec::new();
        for j in 0..lp.n_vars {
            cols.push(Col::Structural { orig: j, sign: 1.0 });
            if !lp.nonneg[j] {
                cols.push(Col::Structural {
                    orig: j,
                    sign: -1.0,
                });
            }
        }
        let n_struct = cols.len();

        // Row data with nonnegative right-hand sides.
        let mut row_sign = vec![1.0f64; m];
        let mut b = vec![0.0f64; m];
        for (i, c) in lp.constraints.iter().enumerate() {
            if c.rhs < 0.0 {
                row_sign[i] = -1.0;
            }
            b[i] = c.rhs * row_sign[i];
        }

        let mut struct_cols = vec![vec![0.0f64; m]; n_struct];
        for (cidx, col) in cols.iter().enumerate() {
            if let Col::Structural { orig, sign } = *col {
                for i in 0..m {
                    struct_cols[cidx][i] = lp.constraints[i].row[orig] * sign * row_sign[i];
                }
            }
        }

        // Slacks for inequality rows; artificials where no identity column
        // is available (negated inequalities and all equalities).
        let mut obj: Vec<f64> = cols
            .iter()
            .map(|c| match *c {
                Col::Structural { orig, sign } => lp.objective[orig] * sign,
                _ => 0.0,
            })
            .collect();

        let mut basis_for_row: Vec<Option<usize>> = vec![None; m];
        for (i, c) in lp.constraints.iter().enumerate() {
            if c.relation == Relation::Le {
                cols.push(Col::Slack {
                    row: i,
                    sign: row_sign[i],
                });
                obj.push(0.0);
                if row_sign[i] > 0.0 {
                    basis_for_row[i] = Some(cols.len() - 1);
                }
            }
        }
        let n_real = cols.len();
        for i in 0..m {
            if basis_for_row[i].is_none() {
                cols.push(Col::Artificial { row: i });
                obj.push(0.0);
                basis_for_row[i] = Some(cols.len() - 1);
            }
        }

        let basis: Vec<usize> = basis_for_row.into_iter().map(|c| c.unwrap()).collect();
        let mut is_basic = vec![false; cols.len()];
        for &j in &basis {
            is_basic[j] = true;
        }

        // Initial basis is a signed identity, so its inverse is immediate.
        let mut binv = vec![0.0f64; m * m];
        for i in 0..m {
            let sign = match cols[basis[i]] {
                Col::Slack { sign, .. } => sign,
                _ => 1.0,
            };
            binv[i * m + i] = sign;
        }

        Simplex {
            m,
            n_orig: lp.n_vars,
            struct_cols,
            cols,
            n_real,
            x_b: b.clone(),
            b,
            obj,
            binv,
            basis,
            is_basic,
            bland: false,
            pivots_since_refactor: 0,
        }
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        out.fill(0.0);
        match self.cols[j] {
            Col::Structural { .. } => out.copy_from_slice(&self.struct_cols[j]),
            Col::Slack { row, sign } => out[row] = sign,
            Col::Artificial { row } => out[row] = 1.0,
        }
    }

    /// `y . A_j` without materializing unit columns.
    fn price_column(&self, y: &[f64], j: usize) -> f64 {
        match self.cols[j] {
            Col::Structural { .. } => {
                let col = &self.struct_cols[j];
                let mut acc = 0.0;
                for i in 0..self.m {
                    acc += y[i] * col[i];
                }
                acc
            }
            Col::Slack { row, sign } => y[row] * sign,
            Col::Artificial { row } => y[row],
        }
    }

    fn refactor(&mut self) {
        let m = self.m;
        if m == 0 {
            return;
        }
        // Dense Gauss-Jordan inversion of the current basis matrix with
        // partial pivoting.
        let mut a = vec![0.0f64; m * m];
        let mut col = vec![0.0f64; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                a[i * m + k] = col[i];
            }
        }
        let mut inv = vec![0.0f64; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = a[k * m + k].abs();
            for i in (k + 1)..m {
                let v = a[i * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val <= f64::MIN_POSITIVE {
                // Numerically singular refreshed basis; keep the running
                // inverse rather than replacing it with garbage.
                return;
            }
            if piv_row != k {
                for j in 0..m {
                    a.swap(k * m + j, piv_row * m + j);
                    inv.swap(k * m + j, piv_row * m + j);
                }
            }
            let piv = a[k * m + k];
            for j in 0..m {
                a[k * m + j] /= piv;
                inv[k * m + j] /= piv;
            }
            for i in 0..m {
                if i != k {
                    let f = a[i * m + k];
                    if f != 0.0 {
                        for j in 0..m {
                            a[i * m + j] -= f * a[k * m + j];
                            inv[i * m + j] -= f * inv[k * m + j];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        // Refresh basic values from the original right-hand side.
        for i in 0..m {
            let mut acc = 0.0;
            for k in 0..m {
                acc += self.binv[i * m + k] * self.b[k];
            }
            self.x_b[i] = acc.max(0.0);
        }
        self.pivots_since_refactor = 0;
    }

    /// One simplex phase: maximize `cost` over the current basis.
    ///
    /// `allow_enter` filters candidate entering columns. Returns `None` on
    /// optimality, `Some(col)` when an unbounded ray along `col` was found.
    fn phase(
        &mut self,
        cost: &[f64],
        allow_enter: impl Fn(usize) -> bool,
    ) -> Result<Option<usize>, LpError> {
        let m = self.m;
        let n_cols = self.cols.len();
        let max_iter = 2000 + 50 * (m + n_cols);
        let mut stall = 0usize;
        let mut last_obj = f64::NEG_INFINITY;
        let mut y = vec![0.0f64; m];
        let mut dir = vec![0.0f64; m];

        for _iter in 0..max_iter {
            // y = c_B^T B^-1
            y.fill(0.0);
            for i in 0..m {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    let row = &self.binv[i * m..(i + 1) * m];
                    for k in 0..m {
                        y[k] += cb * row[k];
                    }
                }
            }

            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..n_cols {
                if self.is_basic[j] || !allow_enter(j) {
                    continue;
                }
                let z = cost[j] - self.price_column(&y, j);
                if z > OPT_TOL {
                    if self.bland {
                        entering = Some((j, z));
                        break;
                    }
                    match entering {
                        Some((_, best)) if best >= z => {}
                        _ => entering = Some((j, z)),
                    }
                }
            }
            let Some((e, _)) = entering else {
                return Ok(None);
            };

            // Direction d = B^-1 A_e.
            self.column(e, &mut dir);
            let d = {
                let mut out = vec![0.0f64; m];
                for i in 0..m {
                    let row = &self.binv[i * m..(i + 1) * m];
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += row[k] * dir[k];
                    }
                    out[i] = acc;
                }
                out
            };

            // Ratio test; ties go to the smallest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if d[i] > PIVOT_TOL {
                    let ratio = self.x_b[i] / d[i];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio < lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Some(e));
            };

            // Gauss-Jordan pivot on row r, column e, applied to the
            // augmented system [B^-1 | x_B].
            let piv = d[r];
            for i in 0..m {
                if i != r && d[i] != 0.0 {
                    let f = d[i] / piv;
                    let (head, tail) = self.binv.split_at_mut(r * m);
                    let (rrow, rest) = tail.split_at_mut(m);
                    let irow = if i < r {
                        &mut head[i * m..(i + 1) * m]
                    } else {
                        &mut rest[(i - r - 1) * m..(i - r) * m]
                    };
                    for k in 0..m {
                        irow[k] -= f * rrow[k];
                    }
                    self.x_b[i] = (self.x_b[i] - f * self.x_b[r]).max(0.0);
                }
            }
            for k in 0..m {
                self.binv[r * m + k] /= piv;
            }
            self.x_b[r] = ratio.max(0.0);

            self.is_basic[self.basis[r]] = false;
            self.is_basic[e] = true;
            self.basis[r] = e;

            // Stall detection triggers Bland's rule.
            let obj_now: f64 = (0..m).map(|i| cost[self.basis[i]] * self.x_b[i]).sum();
            if obj_now <= last_obj + 1e-12 {
                stall += 1;
                if stall >= STALL_LIMIT {
                    self.bland = true;
                }
            } else {
                stall = 0;
            }
            last_obj = obj_now;

            self.pivots_since_refactor += 1;
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
        }
        Err(LpError::IterationLimit)
    }

    fn run(mut self) -> Result<SolveOutcome, LpError> {
        let m = self.m;
        let has_artificials = self.cols.len() > self.n_real;

        if has_artificials {
            let cost: Vec<f64> = self
                .cols
                .iter()
                .map(|c| match c {
                    Col::Artificial { .. } => -1.0,
                    _ => 0.0,
                })
                .collect();
            let ray = self.phase(&cost, |_| true)?;
            debug_assert!(ray.is_none(), "phase one is bounded above by zero");
            let residual: f64 = (0..m)
                .filter(|&i| matches!(self.cols[self.basis[i]], Col::Artificial { .. }))
                .map(|i| self.x_b[i])
                .sum();
            if residual > FEAS_TOL {
                return Ok(SolveOutcome::Infeasible);
            }
            self.evict_artificials();
        }

        let cost = self.obj.clone();
        let n_real = self.n_real;
        let ray = self.phase(&cost, |j| j < n_real)?;
        if ray.is_some() {
            return Ok(SolveOutcome::Unbounded);
        }

        // Assemble the solution in original variable space.
        let mut x = vec![0.0f64; self.n_orig];
        for i in 0..m {
            if let Col::Structural { orig, sign } = self.cols[self.basis[i]] {
                x[orig] += sign * self.x_b[i];
            }
        }
        for v in &mut x {
            if v.abs() < FEAS_TOL {
                *v = 0.0;
            }
        }
        let value: f64 = (0..m).map(|i| cost[self.basis[i]] * self.x_b[i]).sum();
        Ok(SolveOutcome::Optimal { value, solution: x })
    }

    /// After a feasible phase one, pivot remaining artificials out of the
    /// basis where possible; rows that admit no pivot are redundant and the
    /// artificial stays basic at level zero.
    fn evict_artificials(&mut self) {
        let m = self.m;
        let mut dir = vec![0.0f64; m];
        for r in 0..m {
            if !matches!(self.cols[self.basis[r]], Col::Artificial { .. }) {
                continue;
            }
            let mut replacement: Option<usize> = None;
            for j in 0..self.n_real {
                if self.is_basic[j] {
                    continue;
                }
                self.column(j, &mut dir);
                let row = &self.binv[r * m..(r + 1) * m];
                let mut u = 0.0;
                for k in 0..m {
                    u += row[k] * dir[k];
                }
                if u.abs() > PIVOT_TOL {
                    replacement = Some(j);
                    break;
                }
            }
            let Some(e) = replacement else {
                continue;
            };
            self.column(e, &mut dir);
            let d = {
                let mut out = vec![0.0f64; m];
                for i in 0..m {
                    let row = &self.binv[i * m..(i + 1) * m];
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += row[k] * dir[k];
                    }
                    out[i] = acc;
                }
                out
            };
            let piv = d[r];
            for i in 0..m {
                if i != r && d[i] != 0.0 {
                    let f = d[i] / piv;
                    let (head, tail) = self.binv.split_at_mut(r * m);
                    let (rrow, rest) = tail.split_at_mut(m);
                    let irow = if i < r {
                        &mut head[i * m..(i + 1) * m]
                    } else {
                        &mut rest[(i - r - 1) * m..(i - r) * m]
                    };
                    for k in 0..m {
                        irow[k] -= f * rrow[k];
                    }
                    self.x_b[i] -= f * self.x_b[r];
                }
            }
            for k in 0..m {
                self.binv[r * m + k] /= piv;
            }
            self.x_b[r] /= piv;
            self.is_basic[self.basis[r]] = false;
            self.is_basic[e] = true;
            self.basis[r] = e;
        }
    }
}
