//! Core domain types: datasets of price/quantity observations, approximation
//! error levels, and bound intervals.
//!
//! All types are immutable values; quantities and prices are stored as `f64`
//! and downstream bundle-equality comparisons use the crate-wide
//! [`crate::BUNDLE_TOL`] absolute tolerance. Duplicate
//! observations are permitted.

use crate::{Error, Result, BUNDLE_TOL};
use serde::{Deserialize, Serialize};

/// A finite dataset of `T` observations of `K` goods: strictly positive
/// prices and nonnegative quantities, both in numeraire units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    prices: Vec<Vec<f64>>,
    quantities: Vec<Vec<f64>>,
}

/// A single violation of the dataset invariants, reported with its
/// 1-based row and column position.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub reason: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at ({},{})", self.reason, self.row, self.col)
    }
}

impl Dataset {
    /// Builds a dataset from row-major price and quantity matrices,
    /// validating every invariant.
    pub fn new(prices: Vec<Vec<f64>>, quantities: Vec<Vec<f64>>) -> Result<Self> {
        let d = Dataset { prices, quantities };
        let violations = d.validate();
        if violations.is_empty() {
            Ok(d)
        } else {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidDataset(msgs.join("; ")))
        }
    }

    /// Checks all invariants and returns the exhaustive list of violations;
    /// an empty list means the dataset is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let t = self.prices.len();
        if t == 0 {
            out.push(Violation {
                row: 0,
                col: 0,
                reason: "dataset must contain at least one observation".into(),
            });
            return out;
        }
        if self.quantities.len() != t {
            out.push(Violation {
                row: 0,
                col: 0,
                reason: format!(
                    "price matrix has {} rows but quantity matrix has {}",
                    t,
                    self.quantities.len()
                ),
            });
            return out;
        }
        let k = self.prices[0].len();
        if k == 0 {
            out.push(Violation {
                row: 1,
                col: 0,
                reason: "dataset must contain at least one good".into(),
            });
            return out;
        }
        for (i, row) in self.prices.iter().enumerate() {
            if row.len() != k {
                out.push(Violation {
                    row: i + 1,
                    col: 0,
                    reason: format!("price row has {} entries, expected {}", row.len(), k),
                });
                continue;
            }
            for (j, &p) in row.iter().enumerate() {
                if !(p.is_finite() && p > 0.0) {
                    out.push(Violation {
                        row: i + 1,
                        col: j + 1,
                        reason: format!("nonpositive price {p}"),
                    });
                }
            }
        }
        for (i, row) in self.quantities.iter().enumerate() {
            if row.len() != k {
                out.push(Violation {
                    row: i + 1,
                    col: 0,
                    reason: format!("quantity row has {} entries, expected {}", row.len(), k),
                });
                continue;
            }
            for (j, &x) in row.iter().enumerate() {
                if !(x.is_finite() && x >= 0.0) {
                    out.push(Violation {
                        row: i + 1,
                        col: j + 1,
                        reason: format!("negative quantity {x}"),
                    });
                }
            }
        }
        out
    }

    /// Number of observations.
    pub fn t(&self) -> usize {
        self.prices.len()
    }

    /// Number of goods.
    pub fn k(&self) -> usize {
        self.prices[0].len()
    }

    pub fn price(&self, t: usize) -> &[f64] {
        &self.prices[t]
    }

    pub fn quantity(&self, t: usize) -> &[f64] {
        &self.quantities[t]
    }

    pub fn prices(&self) -> &[Vec<f64>] {
        &self.prices
    }

    pub fn quantities(&self) -> &[Vec<f64>] {
        &self.quantities
    }

    /// Returns a new dataset with the candidate appended as observation
    /// `T+1`; the receiver is unchanged. Duplicates are allowed.
    pub fn augment(&self, point: &CandidatePoint) -> Result<Dataset> {
        point.check(self.k())?;
        let mut prices = self.prices.clone();
        let mut quantities = self.quantities.clone();
        prices.push(point.price.clone());
        quantities.push(point.quantity.clone());
        Ok(Dataset { prices, quantities })
    }

    /// Replaces the quantity matrix, keeping prices fixed. Used by the
    /// shape-restriction analysis, which varies quantities at fixed prices.
    pub fn with_quantities(&self, quantities: Vec<Vec<f64>>) -> Result<Dataset> {
        Dataset::new(self.prices.clone(), quantities)
    }

    /// Indices of observations whose quantity bundle equals `x` within the
    /// bundle tolerance.
    pub fn matching_quantity_rows(&self, x: &[f64]) -> Vec<usize> {
        (0..self.t())
            .filter(|&t| bundles_equal(self.quantity(t), x))
            .collect()
    }
}

/// Componentwise equality at the documented absolute tolerance.
pub fn bundles_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(u, v)| (u - v).abs() <= BUNDLE_TOL)
}

/// A nonnegative level of approximation error, in numeraire units.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub const ZERO: Epsilon = Epsilon(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Epsilon(value))
        } else {
            Err(Error::InvalidInput(format!(
                "approximation error must be a finite nonnegative real, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A candidate quantity-price tuple to compare against a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePoint {
    pub quantity: Vec<f64>,
    pub price: Vec<f64>,
}

impl CandidatePoint {
    pub fn new(quantity: Vec<f64>, price: Vec<f64>) -> Result<Self> {
        let c = CandidatePoint { quantity, price };
        c.check(c.price.len())?;
        Ok(c)
    }

    fn check(&self, k: usize) -> Result<()> {
        if self.price.len() != k || self.quantity.len() != k {
            return Err(Error::InvalidInput(format!(
                "candidate has {} prices and {} quantities, expected {k} each",
                self.price.len(),
                self.quantity.len()
            )));
        }
        if !self.price.iter().all(|&p| p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidInput(
                "candidate prices must be strictly positive".into(),
            ));
        }
        if !self.quantity.iter().all(|&x| x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidInput(
                "candidate quantities must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Feasibility of a bound computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundStatus {
    Feasible,
    Infeasible,
}

/// A lower/upper bound pair with explicit infinities.
///
/// When `status` is `Infeasible` the endpoints carry no meaning; the
/// accessors return `None` in that case so they cannot be misread.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInterval {
    lower: f64,
    upper: f64,
    status: BoundStatus,
}

impl BoundInterval {
    pub fn feasible(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper + 1e-9, "lower {lower} > upper {upper}");
        BoundInterval {
            lower,
            upper,
            status: BoundStatus::Feasible,
        }
    }

    pub fn infeasible() -> Self {
        BoundInterval {
            lower: f64::NAN,
            upper: f64::NAN,
            status: BoundStatus::Infeasible,
        }
    }

    pub fn status(&self) -> BoundStatus {
        self.status
    }

    pub fn is_feasible(&self) -> bool {
        self.status == BoundStatus::Feasible
    }

    /// Lower endpoint; `-inf` encodes an unbounded-below side.
    pub fn lower(&self) -> Option<f64> {
        self.is_feasible().then_some(self.lower)
    }

    /// Upper endpoint; `+inf` encodes an unbounded-above side.
    pub fn upper(&self) -> Option<f64> {
        self.is_feasible().then_some(self.upper)
    }
}

/// The inner product `a . b`.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
