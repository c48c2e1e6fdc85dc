/*!
Counterfactual demand and welfare bounds for approximately quasilinear
consumer data.

Given a finite dataset of price/quantity observations, this crate

* measures how far the data are from being rationalizable by a quasilinear
  utility function (the minimal approximation error, in numeraire units),
* bounds counterfactual demand at new prices,
* bounds utility differences between consumption bundles and changes in
  approximate indirect utility (consumer surplus) between prices, and
* constructs explicit piecewise-affine utilities that witness the bounds.

Every bound is the value of a linear program solved by the built-in dense
simplex solver in [`lp`], and every linear program has an independent
combinatorial oracle (cycle or sequence enumeration) used throughout the
test suite to cross-check values.

A kernel pre-processing stage in [`estimation`] turns raw cross-sectional
micro data into the price/quantity datasets the bound machinery consumes.

# Example

```
use qlbounds::model::Dataset;
use qlbounds::rationality::{epsilon_star_cycles, epsilon_star_lp};

// Two observations of one good: price up, quantity up. Not rationalizable
// by quasilinear utility without allowing some approximation error.
let data = Dataset::new(
    vec![vec![1.0], vec![2.0]], // prices
    vec![vec![1.0], vec![2.0]], // quantities
)
.unwrap();

let eps = epsilon_star_lp(&data).unwrap();
assert!((eps.value() - 0.5).abs() < 1e-9);

// The cycle route agrees and names the offending pair of observations.
let (eps_c, cert) = epsilon_star_cycles(&data);
assert!((eps_c.value() - 0.5).abs() < 1e-9);
assert_eq!(cert.unwrap().sequence, vec![0, 1]);
```

# Examples

One runnable example per capability lives in `examples/`:

* `epsilon_star` — the three routes to the minimal error and the cycle
  certificate
* `demand_bounds` — rectangular vs. hyperbolic demand bounds and an
  error-level sensitivity sweep
* `welfare_bounds` — surplus bounds, the sequence sandwich, and the
  integral cross-check
* `utility_bounds` — cardinal utility-difference bounds and their trivial
  cases
* `rationalizing_utility` — constructing and verifying an explicit
  utility, plus the conjugate round trip
* `kernel_pipeline` — cross-section to smoothed dataset to bounds
* `expenditure_restrictions` — tightening bounds with side conditions

```bash
cargo run -p qlbounds --example demand_bounds
```

The `qlbounds` binary wraps the same entry points for batch CSV work; see
the [`cli`] module for formats and exit codes.
*/

pub mod cli;
pub mod construct;
pub mod counterfactual;
pub mod estimation;
pub mod lp;
pub mod model;
pub mod rationality;
pub(crate) mod seq;
pub mod welfare;

use thiserror::Error;

/// Errors produced by the analysis layers.
///
/// Linear-program structural errors keep their own type ([`lp::LpError`])
/// since the solver is usable on its own.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dataset has {t} observations, exceeding the enumeration cap {cap}")]
    CapExceeded { t: usize, cap: usize },
    #[error(
        "approximation error {epsilon} is below the minimal rationalizing level {epsilon_star}"
    )]
    BelowMinimalEpsilon { epsilon: f64, epsilon_star: f64 },
    #[error("kernel estimate has no support: {0}")]
    NoSupport(String),
    #[error("rank-deficient regressor matrix: {0}")]
    RankDeficient(String),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance for comparing two reported bound or error values.
pub const VALUE_TOL: f64 = 1e-7;

/// Absolute tolerance for deciding whether two bundles are the same point.
pub const BUNDLE_TOL: f64 = 1e-9;
