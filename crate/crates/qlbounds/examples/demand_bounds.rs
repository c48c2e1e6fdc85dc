//! Sharp bounds on counterfactual demand over a price grid.
//!
//! Reproduces the two qualitative regimes: rectangular steps on exactly
//! consistent data and hyperbolic envelopes once approximation error is
//! allowed, plus a sensitivity sweep across error levels.
//!
//! ```bash
//! cargo run --example demand_bounds
//! ```

use qlbounds::counterfactual::quantity_bounds;
use qlbounds::model::{Dataset, Epsilon};
use qlbounds::rationality::epsilon_star;

fn show(v: f64) -> String {
    if v.is_finite() {
        format!("{v:8.4}")
    } else {
        format!("{:>8}", "inf")
    }
}

fn print_grid(d: &Dataset, eps: Epsilon, label: &str) {
    println!("{label} (error level {:.4}):", eps.value());
    println!("  {:>8}  {:>8}  {:>8}", "price", "lower", "upper");
    for i in 0..13 {
        let p = 0.6 + 0.3 * i as f64;
        let b = quantity_bounds(d, eps, &[p], 0, None).unwrap();
        println!(
            "  {:>8.2}  {}  {}",
            p,
            show(b.lower().unwrap()),
            show(b.upper().unwrap())
        );
    }
}

fn main() {
    // Exactly consistent: decreasing demand observed at four prices.
    let consistent = Dataset::new(
        vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
        vec![vec![4.0], vec![3.0], vec![2.0], vec![1.0]],
    )
    .unwrap();
    print_grid(&consistent, epsilon_star(&consistent), "rectangular regime");

    // One law-of-demand violation forces a positive error level and the
    // steps soften into hyperbolas.
    let violating = Dataset::new(
        vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
        vec![vec![3.0], vec![1.0], vec![2.0], vec![1.0]],
    )
    .unwrap();
    let star = epsilon_star(&violating);
    print_grid(&violating, star, "\nhyperbolic regime");

    // Sensitivity: widening the allowance can only widen the interval.
    println!("\nsensitivity sweep at price 2.5:");
    for extra in [0.0, 0.1, 0.25, 0.5] {
        let e = Epsilon::new(star.value() + extra).unwrap();
        let b = quantity_bounds(&violating, e, &[2.5], 0, None).unwrap();
        println!(
            "  error {:.4}: [{}, {}]",
            e.value(),
            show(b.lower().unwrap()),
            show(b.upper().unwrap())
        );
    }
}
