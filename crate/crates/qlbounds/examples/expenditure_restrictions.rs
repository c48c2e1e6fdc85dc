//! Tightening counterfactual bounds with outside information: expenditure
//! brackets and per-good boxes, which can also empty the set.
//!
//! ```bash
//! cargo run --example expenditure_restrictions
//! ```

use qlbounds::counterfactual::{member, quantity_bounds, ExpenditureConstraint};
use qlbounds::model::{CandidatePoint, Dataset, Epsilon};
use qlbounds::rationality::epsilon_star;

fn show(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "inf".into()
    }
}

fn main() {
    // Two goods: without side information the per-good bounds are loose.
    let d = Dataset::new(
        vec![vec![1.0, 1.5], vec![2.0, 1.0]],
        vec![vec![2.0, 1.0], vec![0.5, 2.0]],
    )
    .unwrap();
    let star = epsilon_star(&d);
    // strictly inside the price hull, so the unrestricted bounds are finite
    let p = vec![2.1, 1.3];
    println!(
        "minimal error {:.4}; bounding good 1 at prices {p:?}\n",
        star.value()
    );

    let free = quantity_bounds(&d, star, &p, 0, None).unwrap();
    println!(
        "no side conditions      : [{}, {}]",
        show(free.lower().unwrap()),
        show(free.upper().unwrap())
    );

    let bracket = ExpenditureConstraint {
        min_spend: Some(2.0),
        max_spend: Some(2.6),
        ..Default::default()
    };
    let tightened = quantity_bounds(&d, star, &p, 0, Some(&bracket)).unwrap();
    println!(
        "spend in [2.0, 2.6]     : [{}, {}]",
        show(tightened.lower().unwrap()),
        show(tightened.upper().unwrap())
    );

    let boxed = ExpenditureConstraint {
        min_spend: Some(2.0),
        max_spend: Some(2.6),
        quantity_box: Some(vec![(0.0, f64::INFINITY), (1.0, 1.8)]),
    };
    let b = quantity_bounds(&d, star, &p, 0, Some(&boxed)).unwrap();
    println!(
        "plus good-2 in [1.0,1.8]: [{}, {}]",
        show(b.lower().unwrap()),
        show(b.upper().unwrap())
    );

    // Demanding implausibly high expenditure empties the set.
    let impossible = ExpenditureConstraint {
        min_spend: Some(50.0),
        ..Default::default()
    };
    let empty = quantity_bounds(&d, star, &p, 0, Some(&impossible)).unwrap();
    println!(
        "spend >= 50             : feasible = {}",
        empty.is_feasible()
    );

    // Membership checks for individual candidate tuples.
    println!();
    for quantity in [vec![1.0, 1.5], vec![4.0, 4.0]] {
        let c = CandidatePoint::new(quantity.clone(), p.clone()).unwrap();
        let inside = member(&d, star, &c).unwrap();
        println!("candidate {quantity:?} at {p:?}: consistent = {inside}");
    }

    // Widening the allowance re-admits borderline candidates.
    let widened = Epsilon::new(star.value() + 1.0).unwrap();
    let c = CandidatePoint::new(vec![4.0, 4.0], p.clone()).unwrap();
    println!(
        "same candidate at error {:.2}: consistent = {}",
        widened.value(),
        member(&d, widened, &c).unwrap()
    );
}
