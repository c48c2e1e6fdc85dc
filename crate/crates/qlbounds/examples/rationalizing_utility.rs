//! Build an explicit utility that witnesses a dataset's rationalizability,
//! verify it by linear programming, and run the conjugate round trip on
//! its indirect utility.
//!
//! ```bash
//! cargo run --example rationalizing_utility
//! ```

use qlbounds::construct::{
    build_rationalizing_utility, conjugate_utility, dual_roundtrip_check, indirect_utility,
    verify_rationalization, verify_rationalization_detail, PiecewiseAffineIndirect, CONSTRUCT_CAP,
};
use qlbounds::model::{Dataset, Epsilon};
use qlbounds::rationality::epsilon_star;

fn main() {
    let d = Dataset::new(
        vec![vec![1.0], vec![2.0], vec![3.0]],
        vec![vec![3.0], vec![3.5], vec![1.0]],
    )
    .unwrap();
    let star = epsilon_star(&d);
    println!("minimal error: {:.6}", star.value());

    let u = build_rationalizing_utility(&d, star, CONSTRUCT_CAP).unwrap();
    println!(
        "constructed utility with {} affine pieces:",
        u.pieces().len()
    );
    for (slope, intercept) in u.pieces().iter().take(4) {
        println!("  min-piece: {:.3} * x + {:.3}", slope[0], intercept);
    }
    if u.pieces().len() > 4 {
        println!("  ... and {} more", u.pieces().len() - 4);
    }

    println!(
        "verifies at its own level: {}",
        verify_rationalization(&u, &d, star).unwrap()
    );
    let tighter = Epsilon::new((star.value() - 0.2).max(0.0)).unwrap();
    let detail = verify_rationalization_detail(&u, &d, tighter).unwrap();
    println!(
        "verification at error {:.2}: ok = {}, worst excess {:.4}",
        tighter.value(),
        detail.ok(),
        detail.worst_excess
    );

    println!("\nindirect utility of the construction:");
    for p in [0.8, 1.5, 2.5, 3.5] {
        let v = indirect_utility(&u, &[p]).unwrap();
        if v.is_finite() {
            println!("  V({p}) = {v:.4}");
        } else {
            println!("  V({p}) = inf");
        }
    }

    // Conjugate round trip: a decreasing convex max-of-affine indirect
    // utility goes to its dual utility and back unchanged.
    let v = PiecewiseAffineIndirect::new(vec![
        (vec![-3.0], 6.0),
        (vec![-1.0], 2.0),
        (vec![0.0], -1.0),
    ])
    .unwrap();
    let grid = [0.5, 1.0, 1.8, 2.5, 4.0];
    println!(
        "\nconjugate round trip on a three-piece indirect utility: {}",
        dual_roundtrip_check(&v, &grid, 1e-6).unwrap()
    );
    let dual = conjugate_utility(&v, &grid).unwrap();
    println!(
        "dual utility has {} pieces; value at x=1: {:.4}",
        dual.pieces().len(),
        dual.evaluate(&[1.0])
    );
}
