//! Bounds on the welfare change of a price move, measured in numeraire
//! units of approximate indirect utility.
//!
//! ```bash
//! cargo run --example welfare_bounds
//! ```

use qlbounds::model::{Dataset, Epsilon};
use qlbounds::rationality::epsilon_star;
use qlbounds::welfare::{
    finiteness_region, indirect_diff_bounds, indirect_diff_sequences, surplus_integral,
    WelfareQuery, SEQUENCE_CAP,
};

fn main() {
    let d = Dataset::new(
        vec![vec![1.0], vec![1.5], vec![2.0], vec![3.0]],
        vec![vec![4.0], vec![3.0], vec![2.5], vec![1.0]],
    )
    .unwrap();
    let star = epsilon_star(&d);
    println!("minimal error of the dataset: {:.6}\n", star.value());

    // Welfare change of a price drop from 2.5 to 1.2, at the adaptive
    // error level and at a widened one.
    for extra in [0.0, 0.2] {
        let e = Epsilon::new(star.value() + extra).unwrap();
        let q = WelfareQuery::new(vec![1.2], vec![2.5], e).unwrap();
        let b = indirect_diff_bounds(&d, &q).unwrap();
        println!(
            "price 2.5 -> 1.2 at error {:.2}: welfare change in [{:.4}, {:.4}] ({:?})",
            e.value(),
            b.lower().unwrap(),
            b.upper().unwrap(),
            finiteness_region(&d, &q).unwrap(),
        );
    }

    // When the new price is one of the observed prices, the sequence
    // estimate brackets the program value within one error level.
    let e = Epsilon::new(star.value() + 0.1).unwrap();
    let q = WelfareQuery::new(vec![2.0], vec![3.0], e).unwrap();
    let b = indirect_diff_bounds(&d, &q).unwrap();
    let h = indirect_diff_sequences(&d, e, 2, &[3.0], SEQUENCE_CAP).unwrap();
    println!(
        "\nprice 3.0 -> 2.0: program value {:.4}, sequence estimate {:.4} (+/- {:.2})",
        b.upper().unwrap(),
        h.value,
        e.value()
    );
    println!(
        "attaining sequence: {:?}",
        h.sequence.iter().map(|i| i + 1).collect::<Vec<_>>()
    );

    // On consistent data at zero error, integrating the upper demand
    // curve along a price decrease recovers the surplus exactly.
    let consistent = Dataset::new(
        vec![vec![1.0], vec![2.0], vec![3.0]],
        vec![vec![3.0], vec![2.0], vec![1.0]],
    )
    .unwrap();
    let v = surplus_integral(&consistent, 1.5, 2.8, 4000).unwrap();
    let q = WelfareQuery::new(vec![1.5], vec![2.8], Epsilon::ZERO).unwrap();
    let upper = indirect_diff_bounds(&consistent, &q)
        .unwrap()
        .upper()
        .unwrap();
    println!("\nsurplus of 2.8 -> 1.5 on consistent data:");
    println!("  trapezoidal integral : {v:.5}");
    println!("  program value        : {upper:.5}");

    // A query below every observed price has no finite upper bound.
    let q = WelfareQuery::new(vec![0.5], vec![2.0], Epsilon::ZERO).unwrap();
    let b = indirect_diff_bounds(&consistent, &q).unwrap();
    println!(
        "\nnew price below all data: upper bound {:?}, region {:?}",
        b.upper().unwrap(),
        finiteness_region(&consistent, &q).unwrap()
    );
}
