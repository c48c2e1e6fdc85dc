//! Cardinal bounds on utility differences between consumption bundles.
//!
//! Informative bounds need the reference bundle to be observed; the
//! example shows both the informative and the trivial cases, and checks
//! the program against the sequence-enumeration characterization.
//!
//! ```bash
//! cargo run --example utility_bounds
//! ```

use qlbounds::model::{Dataset, Epsilon};
use qlbounds::rationality::epsilon_star;
use qlbounds::welfare::{utility_diff_bounds, utility_diff_upper_sequences, SEQUENCE_CAP};

fn show(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.4}")
    }
}

fn main() {
    // Two goods, three observations.
    let d = Dataset::new(
        vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![1.5, 1.5]],
        vec![vec![3.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0]],
    )
    .unwrap();
    let star = epsilon_star(&d);
    let e = Epsilon::new(star.value() + 0.1).unwrap();
    println!(
        "minimal error {:.4}, evaluating at {:.4}\n",
        star.value(),
        e.value()
    );

    // Compare a hypothetical bundle against the observed second bundle.
    let x1 = vec![2.5, 2.5];
    let x0 = d.quantity(1).to_vec();
    let b = utility_diff_bounds(&d, e, &x1, &x0).unwrap();
    println!(
        "u({x1:?}) - u({x0:?}) in [{}, {}]",
        show(b.lower().unwrap()),
        show(b.upper().unwrap())
    );
    let seq = utility_diff_upper_sequences(&d, e, &x1, 1, SEQUENCE_CAP).unwrap();
    println!(
        "  sequence oracle upper bound {:.4} via observations {:?}",
        seq.value,
        seq.sequence.iter().map(|i| i + 1).collect::<Vec<_>>()
    );

    // Both bundles observed: both sides finite.
    let b = utility_diff_bounds(&d, e, d.quantity(0), d.quantity(1)).unwrap();
    println!(
        "\nu(x^1) - u(x^2) in [{}, {}]",
        show(b.lower().unwrap()),
        show(b.upper().unwrap())
    );

    // Neither bundle observed: no information without shape restrictions.
    let b = utility_diff_bounds(&d, e, &[9.0, 9.0], &[8.0, 8.0]).unwrap();
    println!(
        "off-dataset pair       in [{}, {}]",
        show(b.lower().unwrap()),
        show(b.upper().unwrap())
    );

    // Same bundle twice: the difference is pinned at zero.
    let b = utility_diff_bounds(&d, e, d.quantity(2), d.quantity(2)).unwrap();
    println!(
        "identical bundles      in [{}, {}]",
        show(b.lower().unwrap()),
        show(b.upper().unwrap())
    );
}
