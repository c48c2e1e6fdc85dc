//! Measure how far a dataset is from quasilinear rationality.
//!
//! Computes the minimal approximation error three independent ways and
//! prints the cycle certificate that pins the binding violation.
//!
//! ```bash
//! cargo run --example epsilon_star
//! ```

use qlbounds::model::{Dataset, Epsilon};
use qlbounds::rationality::{
    epsilon_star_bruteforce, epsilon_star_cycles, epsilon_star_lp, is_rationalizable,
    BRUTEFORCE_CAP,
};

fn main() {
    // Price rises from 1 to 2 while quantity rises from 1 to 2: a clear
    // violation of the law of demand.
    let violating = Dataset::new(vec![vec![1.0], vec![2.0]], vec![vec![1.0], vec![2.0]]).unwrap();

    let by_lp = epsilon_star_lp(&violating).unwrap();
    let (by_cycles, certificate) = epsilon_star_cycles(&violating);
    let by_brute = epsilon_star_bruteforce(&violating, BRUTEFORCE_CAP).unwrap();

    println!("violating dataset:");
    println!("  program route      : {:.6}", by_lp.value());
    println!("  cycle route        : {:.6}", by_cycles.value());
    println!("  exhaustive route   : {:.6}", by_brute.value());
    if let Some(cert) = certificate {
        println!(
            "  binding cycle      : observations {:?} with mean weight {:.6}",
            cert.sequence.iter().map(|i| i + 1).collect::<Vec<_>>(),
            cert.mean_weight
        );
    }

    for level in [0.49, 0.5, 1.0] {
        let ok = is_rationalizable(&violating, Epsilon::new(level).unwrap()).unwrap();
        println!("  rationalizable at error {level:>4}: {ok}");
    }

    // A downward-sloping pair needs no approximation error at all.
    let consistent = Dataset::new(vec![vec![1.0], vec![2.0]], vec![vec![2.0], vec![1.0]]).unwrap();
    let (e, cert) = epsilon_star_cycles(&consistent);
    println!("\nconsistent dataset:");
    println!("  minimal error      : {:.6}", e.value());
    println!("  certificate        : {:?}", cert);
}
