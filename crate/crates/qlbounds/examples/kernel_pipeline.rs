//! The full pre-processing pipeline on synthetic micro data: partially
//! linear fit, kernel-smoothed pseudo-dataset, and bounds computed off the
//! estimated demand curve.
//!
//! ```bash
//! cargo run --example kernel_pipeline
//! ```

use qlbounds::counterfactual::quantity_bounds;
use qlbounds::estimation::{
    build_pseudo_dataset, kernel_demand, robinson_beta, synth_cross_section, DemandCurve,
    KernelConfig, SynthSpec,
};
use qlbounds::model::{Dataset, Epsilon};
use qlbounds::rationality::epsilon_star;
use qlbounds::welfare::{indirect_diff_bounds, WelfareQuery};

fn main() {
    // X = g(P, Y) + beta' W + U with a kinked true demand curve.
    let spec = SynthSpec {
        demand: DemandCurve::MinOfAffine(vec![(6.0, 1.0, 0.5), (9.0, 2.5, 0.5)]),
        beta: vec![0.8, -0.5],
        noise_sd: 0.15,
        price_range: (1.0, 3.0),
        income_range: (1.0, 3.0),
        covariate_sd: 1.0,
    };
    let cs = synth_cross_section(2024, 400, &spec).unwrap();
    println!("cross-section: {} records, {} covariates", cs.n(), cs.d_w());

    let cfg = KernelConfig::standardized(&cs, 0.75).unwrap();
    println!("bandwidths: h_p = {:.4}, h_y = {:.4}", cfg.h_p, cfg.h_y);

    let fit = robinson_beta(&cs, &cfg).unwrap();
    println!(
        "double-residual fit: beta = [{:.3}, {:.3}] (true [0.8, -0.5])",
        fit.beta[0], fit.beta[1]
    );

    // The smoothed dataset at the mean income level.
    let y_bar = cs.records().iter().map(|r| r.y).sum::<f64>() / cs.n() as f64;
    let pseudo = build_pseudo_dataset(&cs, y_bar, &cfg, &fit.beta).unwrap();
    println!(
        "pseudo-dataset at income {:.2}: {} rows retained, {} clamped",
        y_bar, pseudo.retained, pseudo.clamped
    );
    let star = epsilon_star(&pseudo.dataset);
    println!(
        "minimal error of the smoothed dataset: {:.3e}",
        star.value()
    );

    // The quadratic-size programs want a thinner grid: re-evaluate the
    // estimator at a dozen prices and bound demand and welfare there.
    let grid: Vec<f64> = (0..12).map(|i| 1.3 + 1.4 * i as f64 / 11.0).collect();
    let est = Dataset::new(
        grid.iter().map(|&p| vec![p]).collect(),
        grid.iter()
            .map(|&p| {
                vec![kernel_demand(&cs, &fit.beta, p, y_bar, &cfg)
                    .unwrap()
                    .max(0.0)]
            })
            .collect(),
    )
    .unwrap();
    let e = epsilon_star(&est);
    println!(
        "\nestimated demand with bounds at new prices (error level {:.3e}):",
        e.value()
    );
    println!("  {:>6}  {:>8}  {:>8}", "price", "lower", "upper");
    for q in [1.45, 1.9, 2.35, 2.6] {
        let b = quantity_bounds(&est, e, &[q], 0, None).unwrap();
        println!(
            "  {q:>6.2}  {:>8.4}  {:>8.4}",
            b.lower().unwrap(),
            b.upper().unwrap()
        );
    }

    let q = WelfareQuery::new(vec![1.5], vec![2.5], Epsilon::new(e.value()).unwrap()).unwrap();
    let w = indirect_diff_bounds(&est, &q).unwrap();
    println!(
        "\nwelfare change of 2.5 -> 1.5 per period: [{:.4}, {:.4}] numeraire units",
        w.lower().unwrap(),
        w.upper().unwrap()
    );
}
