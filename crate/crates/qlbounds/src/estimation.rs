//! Kernel pre-processing: from raw cross-sectional records to the
//! price/quantity datasets the bound machinery consumes.
//!
//! The model is partially linear: `X = g(P, Y) + beta' W + U` with
//! `E[U | P, Y, W] = 0`. The linear part is fitted by a double-residual
//! regression (kernel-residualize `X` and `W` on `(P, Y)`, then ordinary
//! least squares), and the demand surface by a product-biweight
//! Nadaraya-Watson ratio. First-stage smoothing reuses the same bandwidth
//! configuration and is leave-in, so a record always supports its own
//! window.

#![allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra

use crate::model::Dataset;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// One raw micro observation.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub x: f64,
    pub p: f64,
    pub y: f64,
    pub w: Vec<f64>,
}

/// A cross-section of records with strictly positive prices and a common
/// covariate dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSection {
    records: Vec<Record>,
}

impl CrossSection {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        if records.len() < 2 {
            return Err(Error::InvalidInput(
                "a cross-section needs at least two records".into(),
            ));
        }
        let d_w = records[0].w.len();
        for (i, r) in records.iter().enumerate() {
            if !(r.p.is_finite() && r.p > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "record {} has nonpositive price {}",
                    i + 1,
                    r.p
                )));
            }
            if r.w.len() != d_w {
                return Err(Error::InvalidInput(format!(
                    "record {} has {} covariates, expected {d_w}",
                    i + 1,
                    r.w.len()
                )));
            }
            if !r.x.is_finite() || !r.y.is_finite() || r.w.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "record {} contains a non-finite value",
                    i + 1
                )));
            }
        }
        Ok(CrossSection { records })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn d_w(&self) -> usize {
        self.records[0].w.len()
    }
}

/// Bandwidths and trimming quantiles for the smoothing stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    pub h_p: f64,
    pub h_y: f64,
    pub trim_low: f64,
    pub trim_high: f64,
}

impl KernelConfig {
    pub fn new(h_p: f64, h_y: f64, trim_low: f64, trim_high: f64) -> Result<Self> {
        if !(h_p.is_finite() && h_p > 0.0 && h_y.is_finite() && h_y > 0.0) {
            return Err(Error::InvalidInput("bandwidths must be positive".into()));
        }
        if !(0.0..=1.0).contains(&trim_low)
            || !(0.0..=1.0).contains(&trim_high)
            || trim_low >= trim_high
        {
            return Err(Error::InvalidInput(format!(
                "trim quantiles must satisfy 0 <= low < high <= 1, got ({trim_low}, {trim_high})"
            )));
        }
        Ok(KernelConfig {
            h_p,
            h_y,
            trim_low,
            trim_high,
        })
    }

    /// The default configuration: bandwidth `scale` times the sample
    /// standard deviation in each dimension (the conventional choice is
    /// `scale = 0.75`), which satisfies the bandwidth ratio rule by
    /// construction, and 5%/95% trimming.
    pub fn standardized(cs: &CrossSection, scale: f64) -> Result<Self> {
        let sd_p = population_sd(cs.records().iter().map(|r| r.p));
        let sd_y = population_sd(cs.records().iter().map(|r| r.y));
        if sd_p <= 0.0 || sd_y <= 0.0 {
            return Err(Error::InvalidInput(
                "zero variance in prices or incomes; cannot scale bandwidths".into(),
            ));
        }
        KernelConfig::new(scale * sd_p, scale * sd_y, 0.05, 0.95)
    }
}

/// The biweight kernel `(15/16)(1 - u^2)^2` on `|u| <= 1`, zero outside.
pub fn biweight(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        let s = 1.0 - u * u;
        0.9375 * s * s
    } else {
        0.0
    }
}

/// Price bandwidth implied by the ratio rule `h_p / h_y = sd_P / sd_Y`
/// (population standard deviations).
pub fn bandwidth_rule(cs: &CrossSection, h_y: f64) -> Result<f64> {
    if !(h_y.is_finite() && h_y > 0.0) {
        return Err(Error::InvalidInput(
            "income bandwidth must be positive".into(),
        ));
    }
    let sd_p = population_sd(cs.records().iter().map(|r| r.p));
    let sd_y = population_sd(cs.records().iter().map(|r| r.y));
    if sd_p <= 0.0 || sd_y <= 0.0 {
        return Err(Error::InvalidInput(
            "zero variance in prices or incomes; the bandwidth ratio is undefined".into(),
        ));
    }
    Ok(h_y * sd_p / sd_y)
}

fn population_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Result of the double-residual regression.
#[derive(Clone, Debug)]
pub struct RobinsonFit {
    pub beta: Vec<f64>,
    /// Records dropped because their kernel window was empty (cannot
    /// happen with leave-in smoothing; reported for the contract).
    pub excluded: usize,
}

/// Estimates the linear coefficients of the partially linear model by
/// regressing kernel-residualized `X` on kernel-residualized `W`.
pub fn robinson_beta(cs: &CrossSection, cfg: &KernelConfig) -> Result<RobinsonFit> {
    let d_w = cs.d_w();
    if d_w == 0 {
        return Err(Error::InvalidInput(
            "the double-residual regression needs at least one covariate".into(),
        ));
    }
    let n = cs.n();
    let rec = cs.records();

    let mut rx = Vec::with_capacity(n);
    let mut rw: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut excluded = 0usize;
    for i in 0..n {
        let mut denom = 0.0;
        let mut num_x = 0.0;
        let mut num_w = vec![0.0; d_w];
        for j in 0..n {
            let weight = biweight((rec[j].p - rec[i].p) / cfg.h_p)
                * biweight((rec[j].y - rec[i].y) / cfg.h_y);
            if weight == 0.0 {
                continue;
            }
            denom += weight;
            num_x += weight * rec[j].x;
            for (acc, &w) in num_w.iter_mut().zip(&rec[j].w) {
                *acc += weight * w;
            }
        }
        if denom <= 0.0 {
            excluded += 1;
            continue;
        }
        rx.push(rec[i].x - num_x / denom);
        rw.push(
            rec[i]
                .w
                .iter()
                .zip(&num_w)
                .map(|(&w, &nw)| w - nw / denom)
                .collect(),
        );
    }
    if rx.len() < d_w {
        return Err(Error::RankDeficient(format!(
            "only {} usable records for {d_w} covariates",
            rx.len()
        )));
    }

    // Normal equations, solved by Gaussian elimination with pivoting.
    let mut gram = vec![vec![0.0f64; d_w]; d_w];
    let mut rhs = vec![0.0f64; d_w];
    for (res_x, res_w) in rx.iter().zip(&rw) {
        for a in 0..d_w {
            rhs[a] += res_w[a] * res_x;
            for b in a..d_w {
                gram[a][b] += res_w[a] * res_w[b];
            }
        }
    }
    for a in 0..d_w {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
    }
    let scale = gram
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let beta = solve_sym(gram, rhs).ok_or_else(|| {
        Error::RankDeficient(format!(
            "residualized covariate matrix is singular (scale {scale:.3e})"
        ))
    })?;
    Ok(RobinsonFit { beta, excluded })
}

fn solve_sym(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale.max(1e-300);
    for k in 0..n {
        let piv_row = (k..n).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())?;
        if a[piv_row][k].abs() <= tol {
            return None;
        }
        a.swap(k, piv_row);
        b.swap(k, piv_row);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in (k + 1)..n {
            acc -= a[k][j] * x[j];
        }
        x[k] = acc / a[k][k];
    }
    Some(x)
}

/// The Nadaraya-Watson demand estimate at `(p, y_tilde)`: the
/// product-biweight weighted mean of the linearly adjusted outcomes
/// `X_j - beta' W_j`. Errors when no record falls in the window.
pub fn kernel_demand(
    cs: &CrossSection,
    beta: &[f64],
    p: f64,
    y_tilde: f64,
    cfg: &KernelConfig,
) -> Result<f64> {
    if beta.len() != cs.d_w() {
        return Err(Error::InvalidInput(format!(
            "beta has {} entries for {} covariates",
            beta.len(),
            cs.d_w()
        )));
    }
    let mut num = 0.0;
    let mut denom = 0.0;
    for r in cs.records() {
        let weight = biweight((r.p - p) / cfg.h_p) * biweight((r.y - y_tilde) / cfg.h_y);
        if weight == 0.0 {
            continue;
        }
        let adjusted = r.x - r.w.iter().zip(beta).map(|(w, b)| w * b).sum::<f64>();
        num += weight * adjusted;
        denom += weight;
    }
    if denom > 0.0 {
        Ok(num / denom)
    } else {
        Err(Error::NoSupport(format!(
            "no records within the kernel window at (p = {p}, y = {y_tilde})"
        )))
    }
}

/// A pseudo-dataset plus bookkeeping from its construction.
#[derive(Clone, Debug)]
pub struct PseudoDataset {
    pub dataset: Dataset,
    /// Records surviving the quantile trim.
    pub retained: usize,
    /// Demand estimates clamped up to zero.
    pub clamped: usize,
}

/// Builds the single-good dataset `{(g_hat(P_i, y_tilde), P_i)}` over the
/// retained prices: records strictly inside the trim quantiles, evaluated
/// with the fitted linear part removed, negative estimates clamped to
/// zero, rows ordered by price.
pub fn build_pseudo_dataset(
    cs: &CrossSection,
    y_tilde: f64,
    cfg: &KernelConfig,
    beta: &[f64],
) -> Result<PseudoDataset> {
    let mut sorted_prices: Vec<f64> = cs.records().iter().map(|r| r.p).collect();
    sorted_prices.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q_lo = interpolated_quantile(&sorted_prices, cfg.trim_low);
    let q_hi = interpolated_quantile(&sorted_prices, cfg.trim_high);

    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut clamped = 0usize;
    for r in cs.records() {
        if !(r.p > q_lo && r.p < q_hi) {
            continue;
        }
        let mut g = kernel_demand(cs, beta, r.p, y_tilde, cfg)?;
        if g < 0.0 {
            g = 0.0;
            clamped += 1;
        }
        rows.push((r.p, g));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(
            "no records remain inside the trim quantiles".into(),
        ));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let retained = rows.len();
    let dataset = Dataset::new(
        rows.iter().map(|&(p, _)| vec![p]).collect(),
        rows.iter().map(|&(_, x)| vec![x]).collect(),
    )?;
    Ok(PseudoDataset {
        dataset,
        retained,
        clamped,
    })
}

/// Empirical quantile with linear interpolation between order statistics.
fn interpolated_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

/// The true demand surface of a synthetic population; evaluation clamps
/// at zero so sampled curves stay weakly decreasing in price.
#[derive(Clone, Debug)]
pub enum DemandCurve {
    /// `g(p, y) = intercept - price_slope * p + income_slope * y`.
    Affine {
        intercept: f64,
        price_slope: f64,
        income_slope: f64,
    },
    /// Minimum over affine pieces of the same shape.
    MinOfAffine(Vec<(f64, f64, f64)>),
}

impl DemandCurve {
    pub fn evaluate(&self, p: f64, y: f64) -> f64 {
        let raw = match self {
            DemandCurve::Affine {
                intercept,
                price_slope,
                income_slope,
            } => intercept - price_slope * p + income_slope * y,
            DemandCurve::MinOfAffine(pieces) => pieces
                .iter()
                .map(|&(a, b, c)| a - b * p + c * y)
                .fold(f64::INFINITY, f64::min),
        };
        raw.max(0.0)
    }
}

/// Population description for the synthetic generator.
#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub demand: DemandCurve,
    pub beta: Vec<f64>,
    pub noise_sd: f64,
    pub price_range: (f64, f64),
    pub income_range: (f64, f64),
    pub covariate_sd: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            demand: DemandCurve::Affine {
                intercept: 5.0,
                price_slope: 1.5,
                income_slope: 0.5,
            },
            beta: vec![0.8],
            noise_sd: 0.1,
            price_range: (1.0, 3.0),
            income_range: (1.0, 3.0),
            covariate_sd: 1.0,
        }
    }
}

/// Draws `n` i.i.d. records `X = g(P, Y) + beta' W + U`, deterministic in
/// the seed. `U` is scaled from a standard normal stream, so two spec
/// values differing only in `noise_sd` share every other draw.
pub fn synth_cross_section(seed: u64, n: usize, spec: &SynthSpec) -> Result<CrossSection> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least two records".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let p = rng.gen_range(spec.price_range.0..spec.price_range.1);
        let y = rng.gen_range(spec.income_range.0..spec.income_range.1);
        let w: Vec<f64> = (0..spec.beta.len())
            .map(|_| spec.covariate_sd * std_normal.sample(&mut rng))
            .collect();
        let u = spec.noise_sd * std_normal.sample(&mut rng);
        let x = spec.demand.evaluate(p, y)
            + spec.beta.iter().zip(&w).map(|(b, w)| b * w).sum::<f64>()
            + u;
        records.push(Record { x, p, y, w });
    }
    CrossSection::new(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rationality::epsilon_star;

    fn flat_cfg(h: f64) -> KernelConfig {
        KernelConfig::new(h, h, 0.05, 0.95).unwrap()
    }

    #[test]
    fn biweight_values() {
        assert_eq!(biweight(0.0), 0.9375);
        assert_eq!(biweight(1.0), 0.0);
        assert_eq!(biweight(-1.0), 0.0);
        assert_eq!(biweight(0.5), 0.52734375);
        assert_eq!(biweight(2.0), 0.0);
    }

    #[test]
    fn bandwidth_ratio_rule() {
        let cs = CrossSection::new(vec![
            Record {
                x: 0.0,
                p: 1.0,
                y: 0.0,
                w: vec![],
            },
            Record {
                x: 0.0,
                p: 3.0,
                y: 4.0,
                w: vec![],
            },
        ])
        .unwrap();
        assert!((bandwidth_rule(&cs, 1.0).unwrap() - 0.5).abs() < 1e-12);
        // shifting incomes leaves the ratio unchanged
        let shifted = CrossSection::new(vec![
            Record {
                x: 0.0,
                p: 1.0,
                y: 10.0,
                w: vec![],
            },
            Record {
                x: 0.0,
                p: 3.0,
                y: 14.0,
                w: vec![],
            },
        ])
        .unwrap();
        assert!((bandwidth_rule(&shifted, 1.0).unwrap() - 0.5).abs() < 1e-12);
        // equal dispersions give the unit ratio
        let unit = CrossSection::new(vec![
            Record {
                x: 0.0,
                p: 1.0,
                y: 1.0,
                w: vec![],
            },
            Record {
                x: 0.0,
                p: 2.0,
                y: 2.0,
                w: vec![],
            },
        ])
        .unwrap();
        assert!((bandwidth_rule(&unit, 0.7).unwrap() - 0.7).abs() < 1e-12);
        // degenerate dispersion is an error
        let flat = CrossSection::new(vec![
            Record {
                x: 0.0,
                p: 1.0,
                y: 1.0,
                w: vec![],
            },
            Record {
                x: 0.0,
                p: 1.0,
                y: 2.0,
                w: vec![],
            },
        ])
        .unwrap();
        assert!(bandwidth_rule(&flat, 1.0).is_err());
    }

    #[test]
    fn robinson_rejects_constant_covariate() {
        let spec = SynthSpec {
            beta: vec![0.5],
            covariate_sd: 0.0, // W identically zero: absorbed by the smooth part
            noise_sd: 0.0,
            ..Default::default()
        };
        let cs = synth_cross_section(3, 60, &spec).unwrap();
        let cfg = KernelConfig::standardized(&cs, 0.75).unwrap();
        assert!(matches!(
            robinson_beta(&cs, &cfg),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn robinson_recovers_pure_linear_effect() {
        // X = beta'W exactly, flat demand, huge bandwidths: residualizing
        // demeans globally and the least squares slope is exact.
        let spec = SynthSpec {
            demand: DemandCurve::Affine {
                intercept: 0.0,
                price_slope: 0.0,
                income_slope: 0.0,
            },
            beta: vec![1.3, -0.6],
            noise_sd: 0.0,
            covariate_sd: 1.0,
            ..Default::default()
        };
        let cs = synth_cross_section(11, 80, &spec).unwrap();
        let fit = robinson_beta(&cs, &flat_cfg(1e6)).unwrap();
        assert_eq!(fit.excluded, 0);
        assert!((fit.beta[0] - 1.3).abs() < 1e-6, "beta {:?}", fit.beta);
        assert!((fit.beta[1] + 0.6).abs() < 1e-6);
    }

    #[test]
    fn robinson_two_point_slope() {
        let cs = CrossSection::new(vec![
            Record {
                x: 1.0,
                p: 2.0,
                y: 1.0,
                w: vec![0.5],
            },
            Record {
                x: 4.0,
                p: 2.0,
                y: 1.0,
                w: vec![2.0],
            },
        ])
        .unwrap();
        let fit = robinson_beta(&cs, &flat_cfg(1.0)).unwrap();
        assert!((fit.beta[0] - (4.0 - 1.0) / (2.0 - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn kernel_demand_weighted_mean() {
        // single record: the adjusted outcome itself
        let cs = CrossSection::new(vec![
            Record {
                x: 3.0,
                p: 1.0,
                y: 1.0,
                w: vec![],
            },
            Record {
                x: 3.0,
                p: 50.0,
                y: 1.0,
                w: vec![],
            },
        ])
        .unwrap();
        let cfg = flat_cfg(1.0);
        assert!((kernel_demand(&cs, &[], 1.2, 1.0, &cfg).unwrap() - 3.0).abs() < 1e-12);
        // out of every window: explicit error, never 0/0
        assert!(matches!(
            kernel_demand(&cs, &[], 10.0, 1.0, &cfg),
            Err(Error::NoSupport(_))
        ));
    }

    #[test]
    fn kernel_demand_two_point_ratio() {
        // weights 0.9375 and 0.52734375 on residuals 1 and 3 average to 1.72
        let cs = CrossSection::new(vec![
            Record {
                x: 1.0,
                p: 2.0,
                y: 1.0,
                w: vec![],
            },
            Record {
                x: 3.0,
                p: 2.5,
                y: 1.0,
                w: vec![],
            },
        ])
        .unwrap();
        let got = kernel_demand(&cs, &[], 2.0, 1.0, &flat_cfg(1.0)).unwrap();
        assert!((got - 1.72).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn kernel_demand_scale_invariance() {
        // symmetric records with equal adjusted outcomes average to that value
        let cs = CrossSection::new(vec![
            Record {
                x: 2.0,
                p: 1.8,
                y: 1.0,
                w: vec![],
            },
            Record {
                x: 2.0,
                p: 2.2,
                y: 1.0,
                w: vec![],
            },
        ])
        .unwrap();
        let got = kernel_demand(&cs, &[], 2.0, 1.0, &flat_cfg(1.0)).unwrap();
        assert!((got - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trim_retains_strict_interior() {
        let records: Vec<Record> = (0..100)
            .map(|i| Record {
                x: 1.0,
                p: 1.0 + i as f64 * 0.01,
                y: 1.0,
                w: vec![],
            })
            .collect();
        let cs = CrossSection::new(records).unwrap();
        let cfg = KernelConfig::new(0.5, 0.5, 0.05, 0.95).unwrap();
        let out = build_pseudo_dataset(&cs, 1.0, &cfg, &[]).unwrap();
        assert_eq!(out.retained, 90);
        assert_eq!(out.dataset.t(), 90);
        // rows ordered by price
        let prices: Vec<f64> = out.dataset.prices().iter().map(|r| r[0]).collect();
        assert!(prices.windows(2).all(|w| w[0] <= w[1]));
        assert!(out.dataset.validate().is_empty());
    }

    #[test]
    fn negative_estimates_are_clamped_and_counted() {
        let records: Vec<Record> = (0..20)
            .map(|i| Record {
                x: if i < 10 { -2.0 } else { 3.0 },
                p: 1.0 + i as f64 * 0.1,
                y: 1.0,
                w: vec![],
            })
            .collect();
        let cs = CrossSection::new(records).unwrap();
        let cfg = KernelConfig::new(0.15, 0.5, 0.0001, 0.9999).unwrap();
        let out = build_pseudo_dataset(&cs, 1.0, &cfg, &[]).unwrap();
        assert!(out.clamped > 0);
        assert!(out.dataset.quantities().iter().all(|q| q[0] >= 0.0));
    }

    #[test]
    fn synthetic_generator_is_deterministic() {
        let spec = SynthSpec::default();
        let a = synth_cross_section(7, 50, &spec).unwrap();
        let b = synth_cross_section(7, 50, &spec).unwrap();
        assert_eq!(a, b);
        let c = synth_cross_section(8, 50, &spec).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noiseless_zero_covariates_hit_the_curve() {
        let spec = SynthSpec {
            noise_sd: 0.0,
            covariate_sd: 0.0,
            beta: vec![0.4],
            ..Default::default()
        };
        let cs = synth_cross_section(5, 30, &spec).unwrap();
        for r in cs.records() {
            assert_eq!(r.x, spec.demand.evaluate(r.p, r.y));
            assert_eq!(r.w, vec![0.0]);
        }
    }

    #[test]
    fn noise_scaling_shares_the_draw_stream() {
        let base = SynthSpec {
            noise_sd: 0.2,
            ..Default::default()
        };
        let half = SynthSpec {
            noise_sd: 0.1,
            ..Default::default()
        };
        let a = synth_cross_section(13, 40, &base).unwrap();
        let b = synth_cross_section(13, 40, &half).unwrap();
        for (ra, rb) in a.records().iter().zip(b.records()) {
            assert_eq!(ra.p, rb.p);
            assert_eq!(ra.y, rb.y);
            assert_eq!(ra.w, rb.w);
            // the noise component halves exactly
            let ua = ra.x
                - base.demand.evaluate(ra.p, ra.y)
                - base.beta.iter().zip(&ra.w).map(|(b, w)| b * w).sum::<f64>();
            let ub = rb.x
                - half.demand.evaluate(rb.p, rb.y)
                - half.beta.iter().zip(&rb.w).map(|(b, w)| b * w).sum::<f64>();
            assert!((ua - 2.0 * ub).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_monotone_pipeline_is_nearly_consistent() {
        let spec = SynthSpec {
            noise_sd: 0.0,
            ..Default::default()
        };
        let cs = synth_cross_section(21, 120, &spec).unwrap();
        let cfg = KernelConfig::standardized(&cs, 0.75).unwrap();
        let fit = robinson_beta(&cs, &cfg).unwrap();
        let out = build_pseudo_dataset(&cs, 2.0, &cfg, &fit.beta).unwrap();
        let star = epsilon_star(&out.dataset).value();
        assert!(star < 5e-3, "pipeline minimal error {star}");
    }
}
