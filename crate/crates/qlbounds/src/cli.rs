//! Batch front end: dataset ingestion, grid sweeps of every bound, oracle
//! cross-checks, and seeded synthetic data, with CSV grids and JSON
//! scalar reports.
//!
//! Exit codes: 0 on success, 1 when independently computed values
//! disagree beyond tolerance, 2 on input or usage errors.
//!
//! Dataset CSV format: header `t,p_1..p_K,x_1..x_K`, one row per
//! observation. Cross-section CSV: header `X,P,Y,W_1..W_dW`. Floats are
//! written with 17 significant digits so a written file re-ingests to the
//! bit-identical dataset; infinite bounds serialize as the tokens `inf`
//! and `-inf`, and infeasible rows leave the bound cells empty.

use crate::construct::{build_rationalizing_utility, verify_rationalization, CONSTRUCT_CAP};
use crate::counterfactual::quantity_bounds;
use crate::estimation::{
    build_pseudo_dataset, robinson_beta, synth_cross_section, CrossSection, KernelConfig, Record,
    SynthSpec,
};
use crate::model::{BoundInterval, Dataset, Epsilon};
use crate::rationality::{
    epsilon_star, epsilon_star_bruteforce, epsilon_star_cycles, epsilon_star_lp, BRUTEFORCE_CAP,
};
use crate::welfare::{
    finiteness_region, indirect_diff_bounds, indirect_diff_sequences, utility_diff_bounds,
    utility_diff_upper_sequences, FinitenessRegion, WelfareQuery, SEQUENCE_CAP,
};
use crate::{model, Error};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Agreement tolerance for the oracle cross-checks run by `eps`/`check`.
const CHECK_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "qlbounds",
    about = "Counterfactual demand and welfare bounds for approximately quasilinear consumer data",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal approximation error by program and cycle routes, with the
    /// attaining cycle when there is one
    Eps(EpsArgs),
    /// Extremal quantity bounds for one good over a price grid
    BoundsQuantity(BoundsQuantityArgs),
    /// Bounds on the change in approximate indirect utility per price pair
    BoundsWelfare(BoundsWelfareArgs),
    /// Bounds on utility differences per bundle pair
    BoundsUtility(BoundsUtilityArgs),
    /// Kernel pre-processing: cross-section CSV to pseudo-dataset CSV
    Preprocess(PreprocessArgs),
    /// Seeded synthetic cross-section
    Synth(SynthArgs),
    /// Full oracle suite on a dataset; nonzero exit on any disagreement
    Check(CheckArgs),
}

/// How the error level is chosen for a bound computation.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsMode {
    /// Use the dataset's own minimal error.
    Adaptive,
    Fixed(f64),
    Sweep(Vec<f64>),
}

impl FromStr for EpsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "adaptive" {
            return Ok(EpsMode::Adaptive);
        }
        if let Some(v) = s.strip_prefix("fixed=") {
            let v: f64 = v.parse().map_err(|e| format!("bad fixed value: {e}"))?;
            if v < 0.0 {
                return Err("fixed error level must be nonnegative".into());
            }
            return Ok(EpsMode::Fixed(v));
        }
        if let Some(list) = s.strip_prefix("sweep=") {
            let vals: Result<Vec<f64>, _> = list.split(',').map(str::parse).collect();
            let vals = vals.map_err(|e| format!("bad sweep list: {e}"))?;
            if vals.is_empty() || vals.iter().any(|&v| v < 0.0) {
                return Err("sweep needs nonnegative values".into());
            }
            return Ok(EpsMode::Sweep(vals));
        }
        Err("expected adaptive, fixed=V, or sweep=a,b,c".into())
    }
}

impl EpsMode {
    fn levels(&self, d: &Dataset) -> Vec<f64> {
        match self {
            EpsMode::Adaptive => vec![epsilon_star(d).value()],
            EpsMode::Fixed(v) => vec![*v],
            EpsMode::Sweep(vs) => vs.clone(),
        }
    }
}

/// An inclusive linear price grid `MIN:MAX:STEPS`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err("expected MIN:MAX:STEPS".into());
        }
        let min: f64 = parts[0].parse().map_err(|e| format!("bad MIN: {e}"))?;
        let max: f64 = parts[1].parse().map_err(|e| format!("bad MAX: {e}"))?;
        let steps: usize = parts[2].parse().map_err(|e| format!("bad STEPS: {e}"))?;
        if steps < 1 {
            return Err("grid needs at least one step".into());
        }
        if !(min.is_finite() && min > 0.0) || max < min {
            return Err("grid prices must satisfy 0 < MIN <= MAX".into());
        }
        Ok(GridSpec { min, max, steps })
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Args, Debug)]
pub struct EpsArgs {
    /// Dataset CSV
    #[arg(long)]
    pub input: PathBuf,
    /// JSON report destination (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsQuantityArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Grid CSV destination (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "adaptive")]
    pub eps: EpsMode,
    /// 1-based good index
    #[arg(long, default_value_t = 1)]
    pub good: usize,
    /// Price grid for the chosen good (single-good datasets)
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// Explicit full price vectors `p_1,..,p_K` (repeatable)
    #[arg(long)]
    pub query: Vec<String>,
}

#[derive(Args, Debug)]
pub struct BoundsWelfareArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "adaptive")]
    pub eps: EpsMode,
    /// Price pairs `p1_1,..,p1_K:p0_1,..,p0_K` (repeatable)
    #[arg(long, required = true)]
    pub query: Vec<String>,
    #[arg(long, default_value_t = SEQUENCE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Args, Debug)]
pub struct BoundsUtilityArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "adaptive")]
    pub eps: EpsMode,
    /// Bundle pairs `x1_1,..,x1_K:x0_1,..,x0_K` (repeatable)
    #[arg(long, required = true)]
    pub query: Vec<String>,
    #[arg(long, default_value_t = SEQUENCE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    /// Cross-section CSV
    #[arg(long)]
    pub input: PathBuf,
    /// Pseudo-dataset CSV destination
    #[arg(long)]
    pub output: PathBuf,
    /// Income level at which to evaluate demand (sample mean when omitted)
    #[arg(long)]
    pub income: Option<f64>,
    /// Income bandwidth as a multiple of the income standard deviation
    #[arg(long, default_value_t = 0.75)]
    pub bandwidth_y: f64,
    /// Trim quantiles
    #[arg(long, default_value_t = 0.05)]
    pub trim_low: f64,
    #[arg(long, default_value_t = 0.95)]
    pub trim_high: f64,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Cross-section CSV destination
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Standard deviation of the idiosyncratic noise
    #[arg(long, default_value_t = 0.1)]
    pub noise_sd: f64,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = BRUTEFORCE_CAP)]
    pub oracle_cap: usize,
}

/// Parses arguments from the process environment, runs, and reports the
/// exit code. This is the whole of the binary.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs one parsed command, returning the process exit code.
pub fn run(cli: Cli) -> crate::Result<i32> {
    match cli.command {
        Command::Eps(a) => cmd_eps(a),
        Command::BoundsQuantity(a) => cmd_bounds_quantity(a),
        Command::BoundsWelfare(a) => cmd_bounds_welfare(a),
        Command::BoundsUtility(a) => cmd_bounds_utility(a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Check(a) => cmd_check(a),
    }
}

fn cmd_eps(args: EpsArgs) -> crate::Result<i32> {
    let d = read_dataset(&args.input)?;
    let by_lp = epsilon_star_lp(&d)?.value();
    let (by_cycles, cert) = epsilon_star_cycles(&d);
    let disagreement = (by_lp - by_cycles.value()).abs();
    let report = json!({
        "eps_star": by_lp,
        "eps_star_lp": by_lp,
        "eps_star_cycles": by_cycles.value(),
        "cycle": cert.as_ref().map(|c| one_based(&c.sequence)),
        "cycle_mean": cert.as_ref().map(|c| c.mean_weight),
    });
    emit(
        &args.output,
        &serde_json::to_string_pretty(&report).unwrap(),
    )?;
    Ok(if disagreement > CHECK_TOL { 1 } else { 0 })
}

fn cmd_bounds_quantity(args: BoundsQuantityArgs) -> crate::Result<i32> {
    let d = read_dataset(&args.input)?;
    let k = d.k();
    if args.good == 0 || args.good > k {
        return Err(Error::InvalidInput(format!(
            "--good {} out of range for {k} goods",
            args.good
        )));
    }
    let good = args.good - 1;
    let mut queries: Vec<Vec<f64>> = Vec::new();
    if let Some(grid) = args.grid {
        if k != 1 {
            return Err(Error::InvalidInput(
                "--grid applies to single-good datasets; use --query for full price vectors".into(),
            ));
        }
        queries.extend(grid.points().into_iter().map(|p| vec![p]));
    }
    for q in &args.query {
        queries.push(parse_vector(q, k)?);
    }
    if queries.is_empty() {
        return Err(Error::InvalidInput(
            "provide a --grid or at least one --query".into(),
        ));
    }

    let grid_mode = args.grid.is_some() && k == 1;
    let levels = args.eps.levels(&d);
    let mut rows = Vec::new();
    let mut monotone_ok = true;
    for &e in &levels {
        let eps = Epsilon::new(e)?;
        let computed: Vec<(Vec<f64>, BoundInterval)> = queries
            .par_iter()
            .map(|p| quantity_bounds(&d, eps, p, good, None).map(|b| (p.clone(), b)))
            .collect::<crate::Result<_>>()?;
        // output assertion: on a single-good ascending grid both bound
        // curves must be nonincreasing in the price
        if grid_mode {
            let mut prev_upper = f64::INFINITY;
            let mut prev_lower = f64::INFINITY;
            for (_, b) in computed.iter().filter(|(_, b)| b.is_feasible()) {
                let up = b.upper().unwrap();
                let lo = b.lower().unwrap();
                if (prev_upper.is_finite() && up > prev_upper + 1e-9) || lo > prev_lower + 1e-9 {
                    monotone_ok = false;
                }
                if up.is_finite() {
                    prev_upper = up;
                }
                prev_lower = lo;
            }
        }
        for (p, b) in computed {
            rows.push((p, e, b));
        }
    }

    let mut out = String::new();
    for j in 0..k {
        out.push_str(&format!("p_{},", j + 1));
    }
    out.push_str("eps,lower,upper,status\n");
    for (p, e, b) in rows {
        for v in &p {
            out.push_str(&fmt_float(*v));
            out.push(',');
        }
        out.push_str(&fmt_float(e));
        out.push(',');
        out.push_str(&bound_cells(&b));
        out.push('\n');
    }
    emit(&args.output, &out)?;
    if !monotone_ok {
        eprintln!("error: single-good bound curves failed the monotonicity post-check");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_bounds_welfare(args: BoundsWelfareArgs) -> crate::Result<i32> {
    let d = read_dataset(&args.input)?;
    let k = d.k();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = args
        .query
        .iter()
        .map(|q| parse_pair(q, k))
        .collect::<crate::Result<_>>()?;
    let levels = args.eps.levels(&d);

    let mut out = String::new();
    for j in 0..k {
        out.push_str(&format!("p1_{},", j + 1));
    }
    for j in 0..k {
        out.push_str(&format!("p0_{},", j + 1));
    }
    out.push_str("eps,lower,upper,status,region,h\n");
    for &e in &levels {
        let eps = Epsilon::new(e)?;
        let computed: Vec<(usize, BoundInterval, FinitenessRegion, Option<f64>)> = pairs
            .par_iter()
            .enumerate()
            .map(|(i, (p1, p0))| {
                let q = WelfareQuery::new(p1.clone(), p0.clone(), eps)?;
                let b = indirect_diff_bounds(&d, &q)?;
                let region = finiteness_region(&d, &q)?;
                let h = sandwich_estimate(&d, eps, p1, p0, args.oracle_cap);
                Ok((i, b, region, h))
            })
            .collect::<crate::Result<_>>()?;
        for (i, b, region, h) in computed {
            let (p1, p0) = &pairs[i];
            for v in p1.iter().chain(p0) {
                out.push_str(&fmt_float(*v));
                out.push(',');
            }
            out.push_str(&fmt_float(e));
            out.push(',');
            out.push_str(&bound_cells(&b));
            out.push(',');
            out.push_str(match region {
                FinitenessRegion::GuaranteedFinite => "finite",
                FinitenessRegion::GuaranteedInfinite => "infinite",
                FinitenessRegion::Indeterminate => "indeterminate",
            });
            out.push(',');
            if let Some(h) = h {
                out.push_str(&fmt_float(h));
            }
            out.push('\n');
        }
    }
    emit(&args.output, &out)?;
    Ok(0)
}

/// The sequence-route estimate when `p1` is an observed price and the
/// dataset is small enough to enumerate.
fn sandwich_estimate(d: &Dataset, eps: Epsilon, p1: &[f64], p0: &[f64], cap: usize) -> Option<f64> {
    if d.t() > cap {
        return None;
    }
    let base = (0..d.t()).find(|&t| model::bundles_equal(d.price(t), p1))?;
    if model::bundles_equal(p1, p0) {
        return None;
    }
    indirect_diff_sequences(d, eps, base, p0, cap)
        .ok()
        .map(|s| s.value)
}

fn cmd_bounds_utility(args: BoundsUtilityArgs) -> crate::Result<i32> {
    let d = read_dataset(&args.input)?;
    let k = d.k();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = args
        .query
        .iter()
        .map(|q| parse_pair(q, k))
        .collect::<crate::Result<_>>()?;
    let levels = args.eps.levels(&d);

    let mut out = String::new();
    for j in 0..k {
        out.push_str(&format!("x1_{},", j + 1));
    }
    for j in 0..k {
        out.push_str(&format!("x0_{},", j + 1));
    }
    out.push_str("eps,lower,upper,status,seq_upper\n");
    for &e in &levels {
        let eps = Epsilon::new(e)?;
        let computed: Vec<(usize, BoundInterval, Option<f64>)> = pairs
            .par_iter()
            .enumerate()
            .map(|(i, (x1, x0))| {
                let b = utility_diff_bounds(&d, eps, x1, x0)?;
                let seq = sequence_upper_estimate(&d, eps, x1, x0, args.oracle_cap);
                Ok((i, b, seq))
            })
            .collect::<crate::Result<_>>()?;
        for (i, b, seq) in computed {
            let (x1, x0) = &pairs[i];
            for v in x1.iter().chain(x0) {
                out.push_str(&fmt_float(*v));
                out.push(',');
            }
            out.push_str(&fmt_float(e));
            out.push(',');
            out.push_str(&bound_cells(&b));
            out.push(',');
            if let Some(s) = seq {
                out.push_str(&fmt_float(s));
            }
            out.push('\n');
        }
    }
    emit(&args.output, &out)?;
    Ok(0)
}

fn sequence_upper_estimate(
    d: &Dataset,
    eps: Epsilon,
    x1: &[f64],
    x0: &[f64],
    cap: usize,
) -> Option<f64> {
    if d.t() > cap || model::bundles_equal(x1, x0) {
        return None;
    }
    let base = *d.matching_quantity_rows(x0).first()?;
    utility_diff_upper_sequences(d, eps, x1, base, cap)
        .ok()
        .map(|s| s.value)
}

fn cmd_preprocess(args: PreprocessArgs) -> crate::Result<i32> {
    let cs = read_cross_section(&args.input)?;
    let sd_y = {
        let n = cs.n() as f64;
        let mean = cs.records().iter().map(|r| r.y).sum::<f64>() / n;
        (cs.records()
            .iter()
            .map(|r| (r.y - mean) * (r.y - mean))
            .sum::<f64>()
            / n)
            .sqrt()
    };
    if sd_y <= 0.0 {
        return Err(Error::InvalidInput(
            "incomes have zero variance; bandwidths are undefined".into(),
        ));
    }
    let h_y = args.bandwidth_y * sd_y;
    let h_p = crate::estimation::bandwidth_rule(&cs, h_y)?;
    let cfg = KernelConfig::new(h_p, h_y, args.trim_low, args.trim_high)?;
    let income = args
        .income
        .unwrap_or_else(|| cs.records().iter().map(|r| r.y).sum::<f64>() / cs.n() as f64);
    let fit = robinson_beta(&cs, &cfg)?;
    let out = build_pseudo_dataset(&cs, income, &cfg, &fit.beta)?;
    write_dataset(&args.output, &out.dataset)?;
    let report = json!({
        "retained": out.retained,
        "clamped": out.clamped,
        "excluded": fit.excluded,
        "beta": fit.beta,
        "h_p": h_p,
        "h_y": h_y,
        "income": income,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> crate::Result<i32> {
    let spec = SynthSpec {
        noise_sd: args.noise_sd,
        ..Default::default()
    };
    let cs = synth_cross_section(args.seed, args.n, &spec)?;
    write_cross_section(&args.output, &cs)?;
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> crate::Result<i32> {
    let d = read_dataset(&args.input)?;
    let by_lp = epsilon_star_lp(&d)?.value();
    let (by_cycles, cert) = epsilon_star_cycles(&d);
    let by_brute = if d.t() <= args.oracle_cap {
        Some(epsilon_star_bruteforce(&d, args.oracle_cap)?.value())
    } else {
        None
    };
    let mut worst = (by_lp - by_cycles.value()).abs();
    if let Some(b) = by_brute {
        worst = worst
            .max((by_lp - b).abs())
            .max((by_cycles.value() - b).abs());
    }

    // Constructive cross-check at small sizes: the built utility must
    // verify at its own level.
    let constructive = if d.t() <= CONSTRUCT_CAP {
        let eps = Epsilon::new(by_cycles.value())?;
        let u = build_rationalizing_utility(&d, eps, CONSTRUCT_CAP)?;
        Some(verify_rationalization(&u, &d, eps)?)
    } else {
        None
    };

    let agree = worst <= CHECK_TOL && constructive != Some(false);
    let report = json!({
        "eps_star_lp": by_lp,
        "eps_star_cycles": by_cycles.value(),
        "eps_star_bruteforce": by_brute,
        "cycle": cert.as_ref().map(|c| one_based(&c.sequence)),
        "max_disagreement": worst,
        "constructive_check": constructive,
        "agree": agree,
    });
    emit(
        &args.output,
        &serde_json::to_string_pretty(&report).unwrap(),
    )?;
    Ok(if agree { 0 } else { 1 })
}

// ---------------------------------------------------------------------
// CSV input/output
// ---------------------------------------------------------------------

/// Reads a dataset CSV with header `t,p_1..p_K,x_1..x_K`.
pub fn read_dataset(path: &Path) -> crate::Result<Dataset> {
    let raw = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut lines = raw.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "t" || !(cols.len() - 1).is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "{}: line 1: expected header t,p_1..p_K,x_1..x_K, got {header:?}",
            path.display()
        )));
    }
    let k = (cols.len() - 1) / 2;
    for j in 0..k {
        if cols[1 + j] != format!("p_{}", j + 1) || cols[1 + k + j] != format!("x_{}", j + 1) {
            return Err(Error::InvalidInput(format!(
                "{}: line 1: unexpected column names in {header:?}",
                path.display()
            )));
        }
    }
    let mut prices = Vec::new();
    let mut quantities = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(Error::InvalidInput(format!(
                "{}: line {}: expected {} cells, found {}",
                path.display(),
                idx + 1,
                cols.len(),
                cells.len()
            )));
        }
        let parse = |cell: &str| -> crate::Result<f64> {
            cell.parse().map_err(|e| {
                Error::InvalidInput(format!(
                    "{}: line {}: bad number {cell:?}: {e}",
                    path.display(),
                    idx + 1
                ))
            })
        };
        let p: Vec<f64> = cells[1..1 + k]
            .iter()
            .map(|c| parse(c))
            .collect::<crate::Result<_>>()?;
        let x: Vec<f64> = cells[1 + k..]
            .iter()
            .map(|c| parse(c))
            .collect::<crate::Result<_>>()?;
        prices.push(p);
        quantities.push(x);
    }
    Dataset::new(prices, quantities)
}

/// Writes a dataset CSV; floats carry 17 significant digits.
pub fn write_dataset(path: &Path, d: &Dataset) -> crate::Result<()> {
    let mut out = String::from("t");
    for j in 0..d.k() {
        out.push_str(&format!(",p_{}", j + 1));
    }
    for j in 0..d.k() {
        out.push_str(&format!(",x_{}", j + 1));
    }
    out.push('\n');
    for t in 0..d.t() {
        out.push_str(&(t + 1).to_string());
        for v in d.price(t) {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        for v in d.quantity(t) {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Reads a cross-section CSV with header `X,P,Y,W_1..W_dW`.
pub fn read_cross_section(path: &Path) -> crate::Result<CrossSection> {
    let raw = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut lines = raw.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "X" || cols[1] != "P" || cols[2] != "Y" {
        return Err(Error::InvalidInput(format!(
            "{}: line 1: expected header X,P,Y,W_1..W_dW, got {header:?}",
            path.display()
        )));
    }
    let d_w = cols.len() - 3;
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(Error::InvalidInput(format!(
                "{}: line {}: expected {} cells, found {}",
                path.display(),
                idx + 1,
                cols.len(),
                cells.len()
            )));
        }
        let parse = |cell: &str| -> crate::Result<f64> {
            cell.parse().map_err(|e| {
                Error::InvalidInput(format!(
                    "{}: line {}: bad number {cell:?}: {e}",
                    path.display(),
                    idx + 1
                ))
            })
        };
        records.push(Record {
            x: parse(cells[0])?,
            p: parse(cells[1])?,
            y: parse(cells[2])?,
            w: cells[3..3 + d_w]
                .iter()
                .map(|c| parse(c))
                .collect::<crate::Result<_>>()?,
        });
    }
    CrossSection::new(records)
}

/// Writes a cross-section CSV; floats carry 17 significant digits.
pub fn write_cross_section(path: &Path, cs: &CrossSection) -> crate::Result<()> {
    let mut out = String::from("X,P,Y");
    for j in 0..cs.d_w() {
        out.push_str(&format!(",W_{}", j + 1));
    }
    out.push('\n');
    for r in cs.records() {
        out.push_str(&fmt_float(r.x));
        out.push(',');
        out.push_str(&fmt_float(r.p));
        out.push(',');
        out.push_str(&fmt_float(r.y));
        for v in &r.w {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// 17 significant digits: enough to round-trip any `f64` exactly.
pub fn fmt_float(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{:.16e}", v)
    }
}

fn bound_cells(b: &BoundInterval) -> String {
    match (b.lower(), b.upper()) {
        (Some(lo), Some(hi)) => format!("{},{},feasible", fmt_float(lo), fmt_float(hi)),
        _ => ",,infeasible".into(),
    }
}

fn one_based(seq: &[usize]) -> Vec<usize> {
    seq.iter().map(|&i| i + 1).collect()
}

fn parse_vector(s: &str, k: usize) -> crate::Result<Vec<f64>> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse()).collect();
    let vals = vals.map_err(|e| Error::InvalidInput(format!("bad vector {s:?}: {e}")))?;
    if vals.len() != k {
        return Err(Error::InvalidInput(format!(
            "vector {s:?} has {} entries, expected {k}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn parse_pair(s: &str, k: usize) -> crate::Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = s.split_once(':').ok_or_else(|| {
        Error::InvalidInput(format!(
            "query {s:?} must be two vectors separated by a colon"
        ))
    })?;
    Ok((parse_vector(a, k)?, parse_vector(b, k)?))
}

fn emit(path: &Option<PathBuf>, content: &str) -> crate::Result<()> {
    match path {
        Some(p) => {
            fs::write(p, content)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(content.as_bytes());
            if !content.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_mode_parsing() {
        assert_eq!("adaptive".parse::<EpsMode>().unwrap(), EpsMode::Adaptive);
        assert_eq!("fixed=0.5".parse::<EpsMode>().unwrap(), EpsMode::Fixed(0.5));
        assert_eq!(
            "sweep=0,0.1,0.2".parse::<EpsMode>().unwrap(),
            EpsMode::Sweep(vec![0.0, 0.1, 0.2])
        );
        assert!("fixed=-1".parse::<EpsMode>().is_err());
        assert!("nonsense".parse::<EpsMode>().is_err());
    }

    #[test]
    fn grid_parsing_and_points() {
        let g: GridSpec = "1:2:3".parse().unwrap();
        assert_eq!(g.points(), vec![1.0, 1.5, 2.0]);
        let single: GridSpec = "2:2:1".parse().unwrap();
        assert_eq!(single.points(), vec![2.0]);
        assert!("1:2:0".parse::<GridSpec>().is_err());
        assert!("0:2:3".parse::<GridSpec>().is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for v in [
            0.0,
            1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -7.25e-19,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {s}");
        }
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn query_pair_parsing() {
        let (a, b) = parse_pair("1.5,2:1,1", 2).unwrap();
        assert_eq!(a, vec![1.5, 2.0]);
        assert_eq!(b, vec![1.0, 1.0]);
        assert!(parse_pair("1.5:1,1", 2).is_err());
        assert!(parse_pair("1.5,2", 2).is_err());
    }
}
