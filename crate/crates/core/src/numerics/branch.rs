use rug::{Complex, Float};
use serde::Serialize;

use super::{bits_for, eval_hauptmodul, format_float, log10_abs, radius_estimate, zeta3, RadiusEstimate};
use crate::arith::lcm_upto;
use crate::error::Result;
use crate::linform::{FamilyParam, Gauge, LevelPipeline, LinearFormSeries};

/// `t_N(i / sqrt(N))`, which is real.
pub fn fricke_value(level: u64, digits: u32) -> Result<Float> {
    let prec = bits_for(digits);
    let tau = Complex::with_val(prec, (0, Float::with_val(prec, level).sqrt().recip()));
    Ok(eval_hauptmodul(level, &tau, digits)?.real().clone())
}

/// `|a_n - zeta(3) b_n|` for every coefficient of a t-coordinate linear
/// form. The precision is chosen so that at least 15 significant digits
/// survive the cancellation in every coefficient.
pub fn product_series_magnitudes(lfs: &LinearFormSeries) -> Vec<Float> {
    let size = |n: usize| {
        let b = Float::with_val(64, lfs.b.coeff(n));
        let a = Float::with_val(64, lfs.a.coeff(n));
        log10_abs(&b).max(log10_abs(&a)).max(0.0)
    };
    let max_size = (0..lfs.order()).map(size).fold(0.0, f64::max);
    let mut digits = (2.0 * max_size) as u32 + 40;
    loop {
        let prec = bits_for(digits);
        let zeta = zeta3(digits);
        let mags: Vec<Float> = (0..lfs.order())
            .map(|n| {
                let a = Float::with_val(prec, lfs.a.coeff(n));
                let bz = Float::with_val(prec, lfs.b.coeff(n)) * &zeta;
                Float::with_val(prec, a - bz).abs()
            })
            .collect();
        // digits left after cancelling against the size of b_n zeta(3)
        let enough = mags
            .iter()
            .enumerate()
            .all(|(n, m)| m.is_zero() || log10_abs(m) - size(n) > -(digits as f64) + 15.0);
        if enough {
            return mags;
        }
        digits *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub level: u64,
    pub digits: u32,
    /// `t_N(i / sqrt(N))` to `digits` digits.
    pub fricke_value: String,
    pub fricke_value_f64: f64,
    /// Radius of convergence of `sum (a_n - zeta(3) b_n) t^n`, the estimate
    /// of `|t_N|` at the branch point.
    pub branch_estimate: f64,
    pub product_fit: RadiusEstimate,
    /// Radius of convergence of `sum b_n t^n`.
    pub b_series_radius: f64,
    pub e3: f64,
    pub exceeds_e3: bool,
    /// Radius below one: the linear forms do not decay.
    pub below_one: bool,
}

/// Branch data for one level from a pipeline of the given order
/// (`alpha = 0` in the default gauge of the level).
pub fn branch_report(level: u64, order: usize, digits: u32) -> Result<BranchReport> {
    let pipeline = LevelPipeline::new(level, order)?;
    branch_report_from(&pipeline, digits)
}

pub fn branch_report_from(pipeline: &LevelPipeline, digits: u32) -> Result<BranchReport> {
    let level = pipeline.level;
    let param = FamilyParam::new(Gauge::default_for(level), Default::default());
    let lfs = pipeline.linear_form(&param)?;
    let product_fit = radius_estimate(&product_series_magnitudes(&lfs))?;
    let b_mags: Vec<Float> = lfs
        .b
        .coeffs()
        .iter()
        .map(|c| Float::with_val(128, c).abs())
        .collect();
    let b_series_radius = radius_estimate(&b_mags)?.radius;
    let fricke = fricke_value(level, digits)?;
    let e3 = 3f64.exp();
    Ok(BranchReport {
        level,
        digits,
        fricke_value: format_float(&fricke, digits),
        fricke_value_f64: fricke.to_f64(),
        branch_estimate: product_fit.radius,
        exceeds_e3: product_fit.radius > e3,
        below_one: product_fit.radius < 1.0,
        product_fit,
        b_series_radius,
        e3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionRow {
    pub level: u64,
    pub branch_estimate: f64,
    pub exceeds_e3: bool,
    pub below_one: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub e3: f64,
    /// Asymptotic decimal digits per step of `lcm(1..n)^3`, i.e. `3 / ln 10`.
    pub lcm_digits_per_n: f64,
    /// `3 log10 lcm(1..199) / 199`.
    pub lcm_digits_per_n_at_199: f64,
    pub rows: Vec<ObstructionRow>,
    /// Levels whose branch radius beats `e^3`.
    pub passing: Vec<u64>,
}

pub fn obstruction_report(reports: &[BranchReport]) -> ObstructionReport {
    let rows: Vec<ObstructionRow> = reports
        .iter()
        .map(|r| ObstructionRow {
            level: r.level,
            branch_estimate: r.branch_estimate,
            exceeds_e3: r.exceeds_e3,
            below_one: r.below_one,
        })
        .collect();
    let lcm = Float::with_val(64, lcm_upto(199));
    ObstructionReport {
        e3: 3f64.exp(),
        lcm_digits_per_n: 3.0 / std::f64::consts::LN_10,
        lcm_digits_per_n_at_199: 3.0 * log10_abs(&lcm) / 199.0,
        passing: rows.iter().filter(|r| r.exceeds_e3).map(|r| r.level).collect(),
        rows,
    }
}
