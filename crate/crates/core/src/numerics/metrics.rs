use rug::{Float, Rational};
use serde::Serialize;

use super::{bits_for, format_float, log10_abs, zeta3, MIN_DIGITS};
use crate::linform::ApproxRow;

/// Numeric quality of one approximant `a_n / b_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub n: usize,
    /// `|a_n / b_n - zeta(3)|` with five significant digits.
    pub err: String,
    /// `log10 |a_n / b_n - zeta(3)|`.
    pub err_log10: f64,
    /// `floor(err_log10)`, the `R_n` exponent.
    pub err_exponent: i64,
    /// `log10` of the reduced denominator.
    pub den_log10: f64,
    pub den_digits: usize,
    /// `-err_log10 / den_log10`; undefined for denominator 1.
    pub quality: Option<f64>,
    /// Decimal digits of `zeta(3)` actually used.
    pub digits_used: u32,
}

fn abs_error(ratio: &Rational, zeta: &Float) -> Float {
    let prec = zeta.prec();
    Float::with_val(prec, Float::with_val(prec, ratio) - zeta).abs()
}

/// Metrics for every row with `b_n != 0`. The working precision starts at
/// `digits` and is raised for any row whose error is within 20 digits of it.
pub fn error_metrics(rows: &[ApproxRow], digits: u32) -> Vec<MetricRow> {
    let mut digits = digits.max(MIN_DIGITS);
    let mut zeta = zeta3(digits);
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let Some(ratio) = &row.ratio_reduced else {
            continue;
        };
        let mut err = abs_error(ratio, &zeta);
        loop {
            let e = log10_abs(&err);
            if e.is_finite() && -e + 20.0 <= digits as f64 {
                break;
            }
            let needed = if e.is_finite() { (-e).ceil() as u32 } else { digits };
            digits = (needed + 40).max(digits * 2);
            zeta = zeta3(digits);
            err = abs_error(ratio, &zeta);
        }
        let err_log10 = log10_abs(&err);
        let den = Float::with_val(bits_for(20), ratio.denom());
        let den_log10 = log10_abs(&den);
        let quality = (den_log10 > 0.0).then(|| -err_log10 / den_log10);
        out.push(MetricRow {
            n: row.n,
            err: format_float(&err, 5),
            err_log10,
            err_exponent: err_log10.floor() as i64,
            den_log10,
            den_digits: row.den_digits.unwrap_or(0),
            quality,
            digits_used: digits,
        });
    }
    out
}
