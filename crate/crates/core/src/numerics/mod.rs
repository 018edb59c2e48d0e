//! Arbitrary-precision layer on top of MPFR: `zeta(3)`, eta products at
//! points of the upper half plane, radius estimates, error metrics and the
//! functional-equation check.
//!
//! Precision is always an explicit `digits` argument. Work is carried out
//! with [`GUARD_DIGITS`] extra decimal digits.

mod branch;
mod eval;
mod hecke;
mod metrics;
mod radius;
mod zeta;

use rug::float::Round;
use rug::{Float, Rational};

pub use branch::{
    branch_report, branch_report_from, fricke_value, obstruction_report, product_series_magnitudes, BranchReport,
    ObstructionReport, ObstructionRow,
};
pub use eval::{eval_eta, eval_eta_quotient, eval_hauptmodul, eval_series};
pub use hecke::{default_samples, hecke_check, hecke_check_with_order, HeckeReport};
pub use metrics::{error_metrics, MetricRow};
pub use radius::{radius_estimate, RadiusEstimate, RadiusMethod, MIN_RADIUS_COEFFS, RATIO_RESIDUAL_LIMIT};
pub use zeta::zeta3;

/// Extra decimal digits carried by every computation.
pub const GUARD_DIGITS: u32 = 10;

/// Smallest supported `digits` argument.
pub const MIN_DIGITS: u32 = 10;

/// Binary precision for `digits` decimal digits plus the guard.
pub fn bits_for(digits: u32) -> u32 {
    ((digits + GUARD_DIGITS) as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

pub fn to_float(r: &Rational, prec: u32) -> Float {
    Float::with_val(prec, r)
}

/// `log10 |x|`, which may be far outside the `f64` exponent range.
pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mantissa, exp) = x.to_f64_exp();
    mantissa.abs().log10() + exp as f64 * std::f64::consts::LOG10_2
}

/// Decimal rendering with `digits` significant digits.
pub fn format_float(x: &Float, digits: u32) -> String {
    x.to_string_radix_round(10, Some(digits as usize), Round::Nearest)
}
