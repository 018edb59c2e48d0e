use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use super::eval::{eval_series, nome};
use super::{bits_for, format_float, log10_abs, zeta3};
use crate::error::{domain, Result};
use crate::families::{combo_to_series, solve_F};
use crate::linform::eichler;

/// Largest q-order the automatic variant will use.
const MAX_AUTO_ORDER: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeckeReport {
    pub level: u64,
    pub digits: u32,
    pub order: usize,
    /// `|h(tau) - (-i sqrt(N) tau)^2 h(-1/(N tau))|` per sample.
    pub residuals: Vec<String>,
    pub max_residual: String,
    pub max_residual_log10: f64,
}

/// Three points near the Fricke fixed point `i / sqrt(N)`.
pub fn default_samples(level: u64, digits: u32) -> Vec<Complex> {
    let prec = bits_for(digits);
    let inv_sqrt = Float::with_val(prec, level).sqrt().recip();
    [(0.0, 1.1), (0.0, 0.9), (0.05, 1.05)]
        .iter()
        .map(|&(x, y)| Complex::with_val(prec, (x, Float::with_val(prec, &inv_sqrt * y))))
        .collect()
}

fn fricke(tau: &Complex, level: u64) -> Complex {
    Complex::with_val(tau.prec(), tau * level).recip() * -1i32
}

/// Bound `K` with `|f_n| <= K`: the `n`-th coefficient of `E_4(d tau)` is at
/// most `240 sigma_3(n) <= 240 zeta(3) n^3`.
fn coefficient_bound(alphas: &[Rational]) -> f64 {
    let total: f64 = alphas.iter().map(|a| a.to_f64().abs()).sum();
    240.0 * 1.2021 * total
}

/// Functional equation of `h = f - zeta(3)`, where `f` is the Eichler
/// integral of `F_N`, evaluated from the first `order` q-coefficients.
pub fn hecke_check_with_order(
    level: u64,
    samples: &[Complex],
    digits: u32,
    order: usize,
) -> Result<HeckeReport> {
    let prec = bits_for(digits) + 16;
    let f = eichler(&combo_to_series(&solve_F(level, 4)?, order)?, 4)?;
    let zeta = Float::with_val(prec, zeta3(digits + 10));
    let h = |tau: &Complex| -> Result<Complex> {
        if *tau.imag() <= 0 {
            return Err(domain(format!("hecke sample {tau} is not in the upper half plane")));
        }
        let q = nome(tau, prec);
        Ok(eval_series(f.coeffs(), &q) - &zeta)
    };
    let sqrt_n = Float::with_val(prec, level).sqrt();
    let mut residuals = Vec::with_capacity(samples.len());
    let mut max = Float::new(prec);
    for tau in samples {
        let tau = Complex::with_val(prec, tau);
        // (-i sqrt(N) tau)^2
        let factor = Complex::with_val(prec, &tau * &sqrt_n).mul_i(true).pow(2u32);
        let lhs = h(&tau)?;
        let rhs = factor * h(&fricke(&tau, level))?;
        let r = Float::with_val(prec, Complex::with_val(prec, lhs - rhs).abs_ref());
        residuals.push(format_float(&r, 5));
        if r > max {
            max = r;
        }
    }
    Ok(HeckeReport {
        level,
        digits,
        order,
        residuals,
        max_residual_log10: log10_abs(&max),
        max_residual: format_float(&max, 5),
    })
}

/// As [`hecke_check_with_order`], choosing the order so that the series
/// tail stays below `10^-(digits + 5)` at every sample and its Fricke image.
pub fn hecke_check(level: u64, samples: &[Complex], digits: u32) -> Result<HeckeReport> {
    let alphas = solve_F(level, 4)?.values();
    let k = coefficient_bound(&alphas);
    let target = -((digits + 5) as f64);
    let prec = bits_for(digits);
    let mut order = 16usize;
    for tau in samples {
        for point in [Complex::with_val(prec, tau), fricke(tau, level)] {
            if *point.imag() <= 0 {
                return Err(domain(format!("hecke sample {tau} is not in the upper half plane")));
            }
            let abs_q = Float::with_val(prec, nome(&point, prec).abs_ref()).to_f64();
            // K |q|^M / (1 - |q|) < 10^target
            let log_q = abs_q.log10();
            let need = ((target - k.log10() + (1.0 - abs_q).log10()) / log_q).ceil();
            if !need.is_finite() || need > MAX_AUTO_ORDER as f64 {
                return Err(domain(format!(
                    "hecke sample {tau}: the q-series does not converge to {digits} digits within {MAX_AUTO_ORDER} terms"
                )));
            }
            order = order.max(need as usize + 1);
        }
    }
    hecke_check_with_order(level, samples, digits, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_6_and_10_residuals() {
        for level in [6u64, 10] {
            let report = hecke_check(level, &default_samples(level, 50), 50).unwrap();
            assert!(report.max_residual_log10 < -30.0, "{report:?}");
        }
    }

    #[test]
    fn fixed_point_is_trivial() {
        let prec = bits_for(30);
        let tau = Complex::with_val(prec, (0, Float::with_val(prec, 6u32).sqrt().recip()));
        let report = hecke_check_with_order(6, &[tau], 30, 10).unwrap();
        assert!(report.max_residual_log10 < -28.0, "{report:?}");
    }

    #[test]
    fn residual_shrinks_with_order() {
        let samples = default_samples(6, 40);
        let low = hecke_check_with_order(6, &samples, 40, 10).unwrap();
        let high = hecke_check_with_order(6, &samples, 40, 20).unwrap();
        assert!(high.max_residual_log10 < low.max_residual_log10 - 5.0);
    }

    #[test]
    fn lower_half_plane_sample_is_named() {
        let bad = Complex::with_val(64, (0.0, -0.5));
        let err = hecke_check(6, &[bad], 20).unwrap_err();
        assert!(err.to_string().contains("hecke sample"));
    }
}
