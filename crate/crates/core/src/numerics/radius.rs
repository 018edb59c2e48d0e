use rug::Float;
use serde::Serialize;

use crate::error::{domain, Result};

/// Fewest trailing nonzero coefficients accepted by [`radius_estimate`].
pub const MIN_RADIUS_COEFFS: usize = 32;

/// Above this relative residual the ratio fit is replaced by the envelope
/// fit.
pub const RATIO_RESIDUAL_LIMIT: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMethod {
    /// Least-squares fit of `r_n = |c_(n-1)/c_n|` against `1/n`.
    RatioFit,
    /// Least-squares fit of block maxima of `log10 |c_n|` against `n`, used
    /// when the ratios oscillate (complex singularities of equal modulus).
    LogEnvelope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub method: RadiusMethod,
    /// Slope of the ratio fit in `1/n`.
    pub slope: f64,
    /// Root-mean-square deviation of the fitted ratios, relative to the
    /// ratio-fit radius.
    pub residual: f64,
    pub points_used: usize,
    pub coefficients_used: usize,
}

/// Domb-Sykes estimate from coefficient magnitudes `|c_0|, |c_1|, ...`:
/// the ratios `r_n = |c_(n-1) / c_n|` over the last half of the trailing
/// nonzero block are fitted by least squares as `R + s / n`, and `R` is
/// returned. If the ratios do not settle (relative residual above
/// [`RATIO_RESIDUAL_LIMIT`]) the radius comes from the growth rate of the
/// upper envelope of `log10 |c_n|` over the same range instead.
pub fn radius_estimate(magnitudes: &[Float]) -> Result<RadiusEstimate> {
    let start = magnitudes
        .iter()
        .rposition(|m| m.is_zero())
        .map_or(0, |i| i + 1);
    let block = magnitudes.len() - start;
    if block < MIN_RADIUS_COEFFS {
        return Err(domain(format!(
            "radius_estimate: {block} trailing nonzero coefficients, need at least {MIN_RADIUS_COEFFS}"
        )));
    }
    let ratios: Vec<(f64, f64)> = (start + 1..magnitudes.len())
        .map(|n| {
            let prec = magnitudes[n].prec().max(64);
            let r = Float::with_val(prec, &magnitudes[n - 1] / &magnitudes[n]).abs();
            (1.0 / n as f64, r.to_f64())
        })
        .collect();
    let take = ratios.len().div_ceil(2);
    let pts = &ratios[ratios.len() - take..];
    let (intercept, slope, rms) = least_squares(pts);
    let residual = rms / intercept.abs();
    let (radius, method) = if residual <= RATIO_RESIDUAL_LIMIT {
        (intercept, RadiusMethod::RatioFit)
    } else {
        let first = magnitudes.len() - take;
        (envelope_radius(&magnitudes[first..], first), RadiusMethod::LogEnvelope)
    };
    Ok(RadiusEstimate {
        radius,
        method,
        slope,
        residual,
        points_used: take,
        coefficients_used: block,
    })
}

/// `(intercept, slope, rms residual)` of `y = intercept + slope x`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    (intercept, slope, rms)
}

fn envelope_radius(tail: &[Float], offset: usize) -> f64 {
    const BLOCK: usize = 8;
    let maxima: Vec<(f64, f64)> = tail
        .chunks(BLOCK)
        .enumerate()
        .map(|(b, chunk)| {
            let (i, v) = chunk
                .iter()
                .map(super::log10_abs)
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
            ((offset + b * BLOCK + i) as f64, v)
        })
        .collect();
    let (_, slope, _) = least_squares(&maxima);
    10f64.powf(-slope)
}
