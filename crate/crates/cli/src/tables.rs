//! The four reference tables: small-n approximants and error orders at
//! level 6, large-n error/denominator data, and the n = 199 comparison
//! across levels.

use apery::arith::format_rational;
use apery::linform::{ApproxRow, FamilyParam, Gauge, LevelPipeline};
use apery::numerics::{error_metrics, MetricRow};
use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;
use serde_json::json;

use crate::cache::Cache;
use crate::render::{Report, Section};
use crate::{CliError, Result};

/// The level-6 parameters shown in tables 1 and 2, in display order.
pub const SMALL_TABLE_ALPHAS: [i64; 8] = [0, -100, -5, -2, 1, 2, 5, 100];

pub const NOT_REPRODUCIBLE: &str = "not reproducible from paper data";

/// Levels of tables 3 and 4 in display order, after the level-6 block.
pub const LARGE_TABLE_LEVELS: [u64; 11] = [8, 10, 14, 12, 15, 18, 20, 21, 35, 39, 50];

pub const LARGE_N: usize = 199;

pub fn default_digits(which: u8) -> u32 {
    match which {
        1 => 50,
        2 => 400,
        _ => 700,
    }
}

/// `r` rounded to `places` decimals, exactly.
pub fn fixed_decimal(r: &Rational, places: u32) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, places));
    let scaled = Rational::from(r * &scale);
    let (_, rounded) = scaled.fract_round(Integer::new());
    let neg = rounded < 0;
    let digits = rounded.abs().to_string();
    let width = places as usize + 1;
    let digits = format!("{digits:0>width$}");
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

/// Three significant digits of `10^log10`, as `m.mme-x`.
pub fn sci3(log10: f64) -> String {
    let mut exp = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exp);
    if (mantissa * 100.0).round() >= 1000.0 {
        mantissa /= 10.0;
        exp += 1.0;
    }
    format!("{mantissa:.2}e{}", exp as i64)
}

fn power_of_ten(exp: i64) -> String {
    format!("10^{exp}")
}

type AlphaRows = Vec<(i64, Vec<ApproxRow>)>;

fn level6_rows(cache: &Cache, order: usize) -> Result<(LevelPipeline, AlphaRows)> {
    let pipeline = cache.pipeline(6, order)?;
    let rows = SMALL_TABLE_ALPHAS
        .par_iter()
        .map(|&a| Ok((a, pipeline.rows(&FamilyParam::beukers(Rational::from(a)))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((pipeline, rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallEntry {
    pub n: usize,
    pub ratio: String,
    pub r_exponent: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallRow {
    pub alpha: String,
    pub entries: Vec<SmallEntry>,
}

pub fn table1_rows(cache: &Cache, digits: u32) -> Result<Vec<SmallRow>> {
    let (_, rows) = level6_rows(cache, 6)?;
    rows.into_par_iter()
        .map(|(alpha, rows)| {
            let picked = &rows[2..=5];
            let metrics = error_metrics(picked, digits);
            let entries = picked
                .iter()
                .zip(&metrics)
                .map(|(row, m)| SmallEntry {
                    n: row.n,
                    ratio: format_rational(row.ratio_reduced.as_ref().expect("b_n > 0")),
                    r_exponent: m.err_exponent,
                })
                .collect();
            Ok(SmallRow {
                alpha: alpha.to_string(),
                entries,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeEntry {
    pub n: usize,
    pub r_exponent: i64,
    pub den_digits: usize,
    pub err: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeRow {
    pub alpha: String,
    pub entries: Vec<LargeEntry>,
}

pub fn table2_rows(cache: &Cache, digits: u32) -> Result<Vec<LargeRow>> {
    let (_, rows) = level6_rows(cache, 100)?;
    rows.into_par_iter()
        .map(|(alpha, rows)| {
            let metrics = error_metrics(&rows[95..=99], digits);
            let entries = metrics
                .iter()
                .map(|m| LargeEntry {
                    n: m.n,
                    r_exponent: m.err_exponent,
                    den_digits: m.den_digits,
                    err: m.err.clone(),
                })
                .collect();
            Ok(LargeRow {
                alpha: alpha.to_string(),
                entries,
            })
        })
        .collect()
}

/// One line of tables 3 and 4.
#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    /// `"Apery"` for the classical benchmark, otherwise the level.
    pub label: String,
    pub level: u64,
    /// `"classical"`, `"0"` or `"1"`.
    pub alpha: String,
    pub status: String,
    pub gauge: Option<Gauge>,
    /// Coefficient of `E0` in `E1 + c E0`.
    pub e0_coefficient: Option<String>,
    pub a5_b5: Option<String>,
    pub a5_b5_exact: Option<String>,
    pub metrics: Option<MetricRow>,
}

impl LevelRow {
    pub fn err_log10(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.err_log10)
    }

    pub fn den_log10(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.den_log10)
    }

    /// `E = -log10 |err|`.
    pub fn e_value(&self) -> Option<f64> {
        self.err_log10().map(|e| -e)
    }

    pub fn quality(&self) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.quality)
    }
}

struct RowSpec {
    label: String,
    level: u64,
    alpha: String,
    param: Option<FamilyParam>,
}

/// Row layout of tables 3 and 4 with the family member behind each row.
/// At level 6 the classical row is `E_b`, row `0` is `E1` and row `1` is
/// `E_b (1 + t_6)`; elsewhere row `alpha` is `E1 + (alpha / N^2) E0`.
fn level_row_specs() -> Vec<RowSpec> {
    let mut specs = vec![
        RowSpec {
            label: "Apery".into(),
            level: 6,
            alpha: "classical".into(),
            param: Some(FamilyParam::beukers(Rational::new())),
        },
        RowSpec {
            label: "6".into(),
            level: 6,
            alpha: "0".into(),
            param: Some(FamilyParam::affine(Rational::new())),
        },
        RowSpec {
            label: "6".into(),
            level: 6,
            alpha: "1".into(),
            param: Some(FamilyParam::beukers(Rational::from(1))),
        },
    ];
    for level in LARGE_TABLE_LEVELS {
        for alpha in [0u32, 1] {
            let known = apery::modforms::CATALOG_LEVELS.contains(&level);
            specs.push(RowSpec {
                label: level.to_string(),
                level,
                alpha: alpha.to_string(),
                param: known.then(|| FamilyParam::new(Gauge::Normalized, Rational::from(alpha))),
            });
        }
    }
    specs
}

pub fn level_rows(cache: &Cache, digits: u32) -> Result<Vec<LevelRow>> {
    let specs = level_row_specs();
    let mut levels: Vec<u64> = specs.iter().filter(|s| s.param.is_some()).map(|s| s.level).collect();
    levels.sort_unstable();
    levels.dedup();
    let pipelines = levels
        .par_iter()
        .map(|&l| Ok((l, cache.pipeline(l, LARGE_N + 1)?)))
        .collect::<Result<Vec<_>>>()?;
    specs
        .into_par_iter()
        .map(|spec| {
            let Some(param) = spec.param else {
                return Ok(LevelRow {
                    label: spec.label,
                    level: spec.level,
                    alpha: spec.alpha,
                    status: NOT_REPRODUCIBLE.into(),
                    gauge: None,
                    e0_coefficient: None,
                    a5_b5: None,
                    a5_b5_exact: None,
                    metrics: None,
                });
            };
            let pipeline = &pipelines
                .iter()
                .find(|(l, _)| *l == spec.level)
                .ok_or_else(|| CliError::Check(format!("no pipeline for level {}", spec.level)))?
                .1;
            let rows = pipeline.rows(&param)?;
            let ratio5 = rows[5].ratio_reduced.clone().ok_or_else(|| {
                CliError::Check(format!("b_5 vanishes at level {}", spec.level))
            })?;
            let metrics = error_metrics(&rows[LARGE_N..=LARGE_N], digits).pop();
            Ok(LevelRow {
                label: spec.label,
                level: spec.level,
                alpha: spec.alpha,
                status: "ok".into(),
                gauge: Some(param.gauge),
                e0_coefficient: Some(format_rational(&param.affine_alpha(spec.level)?)),
                a5_b5: Some(fixed_decimal(&ratio5, 10)),
                a5_b5_exact: Some(format_rational(&ratio5)),
                metrics,
            })
        })
        .collect()
}

pub fn table_report(which: u8, cache: &Cache, digits: Option<u32>) -> Result<Report> {
    let digits = digits.unwrap_or_else(|| default_digits(which));
    match which {
        1 => {
            let rows = table1_rows(cache, digits)?;
            let mut headers = vec!["alpha".to_string()];
            for n in 2..=5 {
                headers.push(format!("a_{n}/b_{n}"));
                headers.push("R_n".into());
            }
            let mut section = Section::new(headers);
            for r in &rows {
                let mut cells = vec![r.alpha.clone()];
                for e in &r.entries {
                    cells.push(e.ratio.clone());
                    cells.push(power_of_ten(e.r_exponent));
                }
                section.push(cells);
            }
            let mut report = Report::new(
                "Table 1: level-6 approximants a_n/b_n for n = 2..5",
                json!({ "table": 1, "level": 6, "gauge": Gauge::Beukers, "digits": digits, "rows": rows }),
            );
            report.sections.push(section);
            report.notes.push(format!("E = E_b (1 + alpha t_6); R_n = 10^floor(log10 |a_n/b_n - zeta(3)|); {digits} digits"));
            Ok(report)
        }
        2 => {
            let rows = table2_rows(cache, digits)?;
            let mut headers = vec!["alpha".to_string()];
            for n in 95..=99 {
                headers.push(format!("R_{n}"));
                headers.push(format!("D_{n}"));
            }
            let mut section = Section::new(headers);
            for r in &rows {
                let mut cells = vec![r.alpha.clone()];
                for e in &r.entries {
                    cells.push(power_of_ten(e.r_exponent));
                    cells.push(e.den_digits.to_string());
                }
                section.push(cells);
            }
            let mut report = Report::new(
                "Table 2: level-6 error orders and denominator digits for n = 95..99",
                json!({ "table": 2, "level": 6, "gauge": Gauge::Beukers, "digits": digits, "rows": rows }),
            );
            report.sections.push(section);
            report.notes.push(format!("D_n = decimal digits of den(a_n/b_n); {digits} digits"));
            Ok(report)
        }
        3 | 4 => {
            let rows = level_rows(cache, digits)?;
            let mut section = if which == 3 {
                Section::new([
                    "N",
                    "alpha",
                    "a_5/b_5",
                    "log10 den(a_199/b_199)",
                    "error at n=199",
                ])
            } else {
                Section::new(["N", "alpha", "E_199", "Q_199"])
            };
            for r in &rows {
                let cells = match (&r.metrics, which) {
                    (None, 3) => vec![
                        r.label.clone(),
                        r.alpha.clone(),
                        r.status.clone(),
                        String::new(),
                        String::new(),
                    ],
                    (None, _) => vec![r.label.clone(), r.alpha.clone(), r.status.clone(), String::new()],
                    (Some(m), 3) => vec![
                        r.label.clone(),
                        r.alpha.clone(),
                        r.a5_b5.clone().unwrap_or_default(),
                        format!("{:.1}", m.den_log10),
                        sci3(m.err_log10),
                    ],
                    (Some(m), _) => vec![
                        r.label.clone(),
                        r.alpha.clone(),
                        format!("{:.1}", -m.err_log10),
                        m.quality.map(|q| format!("{q:.3}")).unwrap_or_default(),
                    ],
                };
                section.push(cells);
            }
            let title = if which == 3 {
                "Table 3: approximants at n = 199 across levels"
            } else {
                "Table 4: quality E_199 / D_199 across levels"
            };
            let mut report = Report::new(
                title,
                json!({ "table": which, "n": LARGE_N, "digits": digits, "rows": rows }),
            );
            report.sections.push(section);
            report.notes.push(
                "level 6: classical = E_b, alpha 0 = E1, alpha 1 = E_b (1 + t_6); other levels: E1 + (alpha/N^2) E0".into(),
            );
            report.notes.push(format!("{digits} digits"));
            Ok(report)
        }
        _ => Err(CliError::Usage(format!("unknown table {which}; expected 1, 2, 3 or 4"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use apery::arith::rat;

    #[test]
    fn fixed_decimals_round_exactly() {
        assert_eq!(fixed_decimal(&rat(35441662103, 29484180000), 10), "1.2020569032");
        assert_eq!(fixed_decimal(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(fixed_decimal(&rat(2, 3), 2), "0.67");
        assert_eq!(fixed_decimal(&rat(1, 200), 2), "0.01");
    }

    #[test]
    fn three_significant_digits() {
        assert_eq!(sci3((3.0380f64).log10() - 607.0), "3.04e-607");
        assert_eq!(sci3((9.996f64).log10() - 10.0), "1.00e-9");
        assert_eq!(sci3(0.0), "1.00e0");
    }

    #[test]
    fn row_layout_covers_every_level() {
        let specs = level_row_specs();
        assert_eq!(specs.len(), 3 + 2 * LARGE_TABLE_LEVELS.len());
        let missing: Vec<u64> = specs.iter().filter(|s| s.param.is_none()).map(|s| s.level).collect();
        assert_eq!(missing, [8, 8, 12, 12, 18, 18, 20, 20, 50, 50]);
    }

    #[test]
    fn table1_alpha_two() {
        let rows = table1_rows(&Cache::disabled(), 50).unwrap();
        let two = rows.iter().find(|r| r.alpha == "2").unwrap();
        assert_eq!(two.entries[1].ratio, "68849/57276");
        assert_eq!(two.entries[1].r_exponent, -7);
    }
}
