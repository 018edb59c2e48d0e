//! Linear forms `E (f - zeta(3)) = A - zeta(3) B` and their expansion in the
//! Hauptmodul coordinate, where the coefficients give the approximants
//! `a_n / b_n` to `zeta(3)`.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{decimal_digits, format_rational};
use crate::error::{domain, Error, Result};
use crate::families::{combo_to_series, solve_F, solve_e_basis, EFamilyBasis};
use crate::modforms::hauptmodul;
use crate::qseries::{QSeries, Var};

/// Extra q-coefficients carried through the pipeline.
pub const GUARD: usize = 8;

/// How `alpha` selects a member of the weight-2 family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    /// `E1 + alpha E0`.
    Affine,
    /// Level 6 only: `E_b (1 + alpha t_6)`, so that `alpha = 0` is the
    /// classical Apery sequence and `a_n^alpha = a_n + alpha a_(n-1)`.
    Beukers,
    /// `E1 + (alpha / N^2) E0`, the scaling used when comparing levels at
    /// `n = 199`.
    Normalized,
}

impl Gauge {
    pub fn as_str(self) -> &'static str {
        match self {
            Gauge::Affine => "affine",
            Gauge::Beukers => "beukers",
            Gauge::Normalized => "normalized",
        }
    }

    pub fn default_for(level: u64) -> Gauge {
        if level == 6 {
            Gauge::Beukers
        } else {
            Gauge::Affine
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine" => Ok(Gauge::Affine),
            "beukers" => Ok(Gauge::Beukers),
            "normalized" => Ok(Gauge::Normalized),
            _ => Err(Error::Parse(format!("unknown gauge {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParam {
    pub gauge: Gauge,
    pub alpha: Rational,
}

impl FamilyParam {
    pub fn new(gauge: Gauge, alpha: Rational) -> Self {
        FamilyParam { gauge, alpha }
    }

    pub fn affine(alpha: Rational) -> Self {
        Self::new(Gauge::Affine, alpha)
    }

    pub fn beukers(alpha: Rational) -> Self {
        Self::new(Gauge::Beukers, alpha)
    }

    /// The equivalent coefficient of `E0` in `E1 + alpha' E0`. At level 6,
    /// `E_b t_6 = -E0/24` and `E_b (1 - 5 t_6) = E1`, hence
    /// `E_b (1 + alpha t_6) = E1 - ((alpha + 5)/24) E0`.
    pub fn affine_alpha(&self, level: u64) -> Result<Rational> {
        match self.gauge {
            Gauge::Affine => Ok(self.alpha.clone()),
            Gauge::Beukers if level == 6 => Ok(-(self.alpha.clone() + 5u32) / 24u32),
            Gauge::Beukers => Err(domain(format!(
                "the beukers gauge is defined for level 6 only, not {level}"
            ))),
            Gauge::Normalized => Ok(self.alpha.clone() / Rational::from(level * level)),
        }
    }
}

/// The exact pair `(A, B)` representing `A - zeta(3) B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormSeries {
    pub a: QSeries,
    pub b: QSeries,
    pub level: u64,
    pub alpha: Rational,
}

impl LinearFormSeries {
    pub fn coordinate(&self) -> Var {
        self.a.var()
    }

    pub fn order(&self) -> usize {
        self.a.order().min(self.b.order())
    }
}

/// Eichler integral: coefficient `n` divided by `n^(k-1)`.
pub fn eichler(f_series: &QSeries, k: u32) -> Result<QSeries> {
    if f_series.order() > 0 && *f_series.coeff(0) != 0 {
        return Err(domain("eichler: constant term must vanish"));
    }
    let coeffs = f_series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n == 0 {
                Rational::new()
            } else {
                Rational::from(c / Integer::from(n).pow(k - 1))
            }
        })
        .collect();
    Ok(QSeries::from_coeffs(f_series.var(), coeffs))
}

pub fn linear_form_q(e: &QSeries, f: &QSeries, level: u64, alpha: Rational) -> Result<LinearFormSeries> {
    if e.var() != Var::Q || f.var() != Var::Q {
        return Err(domain("linear_form_q expects q-series"));
    }
    if e.order() == 0 || *e.coeff(0) != 1 {
        return Err(domain("linear_form_q: E must have constant term 1"));
    }
    if f.order() == 0 || *f.coeff(0) != 0 {
        return Err(domain("linear_form_q: f must have constant term 0"));
    }
    Ok(LinearFormSeries {
        a: e.mul(f)?,
        b: e.clone(),
        level,
        alpha,
    })
}

/// Re-expand a q-coordinate linear form in the Hauptmodul `t`.
pub fn to_hauptmodul(lfs: &LinearFormSeries, t_series: &QSeries) -> Result<LinearFormSeries> {
    if lfs.coordinate() != Var::Q {
        return Err(domain("to_hauptmodul: linear form is not in the q-coordinate"));
    }
    if t_series.valuation() != Some(1) || *t_series.coeff(1) != 1 {
        return Err(domain("to_hauptmodul: t must be q + O(q^2)"));
    }
    let q_of_t = t_series.revert()?;
    Ok(LinearFormSeries {
        a: lfs.a.compose(&q_of_t)?,
        b: lfs.b.compose(&q_of_t)?,
        level: lfs.level,
        alpha: lfs.alpha.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub n: usize,
    #[serde(with = "rational_text")]
    pub a: Rational,
    #[serde(with = "rational_text")]
    pub b: Rational,
    /// `a / b` in lowest terms; `None` when `b = 0`.
    #[serde(with = "opt_rational_text")]
    pub ratio_reduced: Option<Rational>,
    /// `lcm(1..n)^3 a`.
    #[serde(with = "rational_text")]
    pub scaled_a: Rational,
    /// Decimal digits of the reduced denominator of `a / b`.
    pub den_digits: Option<usize>,
}

impl ApproxRow {
    pub fn new(n: usize, a: Rational, b: Rational, lcm: &Integer) -> Self {
        let ratio_reduced = if b == 0 {
            None
        } else {
            Some(Rational::from(&a / &b))
        };
        let den_digits = ratio_reduced.as_ref().map(|r| decimal_digits(r.denom()));
        let lcm3 = Integer::from(lcm.pow(3u32));
        let scaled_a = Rational::from(&a * &lcm3);
        ApproxRow {
            n,
            a,
            b,
            ratio_reduced,
            scaled_a,
            den_digits,
        }
    }
}

mod rational_text {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::arith::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        crate::arith::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

mod opt_rational_text {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&crate::arith::format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| crate::arith::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Rows `0..order` from a t-coordinate linear form.
pub fn rows_from_series(lfs: &LinearFormSeries) -> Result<Vec<ApproxRow>> {
    if lfs.coordinate() != Var::T {
        return Err(domain("rows need the t-coordinate"));
    }
    let mut lcm = Integer::from(1);
    let mut rows = Vec::with_capacity(lfs.order());
    for n in 0..lfs.order() {
        if n >= 2 {
            lcm.lcm_u_mut(n as u32);
        }
        rows.push(ApproxRow::new(n, lfs.a.coeff(n).clone(), lfs.b.coeff(n).clone(), &lcm));
    }
    Ok(rows)
}

/// The level-dependent part of the pipeline, shared by every `alpha`: the
/// linear forms of `E1` and `E0` re-expanded in `t`. Any family member is a
/// linear combination of these.
#[derive(Debug, Clone)]
pub struct LevelPipeline {
    pub level: u64,
    pub order: usize,
    pub basis: EFamilyBasis,
    /// Eichler integral of `F_N` (q-coordinate, order + guard).
    pub f: QSeries,
    pub t_series: QSeries,
    pub e1_form: LinearFormSeries,
    pub e0_a: QSeries,
    pub e0_b: QSeries,
}

impl LevelPipeline {
    pub fn new(level: u64, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(domain(format!("pipeline order {order} must be at least 2")));
        }
        let entry = hauptmodul(level)?;
        let q_order = order + GUARD;
        let big_f = combo_to_series(&solve_F(level, 4)?, q_order)?;
        let f = eichler(&big_f, 4)?;
        let basis = solve_e_basis(level)?;
        let t_series = entry.series(q_order)?;
        let q_of_t = t_series.revert()?;

        let e1 = combo_to_series(&basis.e1, q_order)?;
        let e0 = combo_to_series(&basis.e0, q_order)?;
        let series = [e1.mul(&f)?, e1, e0.mul(&f)?, e0];
        let mut composed = Vec::with_capacity(4);
        for s in &series {
            composed.push(s.compose(&q_of_t)?.truncate(order));
        }
        let mut it = composed.into_iter();
        let (a1, b1, a0, b0) = (
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        );
        Ok(LevelPipeline {
            level,
            order,
            basis,
            f,
            t_series,
            e1_form: LinearFormSeries {
                a: a1,
                b: b1,
                level,
                alpha: Rational::new(),
            },
            e0_a: a0,
            e0_b: b0,
        })
    }

    /// Rebuild from previously computed t-series `(A1, B1, A0, B0)`; the
    /// cheap q-side data is recomputed.
    pub fn from_parts(level: u64, order: usize, parts: [QSeries; 4]) -> Result<Self> {
        if parts.iter().any(|s| s.var() != Var::T || s.order() != order) {
            return Err(domain(format!(
                "pipeline parts for level {level} must be t-series of order {order}"
            )));
        }
        let entry = hauptmodul(level)?;
        let q_order = order + GUARD;
        let f = eichler(&combo_to_series(&solve_F(level, 4)?, q_order)?, 4)?;
        let [a1, b1, a0, b0] = parts;
        Ok(LevelPipeline {
            level,
            order,
            basis: solve_e_basis(level)?,
            f,
            t_series: entry.series(q_order)?,
            e1_form: LinearFormSeries {
                a: a1,
                b: b1,
                level,
                alpha: Rational::new(),
            },
            e0_a: a0,
            e0_b: b0,
        })
    }

    /// `(A1, B1, A0, B0)`, the data [`LevelPipeline::from_parts`] accepts.
    pub fn parts(&self) -> [&QSeries; 4] {
        [&self.e1_form.a, &self.e1_form.b, &self.e0_a, &self.e0_b]
    }

    /// The t-coordinate linear form for one family member.
    pub fn linear_form(&self, param: &FamilyParam) -> Result<LinearFormSeries> {
        let alpha = param.affine_alpha(self.level)?;
        Ok(LinearFormSeries {
            a: self.e1_form.a.add(&self.e0_a.scale(&alpha))?,
            b: self.e1_form.b.add(&self.e0_b.scale(&alpha))?,
            level: self.level,
            alpha: param.alpha.clone(),
        })
    }

    pub fn rows(&self, param: &FamilyParam) -> Result<Vec<ApproxRow>> {
        rows_from_series(&self.linear_form(param)?)
    }
}

/// One family member through every stage, without sharing work across
/// `alpha`.
pub fn single_pipeline(level: u64, param: &FamilyParam, order: usize) -> Result<LinearFormSeries> {
    if order < 2 {
        return Err(domain(format!("pipeline order {order} must be at least 2")));
    }
    let entry = hauptmodul(level)?;
    let q_order = order + GUARD;
    let f = eichler(&combo_to_series(&solve_F(level, 4)?, q_order)?, 4)?;
    let member = solve_e_basis(level)?.member(&param.affine_alpha(level)?);
    let e = combo_to_series(&member, q_order)?;
    let lfs = linear_form_q(&e, &f, level, param.alpha.clone())?;
    let t = to_hauptmodul(&lfs, &entry.series(q_order)?)?;
    Ok(LinearFormSeries {
        a: t.a.truncate(order),
        b: t.b.truncate(order),
        level,
        alpha: param.alpha.clone(),
    })
}

/// Rows `0..order` for `alpha` in the default gauge of the level.
pub fn approximants(level: u64, alpha: &Rational, order: usize) -> Result<Vec<ApproxRow>> {
    approximants_in(level, &FamilyParam::new(Gauge::default_for(level), alpha.clone()), order)
}

pub fn approximants_in(level: u64, param: &FamilyParam, order: usize) -> Result<Vec<ApproxRow>> {
    rows_from_series(&single_pipeline(level, param, order)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    /// Denominator of `alpha`.
    pub s: String,
    pub rows_checked: usize,
    pub passed: bool,
    /// Index and description of the first failing row.
    pub first_violation: Option<(usize, String)>,
}

/// For `alpha = r/s`: `s b_n` and `lcm(1..n)^3 s a_n` must be integers.
pub fn integrality_report(rows: &[ApproxRow], alpha: &Rational) -> IntegralityReport {
    let s = alpha.denom().clone();
    let mut first_violation = None;
    for row in rows {
        let sb = Rational::from(&row.b * &s);
        let sa = Rational::from(&row.scaled_a * &s);
        if !sb.is_integer() {
            first_violation = Some((row.n, format!("s*b = {} is not integral", format_rational(&sb))));
        } else if !sa.is_integer() {
            first_violation = Some((
                row.n,
                format!("lcm^3*s*a = {} is not integral", format_rational(&sa)),
            ));
        }
        if first_violation.is_some() {
            break;
        }
    }
    IntegralityReport {
        s: s.to_string(),
        rows_checked: rows.len(),
        passed: first_violation.is_none(),
        first_violation,
    }
}
