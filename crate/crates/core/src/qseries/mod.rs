//! Dense truncated power series with exact rational coefficients.
//!
//! A [`QSeries`] of order `M` stores the coefficients of `x^0 .. x^(M-1)`;
//! everything from `x^M` on is unknown. Binary operations return the minimum
//! order of their inputs.

mod kernel;

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational};
use crate::error::{domain, Error, Result};

pub(crate) use kernel::mul_trunc;

/// Expansion variable label; catches `q`/`t` mix-ups at operation boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "t")]
    T,
}

impl Var {
    /// The variable of the inverse series.
    pub fn dual(self) -> Var {
        match self {
            Var::Q => Var::T,
            Var::T => Var::Q,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::T => "t",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    var: Var,
    coeffs: Vec<Rational>,
}

#[allow(clippy::should_implement_trait)]
impl QSeries {
    pub fn from_coeffs(var: Var, coeffs: Vec<Rational>) -> Self {
        QSeries { var, coeffs }
    }

    pub fn from_integers<I, T>(var: Var, coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        Integer: From<T>,
    {
        let coeffs = coeffs
            .into_iter()
            .map(|c| Rational::from(Integer::from(c)))
            .collect();
        QSeries { var, coeffs }
    }

    pub fn zero(var: Var, order: usize) -> Self {
        QSeries {
            var,
            coeffs: vec![Rational::new(); order],
        }
    }

    pub fn one(var: Var, order: usize) -> Self {
        Self::monomial(var, 0, Rational::from(1), order)
    }

    /// `c * x^exp`, truncated at `order`.
    pub fn monomial(var: Var, exp: usize, c: Rational, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if exp < order {
            s.coeffs[exp] = c;
        }
        s
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `x^n`; panics when `n >= order`.
    pub fn coeff(&self, n: usize) -> &Rational {
        assert!(
            n < self.order(),
            "coefficient {n} requested from a series of order {}",
            self.order()
        );
        &self.coeffs[n]
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        QSeries {
            var: self.var,
            coeffs: self.coeffs[..order].to_vec(),
        }
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    fn check_var(&self, other: &QSeries) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch {
                left: self.var.to_string(),
                right: other.var.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..order)
            .map(|n| Rational::from(&self.coeffs[n] + &other.coeffs[n]))
            .collect();
        Ok(QSeries::from_coeffs(self.var, coeffs))
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..order)
            .map(|n| Rational::from(&self.coeffs[n] - &other.coeffs[n]))
            .collect();
        Ok(QSeries::from_coeffs(self.var, coeffs))
    }

    pub fn neg(&self) -> QSeries {
        QSeries::from_coeffs(self.var, self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn scale(&self, factor: &Rational) -> QSeries {
        QSeries::from_coeffs(
            self.var,
            self.coeffs
                .iter()
                .map(|c| Rational::from(c * factor))
                .collect(),
        )
    }

    /// Multiply by `x^k`, keeping the order.
    pub fn shift(&self, k: usize) -> QSeries {
        let order = self.order();
        let mut coeffs = vec![Rational::new(); k.min(order)];
        coeffs.extend(self.coeffs.iter().take(order.saturating_sub(k)).cloned());
        QSeries::from_coeffs(self.var, coeffs)
    }

    /// Full convolution truncated at the smaller order.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        let a = &self.coeffs[..order];
        let b = &other.coeffs[..order];
        let la = kernel::common_denominator(a);
        let lb = kernel::common_denominator(b);
        let ai = kernel::scale_to_integers(a, &la);
        let bi = kernel::scale_to_integers(b, &lb);
        let prod = kernel::mul_trunc(&ai, &bi, order);
        let l = la * lb;
        Ok(QSeries::from_coeffs(self.var, kernel::divide_out(prod, &l)))
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut result = QSeries::one(self.var, self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same variable");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same variable");
            }
        }
        result
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn invert(&self) -> Result<QSeries> {
        let order = self.order();
        if order == 0 {
            return Ok(self.clone());
        }
        if self.coeffs[0] == 0 {
            return Err(domain("invert: constant term is zero"));
        }
        let l = kernel::common_denominator(&self.coeffs);
        let a = kernel::scale_to_integers(&self.coeffs, &l);
        let c = a[0].clone();
        let scaled = kernel::inverse_scaled(&a, order);
        // [x^n](1/self) = l * C_n / c^(n+1)
        let mut cpow = c.clone();
        let mut coeffs = Vec::with_capacity(order);
        for cn in scaled {
            coeffs.push(Rational::from((cn * &l, cpow.clone())));
            cpow *= &c;
        }
        Ok(QSeries::from_coeffs(self.var, coeffs))
    }

    /// `self(inner(x))`, where `self` is read as a series in a dummy variable
    /// and the result carries `inner`'s variable. The inner series must
    /// have zero constant term.
    pub fn compose(&self, inner: &QSeries) -> Result<QSeries> {
        let order = self.order().min(inner.order());
        if order == 0 {
            return Ok(QSeries::zero(inner.var, 0));
        }
        if inner.coeffs[0] != 0 {
            return Err(domain("compose: inner series has nonzero constant term"));
        }
        let outer = &self.coeffs[..order];
        let lo = kernel::common_denominator(outer);
        let o = kernel::scale_to_integers(outer, &lo);
        let li = kernel::common_denominator(&inner.coeffs[..order]);
        let i = kernel::scale_to_integers(&inner.coeffs[..order], &li);

        // Horner from the top; the partial sum for index m only matters
        // modulo x^(order - m) since it is later multiplied by inner^m.
        // With inner = I / li the partial sums are kept as
        // S_m = li^(order-1-m) * r_m, which stays integral.
        let mut li_pow = Integer::from(1);
        let mut acc: Vec<Integer> = vec![o[order - 1].clone()];
        for m in (0..order - 1).rev() {
            let len = order - m;
            let mut next = kernel::mul_trunc(&acc, &i, len);
            if li != 1 {
                li_pow *= &li;
            }
            if li == 1 {
                next[0] += &o[m];
            } else {
                next[0] += Integer::from(&o[m] * &li_pow);
            }
            acc = next;
        }
        let mut denom = lo;
        if li != 1 {
            denom *= li_pow;
        }
        Ok(QSeries::from_coeffs(inner.var, kernel::divide_out(acc, &denom)))
    }

    /// Compositional inverse. Requires valuation exactly 1; the result is a
    /// series in the dual variable.
    pub fn revert(&self) -> Result<QSeries> {
        let order = self.order();
        match self.valuation() {
            Some(1) => {}
            Some(v) => return Err(domain(format!("revert: valuation {v}, expected 1"))),
            None => return Err(domain("revert: zero series")),
        }
        // Lagrange inversion: [y^n] x(y) = (1/n) [x^(n-1)] phi^n with
        // phi = x / self(x).
        let g = QSeries::from_coeffs(self.var, self.coeffs[1..].to_vec());
        let phi = g.invert()?;
        let l = kernel::common_denominator(phi.coeffs());
        let big_phi = kernel::scale_to_integers(phi.coeffs(), &l);
        let mut coeffs = vec![Rational::new(); order];
        let mut power: Vec<Integer> = vec![Integer::from(1)];
        let mut l_pow = Integer::from(1);
        for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
            power = kernel::mul_trunc(&power, &big_phi, order - 1);
            l_pow *= &l;
            let num = power[n - 1].clone();
            *slot = Rational::from((num, Integer::from(&l_pow * n as u64)));
        }
        Ok(QSeries::from_coeffs(self.var.dual(), coeffs))
    }

    /// Substitute `x -> x^d`, keeping the order.
    pub fn rescale_variable(&self, d: usize) -> QSeries {
        assert!(d >= 1, "rescale factor must be positive");
        let order = self.order();
        let mut out = QSeries::zero(self.var, order);
        for (n, c) in self.coeffs.iter().enumerate() {
            let idx = n * d;
            if idx >= order {
                break;
            }
            out.coeffs[idx] = c.clone();
        }
        out
    }

    /// `x d/dx`: coefficient `n` is multiplied by `n`.
    pub fn theta(&self) -> QSeries {
        QSeries::from_coeffs(
            self.var,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| Rational::from(c * n as u64))
                .collect(),
        )
    }

    /// Common denominator of every coefficient.
    pub fn common_denominator(&self) -> Integer {
        kernel::common_denominator(&self.coeffs)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let (sign, mag) = if *c < 0 {
                ("-", Rational::from(-c))
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (n, mag == 1) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "{}", self.var)?,
                (1, false) => write!(f, "{mag}*{}", self.var)?,
                (_, true) => write!(f, "{}^{n}", self.var)?,
                (_, false) => write!(f, "{mag}*{}^{n}", self.var)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order())
    }
}

/// Wire form: `{ "var": "q", "order": M, "coeffs": ["p/q", ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QSeriesJson {
    pub var: Var,
    pub order: usize,
    pub coeffs: Vec<String>,
}

impl From<&QSeries> for QSeriesJson {
    fn from(s: &QSeries) -> Self {
        QSeriesJson {
            var: s.var,
            order: s.order(),
            coeffs: s.coeffs.iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<QSeriesJson> for QSeries {
    type Error = Error;

    fn try_from(j: QSeriesJson) -> Result<Self> {
        if j.coeffs.len() != j.order {
            return Err(Error::Parse(format!(
                "series declares order {} but carries {} coefficients",
                j.order,
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(QSeries::from_coeffs(j.var, coeffs))
    }
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = QSeriesJson::deserialize(deserializer)?;
        QSeries::try_from(j).map_err(serde::de::Error::custom)
    }
}
