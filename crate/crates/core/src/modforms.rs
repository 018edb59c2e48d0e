//! Concrete modular objects as q-series: Eisenstein series `E_k(d tau)`,
//! Dedekind eta quotients, the Hauptmodul catalog and the Beukers form.

use rug::{Integer, Rational};

use crate::arith::{bernoulli, sigma_table};
use crate::error::{domain, Error, Result};
use crate::qseries::{mul_trunc, QSeries, Var};

/// Levels carrying a fully specified Hauptmodul.
pub const CATALOG_LEVELS: [u64; 8] = [6, 10, 14, 15, 21, 26, 35, 39];

/// Levels that appear in the comparison tables without published modular data.
pub const UNSPECIFIED_LEVELS: [u64; 5] = [8, 12, 18, 20, 50];

/// `E_k(d tau) = 1 - (2k / B_k) sum_{n>=1} sigma_{k-1}(n) q^(d n)`, truncated at `order`.
pub fn eisenstein(k: u32, d: usize, order: usize) -> Result<QSeries> {
    if k < 2 || k % 2 == 1 {
        return Err(domain(format!("eisenstein: weight {k} must be even and >= 2")));
    }
    if d == 0 {
        return Err(domain("eisenstein: d must be positive"));
    }
    let factor = -Rational::from(2 * k) / bernoulli(k)?;
    let mut coeffs = vec![Rational::new(); order];
    if order > 0 {
        coeffs[0] = Rational::from(1);
    }
    let terms = order.saturating_sub(1) / d + 1;
    let sig = sigma_table(terms, k - 1);
    for (n, s) in sig.into_iter().enumerate().skip(1) {
        coeffs[n * d] = Rational::from(&factor * s);
    }
    Ok(QSeries::from_coeffs(Var::Q, coeffs))
}

/// `q^(sum d r_d / 24) * prod_d prod_n (1 - q^(d n))^(r_d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    /// `(d, r_d)` pairs, meaning `eta(d tau)^(r_d)`.
    pub factors: Vec<(u64, i64)>,
    pub level: u64,
}

impl EtaQuotient {
    pub fn new(level: u64, factors: &[(u64, i64)]) -> Result<Self> {
        let eq = EtaQuotient {
            factors: factors.to_vec(),
            level,
        };
        eq.validate()?;
        Ok(eq)
    }

    pub fn validate(&self) -> Result<()> {
        for &(d, _) in &self.factors {
            if d == 0 || !self.level.is_multiple_of(d) {
                return Err(domain(format!(
                    "eta factor eta({d} tau) does not divide level {}",
                    self.level
                )));
            }
        }
        self.q_offset().map(|_| ())
    }

    /// The leading exponent `sum d r_d / 24`, which must be a nonnegative integer.
    pub fn q_offset(&self) -> Result<usize> {
        let weighted: i64 = self.factors.iter().map(|&(d, r)| d as i64 * r).sum();
        if weighted % 24 != 0 {
            return Err(domain(format!(
                "eta quotient prefactor exponent {weighted}/24 is not integral"
            )));
        }
        if weighted < 0 {
            return Err(domain(format!(
                "eta quotient prefactor exponent {}/1 is negative",
                weighted / 24
            )));
        }
        Ok((weighted / 24) as usize)
    }

    /// Weight `sum r_d / 2`, doubled to stay integral.
    pub fn double_weight(&self) -> i64 {
        self.factors.iter().map(|&(_, r)| r).sum()
    }

    /// Union of factor lists (exponents add).
    pub fn combine(&self, other: &EtaQuotient) -> Result<EtaQuotient> {
        let level = lcm(self.level, other.level);
        let mut factors: Vec<(u64, i64)> = Vec::new();
        for &(d, r) in self.factors.iter().chain(other.factors.iter()) {
            match factors.iter_mut().find(|(e, _)| *e == d) {
                Some(slot) => slot.1 += r,
                None => factors.push((d, r)),
            }
        }
        factors.retain(|&(_, r)| r != 0);
        EtaQuotient::new(level, &factors)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    a / x * b
}

/// `prod_{n>=1} (1 - q^(d n))` via Euler's pentagonal-number theorem.
fn euler_function(d: usize, order: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); order];
    // sum_k (-1)^k q^(d k(3k-1)/2), k over all integers
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let pent = (kk * (3 * kk - 1) / 2) as usize * d;
            if pent < order {
                any = true;
                out[pent] += if kk.rem_euclid(2) == 0 { 1 } else { -1 };
            }
        }
        if !any && k > 0 {
            break;
        }
        k += 1;
    }
    out
}

fn int_pow_trunc(base: &[Integer], e: u64, order: usize) -> Vec<Integer> {
    let mut result = vec![Integer::new(); order];
    if order > 0 {
        result[0] = Integer::from(1);
    }
    let mut base = base.to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_trunc(&result, &base, order);
        }
        e >>= 1;
        if e > 0 {
            base = mul_trunc(&base, &base, order);
        }
    }
    result
}

/// Integer inverse of a series with constant term 1.
fn int_inverse_unit(a: &[Integer], order: usize) -> Vec<Integer> {
    let mut out: Vec<Integer> = Vec::with_capacity(order);
    for n in 0..order {
        if n == 0 {
            out.push(Integer::from(1));
            continue;
        }
        let mut acc = Integer::new();
        for i in 1..=n.min(a.len() - 1) {
            if a[i] != 0 {
                acc -= &a[i] * &out[n - i];
            }
        }
        out.push(acc);
    }
    out
}

/// Integer coefficients of the eta quotient to `order`.
pub fn eta_quotient_integers(eq: &EtaQuotient, order: usize) -> Result<Vec<Integer>> {
    eq.validate()?;
    let offset = eq.q_offset()?;
    let inner_order = order.saturating_sub(offset);
    let mut acc = vec![Integer::new(); inner_order];
    if inner_order > 0 {
        acc[0] = Integer::from(1);
    }
    for &(d, r) in &eq.factors {
        if r == 0 || inner_order == 0 {
            continue;
        }
        let mut base = euler_function(d as usize, inner_order);
        if r < 0 {
            base = int_inverse_unit(&base, inner_order);
        }
        let powered = int_pow_trunc(&base, r.unsigned_abs(), inner_order);
        acc = mul_trunc(&acc, &powered, inner_order);
    }
    let mut out = vec![Integer::new(); offset.min(order)];
    out.extend(acc);
    Ok(out)
}

pub fn eta_quotient_series(eq: &EtaQuotient, order: usize) -> Result<QSeries> {
    Ok(QSeries::from_integers(Var::Q, eta_quotient_integers(eq, order)?))
}

/// One row of the Hauptmodul catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HauptmodulCatalogEntry {
    pub level: u64,
    pub eta_quotient: EtaQuotient,
    /// Coefficients of `q^1 .. q^6`.
    pub expected_leading: [i64; 6],
}

struct CatalogRow {
    level: u64,
    factors: &'static [(u64, i64)],
    leading: [i64; 6],
}

// t_N = (eta(tau) eta(N tau) / eta(a tau) eta(b tau))^e for N = a b
const CATALOG: &[CatalogRow] = &[
    CatalogRow { level: 6, factors: &[(1, 12), (2, -12), (3, -12), (6, 12)], leading: [1, -12, 66, -220, 495, -804] },
    CatalogRow { level: 10, factors: &[(1, 6), (2, -6), (5, -6), (10, 6)], leading: [1, -6, 15, -26, 51, -96] },
    CatalogRow { level: 14, factors: &[(1, 4), (2, -4), (7, -4), (14, 4)], leading: [1, -4, 6, -8, 17, -28] },
    CatalogRow { level: 15, factors: &[(1, 3), (3, -3), (5, -3), (15, 3)], leading: [1, -3, 0, 8, -9, 3] },
    CatalogRow { level: 21, factors: &[(1, 2), (3, -2), (7, -2), (21, 2)], leading: [1, -2, -1, 4, -3, 0] },
    CatalogRow { level: 26, factors: &[(1, 2), (2, -2), (13, -2), (26, 2)], leading: [1, -2, 1, -2, 4, -4] },
    CatalogRow { level: 35, factors: &[(1, 1), (5, -1), (7, -1), (35, 1)], leading: [1, -1, -1, 0, 0, 2] },
    CatalogRow { level: 39, factors: &[(1, 1), (3, -1), (13, -1), (39, 1)], leading: [1, -1, -1, 1, -1, 0] },
];

fn supported_levels_text() -> String {
    CATALOG_LEVELS
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Catalog lookup. Levels 8, 12, 18, 20 and 50 report
/// [`Error::NotReproducible`]; anything else is unsupported.
pub fn hauptmodul(level: u64) -> Result<HauptmodulCatalogEntry> {
    if let Some(row) = CATALOG.iter().find(|r| r.level == level) {
        return Ok(HauptmodulCatalogEntry {
            level,
            eta_quotient: EtaQuotient::new(level, row.factors)?,
            expected_leading: row.leading,
        });
    }
    if UNSPECIFIED_LEVELS.contains(&level) {
        return Err(Error::NotReproducible(level));
    }
    Err(Error::UnsupportedLevel {
        level,
        supported: supported_levels_text(),
    })
}

impl HauptmodulCatalogEntry {
    pub fn series(&self, order: usize) -> Result<QSeries> {
        eta_quotient_series(&self.eta_quotient, order)
    }

    /// Compare the first six coefficients against the golden row.
    pub fn check_leading(&self) -> Result<()> {
        let s = eta_quotient_integers(&self.eta_quotient, 7)?;
        if s[0] != 0 {
            return Err(Error::Internal(format!("t_{} has a constant term", self.level)));
        }
        for (i, &want) in self.expected_leading.iter().enumerate() {
            if s[i + 1] != want {
                return Err(Error::Internal(format!(
                    "t_{}: coefficient of q^{} is {}, expected {want}",
                    self.level,
                    i + 1,
                    s[i + 1]
                )));
            }
        }
        Ok(())
    }
}

/// `E_b = (eta(3 tau) eta(2 tau))^7 / (eta(6 tau) eta(tau))^5`.
pub fn beukers_quotient() -> EtaQuotient {
    EtaQuotient::new(6, &[(1, -5), (2, 7), (3, 7), (6, -5)]).expect("valid quotient")
}

pub fn beukers_form(order: usize) -> QSeries {
    eta_quotient_series(&beukers_quotient(), order).expect("valid quotient")
}
