//! Eisenstein combinations: the weight-4 form `F_N` with `L(F_N, 3) = zeta(3)`
//! and the affine family of weight-2 forms `E_{N,alpha} = E1 + alpha E0`.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli, format_rational, level_data, parse_rational, LevelData};
use crate::error::{domain, Error, Result};
use crate::modforms::eisenstein;
use crate::qseries::{QSeries, Var};

/// `sum_d coeffs[d] * E_k(d tau)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EisensteinCombo {
    pub weight: u32,
    pub level: u64,
    /// Keyed by the divisors of `level`, ascending.
    pub coeffs: BTreeMap<u64, Rational>,
}

impl EisensteinCombo {
    pub fn zero(weight: u32, level: u64) -> Result<Self> {
        let data = level_data(level)?;
        Ok(EisensteinCombo {
            weight,
            level,
            coeffs: data.divisors.iter().map(|&d| (d, Rational::new())).collect(),
        })
    }

    /// Coefficients listed in ascending divisor order.
    pub fn from_divisor_list(weight: u32, level: u64, values: &[Rational]) -> Result<Self> {
        let data = level_data(level)?;
        if values.len() != data.divisors.len() {
            return Err(domain(format!(
                "level {level} has {} divisors, got {} coefficients",
                data.divisors.len(),
                values.len()
            )));
        }
        Ok(EisensteinCombo {
            weight,
            level,
            coeffs: data.divisors.iter().copied().zip(values.iter().cloned()).collect(),
        })
    }

    pub fn coeff(&self, d: u64) -> &Rational {
        &self.coeffs[&d]
    }

    pub fn values(&self) -> Vec<Rational> {
        self.coeffs.values().cloned().collect()
    }

    /// Value at the cusp `i infinity`: every `E_k(d tau)` tends to 1.
    pub fn value_at_infinity(&self) -> Rational {
        self.coeffs.values().cloned().sum()
    }

    /// `self + alpha * other` (same weight and level).
    pub fn add_scaled(&self, other: &EisensteinCombo, alpha: &Rational) -> Result<Self> {
        if self.weight != other.weight || self.level != other.level {
            return Err(domain("combining Eisenstein combos of different weight or level"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(d, c)| (*d, (c + Rational::from(alpha * other.coeff(*d)))))
            .collect();
        Ok(EisensteinCombo {
            weight: self.weight,
            level: self.level,
            coeffs,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComboJson {
    pub weight: u32,
    pub level: u64,
    pub coeffs: BTreeMap<u64, String>,
}

impl From<&EisensteinCombo> for ComboJson {
    fn from(c: &EisensteinCombo) -> Self {
        ComboJson {
            weight: c.weight,
            level: c.level,
            coeffs: c.coeffs.iter().map(|(d, v)| (*d, format_rational(v))).collect(),
        }
    }
}

impl TryFrom<ComboJson> for EisensteinCombo {
    type Error = Error;

    fn try_from(j: ComboJson) -> Result<Self> {
        let data = level_data(j.level)?;
        let keys: Vec<u64> = j.coeffs.keys().copied().collect();
        if keys != data.divisors {
            return Err(Error::Parse(format!(
                "combo keys {keys:?} are not the divisors of {}",
                j.level
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|(d, v)| Ok((*d, parse_rational(v)?)))
            .collect::<Result<_>>()?;
        Ok(EisensteinCombo {
            weight: j.weight,
            level: j.level,
            coeffs,
        })
    }
}

impl Serialize for EisensteinCombo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComboJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for EisensteinCombo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        EisensteinCombo::try_from(ComboJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// The affine line `E1 + alpha E0` of weight-2 forms with the Fricke symmetry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EFamilyBasis {
    /// Homogeneous direction, value 0 at `i infinity`, pinned by `beta_1 = 1`.
    pub e0: EisensteinCombo,
    /// Particular solution, value 1 at `i infinity`, pinned by `beta_1 = 0`.
    pub e1: EisensteinCombo,
}

impl EFamilyBasis {
    pub fn member(&self, alpha: &Rational) -> EisensteinCombo {
        self.e1.add_scaled(&self.e0, alpha).expect("basis shares weight and level")
    }
}

/// Exact Gaussian elimination; `None` when the matrix is singular.
fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::from(1) / a[col][col].clone();
        for x in &mut a[col][col..] {
            *x *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let factor = a[r][col].clone();
            let pivot_row = a[col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= Rational::from(&factor * p);
            }
            let delta = Rational::from(&factor * &b[col]);
            b[r] -= delta;
        }
    }
    Some(b)
}

fn require_shape(data: &LevelData, k: usize) -> Result<()> {
    if !data.squarefree {
        return Err(domain(format!("level {} is not squarefree", data.level)));
    }
    if data.divisor_count() != k {
        return Err(domain(format!(
            "level {} has {} divisors, need exactly {k}",
            data.level,
            data.divisor_count()
        )));
    }
    Ok(())
}

fn inverse_power(d: u64, e: u32) -> Rational {
    Rational::from((1, Integer::from(d).pow(e)))
}

/// The unique weight-`k` combination with `F(i infinity) = 0`,
/// `L(F, k-1) = zeta(k-1)`, Fricke sign `-1` and the vanishing conditions
/// `L(F, l) = 0` for `(k+2)/2 <= l <= k-2`.
#[allow(non_snake_case)]
pub fn solve_F(level: u64, k: u32) -> Result<EisensteinCombo> {
    if k < 4 || k % 2 == 1 {
        return Err(domain(format!("weight {k} must be even and >= 4")));
    }
    if !k.is_multiple_of(4) {
        return Err(domain(format!("weight {k}: i^k is not real, only k = 0 mod 4 is supported")));
    }
    let data = level_data(level)?;
    require_shape(&data, k as usize)?;
    let divs = &data.divisors;
    let index = |d: u64| divs.iter().position(|&x| x == d).expect("divisor");
    let n = divs.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();

    // F(i infinity) = 0
    rows.push(vec![Rational::from(1); n]);
    rhs.push(Rational::new());

    // L(E_k(d .), s) = -d^(-s) (2k / B_k) zeta(s) zeta(s - k + 1); at s = k - 1
    // the second factor is zeta(0) = -1/2.
    let b_k = bernoulli(k)?;
    let zeta0 = Rational::from((-1, 2));
    let l_factor = -Rational::from(2 * k) / b_k * zeta0;
    rows.push(
        divs.iter()
            .map(|&d| &l_factor * inverse_power(d, k - 1))
            .collect(),
    );
    rhs.push(Rational::from(1));

    // alpha_{N/d} = -(i^k N^(k/2) / d^k) alpha_d, with i^k = 1
    let n_half = Integer::from(level).pow(k / 2);
    for d in data.small_divisors() {
        let mut row = vec![Rational::new(); n];
        row[index(level / d)] = Rational::from(1);
        row[index(d)] = Rational::from((n_half.clone(), Integer::from(d).pow(k)));
        rows.push(row);
        rhs.push(Rational::new());
    }

    for l in (k + 2) / 2..=k - 2 {
        rows.push(divs.iter().map(|&d| inverse_power(d, l)).collect());
        rhs.push(Rational::new());
    }

    if rows.len() != n {
        return Err(Error::Internal(format!(
            "F system for level {level} has {} equations for {n} unknowns",
            rows.len()
        )));
    }
    let solution = solve_exact(rows, rhs)
        .ok_or_else(|| Error::Internal(format!("F system for level {level} is singular")))?;
    EisensteinCombo::from_divisor_list(k, level, &solution)
}

fn solve_weight2(data: &LevelData, value_at_infinity: i64, beta_one: i64) -> Result<EisensteinCombo> {
    let level = data.level;
    let divs = &data.divisors;
    let index = |d: u64| divs.iter().position(|&x| x == d).expect("divisor");
    let n = divs.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    // beta_{N/d} = -(N / d^2) beta_d
    for d in data.small_divisors() {
        let mut row = vec![Rational::new(); n];
        row[index(level / d)] = Rational::from(1);
        row[index(d)] = Rational::from((level, d * d));
        rows.push(row);
        rhs.push(Rational::new());
    }
    rows.push(vec![Rational::from(1); n]);
    rhs.push(Rational::from(value_at_infinity));
    let mut pin = vec![Rational::new(); n];
    pin[0] = Rational::from(1);
    rows.push(pin);
    rhs.push(Rational::from(beta_one));
    let solution = solve_exact(rows, rhs)
        .ok_or_else(|| Error::Internal(format!("E system for level {level} is singular")))?;
    EisensteinCombo::from_divisor_list(2, level, &solution)
}

/// Canonical basis of the weight-2 affine family for a squarefree level
/// with four divisors.
pub fn solve_e_basis(level: u64) -> Result<EFamilyBasis> {
    let data = level_data(level)?;
    require_shape(&data, 4)?;
    Ok(EFamilyBasis {
        e0: solve_weight2(&data, 0, 1)?,
        e1: solve_weight2(&data, 1, 0)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularityReport {
    /// `sum_d beta_d / d`; the combination is modular iff this vanishes.
    pub sum_over_d: Rational,
    pub modular: bool,
    /// `beta_{N/d} + (N / d^2) beta_d` for each `d < sqrt(N)`.
    pub pairing_residuals: Vec<(u64, Rational)>,
}

impl ModularityReport {
    pub fn fricke_symmetric(&self) -> bool {
        self.pairing_residuals.iter().all(|(_, r)| *r == 0)
    }
}

pub fn check_weight2_modularity(combo: &EisensteinCombo) -> Result<ModularityReport> {
    if combo.weight != 2 {
        return Err(domain(format!("modularity check needs weight 2, got {}", combo.weight)));
    }
    let sum_over_d: Rational = combo
        .coeffs
        .iter()
        .map(|(d, b)| b / Rational::from(*d))
        .sum();
    let level = combo.level;
    let pairing_residuals = combo
        .coeffs
        .keys()
        .copied()
        .filter(|&d| d * d < level)
        .map(|d| {
            let partner = combo.coeffs.get(&(level / d)).cloned().unwrap_or_default();
            let r = partner + Rational::from((level, d * d)) * combo.coeff(d).clone();
            (d, r)
        })
        .collect();
    Ok(ModularityReport {
        modular: sum_over_d == 0,
        sum_over_d,
        pairing_residuals,
    })
}

/// Materialize `sum_d c_d E_k(d tau)` to `order`.
pub fn combo_to_series(combo: &EisensteinCombo, order: usize) -> Result<QSeries> {
    let mut acc = QSeries::zero(Var::Q, order);
    for (&d, c) in &combo.coeffs {
        if *c == 0 {
            continue;
        }
        let e = eisenstein(combo.weight, d as usize, order)?;
        acc = acc.add(&e.scale(c))?;
    }
    Ok(acc)
}
