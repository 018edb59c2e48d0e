//! Recurrence and differential-operator algebra for the level-6 family:
//! the Apery recurrence, its three-term shifted variant for
//! `c_n = b_n + alpha b_(n-1)`, the Picard-Fuchs operator in `D = t d/dt`
//! and its gauge transform by `w = 1 + alpha t`.

use std::fmt;

use rug::Rational;
use serde::Serialize;

use crate::arith::format_rational;
use crate::error::{domain, Result};
use crate::qseries::{QSeries, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyVar {
    N,
    T,
}

impl PolyVar {
    fn as_str(self) -> &'static str {
        match self {
            PolyVar::N => "n",
            PolyVar::T => "t",
        }
    }
}

/// Dense univariate polynomial with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    var: PolyVar,
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(var: PolyVar, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn from_ints(var: PolyVar, coeffs: &[i64]) -> Self {
        Self::new(var, coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn constant(var: PolyVar, c: Rational) -> Self {
        Self::new(var, vec![c])
    }

    /// The polynomial `x`.
    pub fn x(var: PolyVar) -> Self {
        Self::from_ints(var, &[0, 1])
    }

    pub fn var(&self) -> PolyVar {
        self.var
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            self.var,
            (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.var, self.coeffs.iter().map(|x| Rational::from(x * c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(self.var, Vec::new());
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(self.var, out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.var, Rational::from(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `p(x + 1)`.
    pub fn shift_arg(&self) -> Poly {
        let x1 = Poly::from_ints(self.var, &[1, 1]);
        let mut acc = Poly::new(self.var, Vec::new());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&x1).add(&Poly::constant(self.var, c.clone()));
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// As a series in `t` truncated at `order`.
    pub fn to_series(&self, order: usize) -> QSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(coeffs.len()), Rational::new());
        coeffs.truncate(order);
        QSeries::from_coeffs(Var::T, coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let x = self.var.as_str();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(&mag))?,
                _ => {
                    if mag != 1 {
                        write!(f, "{}*", format_rational(&mag))?;
                    }
                    f.write_str(x)?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `V_n = 34n^3 + 51n^2 + 27n + 5`.
pub fn apery_v() -> Poly {
    Poly::from_ints(PolyVar::N, &[5, 27, 51, 34])
}

fn cube(n: &Rational) -> Rational {
    Rational::from(n * n) * n
}

/// `(n+1)^3 s_(n+1) - V_n s_n + n^3 s_(n-1)`.
pub fn apery_residual(seq: &[Rational], n: usize) -> Result<Rational> {
    if n == 0 || n + 1 >= seq.len() {
        return Err(domain(format!(
            "apery_residual: index {n} needs entries n-1..n+1 of a sequence of length {}",
            seq.len()
        )));
    }
    let nn = Rational::from(n as u64);
    let n1 = Rational::from(n as u64 + 1);
    Ok(cube(&n1) * &seq[n + 1] - apery_v().eval(&nn) * &seq[n] + cube(&nn) * &seq[n - 1])
}

/// `U_n = alpha^2 (n+1)^3 + alpha V_n + n^3`.
pub fn shifted_u(alpha: &Rational) -> Poly {
    let n = Poly::x(PolyVar::N);
    let n1 = Poly::from_ints(PolyVar::N, &[1, 1]);
    n1.pow(3)
        .scale(&Rational::from(alpha * alpha))
        .add(&apery_v().scale(alpha))
        .add(&n.pow(3))
}

/// `(P_n, Q_n, R_n)` as polynomials in `n`, with
/// `P_n c_(n+2) + Q_n c_(n+1) + R_n c_n = 0`.
pub fn shifted_polys(alpha: &Rational) -> Result<(Poly, Poly, Poly)> {
    if *alpha == 0 {
        return Err(domain("shifted recurrence needs alpha != 0"));
    }
    let n = Poly::x(PolyVar::N);
    let n1 = Poly::from_ints(PolyVar::N, &[1, 1]);
    let n2 = Poly::from_ints(PolyVar::N, &[2, 1]);
    let u = shifted_u(alpha);
    let u_next = u.shift_arg();
    let alpha2 = Rational::from(alpha * alpha);
    let p = n2.pow(3).mul(&u).scale(alpha);
    let q = n1
        .pow(3)
        .mul(&u.add(&u_next.scale(&alpha2)))
        .sub(&u.mul(&u_next));
    let r = n.pow(3).mul(&u_next).scale(alpha);
    Ok((p, q, r))
}

/// `(P_n, Q_n, R_n)` evaluated directly from their defining formulas.
pub fn shifted_coeffs(alpha: &Rational, n: usize) -> Result<(Rational, Rational, Rational)> {
    if *alpha == 0 {
        return Err(domain("shifted recurrence needs alpha != 0"));
    }
    let u_at = |m: u64| -> Rational {
        let m_r = Rational::from(m);
        let alpha2 = Rational::from(alpha * alpha);
        alpha2 * cube(&Rational::from(m + 1)) + (alpha * apery_v().eval(&m_r)) + cube(&m_r)
    };
    let n = n as u64;
    let u = u_at(n);
    let u1 = u_at(n + 1);
    let alpha2 = Rational::from(alpha * alpha);
    let p = (alpha * cube(&Rational::from(n + 2))) * &u;
    let q = cube(&Rational::from(n + 1)) * (u.clone() + Rational::from(&alpha2 * &u1))
        - Rational::from(&u * &u1);
    let r = (alpha * cube(&Rational::from(n))) * &u1;
    Ok((p, q, r))
}

/// `P_n c_(n+2) + Q_n c_(n+1) + R_n c_n`.
pub fn shifted_residual(alpha: &Rational, c: &[Rational], n: usize) -> Result<Rational> {
    if n + 2 >= c.len() {
        return Err(domain(format!(
            "shifted_residual: index {n} needs entries n..n+2 of a sequence of length {}",
            c.len()
        )));
    }
    let (p, q, r) = shifted_coeffs(alpha, n)?;
    Ok(p * &c[n + 2] + q * &c[n + 1] + r * &c[n])
}

/// `sum_i coeffs[i](t) D^i` with `D = t d/dt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorCoeffs {
    pub coeffs: [Poly; 4],
}

impl OperatorCoeffs {
    pub fn max_degree(&self) -> usize {
        self.coeffs.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }
}

/// `B3 D^3 + B2 D^2 + B1 D + B0` annihilating `sum b_n t^n`.
pub fn picard_fuchs() -> OperatorCoeffs {
    let t = PolyVar::T;
    OperatorCoeffs {
        coeffs: [
            Poly::from_ints(t, &[0, -5, 1]),
            Poly::from_ints(t, &[0, -27, 3]),
            Poly::from_ints(t, &[0, -51, 3]),
            Poly::from_ints(t, &[1, -34, 1]),
        ],
    }
}

/// The operator annihilating `(1 + alpha t) B(t)` whenever `picard_fuchs`
/// annihilates `B(t)`.
pub fn transform_operator(alpha: &Rational) -> OperatorCoeffs {
    let t = PolyVar::T;
    let [b0, b1, b2, b3] = picard_fuchs().coeffs;
    let w = Poly::new(t, vec![Rational::from(1), alpha.clone()]);
    let at = Poly::new(t, vec![Rational::new(), alpha.clone()]);
    let one_minus_at = Poly::new(t, vec![Rational::from(1), Rational::from(-alpha)]);
    let alpha2 = Rational::from(alpha * alpha);
    let quad = Poly::new(t, vec![Rational::from(1), Rational::from(alpha * -4i32), alpha2]);
    let three = Rational::from(3);
    let two = Rational::from(2);

    let a3 = w.pow(3).mul(&b3);
    let a2 = w.pow(2).mul(&w.mul(&b2).sub(&at.mul(&b3).scale(&three)));
    let a1 = w.mul(
        &w.pow(2)
            .mul(&b1)
            .sub(&at.mul(&one_minus_at).mul(&b3).scale(&three))
            .sub(&at.mul(&w).mul(&b2).scale(&two)),
    );
    let a0 = w
        .pow(3)
        .mul(&b0)
        .sub(&at.mul(&quad).mul(&b3))
        .sub(&at.mul(&w).mul(&one_minus_at).mul(&b2))
        .sub(&at.mul(&w.pow(2)).mul(&b1));
    OperatorCoeffs {
        coeffs: [a0, a1, a2, a3],
    }
}

/// `sum_i A_i(t) D^i s`, truncated to the window `order(s) - max deg A_i`
/// where every coefficient is determined by the known part of `s`.
pub fn apply_operator(op: &OperatorCoeffs, s: &QSeries) -> Result<QSeries> {
    if s.var() != Var::T {
        return Err(domain("apply_operator expects a t-series"));
    }
    let window = s.order().saturating_sub(op.max_degree());
    let mut acc = QSeries::zero(Var::T, s.order());
    let mut d_s = s.clone();
    for (i, a) in op.coeffs.iter().enumerate() {
        if i > 0 {
            d_s = d_s.theta();
        }
        if a.is_zero() {
            continue;
        }
        acc = acc.add(&a.to_series(s.order()).mul(&d_s)?)?;
    }
    Ok(acc.truncate(window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn apery_residual_examples() {
        let b = ints(&[1, 5, 73, 1445]);
        assert_eq!(apery_residual(&b, 1).unwrap(), 0);
        assert_eq!(apery_residual(&b, 2).unwrap(), 0);
        assert_eq!(apery_residual(&ints(&[0, 0, 0]), 1).unwrap(), 0);
        assert!(apery_residual(&b, 3).is_err());
        assert!(apery_residual(&b, 0).is_err());
    }

    #[test]
    fn shifted_coeffs_example() {
        let one = rat(1, 1);
        assert_eq!(shifted_u(&one).eval(&one), 126);
        let (p, _, _) = shifted_coeffs(&one, 1).unwrap();
        assert_eq!(p, 3402);
        assert!(shifted_coeffs(&rat(0, 1), 1).is_err());
    }

    #[test]
    fn symbolic_polys_match_direct_evaluation() {
        for alpha in [rat(1, 1), rat(-2, 1), rat(5, 3), rat(100, 1)] {
            let (p, q, r) = shifted_polys(&alpha).unwrap();
            for n in 0..12usize {
                let nn = Rational::from(n as u64);
                let (pd, qd, rd) = shifted_coeffs(&alpha, n).unwrap();
                assert_eq!((p.eval(&nn), q.eval(&nn), r.eval(&nn)), (pd, qd, rd));
            }
            let lead = Rational::from(&alpha * &alpha) + Rational::from(&alpha * 34u32) + 1u32;
            let alpha_lead = Rational::from(&alpha * &lead);
            assert_eq!(p.degree(), Some(6));
            assert_eq!(p.leading(), alpha_lead);
            assert_eq!(r.leading(), alpha_lead);
            assert_eq!(q.leading(), Rational::from(&alpha_lead * -34i32));
        }
    }

    #[test]
    fn picard_fuchs_examples() {
        let [b0, _, _, b3] = picard_fuchs().coeffs;
        assert_eq!(b3.eval(&rat(0, 1)), 1);
        assert_eq!(b3.coeff(0), 1);
        assert_eq!(b3.leading(), 1);
        assert_eq!(b0.coeff(1), -5);
        assert_eq!(b0.coeff(0), 0);
    }

    #[test]
    fn transform_examples() {
        assert_eq!(transform_operator(&rat(0, 1)), picard_fuchs());
        let op = transform_operator(&rat(1, 1));
        let w3 = Poly::from_ints(PolyVar::T, &[1, 3, 3, 1]);
        assert_eq!(op.coeffs[3], w3.mul(&picard_fuchs().coeffs[3]));
        let generic = transform_operator(&rat(3, 7));
        assert_eq!(generic.coeffs[3].degree(), Some(5));
        assert!(generic.coeffs[0].degree().unwrap() <= 5);
    }

    #[test]
    fn operator_on_zero_series() {
        let zero = QSeries::zero(Var::T, 20);
        assert!(apply_operator(&picard_fuchs(), &zero).unwrap().is_zero());
        assert!(apply_operator(&transform_operator(&rat(2, 1)), &zero).unwrap().is_zero());
        assert_eq!(apply_operator(&picard_fuchs(), &zero).unwrap().order(), 18);
    }

    #[test]
    fn poly_display() {
        assert_eq!(apery_v().to_string(), "5 + 27*n + 51*n^2 + 34*n^3");
        assert_eq!(picard_fuchs().coeffs[0].to_string(), "-5*t + t^2");
        assert_eq!(Poly::new(PolyVar::T, vec![]).to_string(), "0");
    }
}
