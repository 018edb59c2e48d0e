use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use super::bits_for;
use crate::error::{domain, Result};
use crate::modforms::{hauptmodul, EtaQuotient};

fn two_pi_i_times(tau: &Complex, prec: u32) -> Complex {
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    Complex::with_val(prec, tau * &two_pi).mul_i(false)
}

/// `q = exp(2 pi i tau)`.
pub(crate) fn nome(tau: &Complex, prec: u32) -> Complex {
    two_pi_i_times(tau, prec).exp()
}

/// `eta(tau) = q^(1/24) prod_{n>=1} (1 - q^n)`.
///
/// The product stops after the first `n` with `|q|^n < 10^-(digits + 10)`.
/// The omitted factors change the logarithm by at most
/// `2 |q|^(n+1) / (1 - |q|)`.
pub fn eval_eta(tau: &Complex, digits: u32) -> Result<Complex> {
    if *tau.imag() <= 0 {
        return Err(domain(format!("eval_eta: Im(tau) must be positive, got {tau}")));
    }
    let prec = bits_for(digits) + 16;
    let q = nome(tau, prec);
    let abs_q = Float::with_val(prec, q.abs_ref());
    let eps = Float::with_val(prec, 10u32).pow(-((digits + super::GUARD_DIGITS) as i32));
    let mut prod = Complex::with_val(prec, 1);
    let mut qn = q.clone();
    let mut abs_qn = abs_q.clone();
    loop {
        prod *= Complex::with_val(prec, 1 - &qn);
        if abs_qn < eps {
            break;
        }
        qn *= &q;
        abs_qn *= &abs_q;
    }
    let prefactor = Complex::with_val(prec, two_pi_i_times(tau, prec) / 24u32).exp();
    let mut out = prefactor * prod;
    out.set_prec(bits_for(digits));
    Ok(out)
}

/// `prod_d eta(d tau)^(r_d)` from the eta factors themselves.
pub fn eval_eta_quotient(eq: &EtaQuotient, tau: &Complex, digits: u32) -> Result<Complex> {
    let prec = bits_for(digits) + 16;
    let mut acc = Complex::with_val(prec, 1);
    for &(d, r) in &eq.factors {
        let scaled = Complex::with_val(prec, tau * d);
        let eta = eval_eta(&scaled, digits + 8)?;
        let power = Complex::with_val(prec, eta.pow(r.unsigned_abs() as u32));
        if r >= 0 {
            acc *= power;
        } else {
            acc /= power;
        }
    }
    acc.set_prec(bits_for(digits));
    Ok(acc)
}

pub fn eval_hauptmodul(level: u64, tau: &Complex, digits: u32) -> Result<Complex> {
    let entry = hauptmodul(level)?;
    eval_eta_quotient(&entry.eta_quotient, tau, digits)
}

/// `sum_n coeffs[n] x^n` by Horner's rule at the precision of `x`.
pub fn eval_series(coeffs: &[Rational], x: &Complex) -> Complex {
    let prec = x.prec().0;
    let mut acc = Complex::new(prec);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += Float::with_val(prec, c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::format_float;
    use rug::ops::Pow;

    fn i_times(y: f64, prec: u32) -> Complex {
        Complex::with_val(prec, (0, y))
    }

    #[test]
    fn eta_at_i() {
        let prec = bits_for(30);
        let eta = eval_eta(&i_times(1.0, prec), 30).unwrap();
        assert_eq!(format_float(eta.real(), 9), "7.68225422e-1");
        assert!(eta.imag().clone().abs() < 1e-30);
        // the same value at a higher precision
        let finer = eval_eta(&i_times(1.0, bits_for(60)), 60).unwrap();
        let diff = Float::with_val(prec, finer.real() - eta.real()).abs();
        assert!(diff < 1e-30);
    }

    #[test]
    fn eta_at_doubled_argument() {
        // eta(2i) from the product at tau = 2i equals the product at i with
        // q replaced by q^2, computed here independently as a plain series.
        let prec = bits_for(40);
        let ratio = Complex::with_val(
            prec,
            eval_eta(&i_times(2.0, prec), 40).unwrap() / eval_eta(&i_times(1.0, prec), 40).unwrap(),
        );
        let pi = Float::with_val(prec, Constant::Pi);
        let q = Float::with_val(prec, -Float::with_val(prec, &pi * 2u32)).exp();
        let mut expect = Float::with_val(prec, -Float::with_val(prec, &pi * 2u32) / 24u32).exp();
        for n in 1..200u32 {
            let q_n = Float::with_val(prec, (&q).pow(n));
            let q_2n = Float::with_val(prec, (&q).pow(2 * n));
            expect *= Float::with_val(prec, 1 - q_2n) / Float::with_val(prec, 1 - q_n);
        }
        let diff = Float::with_val(prec, ratio.real() - &expect).abs();
        assert!(diff < 1e-38, "{diff}");
    }

    #[test]
    fn eta_rejects_lower_half_plane() {
        assert!(eval_eta(&Complex::with_val(64, (0.5, 0.0)), 20).is_err());
        assert!(eval_eta(&Complex::with_val(64, (0.0, -1.0)), 20).is_err());
    }

    #[test]
    fn nome_has_modulus_below_one() {
        let prec = bits_for(20);
        for (x, y) in [(0.0, 0.01), (0.3, 0.5), (-2.0, 3.0)] {
            let q = nome(&Complex::with_val(prec, (x, y)), prec);
            assert!(Float::with_val(prec, q.abs_ref()) < 1);
        }
    }

    #[test]
    fn level_6_fricke_point() {
        let prec = bits_for(45);
        let six = Float::with_val(prec, 6u32).sqrt();
        let tau = Complex::with_val(prec, (0, six.recip()));
        let t = eval_hauptmodul(6, &tau, 45).unwrap();
        let sqrt2 = Float::with_val(prec, 2u32).sqrt();
        let expect = Float::with_val(prec, sqrt2 - 1u32).pow(4u32);
        let diff = Float::with_val(prec, t.real() - &expect).abs();
        assert!(diff < Float::with_val(prec, 10u32).pow(-40i32), "{diff}");
    }

    #[test]
    fn series_evaluation() {
        let prec = 128;
        let coeffs = [Rational::from(1), Rational::from(2), Rational::from((1, 2))];
        let v = eval_series(&coeffs, &Complex::with_val(prec, (2, 0)));
        assert_eq!(*v.real(), 7);
    }
}
