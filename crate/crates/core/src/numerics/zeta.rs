use rug::ops::Pow;
use rug::{Float, Integer};

use super::{bits_for, GUARD_DIGITS, MIN_DIGITS};

/// `zeta(3) = (5/2) sum_{k>=1} (-1)^(k+1) / (k^3 C(2k, k))`.
///
/// The terms decrease monotonically, so the truncation error is at most the
/// first omitted term; summation stops once that drops below
/// `10^-(digits + GUARD_DIGITS)`, after about `(digits + 10) / log10(4)`
/// terms. The 16 extra bits absorb one rounding error per term.
pub fn zeta3(digits: u32) -> Float {
    let digits = digits.max(MIN_DIGITS);
    let prec = bits_for(digits) + 16;
    let eps = Float::with_val(prec, 10u32).pow(-((digits + GUARD_DIGITS) as i32));
    let mut sum = Float::new(prec);
    let mut central = Integer::from(1);
    let mut k: u32 = 1;
    loop {
        // C(2k, k) = C(2k-2, k-1) * (2k)(2k-1) / k^2
        central *= (2 * k) * (2 * k - 1);
        central /= k * k;
        let denom = Integer::from(k).pow(3) * &central;
        let term = Float::with_val(prec, &denom).recip();
        if k % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term < eps {
            break;
        }
        k += 1;
    }
    sum *= 5u32;
    sum /= 2u32;
    sum.set_prec(bits_for(digits));
    sum
}
