//! Integer convolution kernels behind the rational series operations.
//!
//! Rational series are multiplied by clearing a common denominator, running
//! the convolution over integers and reducing once per output coefficient.
//! Parallel and sequential paths produce identical integers.

use rayon::prelude::*;
use rug::{Integer, Rational};

/// Below this many multiply-adds the convolution stays on one thread.
const PARALLEL_WORK: usize = 4096;

/// Least common multiple of the denominators.
pub fn common_denominator(coeffs: &[Rational]) -> Integer {
    let mut l = Integer::from(1);
    for c in coeffs {
        if *c.denom() != 1 {
            l.lcm_mut(c.denom());
        }
    }
    l
}

/// `coeffs * l` as integers; `l` must be a multiple of every denominator.
pub fn scale_to_integers(coeffs: &[Rational], l: &Integer) -> Vec<Integer> {
    coeffs
        .iter()
        .map(|c| {
            if *c.denom() == 1 {
                Integer::from(c.numer() * l)
            } else {
                let factor = Integer::from(l / c.denom());
                Integer::from(c.numer() * &factor)
            }
        })
        .collect()
}

/// `coeffs / l` reduced.
pub fn divide_out(coeffs: Vec<Integer>, l: &Integer) -> Vec<Rational> {
    let work = |c: Integer| {
        if *l == 1 {
            Rational::from(c)
        } else {
            Rational::from((c, l.clone()))
        }
    };
    if coeffs.len() > 64 {
        coeffs.into_par_iter().map(work).collect()
    } else {
        coeffs.into_iter().map(work).collect()
    }
}

fn nonzero_indices(a: &[Integer]) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, _)| i)
        .collect()
}

/// Truncated product `a * b mod x^order`.
pub fn mul_trunc(a: &[Integer], b: &[Integer], order: usize) -> Vec<Integer> {
    // iterate over the sparser factor
    let (a, b) = if nonzero_indices(a).len() <= nonzero_indices(b).len() {
        (a, b)
    } else {
        (b, a)
    };
    let nz = nonzero_indices(a);
    let coeff = |n: usize| -> Integer {
        let mut acc = Integer::new();
        for &i in &nz {
            if i > n {
                break;
            }
            let j = n - i;
            if j < b.len() && b[j] != 0 {
                acc += &a[i] * &b[j];
            }
        }
        acc
    };
    if nz.len() * order / 2 >= PARALLEL_WORK {
        (0..order).into_par_iter().map(coeff).collect()
    } else {
        (0..order).map(coeff).collect()
    }
}

/// `1 / a mod x^order` for an integer series with `a[0] = c != 0`, returned
/// as integers `C_n = c^(n+1) * [x^n](1/a)`.
pub fn inverse_scaled(a: &[Integer], order: usize) -> Vec<Integer> {
    let c = a[0].clone();
    // weights a_i * c^(i-1)
    let mut weighted: Vec<(usize, Integer)> = Vec::new();
    let mut cpow = Integer::from(1);
    for (i, ai) in a.iter().enumerate().take(order).skip(1) {
        if *ai != 0 {
            weighted.push((i, Integer::from(ai * &cpow)));
        }
        cpow *= &c;
    }
    let mut out: Vec<Integer> = Vec::with_capacity(order);
    out.push(Integer::from(1));
    for n in 1..order {
        let mut acc = Integer::new();
        for (i, w) in &weighted {
            if *i > n {
                break;
            }
            acc -= w * &out[n - i];
        }
        out.push(acc);
    }
    out
}
