//! Exact integer and rational foundations: divisors, divisor-power sums,
//! Bernoulli numbers and `lcm(1..n)`.

use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Complete, Integer};

use crate::error::{domain, Result};

pub use rug::Rational;

/// Largest Bernoulli index served from the cache.
pub const BERNOULLI_BOUND: u32 = 64;

/// Divisor structure of a level `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelData {
    pub level: u64,
    /// All divisors in ascending order.
    pub divisors: Vec<u64>,
    pub squarefree: bool,
}

impl LevelData {
    pub fn divisor_count(&self) -> usize {
        self.divisors.len()
    }

    /// Divisors strictly below `sqrt(N)`; for squarefree `N` these index the
    /// Fricke pairs `d <-> N/d`.
    pub fn small_divisors(&self) -> impl Iterator<Item = u64> + '_ {
        let n = self.level;
        self.divisors.iter().copied().filter(move |&d| d * d < n)
    }
}

/// Ascending list of the divisors of `n` (`n >= 1`).
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn level_data(level: u64) -> Result<LevelData> {
    if level == 0 {
        return Err(domain("level must be positive"));
    }
    let divisors = divisors(level);
    let squarefree = divisors
        .iter()
        .skip(1)
        .all(|&d| d * d > level || !level.is_multiple_of(d * d));
    Ok(LevelData {
        level,
        divisors,
        squarefree,
    })
}

/// `sigma_m(n) = sum_{d | n} d^m`.
pub fn sigma(n: u64, m: u32) -> Result<Integer> {
    if n == 0 {
        return Err(domain("sigma(n, m) requires n >= 1"));
    }
    let mut acc = Integer::ZERO;
    for d in divisors(n) {
        acc += Integer::from(d).pow(m);
    }
    Ok(acc)
}

/// `sigma_m(n)` for every `0 <= n < len` via a divisor sieve; index 0 is 0.
pub fn sigma_table(len: usize, m: u32) -> Vec<Integer> {
    let mut table = vec![Integer::ZERO; len];
    for d in 1..len {
        let power = Integer::from(d).pow(m);
        for multiple in (d..len).step_by(d) {
            table[multiple] += &power;
        }
    }
    table
}

/// `lcm(1, 2, ..., n)`, with `lcm_upto(0) = lcm_upto(1) = 1`.
pub fn lcm_upto(n: u64) -> Integer {
    let mut acc = Integer::from(1);
    if n < 2 {
        return acc;
    }
    let len = n as usize + 1;
    let mut composite = vec![false; len];
    for p in 2..len {
        if composite[p] {
            continue;
        }
        for m in (p * p..len).step_by(p) {
            composite[m] = true;
        }
        // largest power of p not exceeding n
        let mut power = p as u64;
        while power * (p as u64) <= n {
            power *= p as u64;
        }
        acc *= power;
    }
    acc
}

fn bernoulli_cache() -> &'static [Rational] {
    static CACHE: OnceLock<Vec<Rational>> = OnceLock::new();
    CACHE.get_or_init(|| {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1
        let bound = BERNOULLI_BOUND as usize;
        let mut b: Vec<Rational> = Vec::with_capacity(bound + 1);
        b.push(Rational::from(1));
        for m in 1..=bound {
            let mut sum = Rational::new();
            for (j, bj) in b.iter().enumerate() {
                let binom = Integer::binomial_u(m as u32 + 1, j as u32).complete();
                sum += bj.clone() * binom;
            }
            b.push(-sum / Rational::from(m as u64 + 1));
        }
        b
    })
}

/// Exact Bernoulli number `B_k` for even `k` (`B_1` is never served).
pub fn bernoulli(k: u32) -> Result<Rational> {
    if k % 2 == 1 {
        return Err(domain(format!("bernoulli: index {k} is odd")));
    }
    if k > BERNOULLI_BOUND {
        return Err(domain(format!(
            "bernoulli: index {k} exceeds bound {BERNOULLI_BOUND}"
        )));
    }
    Ok(bernoulli_cache()[k as usize].clone())
}

/// Number of decimal digits of `|n|` (`0` has one digit).
pub fn decimal_digits(n: &Integer) -> usize {
    let s = n.to_string();
    s.trim_start_matches('-').len()
}

/// Parse `"p/q"`, `"p"` or `"-p/q"` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let parsed = match t.split_once('/') {
        Some((num, den)) => {
            let num: Integer = num
                .trim()
                .parse()
                .map_err(|_| crate::Error::Parse(format!("bad numerator in {text:?}")))?;
            let den: Integer = den
                .trim()
                .parse()
                .map_err(|_| crate::Error::Parse(format!("bad denominator in {text:?}")))?;
            if den == 0 {
                return Err(crate::Error::Parse(format!("zero denominator in {text:?}")));
            }
            Rational::from((num, den))
        }
        None => {
            let num: Integer = t
                .parse()
                .map_err(|_| crate::Error::Parse(format!("bad rational {text:?}")))?;
            Rational::from(num)
        }
    };
    Ok(parsed)
}

/// Canonical `"p/q"` text; integers print without a denominator.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}
