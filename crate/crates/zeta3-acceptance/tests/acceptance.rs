//! End-to-end acceptance run. Every criterion is checked at its stated
//! tolerance and reported on one line; the test fails if any criterion does.

use std::io::Write;
use std::time::{Duration, Instant};

use apery::arith::{level_data, parse_rational, rat};
use apery::families::{check_weight2_modularity, combo_to_series, solve_F, solve_e_basis};
use apery::linform::{integrality_report, ApproxRow, FamilyParam, LevelPipeline};
use apery::modforms::{beukers_form, hauptmodul, CATALOG_LEVELS};
use apery::numerics::{
    default_samples, error_metrics, fricke_value, hecke_check, hecke_check_with_order, obstruction_report,
    branch_report_from, log10_abs, zeta3,
};
use apery::qseries::{QSeries, Var};
use apery::recurrences::{apery_residual, apply_operator, picard_fuchs, shifted_polys, shifted_residual, transform_operator};
use apery_cli::cache::Cache;
use apery_cli::tables::{level_rows, NOT_REPRODUCIBLE};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rayon::prelude::*;
use rug::{Float, Integer, Rational};

type Outcome = Result<String, String>;

type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn rs(list: &[&str]) -> Vec<Rational> {
    list.iter().map(|s| r(s)).collect()
}

fn within_budget(start: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < budget, || format!("{what} took {spent:.1?}, budget {budget:?}"))
}

fn column(rows: &[ApproxRow], pick: fn(&ApproxRow) -> &Rational) -> Vec<Rational> {
    rows.iter().map(|r| pick(r).clone()).collect()
}

// Independent oracles.

/// `prod_d prod_(n>=1) (1 - q^(dn))^(e_d)` times `q^offset`, by repeated
/// multiplication and division by `1 - q^m` on machine integers.
fn eta_product_oracle(factors: &[(u64, i64)], len: usize) -> Vec<i128> {
    let weight: i64 = factors.iter().map(|(d, e)| *d as i64 * e).sum();
    assert!(weight % 24 == 0 && weight >= 0);
    let offset = (weight / 24) as usize;
    let mut p = vec![0i128; len];
    if offset >= len {
        return p;
    }
    p[0] = 1;
    let inner = len - offset;
    let mut work = vec![0i128; inner];
    work[0] = 1;
    for &(d, e) in factors {
        let mut m = d as usize;
        while m < inner {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    for i in (m..inner).rev() {
                        work[i] -= work[i - m];
                    }
                } else {
                    for i in m..inner {
                        work[i] += work[i - m];
                    }
                }
            }
            m += d as usize;
        }
    }
    p[..offset].fill(0);
    p[offset..].copy_from_slice(&work);
    p
}

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// `b_n = sum_k C(n,k)^2 C(n+k,k)^2`.
fn apery_b(n: u32) -> Integer {
    (0..=n)
        .map(|k| {
            let c = binomial(n, k) * binomial(n + k, k);
            Integer::from(&c * &c)
        })
        .sum()
}

/// `a_n = sum_k C(n,k)^2 C(n+k,k)^2 c_(n,k)`, with
/// `c_(n,k) = sum_(m<=n) 1/m^3 + sum_(m<=k) (-1)^(m-1) / (2 m^3 C(n,m) C(n+m,m))`.
fn apery_a(n: u32) -> Rational {
    let h3: Rational = (1..=n).map(|m| Rational::from((1, m.pow(3)))).sum();
    (0..=n)
        .map(|k| {
            let c = binomial(n, k) * binomial(n + k, k);
            let mut inner = h3.clone();
            for m in 1..=k {
                let den = Integer::from(2 * m.pow(3)) * binomial(n, m) * binomial(n + m, m);
                let term = Rational::from((Integer::from(1), den));
                if m % 2 == 1 {
                    inner += term;
                } else {
                    inner -= term;
                }
            }
            Rational::from(Integer::from(&c * &c)) * inner
        })
        .sum()
}

fn sqrt2_minus_1_pow4(digits: u32) -> Float {
    let prec = (digits as f64 * 3.33) as u32 + 64;
    let s = Float::with_val(prec, 2).sqrt() - 1u32;
    Float::with_val(prec, s.square_ref()).square()
}

// Criteria.

const F_GOLDENS: [(u64, [&str; 4], [&str; 3]); 7] = [
    (10, ["7/432", "-11/36", "275/144", "-175/108"], ["35/9", "-115/3", "980/9"]),
    (14, ["21/1560", "-364/1560", "4459/1560", "-4116/1560"], ["42/13", "-350/13", "1176/13"]),
    (15, ["1/112", "-126/112", "350/112", "-225/112"], ["15/7", "135/7", "-210"]),
    (21, ["7/960", "-693/960", "3773/960", "-3087/960"], ["7/4", "63/4", "-497/4"]),
    (26, ["13/1200", "-39/220", "6591/880", "-2197/300"], ["13/5", "-1053/55", "364/5"]),
    (35, ["7/1632", "-8925/1632", "17493/1632", "-8575/1632"], ["35/34", "315/34", "490/17"]),
    (39, ["26/4560", "-2223/4560", "41743/4560", "-39546/4560"], ["26/19", "234/19", "-1495/19"]),
];

const E_GOLDENS: [(u64, [&str; 4], [&str; 4]); 8] = [
    (6, ["1", "-10", "15", "-6"], ["0", "-2", "3", "0"]),
    (10, ["1", "-6", "15", "-10"], ["0", "-2/3", "5/3", "0"]),
    (14, ["1", "-26/5", "91/5", "-14"], ["0", "-2/5", "7/5", "0"]),
    (15, ["1", "-21", "35", "-15"], ["0", "-3/2", "5/2", "0"]),
    (21, ["1", "-15", "35", "-21"], ["0", "-3/4", "7/4", "0"]),
    (26, ["1", "-50/11", "325/11", "-26"], ["0", "-2/11", "13/11", "0"]),
    (35, ["1", "-85", "119", "-35"], ["0", "-5/2", "7/2", "0"]),
    (39, ["1", "-57/5", "741/15", "-39"], ["0", "-3/10", "13/10", "0"]),
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f6 = solve_F(6, 4).map_err(|e| e.to_string())?;
    let want: Vec<Rational> = [1, -28, 63, -36].iter().map(|&c| rat(c, 40)).collect();
    ensure(f6.values() == want, || format!("solve_F(6,4) = {:?}", f6.values()))?;
    for (level, combo, q) in F_GOLDENS {
        let f = solve_F(level, 4).map_err(|e| e.to_string())?;
        ensure(f.values() == rs(&combo), || format!("F_{level} combination {:?}", f.values()))?;
        let s = combo_to_series(&f, 4).map_err(|e| e.to_string())?;
        let mut expected = vec![Rational::new()];
        expected.extend(rs(&q));
        ensure(s.coeffs() == expected.as_slice(), || format!("F_{level} expansion {s}"))?;
    }
    for (level, e0, e1) in E_GOLDENS {
        let b = solve_e_basis(level).map_err(|e| e.to_string())?;
        ensure(b.e0.values() == rs(&e0), || format!("E0 at level {level}: {:?}", b.e0.values()))?;
        ensure(b.e1.values() == rs(&e1), || format!("E1 at level {level}: {:?}", b.e1.values()))?;
    }
    within_budget(start, Duration::from_secs(1), "solvers")?;
    Ok(format!("F_6 and 7 F_N rows, 8 E-bases exact ({:.0?})", start.elapsed()))
}

const T_GOLDENS: [(u64, [i64; 6]); 7] = [
    (10, [1, -6, 15, -26, 51, -96]),
    (14, [1, -4, 6, -8, 17, -28]),
    (15, [1, -3, 0, 8, -9, 3]),
    (21, [1, -2, -1, 4, -3, 0]),
    (26, [1, -2, 1, -2, 4, -4]),
    (35, [1, -1, -1, 0, 0, 2]),
    (39, [1, -1, -1, 1, -1, 0]),
];

fn integer_series(s: &QSeries) -> Vec<i128> {
    s.coeffs()
        .iter()
        .map(|c| {
            assert!(c.is_integer());
            c.numer().to_i128().unwrap()
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for (level, leading) in T_GOLDENS {
        let entry = hauptmodul(level).map_err(|e| e.to_string())?;
        let t = integer_series(&entry.series(7).map_err(|e| e.to_string())?);
        let mut want = vec![0i128];
        want.extend(leading.iter().map(|&c| c as i128));
        ensure(t == want, || format!("t_{level} = {t:?}"))?;
    }
    for level in CATALOG_LEVELS {
        let entry = hauptmodul(level).map_err(|e| e.to_string())?;
        let t = integer_series(&entry.series(12).map_err(|e| e.to_string())?);
        let oracle = eta_product_oracle(&entry.eta_quotient.factors, 12);
        ensure(t == oracle, || format!("t_{level} disagrees with the product oracle"))?;
    }
    let t6 = hauptmodul(6).unwrap().series(7).unwrap();
    let prod = integer_series(&beukers_form(7).mul(&t6).map_err(|e| e.to_string())?);
    ensure(prod == [0, 1, -7, 19, -23, 6, 11], || format!("E_b t_6 = {prod:?}"))?;
    let oracle = eta_product_oracle(&[(1, 7), (2, -5), (3, -5), (6, 7)], 7);
    ensure(prod == oracle, || "E_b t_6 disagrees with the product oracle".into())?;
    within_budget(start, Duration::from_secs(1), "eta quotients")?;
    Ok(format!("7 Hauptmodul rows, product oracle on 8 levels, E_b t_6 exact ({:.0?})", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let order = 50;
    let eb = beukers_form(order);
    let t6 = hauptmodul(6).unwrap().series(order).unwrap();
    let basis = solve_e_basis(6).unwrap();
    let e0 = combo_to_series(&basis.e0, order).unwrap();
    let e1 = combo_to_series(&basis.e1, order).unwrap();
    let minus_e0_24 = e0.scale(&rat(-1, 24));
    ensure(eb.mul(&t6).unwrap() == minus_e0_24, || "E_b t_6 != -E0/24".into())?;
    let one_minus_5t = QSeries::one(Var::Q, order).sub(&t6.scale(&rat(5, 1))).unwrap();
    ensure(eb.mul(&one_minus_5t).unwrap() == e1, || "E_b (1 - 5 t_6) != E1".into())?;
    let lhs = minus_e0_24.mul(&e1.invert().unwrap()).unwrap();
    let rhs = t6.mul(&one_minus_5t.invert().unwrap()).unwrap();
    ensure(lhs == rhs, || "Mobius identity fails".into())?;
    within_budget(start, Duration::from_secs(5), "identities")?;
    Ok(format!("three identities exact to order {order} ({:.0?})", start.elapsed()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let pipeline = LevelPipeline::new(6, 102).map_err(|e| e.to_string())?;
    let rows = pipeline.rows(&FamilyParam::beukers(Rational::new())).map_err(|e| e.to_string())?;
    let b = column(&rows, |r| &r.b);
    let a = column(&rows, |r| &r.a);
    ensure(b[..5] == rs(&["1", "5", "73", "1445", "33001"]), || format!("b = {:?}", &b[..5]))?;
    for n in 1..=100 {
        ensure(apery_residual(&b, n).unwrap() == 0, || format!("b recurrence at n = {n}"))?;
        ensure(apery_residual(&a, n).unwrap() == 0, || format!("a recurrence at n = {n}"))?;
    }
    for n in 0..=30u32 {
        ensure(b[n as usize] == apery_b(n), || format!("b_{n} differs from the binomial sum"))?;
        ensure(a[n as usize] == apery_a(n), || format!("a_{n} differs from the binomial sum"))?;
    }
    ensure(rows[2].ratio_reduced == Some(r("351/292")), || "a_2/b_2".into())?;
    ensure(rows[5].ratio_reduced == Some(r("35441662103/29484180000")), || "a_5/b_5".into())?;
    within_budget(start, Duration::from_secs(120), "order-102 pipeline")?;
    Ok(format!("recurrence exact for n <= 100, binomial sums agree to n = 30 ({:.1?})", start.elapsed()))
}

const SMALL_TABLE: [(i64, [&str; 4]); 7] = [
    (-100, ["2049/1708", "253369/210780", "38600105/32111712", "107367025397/89319420000"]),
    (-5, ["77/64", "2921/2430", "991495/824832", "589608911/490500000"]),
    (-2, ["101/84", "56213/46764", "3474733/2890656", "1206869939/1004004000"]),
    (1, ["125/104", "32845/27324", "3974981/3306816", "6144958163/5112036000"]),
    (2, ["399/332", "68849/57276", "12425191/10336608", "38297835853/31860252000"]),
    (5, ["471/392", "39163/32580", "13925935/11585088", "21291048239/17712180000"]),
    (100, ["917/764", "378431/314820", "20483165/17040096", "59416783201/49429260000"]),
];

fn criterion_5() -> Outcome {
    let pipeline = LevelPipeline::new(6, 101).map_err(|e| e.to_string())?;
    let base = pipeline.rows(&FamilyParam::beukers(Rational::new())).unwrap();
    for (alpha, cells) in SMALL_TABLE {
        let alpha = rat(alpha, 1);
        let rows = pipeline.rows(&FamilyParam::beukers(alpha.clone())).unwrap();
        for (i, cell) in cells.iter().enumerate() {
            let n = i + 2;
            ensure(rows[n].ratio_reduced == Some(r(cell)), || {
                format!("alpha {alpha}, n {n}: {:?}", rows[n].ratio_reduced)
            })?;
        }
        for n in 1..=100 {
            let a = base[n].a.clone() + Rational::from(&alpha * &base[n - 1].a);
            let b = base[n].b.clone() + Rational::from(&alpha * &base[n - 1].b);
            ensure(rows[n].a == a && rows[n].b == b, || format!("shift identity, alpha {alpha}, n {n}"))?;
        }
    }
    Ok("28 table entries exact; shift identity for n <= 100".into())
}

fn criterion_6() -> Outcome {
    let pipeline = LevelPipeline::new(6, 54).map_err(|e| e.to_string())?;
    let b = column(&pipeline.rows(&FamilyParam::beukers(Rational::new())).unwrap(), |r| &r.b);
    for alpha in [rat(1, 1), rat(-2, 1), rat(5, 1), rat(100, 1), rat(1, 2)] {
        let c: Vec<Rational> = (0..b.len())
            .map(|n| if n == 0 { b[0].clone() } else { b[n].clone() + alpha.clone() * &b[n - 1] })
            .collect();
        for n in 1..=50 {
            let res = shifted_residual(&alpha, &c, n).unwrap();
            ensure(res == 0, || format!("alpha {alpha}, n {n}: residual {res}"))?;
        }
        let (p, q, rr) = shifted_polys(&alpha).unwrap();
        let k = alpha.clone() * (alpha.clone() * &alpha + Rational::from(&alpha * 34u32) + 1u32);
        let q_lead = Rational::from(&k * -34i32);
        ensure(p.degree() == Some(6) && p.leading() == k, || format!("P leading {}", p.leading()))?;
        ensure(q.degree() == Some(6) && q.leading() == q_lead, || format!("Q leading {}", q.leading()))?;
        ensure(rr.degree() == Some(6) && rr.leading() == k, || format!("R leading {}", rr.leading()))?;
    }
    Ok("residual 0 for n <= 50 at five alphas; leading coefficients symbolic match".into())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let order = 200;
    let pipeline = LevelPipeline::new(6, order).map_err(|e| e.to_string())?;
    let b = column(&pipeline.rows(&FamilyParam::beukers(Rational::new())).unwrap(), |r| &r.b);
    let b = QSeries::from_coeffs(Var::T, b);
    let window = apply_operator(&picard_fuchs(), &b).unwrap();
    ensure(window.is_zero() && window.order() == order - 2, || "picard-fuchs residual".into())?;
    for alpha in [rat(1, 1), rat(-2, 1), rat(5, 1)] {
        let mut w = vec![Rational::new(); order];
        w[0] = rat(1, 1);
        w[1] = alpha.clone();
        let c = QSeries::from_coeffs(Var::T, w).mul(&b).unwrap();
        let res = apply_operator(&transform_operator(&alpha), &c).unwrap();
        ensure(res.is_zero(), || format!("transformed operator, alpha {alpha}"))?;
    }
    within_budget(start, Duration::from_secs(300), "operators at order 200")?;
    Ok(format!("both operators vanish on the window ({:.1?})", start.elapsed()))
}

fn criterion_8() -> Outcome {
    let pipeline = LevelPipeline::new(6, 61).map_err(|e| e.to_string())?;
    let rows = pipeline.rows(&FamilyParam::beukers(Rational::new())).unwrap();
    let rep = integrality_report(&rows, &Rational::new());
    ensure(rep.passed && rep.rows_checked == 61, || format!("{rep:?}"))?;
    let half = rat(1, 2);
    let rows = pipeline.rows(&FamilyParam::beukers(half.clone())).unwrap();
    let rep = integrality_report(&rows, &half);
    ensure(rep.passed && rep.s == "2", || format!("{rep:?}"))?;
    Ok("n <= 60 integral; alpha = 1/2 integral with s = 2".into())
}

const LARGE_TABLE: [(i64, [i64; 5], [usize; 5]); 4] = [
    (0, [-291, -294, -297, -300, -303], [257, 258, 266, 265, 269]),
    (-5, [-289, -292, -295, -298, -301], [255, 253, 261, 262, 266]),
    (1, [-289, -292, -295, -298, -302], [256, 257, 264, 267, 266]),
    (100, [-288, -291, -294, -297, -300], [258, 257, 266, 266, 267]),
];

fn criterion_9() -> Outcome {
    let pipeline = LevelPipeline::new(6, 100).map_err(|e| e.to_string())?;
    let mut worst = (0i64, 0i64);
    for (alpha, rexp, digits) in LARGE_TABLE {
        let rows = pipeline.rows(&FamilyParam::beukers(rat(alpha, 1))).unwrap();
        let m = error_metrics(&rows[95..=99], 400);
        for (i, row) in m.iter().enumerate() {
            let dr = (row.err_exponent - rexp[i]).abs();
            let dd = (row.den_digits as i64 - digits[i] as i64).abs();
            worst = (worst.0.max(dr), worst.1.max(dd));
            ensure(dr <= 1 && dd <= 2, || {
                format!("alpha {alpha}, n {}: R 10^{} vs 10^{}, D {} vs {}", row.n, row.err_exponent, rexp[i], row.den_digits, digits[i])
            })?;
        }
    }
    Ok(format!("20 cells; worst deviation {} in R, {} in D", worst.0, worst.1))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let pipeline = LevelPipeline::new(6, 210).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    // (row, family member, printed error as (mantissa, exponent), den, Q)
    let cases = [
        ("alpha 0", FamilyParam::affine(Rational::new()), (3.04, -607), 561.0, 1.081),
        ("alpha 1", FamilyParam::beukers(rat(1, 1)), (5.21, -608), 564.3, 1.076),
    ];
    for (name, param, (_, exp), den, q) in cases {
        let rows = pipeline.rows(&param).unwrap();
        let m = error_metrics(&rows[199..=199], 700).pop().unwrap();
        // One decade either side of the printed error.
        let (lo, hi) = ((exp - 1) as f64, (exp + 1) as f64);
        let err_ok = m.err_log10 >= lo && m.err_log10 <= hi;
        let den_ok = (m.den_log10 - den).abs() <= 0.5;
        let q_val = m.quality.unwrap_or(f64::NAN);
        let q_ok = (q_val - q).abs() <= 0.005;
        lines.push(format!("{name}: err {} den {:.2} Q {:.4}", m.err, m.den_log10, q_val));
        if !err_ok {
            failures.push(format!("{name} err {} outside [1e{lo}, 1e{hi}]", m.err));
        }
        if !den_ok {
            failures.push(format!("{name} den_log10 {:.2} vs {den} +- 0.5", m.den_log10));
        }
        if !q_ok {
            failures.push(format!("{name} Q {q_val:.4} vs {q} +- 0.005"));
        }
    }
    if let Err(e) = within_budget(start, Duration::from_secs(600), "n = 199 metrics") {
        failures.push(e);
    }
    let table = level_rows(&Cache::disabled(), 700).map_err(|e| e.to_string())?;
    for level in [8u64, 12, 18, 20, 50] {
        let ok = table
            .iter()
            .filter(|row| row.level == level)
            .all(|row| row.status == NOT_REPRODUCIBLE && row.metrics.is_none());
        if !ok {
            failures.push(format!("level {level} rows are not marked \"{NOT_REPRODUCIBLE}\""));
        }
    }
    let summary = format!("{} ({:.1?})", lines.join("; "), start.elapsed());
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

/// Least-squares slope of `log10 |a_n - zeta(3) b_n|` for `n` in `range`.
fn log_slope(rows: &[ApproxRow], range: std::ops::RangeInclusive<usize>, zeta: &Float) -> f64 {
    let pts: Vec<(f64, f64)> = range
        .map(|n| {
            let form = Float::with_val(zeta.prec(), &rows[n].a) - Float::with_val(zeta.prec(), &rows[n].b) * zeta;
            (n as f64, log10_abs(&form))
        })
        .filter(|(_, y)| y.is_finite())
        .collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}

/// Radius above which a level counts as giving exponential decay.
const DECAY_RADIUS: f64 = 1.05;

fn criterion_11() -> Outcome {
    let levels = [10u64, 14, 15, 21, 26, 35, 39];
    let zeta = zeta3(200);
    let results = levels
        .par_iter()
        .map(|&level| -> Result<(u64, f64, Vec<f64>), String> {
            let branch = branch_report_from(&LevelPipeline::new(level, 200).map_err(|e| e.to_string())?, 30)
                .map_err(|e| e.to_string())?;
            let pipeline = LevelPipeline::new(level, 61).map_err(|e| e.to_string())?;
            let mut slopes = Vec::new();
            for alpha in [0, 1] {
                let rows = pipeline.rows(&FamilyParam::affine(rat(alpha, 1))).map_err(|e| e.to_string())?;
                ensure(rows.len() == 61, || format!("level {level}: {} rows", rows.len()))?;
                ensure(rows[5].ratio_reduced.is_some(), || format!("level {level}, alpha {alpha}: b_5 = 0"))?;
                slopes.push(log_slope(&rows, 30..=60, &zeta));
            }
            Ok((level, branch.branch_estimate, slopes))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let mut flagged = Vec::new();
    let mut notes = Vec::new();
    for (level, radius, slopes) in &results {
        let decays = *radius > DECAY_RADIUS;
        if !decays {
            flagged.push(*level);
        }
        for s in slopes {
            // A radius R predicts slope -log10 R; its sign must agree.
            let consistent = if decays { *s < 0.0 } else { *s > -DECAY_RADIUS.log10() };
            ensure(consistent, || format!("level {level}: radius {radius:.4} but slope {s:.4}"))?;
        }
        notes.push(format!("{level}: R {radius:.3} slope {:.3}", slopes[0]));
    }
    for level in [21u64, 26, 35, 39] {
        ensure(flagged.contains(&level), || format!("level {level} not flagged; {}", notes.join(", ")))?;
    }
    Ok(format!("non-decaying {flagged:?}; {}", notes.join(", ")))
}

const FRICKE_VALUES: [(u64, f64); 7] = [
    (10, 0.0557),
    (14, 0.0795),
    (15, 0.0901),
    (21, 0.1224),
    (26, 0.1385),
    (35, 0.1878),
    (39, 0.1958),
];

fn criterion_12() -> Outcome {
    let mut failures = Vec::new();
    let t6 = fricke_value(6, 50).map_err(|e| e.to_string())?;
    let diff = Float::with_val(t6.prec(), &t6 - &sqrt2_minus_1_pow4(60)).abs();
    if log10_abs(&diff) > -40.0 {
        failures.push(format!("t_6(i/sqrt 6) off by {diff}"));
    }
    for (level, want) in FRICKE_VALUES {
        let v = fricke_value(level, 20).map_err(|e| e.to_string())?.to_f64();
        if (v - want).abs() > 5e-4 {
            failures.push(format!("t_{level}(i/sqrt {level}) = {v:.5} vs {want}"));
        }
    }
    let reports = CATALOG_LEVELS
        .par_iter()
        .map(|&l| branch_report_from(&LevelPipeline::new(l, 200)?, 30))
        .collect::<apery::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let radius = |l: u64| reports.iter().find(|r| r.level == l).unwrap().branch_estimate;
    for (level, want, tol) in [(6u64, 33.9706, 0.02), (15, 1.6180, 0.05), (35, 0.6180, 0.05)] {
        let got = radius(level);
        if ((got - want) / want).abs() > tol {
            failures.push(format!("level {level} radius {got:.4} vs {want} within {}%", tol * 100.0));
        }
    }
    // Reported "approximately 1" without digits: flagged, never failed.
    let flags: Vec<String> = [10u64, 14]
        .iter()
        .filter(|&&l| (radius(l) - 1.0).abs() > 0.05)
        .map(|&l| format!("flag: R_{l} = {:.4} outside 1.00 +- 0.05", radius(l)))
        .collect();
    let product = fricke_value(6, 20).unwrap().to_f64() * radius(6);
    if (product - 1.0).abs() > 0.02 {
        failures.push(format!("t_6(i/sqrt 6) * R_6 = {product:.4}"));
    }
    let obstruction = obstruction_report(&reports);
    if obstruction.passing != [6] {
        failures.push(format!("levels beating e^3: {:?}", obstruction.passing));
    }
    let mut summary = format!(
        "R_6 {:.4}, R_10 {:.4}, R_14 {:.4}, R_15 {:.4}, R_35 {:.4}; passing e^3: {:?}",
        radius(6),
        radius(10),
        radius(14),
        radius(15),
        radius(35),
        obstruction.passing
    );
    for f in flags {
        summary.push_str(&format!("; {f}"));
    }
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn criterion_13() -> Outcome {
    let digits = 50;
    let mut notes = Vec::new();
    for level in [6u64, 10] {
        let samples = default_samples(level, digits);
        let rep = hecke_check(level, &samples, digits).map_err(|e| e.to_string())?;
        ensure(rep.residuals.len() == 3, || "three samples".into())?;
        ensure(rep.max_residual_log10 < -30.0, || format!("level {level}: residual {}", rep.max_residual))?;
        let low = hecke_check_with_order(level, &samples, digits, 12).map_err(|e| e.to_string())?;
        let high = hecke_check_with_order(level, &samples, digits, 24).map_err(|e| e.to_string())?;
        ensure(high.max_residual_log10 < low.max_residual_log10, || {
            format!("level {level}: residual {} at order 24 vs {} at 12", high.max_residual, low.max_residual)
        })?;
        notes.push(format!("N={level}: {} (order 12: {}, 24: {})", rep.max_residual, low.max_residual, high.max_residual));
    }
    Ok(notes.join("; "))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn some_series(order: usize) -> impl Strategy<Value = QSeries> {
    prop::collection::vec(small_rational(), order).prop_map(|c| QSeries::from_coeffs(Var::Q, c))
}

fn criterion_14() -> Outcome {
    let order = 10;
    let mut runner = TestRunner::new(Config {
        cases: 64,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..Config::default()
    });
    runner
        .run(&(some_series(order), some_series(order), some_series(order)), |(a, b, c)| {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a.clone());
            Ok(())
        })
        .map_err(|e| format!("ring axioms: {e}"))?;
    runner
        .run(&(some_series(order), prop_oneof![Just(1i64), Just(-3)]), |(s, lead)| {
            let mut coeffs = s.into_coeffs();
            coeffs[0] = Rational::new();
            coeffs[1] = rat(lead, 1);
            let phi = QSeries::from_coeffs(Var::Q, coeffs);
            let x = QSeries::monomial(Var::Q, 1, rat(1, 1), order);
            let inv = phi.revert().unwrap();
            prop_assert_eq!(phi.compose(&inv).unwrap(), x.clone());
            prop_assert_eq!(inv.compose(&phi).unwrap(), x);
            Ok(())
        })
        .map_err(|e| format!("reversion: {e}"))?;

    for level in CATALOG_LEVELS {
        let d = level_data(level).unwrap().divisors[1] as i64;
        let n = level as i64;
        let e1_d = rat(d * d, d * d - n);
        let e0_d = rat((n - 1) * d * d, d * d - n);
        let partner = |b: &Rational| -Rational::from((n, d * d)) * b.clone();
        let e1 = vec![rat(0, 1), e1_d.clone(), partner(&e1_d), rat(0, 1)];
        let e0 = vec![rat(1, 1), e0_d.clone(), partner(&e0_d), rat(-n, 1)];
        let basis = solve_e_basis(level).unwrap();
        ensure(basis.e1.values() == e1 && basis.e0.values() == e0, || format!("closed form at level {level}"))?;
        ensure(check_weight2_modularity(&basis.e0).unwrap().modular, || format!("E0 modular at {level}"))?;
    }

    for args in [
        &["apery", "--format", "md", "table", "1"][..],
        &["apery", "approx", "--level", "15", "--alpha", "0,1/3", "--order", "20"][..],
        &["apery", "branch", "--levels", "6,10", "--order", "64", "--digits", "30"][..],
    ] {
        let (first, second) = (apery_cli::invoke(args), apery_cli::invoke(args));
        ensure(first.code == 0 && !first.stdout.is_empty(), || format!("{args:?} failed: {}", first.stderr))?;
        ensure(first == second, || format!("{args:?} output differs between runs"))?;
    }
    Ok("ring axioms and reversion (64 cases each), closed-form bases on 8 levels, 3 CLI runs byte-identical".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 14] = [
        (1, "exact solver goldens", criterion_1),
        (2, "eta-quotient goldens", criterion_2),
        (3, "level-6 identities", criterion_3),
        (4, "Apery recovery", criterion_4),
        (5, "alpha family", criterion_5),
        (6, "shifted recurrence", criterion_6),
        (7, "operator transform", criterion_7),
        (8, "integrality", criterion_8),
        (9, "large-n table", criterion_9),
        (10, "n = 199 level-6 rows", criterion_10),
        (11, "other catalog levels", criterion_11),
        (12, "branch values", criterion_12),
        (13, "functional equation", criterion_13),
        (14, "property suites and determinism", criterion_14),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let line = match &result {
            Ok(detail) => format!("criterion {id:>2} PASS {name} [{:.1?}]: {detail}", start.elapsed()),
            Err(detail) => format!("criterion {id:>2} FAIL {name} [{:.1?}]: {detail}", start.elapsed()),
        };
        // Written to the raw handle so the lines survive output capture.
        writeln!(err, "{line}").unwrap();
        if result.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
