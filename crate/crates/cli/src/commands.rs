use std::fs;
use std::path::Path;

use apery::arith::format_rational;
use apery::families::{check_weight2_modularity, combo_to_series, solve_F, solve_e_basis, EisensteinCombo, ModularityReport};
use apery::linform::{eichler, integrality_report, single_pipeline, ApproxRow, FamilyParam, Gauge, LevelPipeline};
use apery::modforms::{hauptmodul, UNSPECIFIED_LEVELS};
use apery::numerics::{
    bits_for, branch_report_from, default_samples, error_metrics, hecke_check, hecke_check_with_order,
    obstruction_report, BranchReport,
};
use apery::qseries::{QSeries, Var};
use apery::recurrences::{apery_residual, apply_operator, picard_fuchs, shifted_residual, transform_operator};
use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Value};

use crate::cache::{Cache, CACHE_VERSION};
use crate::config::{Command, FamilyArgs, RunConfig};
use crate::render::{Report, Section};
use crate::tables::{self, NOT_REPRODUCIBLE};
use crate::{CliError, Result};

/// A Hecke residual passes when it is this many digits below the working
/// precision.
pub const HECKE_MARGIN_DIGITS: u32 = 20;

/// What a command printed and, for checking commands, the first failure.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub rendered: String,
    pub failure: Option<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let cache = Cache::new(cfg.cache_dir.clone(), cfg.verify_cache);
    let (report, failure) = match &cfg.command {
        Command::FForm { level, order } => (f_form(*level, *order)?, None),
        Command::EFamily { level, family, order } => (e_family(*level, &family.params(*level)?, *order)?, None),
        Command::Haupt { level, order } => (haupt(*level, *order)?, None),
        Command::Approx { level, family, order } => {
            (approx(&cache, *level, &family.params(*level)?, *order)?, None)
        }
        Command::Verify { level, family, upto, digits } => verify(&cache, *level, family, *upto, *digits)?,
        Command::Branch { levels, digits, order } => (branch(&cache, levels, *order, *digits)?, None),
        Command::HeckeCheck { level, digits, order } => hecke(*level, *digits, *order)?,
        Command::Metrics { level, family, n, digits } => {
            (metrics(&cache, *level, &family.params(*level)?, n, *digits)?, None)
        }
        Command::Table { which, digits } => (tables::table_report(*which, &cache, *digits)?, None),
        Command::Export { level, family, order, digits, out } => {
            let param = family.params(*level)?.remove(0);
            (export(&cache, *level, &param, *order, *digits, out)?, None)
        }
    };
    Ok(Outcome {
        rendered: report.render(cfg.format),
        failure,
    })
}

fn series_json(s: &QSeries) -> Value {
    serde_json::to_value(s).expect("series serialize")
}

pub fn f_form(level: u64, order: usize) -> Result<Report> {
    let combo = solve_F(level, 4)?;
    let series = combo_to_series(&combo, order)?;
    let f = eichler(&series, 4)?;
    let mut report = Report::new(
        format!("F_{level}: weight-4 Eisenstein combination"),
        json!({
            "level": level,
            "weight": 4,
            "combo": combo,
            "value_at_infinity": format_rational(&combo.value_at_infinity()),
            "series": series_json(&series),
            "eichler": series_json(&f),
        }),
    );
    report.sections.push(combo_section(&combo, "coefficients of E_4(d tau)"));
    let mut s = Section::new(["n", "F_n", "f_n = F_n / n^3"]).caption("q-expansion");
    for n in 0..order {
        s.push([n.to_string(), format_rational(series.coeff(n)), format_rational(f.coeff(n))]);
    }
    report.sections.push(s);
    Ok(report)
}

fn combo_section(combo: &EisensteinCombo, caption: &str) -> Section {
    let mut s = Section::new(["d", "beta_d"]).caption(caption);
    for (d, b) in &combo.coeffs {
        s.push([d.to_string(), format_rational(b)]);
    }
    s
}

fn modularity_json(r: &ModularityReport) -> Value {
    json!({
        "sum_over_d": format_rational(&r.sum_over_d),
        "modular": r.modular,
        "fricke_symmetric": r.fricke_symmetric(),
        "pairing_residuals": r
            .pairing_residuals
            .iter()
            .map(|(d, v)| json!({ "d": d, "residual": format_rational(v) }))
            .collect::<Vec<_>>(),
    })
}

fn member_combo(level: u64, param: &FamilyParam) -> Result<(Rational, EisensteinCombo)> {
    let c = param.affine_alpha(level)?;
    let combo = solve_e_basis(level)?.member(&c);
    Ok((c, combo))
}

pub fn e_family(level: u64, params: &[FamilyParam], order: usize) -> Result<Report> {
    let basis = solve_e_basis(level)?;
    let e0_check = check_weight2_modularity(&basis.e0)?;
    let e1_check = check_weight2_modularity(&basis.e1)?;
    let mut members = Vec::new();
    let mut member_sections = Vec::new();
    for param in params {
        let (c, combo) = member_combo(level, param)?;
        let series = combo_to_series(&combo, order)?;
        members.push(json!({
            "alpha": format_rational(&param.alpha),
            "gauge": param.gauge,
            "e0_coefficient": format_rational(&c),
            "combo": combo,
            "series": series_json(&series),
        }));
        member_sections.push(combo_section(
            &combo,
            &format!("alpha = {} ({} gauge): E1 + ({}) E0", param.alpha, param.gauge, format_rational(&c)),
        ));
    }
    let mut report = Report::new(
        format!("Weight-2 family at level {level}"),
        json!({
            "level": level,
            "e0": basis.e0,
            "e1": basis.e1,
            "modularity": { "e0": modularity_json(&e0_check), "e1": modularity_json(&e1_check) },
            "members": members,
        }),
    );
    report.sections.push(combo_section(&basis.e0, "E0"));
    report.sections.push(combo_section(&basis.e1, "E1"));
    report.sections.extend(member_sections);
    Ok(report)
}

pub fn haupt(level: u64, order: usize) -> Result<Report> {
    if UNSPECIFIED_LEVELS.contains(&level) {
        let mut report = Report::new(
            format!("Hauptmodul t_{level}"),
            json!({ "level": level, "status": NOT_REPRODUCIBLE }),
        );
        report.notes.push(format!("level {level}: {NOT_REPRODUCIBLE}"));
        return Ok(report);
    }
    let entry = hauptmodul(level)?;
    entry.check_leading()?;
    let series = entry.series(order)?;
    let factors: Vec<Value> = entry
        .eta_quotient
        .factors
        .iter()
        .map(|(d, e)| json!({ "d": d, "exponent": e }))
        .collect();
    let mut report = Report::new(
        format!("Hauptmodul t_{level}"),
        json!({
            "level": level,
            "status": "ok",
            "eta_quotient": factors,
            "series": series_json(&series),
        }),
    );
    let mut eta = Section::new(["d", "exponent of eta(d tau)"]).caption("eta quotient");
    for (d, e) in &entry.eta_quotient.factors {
        eta.push([d.to_string(), e.to_string()]);
    }
    report.sections.push(eta);
    let mut s = Section::new(["n", "t_n"]).caption("q-expansion");
    for n in 0..order {
        s.push([n.to_string(), format_rational(series.coeff(n))]);
    }
    report.sections.push(s);
    Ok(report)
}

fn rows_section(param: &FamilyParam, rows: &[ApproxRow]) -> Section {
    let mut s = Section::new(["n", "a_n", "b_n", "a_n/b_n", "lcm(1..n)^3 a_n"])
        .caption(format!("alpha = {} ({} gauge)", param.alpha, param.gauge));
    for r in rows {
        s.push([
            r.n.to_string(),
            format_rational(&r.a),
            format_rational(&r.b),
            r.ratio_reduced.as_ref().map(format_rational).unwrap_or_else(|| "-".into()),
            format_rational(&r.scaled_a),
        ]);
    }
    s
}

fn family_rows(pipeline: &LevelPipeline, params: &[FamilyParam]) -> Result<Vec<Vec<ApproxRow>>> {
    params
        .par_iter()
        .map(|p| pipeline.rows(p).map_err(CliError::from))
        .collect()
}

pub fn approx(cache: &Cache, level: u64, params: &[FamilyParam], order: usize) -> Result<Report> {
    let pipeline = cache.pipeline(level, order)?;
    let all = family_rows(&pipeline, params)?;
    let mut families = Vec::new();
    let mut report = Report::new(format!("Approximants at level {level}"), Value::Null);
    for (param, rows) in params.iter().zip(&all) {
        families.push(json!({
            "alpha": format_rational(&param.alpha),
            "gauge": param.gauge,
            "e0_coefficient": format_rational(&param.affine_alpha(level)?),
            "rows": rows,
        }));
        report.sections.push(rows_section(param, rows));
    }
    report.json = json!({ "level": level, "order": order, "families": families });
    Ok(report)
}

#[derive(Debug, Clone)]
struct Check {
    name: String,
    detail: String,
    passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            detail: detail.into(),
            passed,
        }
    }
}

/// First index in `range` with a nonzero residual.
fn first_nonzero<F>(range: std::ops::RangeInclusive<usize>, residual: F) -> Result<Option<(usize, Rational)>>
where
    F: Fn(usize) -> apery::Result<Rational>,
{
    for n in range {
        let r = residual(n)?;
        if r != 0 {
            return Ok(Some((n, r)));
        }
    }
    Ok(None)
}

fn exact_check(name: String, upto: usize, hit: Option<(usize, Rational)>) -> Check {
    match hit {
        None => Check::new(name, true, format!("residual 0 for 1 <= n <= {upto}")),
        Some((n, r)) => Check::new(name, false, format!("residual {} at n = {n}", format_rational(&r))),
    }
}

/// The classical sequences `(a_n, b_n)` at level 6.
fn apery_columns(pipeline: &LevelPipeline) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let base = pipeline.rows(&FamilyParam::beukers(Rational::new()))?;
    Ok((
        base.iter().map(|r| r.a.clone()).collect(),
        base.iter().map(|r| r.b.clone()).collect(),
    ))
}

fn apery_checks(pipeline: &LevelPipeline, upto: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (a, b) = apery_columns(pipeline)?;
    checks.push(exact_check(
        "apery recurrence (b)".into(),
        upto,
        first_nonzero(1..=upto, |n| apery_residual(&b, n))?,
    ));
    checks.push(exact_check(
        "apery recurrence (a)".into(),
        upto,
        first_nonzero(1..=upto, |n| apery_residual(&a, n))?,
    ));

    let b_series = QSeries::from_coeffs(Var::T, b.clone());
    let window = apply_operator(&picard_fuchs(), &b_series)?;
    checks.push(Check::new(
        "picard-fuchs operator on B(t)",
        window.is_zero(),
        format!("window of {} coefficients", window.order()),
    ));
    Ok(checks)
}

/// Shift identity, shifted recurrence and transformed operator for one
/// nonzero `alpha` of the Beukers family.
fn shifted_checks(pipeline: &LevelPipeline, param: &FamilyParam, upto: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if param.gauge != Gauge::Beukers || param.alpha == 0 {
        return Ok(checks);
    }
    let (a, b) = apery_columns(pipeline)?;
    let b_series = QSeries::from_coeffs(Var::T, b.clone());
    let alpha = &param.alpha;
    let rows = pipeline.rows(param)?;
    let shift = (1..rows.len()).find(|&n| {
        rows[n].b != (&b[n] + Rational::from(alpha * &b[n - 1]))
            || rows[n].a != (&a[n] + Rational::from(alpha * &a[n - 1]))
    });
    checks.push(Check::new(
        format!("alpha shift identity (alpha = {alpha})"),
        shift.is_none(),
        match shift {
            None => format!("holds for n < {}", rows.len()),
            Some(n) => format!("fails at n = {n}"),
        },
    ));
    let c: Vec<Rational> = rows.iter().map(|r| r.b.clone()).collect();
    checks.push(exact_check(
        format!("shifted recurrence (alpha = {alpha})"),
        upto,
        first_nonzero(1..=upto, |n| shifted_residual(alpha, &c, n))?,
    ));
    let mut w = vec![Rational::new(); b.len()];
    w[0] = Rational::from(1);
    w[1] = alpha.clone();
    let shifted = QSeries::from_coeffs(Var::T, w).mul(&b_series)?;
    let window = apply_operator(&transform_operator(alpha), &shifted)?;
    checks.push(Check::new(
        format!("transformed operator on (1 + alpha t) B(t) (alpha = {alpha})"),
        window.is_zero(),
        format!("window of {} coefficients", window.order()),
    ));
    Ok(checks)
}

pub fn verify(
    cache: &Cache,
    level: u64,
    family: &FamilyArgs,
    upto: usize,
    digits: u32,
) -> Result<(Report, Option<String>)> {
    let params = family.params(level)?;
    let mut checks = Vec::new();

    let entry = hauptmodul(level)?;
    checks.push(match entry.check_leading() {
        Ok(()) => Check::new(format!("t_{level} leading coefficients"), true, "6 coefficients"),
        Err(e) => Check::new(format!("t_{level} leading coefficients"), false, e.to_string()),
    });
    let basis = solve_e_basis(level)?;
    for (name, combo) in [("E0", &basis.e0), ("E1", &basis.e1)] {
        let r = check_weight2_modularity(combo)?;
        checks.push(Check::new(
            format!("{name} modular and Fricke symmetric"),
            r.modular && r.fricke_symmetric(),
            format!("sum beta_d/d = {}", format_rational(&r.sum_over_d)),
        ));
    }

    let pipeline = cache.pipeline(level, upto + 3)?;
    if level == 6 {
        checks.extend(apery_checks(&pipeline, upto)?);
    }
    // The lcm(1..n)^3 denominator bound and the recurrences are level-6 facts.
    for param in params.iter().filter(|_| level == 6) {
        let rows = pipeline.rows(param)?;
        let report = integrality_report(&rows[..=upto], &param.alpha);
        checks.push(Check::new(
            format!("integrality (alpha = {}, s = {})", param.alpha, report.s),
            report.passed,
            match &report.first_violation {
                None => format!("{} rows", report.rows_checked),
                Some((n, why)) => format!("n = {n}: {why}"),
            },
        ));
        checks.extend(shifted_checks(&pipeline, param, upto)?);
    }

    for param in &params {
        let direct = single_pipeline(level, param, pipeline.order)?;
        checks.push(Check::new(
            format!("shared and direct pipelines agree (alpha = {}, {} gauge)", param.alpha, param.gauge),
            direct == pipeline.linear_form(param)?,
            format!("{} coefficients", pipeline.order),
        ));
    }

    let hecke = hecke_check(level, &default_samples(level, digits), digits)?;
    let limit = -f64::from(digits.saturating_sub(HECKE_MARGIN_DIGITS));
    checks.push(Check::new(
        "hecke functional equation",
        hecke.max_residual_log10 < limit,
        format!("max residual {} (limit 1e{limit})", hecke.max_residual),
    ));

    let failure = checks.iter().find(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail));
    let mut section = Section::new(["check", "result", "detail"]);
    for c in &checks {
        section.push([c.name.clone(), (if c.passed { "pass" } else { "FAIL" }).to_string(), c.detail.clone()]);
    }
    let mut report = Report::new(
        format!("Verification at level {level}"),
        json!({
            "level": level,
            "upto": upto,
            "digits": digits,
            "passed": failure.is_none(),
            "checks": checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect::<Vec<_>>(),
        }),
    );
    report.sections.push(section);
    Ok((report, failure))
}

pub fn branch_reports(cache: &Cache, levels: &[u64], order: usize, digits: u32) -> Result<Vec<BranchReport>> {
    levels
        .par_iter()
        .map(|&l| Ok(branch_report_from(&cache.pipeline(l, order)?, digits)?))
        .collect()
}

pub fn branch(cache: &Cache, levels: &[u64], order: usize, digits: u32) -> Result<Report> {
    let reports = branch_reports(cache, levels, order, digits)?;
    let obstruction = obstruction_report(&reports);
    let mut s = Section::new([
        "N",
        "t_N(i/sqrt N)",
        "branch radius",
        "fit",
        "sum b_n t^n radius",
        "> e^3",
        "< 1",
    ]);
    for r in &reports {
        s.push([
            r.level.to_string(),
            r.fricke_value.clone(),
            format!("{:.4}", r.branch_estimate),
            serde_json::to_value(r.product_fit.method)?.as_str().unwrap_or_default().to_string(),
            format!("{:.5}", r.b_series_radius),
            r.exceeds_e3.to_string(),
            r.below_one.to_string(),
        ]);
    }
    let mut report = Report::new(
        "Branch values and the e^3 obstruction",
        json!({ "order": order, "digits": digits, "reports": reports, "obstruction": obstruction }),
    );
    report.sections.push(s);
    report.notes.push(format!(
        "e^3 = {:.4}; levels beating it: {:?}; {digits} digits, series order {order}",
        obstruction.e3, obstruction.passing
    ));
    Ok(report)
}

pub fn hecke(level: u64, digits: u32, order: Option<usize>) -> Result<(Report, Option<String>)> {
    let samples = default_samples(level, digits);
    let r = match order {
        Some(o) => hecke_check_with_order(level, &samples, digits, o)?,
        None => hecke_check(level, &samples, digits)?,
    };
    let limit = -f64::from(digits.saturating_sub(HECKE_MARGIN_DIGITS));
    let passed = r.max_residual_log10 < limit;
    let mut s = Section::new(["sample", "tau", "residual"]);
    for (i, (tau, res)) in samples.iter().zip(&r.residuals).enumerate() {
        let (re, im) = (tau.real().to_f64(), tau.imag().to_f64());
        s.push([i.to_string(), format!("{re:.10} + {im:.10}i"), res.clone()]);
    }
    let mut report = Report::new(
        format!("Functional equation of f - zeta(3) at level {level}"),
        json!({ "report": r, "limit_log10": limit, "passed": passed }),
    );
    report.sections.push(s);
    report.notes.push(format!("{digits} digits, q-order {}", r.order));
    let failure = (!passed).then(|| format!("max residual {} above 1e{limit}", r.max_residual));
    Ok((report, failure))
}

pub fn metrics(cache: &Cache, level: u64, params: &[FamilyParam], ns: &[usize], digits: u32) -> Result<Report> {
    let order = ns.iter().max().copied().unwrap_or(0) + 1;
    let pipeline = cache.pipeline(level, order.max(2))?;
    let all = family_rows(&pipeline, params)?;
    let per_family: Vec<_> = all
        .par_iter()
        .map(|rows| {
            let picked: Vec<ApproxRow> = ns.iter().map(|&n| rows[n].clone()).collect();
            error_metrics(&picked, digits)
        })
        .collect();
    let mut s = Section::new(["alpha", "n", "error", "log10 den", "E_n", "Q_n", "digits used"]);
    let mut families = Vec::new();
    for (param, m) in params.iter().zip(&per_family) {
        for row in m {
            s.push([
                param.alpha.to_string(),
                row.n.to_string(),
                row.err.clone(),
                format!("{:.2}", row.den_log10),
                format!("{:.2}", -row.err_log10),
                row.quality.map(|q| format!("{q:.4}")).unwrap_or_else(|| "-".into()),
                row.digits_used.to_string(),
            ]);
        }
        families.push(json!({
            "alpha": format_rational(&param.alpha),
            "gauge": param.gauge,
            "e0_coefficient": format_rational(&param.affine_alpha(level)?),
            "rows": m,
        }));
    }
    let mut report = Report::new(
        format!("Error metrics at level {level}"),
        json!({ "level": level, "digits": digits, "families": families }),
    );
    report.sections.push(s);
    Ok(report)
}

pub const EXPORT_ARTIFACTS: [&str; 6] = ["f_form", "e_family", "haupt", "linform_t", "approx", "branch"];

pub fn export(
    cache: &Cache,
    level: u64,
    param: &FamilyParam,
    order: usize,
    digits: u32,
    out: &Path,
) -> Result<Report> {
    let pipeline = cache.pipeline(level, order)?;
    let lfs = pipeline.linear_form(param)?;
    let linform = json!({
        "level": level,
        "alpha": format_rational(&param.alpha),
        "gauge": param.gauge,
        "e0_coefficient": format_rational(&param.affine_alpha(level)?),
        "a": series_json(&lfs.a),
        "b": series_json(&lfs.b),
    });
    let docs = [
        f_form(level, order)?.json,
        e_family(level, std::slice::from_ref(param), order)?.json,
        haupt(level, order)?.json,
        linform,
        approx(cache, level, std::slice::from_ref(param), order)?.json,
        serde_json::to_value(branch_report_from(&pipeline, digits)?)?,
    ];
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut artifacts = Vec::new();
    let mut s = Section::new(["artifact", "file", "bytes"]);
    for (name, doc) in EXPORT_ARTIFACTS.iter().zip(&docs) {
        let file = format!("{name}.json");
        let mut text = serde_json::to_string_pretty(doc)?;
        text.push('\n');
        let path = out.join(&file);
        fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
        artifacts.push(json!({ "name": name, "file": file, "bytes": text.len() }));
        s.push([name.to_string(), file, text.len().to_string()]);
    }
    let manifest = json!({
        "tool": "apery-cli",
        "version": env!("CARGO_PKG_VERSION"),
        "cache_format": CACHE_VERSION,
        "inputs": {
            "level": level,
            "alpha": format_rational(&param.alpha),
            "gauge": param.gauge,
            "order": order,
        },
        "precision": { "digits": digits, "bits": bits_for(digits) },
        "artifacts": artifacts,
    });
    let path = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    let mut report = Report::new(format!("Export of level {level}"), manifest);
    report.sections.push(s);
    Ok(report)
}
