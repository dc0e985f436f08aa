use std::f64::consts::PI;

use christoffel::geometry::gallery::{lens_area, NAMES};
use christoffel::needles::NeedleSpec;
use christoffel::rho::FormulaMode;
use christoffel::verification::{
    affine_invariance_check, ball_behavior_check, corner_levels, grain_lower_check, norm_control_check,
    ratio_study, videnskii_check, GridSpec, RatioReport, StudyOptions,
};
use christoffel::{build_evaluator, rho_star, Domain, Membership, Point2};
use rand::{RngExt, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use super::{degrees, num};
use crate::config::{write_file, DomainSource, RunConfig};
use crate::error::CliError;

pub const SUITES: [&str; 8] = ["core", "ball", "cornered", "grain", "needles", "norm", "affine", "videnskii"];

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Value) -> Check {
        Check { name: name.into(), passed, detail }
    }
}

/// Exact area for gallery entries that have one.
fn known_area(source: &DomainSource) -> Option<f64> {
    let DomainSource::Gallery(g) = source else { return None };
    match g.as_str() {
        "disc" => Some(PI),
        "square" => Some(4.0),
        "lens" => Some(lens_area(1.0)),
        _ => {
            let h = g.strip_prefix("lens(").and_then(|s| s.strip_suffix(')')).or_else(|| g.strip_prefix("lens:"))?;
            h.parse().ok().map(lens_area)
        }
    }
}

fn full_mode_allowed(domain: &Domain) -> bool {
    domain.corner_angles().iter().all(|a| *a > 0.0 && *a < PI)
}

fn study(config: &RunConfig, domain: &Domain, label: &str, ns: &[usize], grids: &[GridSpec]) -> Result<RatioReport, CliError> {
    let options = StudyOptions {
        evaluator: config.evaluator_options(),
        mode: if full_mode_allowed(domain) { FormulaMode::Full } else { FormulaMode::AwayFromCorners },
        certify: true,
        ..Default::default()
    };
    Ok(ratio_study(domain, label, ns, grids, &options)?)
}

fn write_ratio_csv(config: &RunConfig, report: &RatioReport) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["domain", "n", "x", "y", "lambda", "formula", "ratio", "argmin", "lower", "upper", "witness_error"])?;
    for r in &report.records {
        wtr.write_record([
            report.domain.clone(),
            r.n.to_string(),
            r.x.x.to_string(),
            r.x.y.to_string(),
            r.lambda.to_string(),
            r.formula.to_string(),
            r.ratio.to_string(),
            r.argmin.clone(),
            num(r.lower),
            num(r.upper),
            num(r.witness_error),
        ])?;
    }
    let body = String::from_utf8(wtr.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8");
    let safe: String = report.domain.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    let path = config.output_path(&format!("ratio_{safe}.csv"))?;
    write_file(&path, &(config.csv_preamble() + &body))
}

fn ratio_checks(report: &RatioReport, spread_limit: f64, coverage: bool) -> Vec<Check> {
    let d = &report.domain;
    let summaries = serde_json::to_value(&report.summaries).expect("summaries serialize");
    let mut out = vec![
        Check::new(
            format!("{d}: spread"),
            report.failures.is_empty() && report.overall_spread <= spread_limit,
            json!({ "overall_spread": report.overall_spread, "limit": spread_limit, "summaries": summaries, "failures": report.failures }),
        ),
        Check::new(
            format!("{d}: certified sandwich"),
            report.sandwich_holds(1e-8) && report.records.iter().all(|r| r.witness_error.is_some_and(|e| e <= 1e-10)),
            json!({ "points": report.records.len(), "slack": 1e-8 }),
        ),
    ];
    if coverage {
        out.push(Check::new(format!("{d}: first-degree coverage"), report.covered_by_first(1.5), json!({ "slack": 1.5 })));
    }
    out
}

fn core(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let ns = degrees(config, &[4, 8]);
    let mut grids = config.grid_specs();
    if grids.is_empty() {
        grids.push(GridSpec::Cartesian { nx: 11, ny: 11 });
    }
    let mut checks = Vec::new();
    for source in config.domains(&["disc", "square", "lens(1.0)"]) {
        let domain = source.load()?;
        let label = source.label();
        let ev = build_evaluator(&domain, 0, &config.evaluator_options())?;
        let lam0 = ev.lambda(domain.bbox().center());
        let (area, tol) = match known_area(&source) {
            Some(a) => (a, 1e-9),
            None => (domain.polygon_area(), 1e-6),
        };
        let err = (lam0 - area).abs() / area;
        checks.push(Check::new(format!("{label}: degree zero"), err <= tol, json!({ "lambda0": lam0, "area": area, "rel_error": err, "tol": tol })));

        let n_max = *ns.iter().max().expect("at least one degree");
        let affine = affine_invariance_check(&domain, n_max, 5, 5, config.seed, &config.evaluator_options())?;
        checks.push(Check::new(
            format!("{label}: affine invariance"),
            affine.max_rel_error <= 1e-6,
            json!({ "n": n_max, "max_rel_error": affine.max_rel_error }),
        ));

        let report = study(config, &domain, &label, &ns, &grids)?;
        write_ratio_csv(config, &report)?;
        checks.extend(ratio_checks(&report, 50.0, false));
    }
    Ok(checks)
}

fn cornered(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let ns = degrees(config, &[4, 8, 16]);
    let mut checks = Vec::new();
    for source in config.domains(&["square", "lens(1.0)"]) {
        let domain = source.load()?;
        let mut grids = config.grid_specs();
        if grids.is_empty() {
            grids.push(GridSpec::Cartesian { nx: 21, ny: 21 });
            let levels = corner_levels(*ns.iter().max().expect("at least one degree"));
            grids.extend((0..domain.corners().len()).map(|j| GridSpec::Corner { corner: j, levels }));
        }
        let report = study(config, &domain, &source.label(), &ns, &grids)?;
        write_ratio_csv(config, &report)?;
        checks.extend(ratio_checks(&report, 50.0, true));
    }
    Ok(checks)
}

fn ball(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let r = ball_behavior_check(&degrees(config, &[4, 8, 16, 24]), &[], &config.evaluator_options())?;
    Ok(vec![
        Check::new("ball: spread", r.overall_spread <= 25.0, json!({ "overall_spread": r.overall_spread, "limit": 25.0 })),
        Check::new(
            "ball: per-degree constants",
            r.constant_variation <= 2.0,
            json!({ "constant_variation": r.constant_variation, "max_ratio_variation": r.max_ratio_variation, "summaries": r.summaries }),
        ),
    ])
}

fn grain(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let h: f64 = config.extra("h").and_then(|h| h.parse().ok()).unwrap_or(1.0);
    let r = grain_lower_check(h, &degrees(config, &[4, 8, 16]), 21, &config.evaluator_options())?;
    Ok(vec![Check::new("grain: lower bound coverage", r.covered, json!({ "h": h, "slack": r.slack, "summaries": r.summaries }))])
}

fn needles(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let ns = degrees(config, &[8, 16, 32]);
    let (first, rest) = ns.split_first().expect("at least one degree");
    let families: [(&str, fn(usize) -> NeedleSpec); 3] = [
        ("univariate t=0.25", |n| NeedleSpec::Univariate { n, t: 0.25 }),
        ("univariate t=1", |n| NeedleSpec::Univariate { n, t: 1.0 }),
        ("radial", |n| NeedleSpec::Radial { n, r1: 1.0, r2: 2.0, lam: 1.25 }),
    ];
    let mut checks = Vec::new();
    for (name, spec) in families {
        let base = spec(*first).report(None)?;
        let mut fits = vec![base.c_fit];
        let mut ok = true;
        for &n in rest {
            let r = spec(n).report(Some(1.5 * base.c_fit))?;
            ok &= r.max_violation == 0.0;
            fits.push(r.c_fit);
        }
        checks.push(Check::new(format!("needle {name}: envelope"), ok, json!({ "degrees": ns, "c_fit": fits })));
    }
    let scaled = |n: usize| -> Result<f64, CliError> {
        let norm = NeedleSpec::Narrowed { n, r1: 1.0, r2: 2.0, lam: 1.25 }.l2_norm()?.unwrap_or(f64::NAN);
        Ok(norm / (rho_star(n, 0.25)? / n as f64))
    };
    let values = ns.iter().map(|&n| scaled(n)).collect::<Result<Vec<_>, _>>()?;
    let ok = values[1..].iter().all(|v| *v <= 1.5 * values[0]);
    checks.push(Check::new("needle narrowed: L2 scaling", ok, json!({ "degrees": ns, "scaled_norm": values })));
    Ok(checks)
}

fn norm(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let n = degrees(config, &[8])[0];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    for source in config.domains(&["disc", "square", "lens(1.0)"]) {
        let domain = source.load()?;
        let bb = domain.bbox();
        let mut xs = Vec::new();
        while xs.len() < 10 {
            let x = Point2::new(rng.random_range(bb.min.x..bb.max.x), rng.random_range(bb.min.y..bb.max.y));
            if domain.contains(x) == Membership::Inside {
                xs.push(x);
            }
        }
        let r = norm_control_check(&domain, n, &xs, &[0.25, 0.5], 80, &config.evaluator_options())?;
        checks.push(Check::new(format!("{}: norm control", source.label()), r.passed, json!({ "n": n, "records": r.records })));
    }
    Ok(checks)
}

fn affine(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for source in config.domains(&["disc", "square", "lens(1.0)"]) {
        let domain = source.load()?;
        for n in degrees(config, &[4, 10]) {
            let r = affine_invariance_check(&domain, n, 20, 5, config.seed, &config.evaluator_options())?;
            checks.push(Check::new(
                format!("{}: affine invariance n={n}", source.label()),
                r.max_rel_error <= 1e-6,
                json!({ "max_rel_error": r.max_rel_error, "trials": r.trials }),
            ));
        }
    }
    Ok(checks)
}

fn videnskii(config: &RunConfig, beta: f64, trials: usize) -> Result<Vec<Check>, CliError> {
    let r = videnskii_check(&degrees(config, &[8, 16, 32]), beta, trials, config.seed)?;
    Ok(vec![Check::new(
        "videnskii: constant coverage",
        r.covered,
        json!({ "beta": beta, "trials": trials, "seed": config.seed, "slack": r.slack, "summaries": r.summaries }),
    )])
}

pub fn run(config: &RunConfig, suite: &str, beta: f64, trials: usize) -> Result<(), CliError> {
    let checks = match suite {
        "core" => core(config)?,
        "ball" => ball(config)?,
        "cornered" => cornered(config)?,
        "grain" => grain(config)?,
        "needles" => needles(config)?,
        "norm" => norm(config)?,
        "affine" => affine(config)?,
        "videnskii" => videnskii(config, beta, trials)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite '{other}' (known: {}); gallery domains: {}",
                SUITES.join(", "),
                NAMES.join(", ")
            )))
        }
    };
    let failed = checks.iter().filter(|c| !c.passed).count();
    let doc = json!({
        "config": config,
        "config_hash": config.hash(),
        "suite": suite,
        "passed": failed == 0,
        "checks": checks,
    });
    let path = config.output_path(&format!("verify_{suite}.json"))?;
    write_file(&path, &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"))?;
    for c in &checks {
        println!("[{}] {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    println!("{}", path.display());
    if failed > 0 {
        return Err(CliError::Assertion(failed));
    }
    Ok(())
}
