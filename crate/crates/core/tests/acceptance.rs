//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use christoffel::geometry::gallery;
use christoffel::needles::{NeedleSpec, VALIDATION_SAMPLES};
use christoffel::verification::{
    affine_invariance_check, ball_behavior_check, corner_levels, grain_lower_check, norm_control_check,
    ratio_study, videnskii_check, GridSpec, RatioReport, StudyOptions,
};
use christoffel::{build_evaluator, rho_star, Domain, EvaluatorOptions, Membership, Point2, PrecisionMode, Result};
use rand::{RngExt, SeedableRng};

type Check = Result<(bool, String)>;

fn opts() -> EvaluatorOptions {
    EvaluatorOptions::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn degree_zero() -> Check {
    let cases: [(&str, Domain, f64); 3] = [
        ("disc", gallery::disc(), PI),
        ("square", gallery::square(), 4.0),
        ("lens(1.0)", gallery::lens(1.0)?, gallery::lens_area(1.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, area) in cases {
        let t = Instant::now();
        let ev = build_evaluator(&d, 0, &opts())?;
        let c = d.bbox().center();
        let err = [c, c + Point2::new(0.1, -0.05), Point2::new(0.0, 0.3)]
            .iter()
            .map(|x| rel(ev.lambda(*x), area))
            .fold(0.0, f64::max);
        let secs = t.elapsed().as_secs_f64();
        ok &= err <= 1e-9 && secs < 1.0;
        parts.push(format!("{name} rel err {err:.1e} in {secs:.3}s"));
    }
    Ok((ok, parts.join("; ")))
}

fn oracle_agreement() -> Check {
    let n_max = 8;
    let disc_pts: Vec<[f64; 2]> = grid5(0.6);
    let square_pts: Vec<[f64; 2]> = grid5(0.9);
    let cases = [
        ("disc", gallery::disc(), common::Oracle::new(&common::circle_polygon(1 << 14), [0.0, 0.0], n_max, 1.0), disc_pts),
        (
            "square",
            gallery::square(),
            common::Oracle::new(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], [0.0, 0.0], n_max, 1.0),
            square_pts,
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, d, oracle, pts) in &cases {
        let mut w: f64 = 0.0;
        for n in 0..=n_max {
            let ev = build_evaluator(d, n, &opts())?;
            for p in pts {
                w = w.max(rel(ev.lambda(Point2::new(p[0], p[1])), oracle.lambda(n, *p)));
            }
        }
        parts.push(format!("{name} max rel diff {w:.2e} over n ≤ {n_max}, {} points", pts.len()));
        worst = worst.max(w);
    }
    Ok((worst <= 1e-6, parts.join("; ")))
}

fn grid5(h: f64) -> Vec<[f64; 2]> {
    (0..5)
        .flat_map(|i| (0..5).map(move |j| [-h + 0.5 * h * i as f64, -h + 0.5 * h * j as f64]))
        .collect()
}

fn affine() -> Check {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (k, (name, d)) in [("square", gallery::square()), ("lens(1.0)", gallery::lens(1.0)?), ("disc", gallery::disc())]
        .into_iter()
        .enumerate()
    {
        for n in [4, 10] {
            let r = affine_invariance_check(&d, n, 20, 5, 100 + k as u64, &opts())?;
            worst = worst.max(r.max_rel_error);
            parts.push(format!("{name} n={n}: {:.1e}", r.max_rel_error));
        }
    }
    Ok((worst <= 1e-6, format!("20 maps each; {}", parts.join(", "))))
}

fn monotonicity() -> Check {
    let half = gallery::half_disc();
    let disc = gallery::disc();
    let pts = christoffel::verification::grid_points(&half, &GridSpec::Cartesian { nx: 13, ny: 7 })?;
    let mut worst = f64::NEG_INFINITY;
    for n in 0..=10 {
        let eh = build_evaluator(&half, n, &opts())?;
        let ed = build_evaluator(&disc, n, &opts())?;
        for x in &pts {
            worst = worst.max(eh.lambda(*x) / ed.lambda(*x) - 1.0);
        }
    }
    Ok((worst <= 1e-8, format!("{} shared points, n ≤ 10, max λ_half/λ_disc − 1 = {worst:.3e}", pts.len())))
}

fn ball() -> Check {
    let r = ball_behavior_check(&[4, 8, 16, 24], &[], &EvaluatorOptions::with_precision(PrecisionMode::Double))?;
    let per_n: Vec<String> = r
        .summaries
        .iter()
        .map(|s| format!("n={} [{:.3}, {:.3}] c={:.3}", s.n, s.r_min, s.r_max, s.constant))
        .collect();
    let ok = r.overall_spread <= 25.0 && r.constant_variation <= 2.0;
    Ok((
        ok,
        format!(
            "spread {:.2}, fitted-constant variation {:.3} (r_max variation {:.3}), boundary slope {:.2}; {}",
            r.overall_spread,
            r.constant_variation,
            r.max_ratio_variation,
            r.boundary_slope,
            per_n.join(", ")
        ),
    ))
}

fn cornered_studies() -> Result<Vec<RatioReport>> {
    let ns = [4, 8, 16];
    let levels = corner_levels(16);
    let options = StudyOptions { certify: true, ..Default::default() };
    let mut out = Vec::new();
    for (name, d) in [("square", gallery::square()), ("lens(1.0)", gallery::lens(1.0)?)] {
        let mut grids = vec![GridSpec::Cartesian { nx: 21, ny: 21 }];
        grids.extend((0..d.corners().len()).map(|j| GridSpec::Corner { corner: j, levels }));
        out.push(ratio_study(&d, name, &ns, &grids, &options)?);
    }
    Ok(out)
}

fn cornered(reports: &[RatioReport]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in reports {
        let covered = r.covered_by_first(1.5);
        ok &= r.overall_spread <= 50.0 && covered && r.failures.is_empty();
        let per_n: Vec<String> =
            r.summaries.iter().map(|s| format!("n={} [{:.3}, {:.3}]", s.n, s.r_min, s.r_max)).collect();
        parts.push(format!(
            "{}: spread {:.2}, n=4 interval ×1.5 covers later n: {covered}; {}",
            r.domain,
            r.overall_spread,
            per_n.join(" ")
        ));
    }
    Ok((ok, parts.join(" | ")))
}

fn grain() -> Check {
    let r = grain_lower_check(1.0, &[4, 8, 16], 21, &opts())?;
    let per_n: Vec<String> = r
        .summaries
        .iter()
        .map(|s| format!("n={} min {:.4} (corner {:.4}, interior {:.4})", s.n, s.min_ratio, s.corner_min, s.interior_min))
        .collect();
    Ok((r.covered, format!("{} points; {}", r.records.len() / 3, per_n.join(", "))))
}

fn needles() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    let families: [(&str, fn(usize) -> NeedleSpec); 3] = [
        ("univariate t=0.25", |n| NeedleSpec::Univariate { n, t: 0.25 }),
        ("univariate t=1", |n| NeedleSpec::Univariate { n, t: 1.0 }),
        ("radial", |n| NeedleSpec::Radial { n, r1: 1.0, r2: 2.0, lam: 1.25 }),
    ];
    for (label, spec) in families {
        let base = spec(8).report(None)?;
        let mut cs = vec![base.c_fit];
        for n in [16, 32] {
            let r = spec(n).report(Some(1.5 * base.c_fit))?;
            ok &= r.max_violation == 0.0 && r.samples >= VALIDATION_SAMPLES;
            cs.push(r.c_fit);
        }
        parts.push(format!("{label} c_fit {:.3}/{:.3}/{:.3}", cs[0], cs[1], cs[2]));
    }
    let (r1, r2, lam) = (1.0, 2.0, 1.25);
    let scaled = |n: usize| -> Result<f64> {
        let norm = NeedleSpec::Narrowed { n, r1, r2, lam }.l2_norm()?.unwrap_or(f64::NAN);
        Ok(norm / (rho_star(n, lam - r1)? / n as f64))
    };
    let s8 = scaled(8)?;
    let later = [scaled(16)?, scaled(32)?];
    ok &= later.iter().all(|s| *s <= 1.5 * s8);
    parts.push(format!("narrowed ∫P²/(ρ*/n) {s8:.3}/{:.3}/{:.3}", later[0], later[1]));
    Ok((ok, parts.join("; ")))
}

fn sandwich(reports: &[RatioReport]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in reports {
        let holds = r.sandwich_holds(1e-8);
        let admissible = r.records.iter().all(|x| x.witness_error.is_some_and(|e| e <= 1e-10));
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for rec in &r.records {
            if let (Some(l), Some(u)) = (rec.lower, rec.upper) {
                lo = lo.min(l / rec.lambda);
                hi = hi.max(u / rec.lambda);
            }
        }
        ok &= holds && admissible;
        parts.push(format!(
            "{}: {} points, sandwich {holds}, admissible {admissible}, min lower/λ {lo:.3e}, max upper/λ {hi:.3e}",
            r.domain,
            r.records.len()
        ));
    }
    Ok((ok, parts.join(" | ")))
}

fn norm_control() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for (name, d) in [("disc", gallery::disc()), ("square", gallery::square()), ("lens(1.0)", gallery::lens(1.0)?)] {
        let bb = d.bbox();
        let mut xs = vec![d.corners().first().map_or(Point2::new(0.5, 0.0), |c| {
            c.vertex + (bb.center() - c.vertex) * 0.05
        })];
        while xs.len() < 10 {
            let x = Point2::new(rng.random_range(bb.min.x..bb.max.x), rng.random_range(bb.min.y..bb.max.y));
            if d.contains(x) == Membership::Inside {
                xs.push(x);
            }
        }
        let r = norm_control_check(&d, 8, &xs, &[0.25, 0.5], 80, &opts())?;
        let worst = r.records.iter().map(|x| x.sup * x.mu).fold(0.0, f64::max);
        ok &= r.passed;
        parts.push(format!("{name}: max μ·sup {worst:.4}"));
    }
    Ok((ok, format!("n=8, 10 points × μ ∈ {{0.25, 0.5}}; {}", parts.join(", "))))
}

fn videnskii() -> Check {
    let r = videnskii_check(&[8, 16, 32], FRAC_PI_2, 200, 7)?;
    let cs: Vec<String> = r.summaries.iter().map(|s| format!("n={} c̃={:.3} (cos {:.3})", s.n, s.c_tilde, s.chebyshev)).collect();
    Ok((r.covered, cs.join(", ")))
}

fn performance(suite_start: Instant) -> Check {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    let t = Instant::now();
    let ev = pool.install(|| build_evaluator(&gallery::disc(), 16, &EvaluatorOptions::with_precision(PrecisionMode::Double)))?;
    let build = t.elapsed().as_secs_f64();
    let total = suite_start.elapsed().as_secs_f64();
    Ok((
        build <= 60.0 && total <= 1800.0,
        format!("n=16 disc build {build:.2}s single-threaded ({:?}); suite so far {total:.0}s", ev.precision_mode()),
    ))
}

fn main() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut record = |id: &str, title: &str, t: Instant, r: Check| {
        let (pass, detail) = match r {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let line = format!(
            "[{}] {id} {title} ({:.1}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        println!("{line}");
        lines.push(pass);
    };
    let t = Instant::now();
    record("C1", "degree-zero exactness", t, degree_zero());
    let t = Instant::now();
    record("C2", "oracle agreement", t, oracle_agreement());
    let t = Instant::now();
    record("C3", "affine invariance", t, affine());
    let t = Instant::now();
    record("C4", "domain monotonicity", t, monotonicity());
    let t = Instant::now();
    record("C5", "disc boundary profile", t, ball());
    let t = Instant::now();
    let studies = cornered_studies();
    match &studies {
        Ok(reports) => {
            record("C6", "two-sided estimate on cornered domains", t, cornered(reports));
        }
        Err(e) => record("C6", "two-sided estimate on cornered domains", t, Ok((false, format!("error: {e}")))),
    }
    let t = Instant::now();
    record("C7", "grain lower bound", t, grain());
    let t = Instant::now();
    record("C8", "needle decay", t, needles());
    let t = Instant::now();
    match &studies {
        Ok(reports) => record("C9", "certified sandwich", t, sandwich(reports)),
        Err(e) => record("C9", "certified sandwich", t, Ok((false, format!("error: {e}")))),
    }
    let t = Instant::now();
    record("C10", "norm control on homotheties", t, norm_control());
    let t = Instant::now();
    record("C11", "trigonometric derivative bound", t, videnskii());
    let t = Instant::now();
    record("C12", "performance", t, performance(start));
    let passed = lines.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed in {:.0}s", lines.len(), start.elapsed().as_secs_f64());
    if passed != lines.len() {
        std::process::exit(1);
    }
}
