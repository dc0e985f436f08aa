use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trig::TrigPoly;
use super::{corner_levels, grid_points, GridSpec};
use crate::christoffel::{build_evaluator, kernel_polynomial, sup_on_region, EvaluatorOptions};
use crate::error::{Error, Result};
use crate::geometry::{gallery, homothety, Affine2, Domain, Membership, Point2};
use crate::rho::rho_star;

fn min_max(v: impl IntoIterator<Item = f64>) -> (f64, f64) {
    v.into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub n: usize,
    pub x: Point2,
    pub one_minus_r: f64,
    pub lambda: f64,
    /// `λ_n(B, x)·n / ρ*_n(1 − |x|)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    pub n: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// `√(r_min·r_max)`: the constant minimizing the worst log deviation.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub records: Vec<BallRecord>,
    pub summaries: Vec<BallSummary>,
    pub overall_spread: f64,
    /// `max/min` of the fitted per-degree constants.
    pub constant_variation: f64,
    /// `max/min` of the per-degree maxima `r_max`.
    pub max_ratio_variation: f64,
    /// Least-squares slope of `log λ_n(B, (1, 0))` against `log n`.
    pub boundary_slope: f64,
}

/// `λ_n(B, x)·n/ρ*_n(1 − |x|)` on the unit disc along the positive x-axis at
/// `1 − |x| ∈ {0, n⁻², n⁻¹, 0.5, 1}` plus `extra` offsets.
pub fn ball_behavior_check(ns: &[usize], extra: &[f64], options: &EvaluatorOptions) -> Result<BallReport> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("degree list is empty".into()));
    }
    let disc = gallery::disc();
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut boundary = Vec::new();
    for &n in ns {
        let ev = build_evaluator(&disc, n, options)?;
        let nf = n as f64;
        let mut offsets = vec![0.0, 1.0 / (nf * nf), 1.0 / nf, 0.5, 1.0];
        offsets.extend(extra.iter().copied().filter(|t| (0.0..=1.0).contains(t)));
        let mut ratios = Vec::new();
        for t in offsets {
            let x = Point2::new(1.0 - t, 0.0);
            let lambda = ev.lambda(x);
            let ratio = lambda * nf / rho_star(n, t)?;
            if t == 0.0 {
                boundary.push((nf.ln(), lambda.ln()));
            }
            ratios.push(ratio);
            records.push(BallRecord { n, x, one_minus_r: t, lambda, ratio });
        }
        let (lo, hi) = min_max(ratios);
        summaries.push(BallSummary { n, r_min: lo, r_max: hi, constant: (lo * hi).sqrt() });
    }
    let (lo, hi) = min_max(summaries.iter().flat_map(|s| [s.r_min, s.r_max]));
    let (clo, chi) = min_max(summaries.iter().map(|s| s.constant));
    let (mlo, mhi) = min_max(summaries.iter().map(|s| s.r_max));
    Ok(BallReport {
        records,
        summaries,
        overall_spread: hi / lo,
        constant_variation: chi / clo,
        max_ratio_variation: mhi / mlo,
        boundary_slope: slope(&boundary),
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrainRecord {
    pub n: usize,
    pub x: Point2,
    pub d1: f64,
    pub d2: f64,
    pub lambda: f64,
    /// `λ_n / (ρ*_n(d₁*)ρ*_n(d₂*))`.
    pub ratio: f64,
    /// Within `0.1` of a corner.
    pub near_corner: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrainSummary {
    pub n: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub center_ratio: f64,
    pub corner_min: f64,
    pub interior_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrainReport {
    pub h: f64,
    pub records: Vec<GrainRecord>,
    pub summaries: Vec<GrainSummary>,
    /// Every later minimum is at least the first one divided by `slack`.
    pub covered: bool,
    pub slack: f64,
}

/// Lower-bound constant for the grain `B ∩ (B + (0, h))` on a cartesian grid
/// plus dyadic corner-approach points.
pub fn grain_lower_check(h: f64, ns: &[usize], grid: usize, options: &EvaluatorOptions) -> Result<GrainReport> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("degree list is empty".into()));
    }
    let d = gallery::lens(h)?;
    let levels = corner_levels(*ns.iter().max().unwrap_or(&1));
    let mut pts = grid_points(&d, &GridSpec::Cartesian { nx: grid, ny: grid })?;
    for j in 0..d.corners().len() {
        pts.extend(grid_points(&d, &GridSpec::Corner { corner: j, levels })?);
    }
    let center = Point2::new(0.0, 0.5 * h);
    pts.push(center);
    let c2 = Point2::new(0.0, h);
    let dstar = |x: Point2| ((1.0 - x.norm()).max(0.0), (1.0 - x.distance(c2)).max(0.0));
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &n in ns {
        let ev = build_evaluator(&d, n, options)?;
        let rows: Vec<Result<GrainRecord>> = pts
            .par_iter()
            .map(|&x| {
                let (d1, d2) = dstar(x);
                let lambda = ev.lambda(x);
                let ratio = lambda / (rho_star(n, d1)? * rho_star(n, d2)?);
                Ok(GrainRecord { n, x, d1, d2, lambda, ratio, near_corner: d.distance_to_corners(x) < 0.1 })
            })
            .collect();
        let rows: Vec<GrainRecord> = rows.into_iter().collect::<Result<_>>()?;
        let (lo, hi) = min_max(rows.iter().map(|r| r.ratio));
        let corner_min = min_max(rows.iter().filter(|r| r.near_corner).map(|r| r.ratio)).0;
        let interior_min = min_max(rows.iter().filter(|r| !r.near_corner).map(|r| r.ratio)).0;
        let center_ratio = rows.last().map_or(f64::NAN, |r| r.ratio);
        summaries.push(GrainSummary { n, min_ratio: lo, max_ratio: hi, center_ratio, corner_min, interior_min });
        records.extend(rows);
    }
    let slack = 1.5;
    let first = summaries[0].min_ratio;
    let covered = first > 0.0 && summaries.iter().all(|s| s.min_ratio > 0.0 && s.min_ratio >= first / slack);
    Ok(GrainReport { h, records, summaries, covered, slack })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VidenskiiSummary {
    pub n: usize,
    /// Empirical constant: max over trials of `max_θ |T'|·ρ*_n(β − |θ|)/‖T‖`.
    pub c_tilde: f64,
    /// Contribution of `cos nθ` alone.
    pub chebyshev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VidenskiiReport {
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
    pub summaries: Vec<VidenskiiSummary>,
    pub covered: bool,
    pub slack: f64,
}

fn videnskii_ratio(t: &TrigPoly, n: usize, beta: f64, grid: &[f64]) -> Result<f64> {
    let vals: Vec<(f64, f64)> = grid.iter().map(|&th| t.eval_with_derivative(th)).collect();
    let sup = vals.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for (th, (_, dv)) in grid.iter().zip(&vals) {
        best = best.max(dv.abs() * rho_star(n, (beta - th.abs()).max(0.0))?);
    }
    Ok(best / sup)
}

/// Derivative bound for trigonometric polynomials on `[−β, β]`.
pub fn videnskii_check(ns: &[usize], beta: f64, trials: usize, seed: u64) -> Result<VidenskiiReport> {
    if !(beta > 0.0 && beta < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("β = {beta} must lie in (0, π)")));
    }
    if ns.is_empty() {
        return Err(Error::InvalidParameter("degree list is empty".into()));
    }
    let mut summaries = Vec::new();
    for &n in ns {
        let m = 64 * n.max(1) + 1;
        let grid: Vec<f64> = (0..m).map(|k| -beta + 2.0 * beta * k as f64 / (m - 1) as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let polys: Vec<TrigPoly> = (0..trials).map(|_| TrigPoly::random(n, &mut rng)).collect();
        let chebyshev = videnskii_ratio(&TrigPoly::chebyshev(n), n, beta, &grid)?;
        let random = polys
            .par_iter()
            .map(|t| videnskii_ratio(t, n, beta, &grid))
            .collect::<Result<Vec<f64>>>()?;
        let c_tilde = random.into_iter().fold(chebyshev, f64::max);
        summaries.push(VidenskiiSummary { n, c_tilde, chebyshev });
    }
    let slack = 1.5;
    let first = summaries[0].c_tilde;
    let covered = summaries.iter().all(|s| s.c_tilde <= first * slack);
    Ok(VidenskiiReport { beta, trials, seed, summaries, covered, slack })
}

/// Sampled convexity test on the flattened boundary of a simply connected domain.
pub fn is_convex(domain: &Domain) -> bool {
    if domain.loops().len() != 1 {
        return false;
    }
    let p = domain.polyline(0);
    let m = p.len();
    let tol = 1e-9 * domain.diameter().powi(2);
    (0..m).all(|i| {
        let (a, b, c) = (p[i], p[(i + 1) % m], p[(i + 2) % m]);
        (b - a).cross(c - b) >= -tol
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormControlRecord {
    pub x: Point2,
    pub mu: f64,
    pub sup: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormControlReport {
    pub n: usize,
    pub records: Vec<NormControlRecord>,
    pub passed: bool,
}

/// `sup |K_n(x, ·)/K_n(x, x)|` over `D_{1−μ, x}` against `1/μ`.
pub fn norm_control_check(
    domain: &Domain,
    n: usize,
    xs: &[Point2],
    mus: &[f64],
    density: usize,
    options: &EvaluatorOptions,
) -> Result<NormControlReport> {
    if !is_convex(domain) {
        return Err(Error::Precondition("norm control needs a convex domain".into()));
    }
    let ev = build_evaluator(domain, n, options)?;
    let mut records = Vec::new();
    for &x in xs {
        if domain.contains(x) == Membership::Outside {
            return Err(Error::Precondition(format!("point ({}, {}) is not in the domain", x.x, x.y)));
        }
        let p = kernel_polynomial(&ev, x);
        for &mu in mus {
            if !(mu > 0.0 && mu <= 1.0) {
                return Err(Error::InvalidParameter(format!("μ = {mu} must lie in (0, 1]")));
            }
            let sup = if mu == 1.0 {
                p.eval(x).abs()
            } else {
                sup_on_region(&p, &homothety(domain, x, 1.0 - mu)?, density)?.value
            };
            let bound = 1.0 / mu;
            records.push(NormControlRecord { x, mu, sup, bound, holds: sup <= bound + 1e-6 });
        }
    }
    let passed = records.iter().all(|r| r.holds);
    Ok(NormControlReport { n, records, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineTrial {
    pub det: f64,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineReport {
    pub n: usize,
    pub trials: Vec<AffineTrial>,
    pub max_rel_error: f64,
}

fn random_map(rng: &mut ChaCha8Rng) -> Affine2 {
    // Rotation · diag(s1, ±s2) · rotation keeps |det| = s1·s2 in [1/4, 4].
    let s1 = 2f64.powf(rng.random_range(-1.0..1.0));
    let s2 = 2f64.powf(rng.random_range(-1.0..1.0));
    let flip = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let a = Affine2::rotation(rng.random_range(0.0..std::f64::consts::TAU));
    let b = Affine2::rotation(rng.random_range(0.0..std::f64::consts::TAU));
    let s = Affine2 { m: [[s1, 0.0], [0.0, flip * s2]], t: Point2::ORIGIN };
    let shift = Affine2::translation(Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
    shift.compose(&a.compose(&s.compose(&b)))
}

/// `λ_n(TD, Tx) = |det T|·λ_n(D, x)` for random affine maps; the first trial
/// is the identity.
pub fn affine_invariance_check(
    domain: &Domain,
    n: usize,
    trials: usize,
    points: usize,
    seed: u64,
    options: &EvaluatorOptions,
) -> Result<AffineReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bb = domain.bbox();
    let mut xs = Vec::new();
    while xs.len() < points.max(1) {
        let x = Point2::new(rng.random_range(bb.min.x..bb.max.x), rng.random_range(bb.min.y..bb.max.y));
        if domain.contains(x) == Membership::Inside {
            xs.push(x);
        }
    }
    let base = build_evaluator(domain, n, options)?;
    let reference: Vec<f64> = base.lambda_many(&xs);
    let mut out = Vec::new();
    for k in 0..trials {
        let t = if k == 0 { Affine2::IDENTITY } else { random_map(&mut rng) };
        let ev = build_evaluator(&domain.transformed(&t)?, n, options)?;
        let det = t.det().abs();
        let err = xs
            .iter()
            .zip(&reference)
            .map(|(x, l)| (ev.lambda(t.apply(*x)) - det * l).abs() / (det * l))
            .fold(0.0, f64::max);
        out.push(AffineTrial { det: t.det(), max_rel_error: err });
    }
    let max_rel_error = out.iter().map(|t| t.max_rel_error).fold(0.0, f64::max);
    Ok(AffineReport { n, trials: out, max_rel_error })
}
