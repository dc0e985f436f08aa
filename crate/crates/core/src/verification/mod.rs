//! Empirical checks of the two-sided estimate and of the auxiliary
//! inequalities behind it.

mod checks;
pub mod svg;
mod trig;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    affine_invariance_check, ball_behavior_check, grain_lower_check, is_convex, norm_control_check, videnskii_check,
    AffineReport, AffineTrial, BallRecord, BallReport, BallSummary, GrainRecord, GrainReport, GrainSummary,
    NormControlRecord, NormControlReport, VidenskiiReport, VidenskiiSummary,
};
pub use trig::TrigPoly;

use crate::christoffel::{build_evaluator, EvaluatorOptions};
use crate::error::{Error, Result};
use crate::geometry::{gallery as shapes, Affine2, Domain, Point2};
use crate::needles::{BoundsConfig, CertifiedBounds};
use crate::rho::{theorem_rhs, FormulaMode};

/// Gallery lookup; the lens offset may be written `lens(0.5)` or `lens:0.5`.
pub fn gallery(name: &str) -> Result<Domain> {
    let name = name.trim();
    if let Some(inner) = name.strip_prefix("lens(").and_then(|s| s.strip_suffix(')')) {
        return shapes::by_name(&format!("lens:{inner}"));
    }
    shapes::by_name(name)
}

/// Point sets for ratio studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridSpec {
    /// `nx × ny` grid on the bounding box, filtered to the closure of the domain.
    Cartesian { nx: usize, ny: usize },
    /// Points at distance `2^{-k}`, `k = 1..=levels`, from corner `corner`.
    Corner { corner: usize, levels: usize },
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Cartesian { nx, ny } => write!(f, "cart:{nx},{ny}"),
            GridSpec::Corner { corner, levels } => write!(f, "corner:{corner},{levels}"),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("grid '{s}' is not cart:NX,NY or corner:J,K"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = args.split_once(',').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "cart" if a >= 1 && b >= 1 => Ok(GridSpec::Cartesian { nx: a, ny: b }),
            "corner" if b >= 1 => Ok(GridSpec::Corner { corner: a, levels: b }),
            _ => Err(bad()),
        }
    }
}

/// Number of dyadic levels reaching `n_max^{-2}/4`.
pub fn corner_levels(n_max: usize) -> usize {
    let target = 0.25 / (n_max.max(1) as f64).powi(2);
    (1..64).find(|&k| 0.5f64.powi(k as i32) < target).map_or(63, |k| k - 1).max(1)
}

/// Materializes a grid; points outside the closure of `domain` are dropped.
pub fn grid_points(domain: &Domain, grid: &GridSpec) -> Result<Vec<Point2>> {
    let raw: Vec<Point2> = match *grid {
        GridSpec::Cartesian { nx, ny } => {
            let bb = domain.bbox();
            let coord = |lo: f64, w: f64, i: usize, m: usize| {
                if m == 1 {
                    lo + 0.5 * w
                } else {
                    lo + w * i as f64 / (m - 1) as f64
                }
            };
            (0..ny)
                .flat_map(|j| {
                    (0..nx).map(move |i| {
                        Point2::new(coord(bb.min.x, bb.width(), i, nx), coord(bb.min.y, bb.height(), j, ny))
                    })
                })
                .collect()
        }
        GridSpec::Corner { corner, levels } => {
            let c = domain.corners().get(corner).ok_or_else(|| {
                Error::InvalidParameter(format!("corner {corner} out of range ({} corners)", domain.corners().len()))
            })?;
            let tp = c.arm_plus.tangent(0.0);
            let tm = c.arm_minus.tangent(1.0);
            let mut dirs: Vec<Point2> = (1..6)
                .map(|i| Affine2::rotation(c.angle * i as f64 / 6.0).apply_vec(tp))
                .collect();
            // Inward arm normals, when they point into the wedge.
            if c.angle > std::f64::consts::FRAC_PI_2 + 1e-9 {
                dirs.push(tp.perp());
                dirs.push(tm.perp());
            }
            (1..=levels)
                .flat_map(|k| {
                    let d = 0.5f64.powi(k as i32);
                    dirs.iter().map(move |u| c.vertex + *u * d).collect::<Vec<_>>()
                })
                .collect()
        }
    };
    Ok(raw.into_par_iter().filter(|p| domain.contains(*p).in_closure()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub n: usize,
    pub x: Point2,
    pub lambda: f64,
    pub formula: f64,
    pub ratio: f64,
    pub argmin: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// `|W(x) − 1|` for the upper-bound witness `W`.
    pub witness_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub n: usize,
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub domain: String,
    pub ns: Vec<usize>,
    pub grid: Vec<String>,
    pub records: Vec<RatioRecord>,
    pub summaries: Vec<RatioSummary>,
    pub overall_spread: f64,
    pub precision: Vec<String>,
    /// Degrees whose evaluator could not be built.
    pub failures: Vec<String>,
}

impl RatioReport {
    fn summarize(records: &[RatioRecord], ns: &[usize]) -> (Vec<RatioSummary>, f64) {
        let summaries: Vec<RatioSummary> = ns
            .iter()
            .filter_map(|&n| {
                let rs: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.ratio).collect();
                if rs.is_empty() {
                    return None;
                }
                let lo = rs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = rs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Some(RatioSummary { n, points: rs.len(), r_min: lo, r_max: hi, spread: hi / lo })
            })
            .collect();
        let lo = summaries.iter().map(|s| s.r_min).fold(f64::INFINITY, f64::min);
        let hi = summaries.iter().map(|s| s.r_max).fold(f64::NEG_INFINITY, f64::max);
        let overall = if summaries.is_empty() { f64::NAN } else { hi / lo };
        (summaries, overall)
    }

    /// Whether the `[r_min, r_max]` interval at the first degree, widened by
    /// `slack` on both sides, covers the interval at every later degree.
    pub fn covered_by_first(&self, slack: f64) -> bool {
        match self.summaries.split_first() {
            None => false,
            Some((first, rest)) => rest
                .iter()
                .all(|s| s.r_min >= first.r_min / slack && s.r_max <= first.r_max * slack),
        }
    }

    /// `true` when `lower ≤ λ ≤ upper` (relative `slack`) wherever bounds were computed.
    pub fn sandwich_holds(&self, slack: f64) -> bool {
        self.records.iter().all(|r| {
            r.lower.map_or(true, |lo| lo <= r.lambda * (1.0 + slack))
                && r.upper.map_or(true, |up| r.lambda <= up * (1.0 + slack))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub evaluator: EvaluatorOptions,
    pub mode: FormulaMode,
    /// Also compute certified lower and upper bounds at every point.
    pub certify: bool,
    pub bounds: BoundsConfig,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            evaluator: EvaluatorOptions::default(),
            mode: FormulaMode::Full,
            certify: false,
            bounds: BoundsConfig::default(),
        }
    }
}

/// `λ_n / Λ_n` over the grids for every degree in `ns`.
pub fn ratio_study(
    domain: &Domain,
    name: &str,
    ns: &[usize],
    grids: &[GridSpec],
    options: &StudyOptions,
) -> Result<RatioReport> {
    if options.mode == FormulaMode::Full {
        if let Some(a) = domain.corner_angles().into_iter().find(|a| !(*a > 0.0 && *a < std::f64::consts::PI)) {
            return Err(Error::Precondition(format!(
                "interior angle {a:.6} is outside (0, π); use the away-from-corners mode"
            )));
        }
    }
    let mut points = Vec::new();
    for g in grids {
        points.extend(grid_points(domain, g)?);
    }
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut precision = Vec::new();
    for &n in ns {
        let mut bounds_config = options.bounds;
        bounds_config.evaluator = options.evaluator;
        let ev = match build_evaluator(domain, n, &options.evaluator) {
            Ok(ev) => ev,
            Err(e) => {
                failures.push(format!("n = {n}: {e}"));
                continue;
            }
        };
        precision.push(format!("n={n}:{}", ev.precision_mode()));
        let bounds = if options.certify {
            match CertifiedBounds::from_evaluator(ev.clone(), bounds_config) {
                Ok(b) => Some(b),
                Err(e) => {
                    failures.push(format!("n = {n}: bounds unavailable: {e}"));
                    None
                }
            }
        } else {
            None
        };
        let rows: Vec<Result<RatioRecord>> = points
            .par_iter()
            .map(|&x| {
                let lambda = ev.lambda(x);
                let f = theorem_rhs(domain, x, n, options.mode)?;
                let (lower, upper, witness_error) = match &bounds {
                    Some(b) => {
                        let up = b.upper(x)?;
                        (Some(b.lower(x)?.bound), Some(up.bound), Some((up.witness.eval(x) - 1.0).abs()))
                    }
                    None => (None, None, None),
                };
                Ok(RatioRecord {
                    n,
                    x,
                    lambda,
                    formula: f.value,
                    ratio: lambda / f.value,
                    argmin: f.argmin.to_string(),
                    lower,
                    upper,
                    witness_error,
                })
            })
            .collect();
        for r in rows {
            records.push(r?);
        }
    }
    let (summaries, overall_spread) = RatioReport::summarize(&records, ns);
    Ok(RatioReport {
        domain: name.to_string(),
        ns: ns.to_vec(),
        grid: grids.iter().map(ToString::to_string).collect(),
        records,
        summaries,
        overall_spread,
        precision,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_names() {
        assert_eq!(gallery("square").unwrap().corners().len(), 4);
        let l = gallery("lens(1.0)").unwrap();
        assert_eq!(l.corners().len(), 2);
        assert!(l.polygon_area() < std::f64::consts::PI);
        assert_eq!(gallery("blob").unwrap().corners().len(), 0);
        assert!(gallery("torus").is_err());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!("cart:5,7".parse::<GridSpec>().unwrap(), GridSpec::Cartesian { nx: 5, ny: 7 });
        assert_eq!("corner:1,4".parse::<GridSpec>().unwrap(), GridSpec::Corner { corner: 1, levels: 4 });
        for bad in ["cart:5", "cart:0,3", "ring:1,2", "corner:a,2"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
        assert_eq!(GridSpec::Cartesian { nx: 3, ny: 4 }.to_string(), "cart:3,4");
    }

    #[test]
    fn disc_grid_membership() {
        let pts = grid_points(&gallery("disc").unwrap(), &GridSpec::Cartesian { nx: 5, ny: 5 }).unwrap();
        assert_eq!(pts.len(), 13);
    }

    #[test]
    fn corner_grid_distances() {
        let d = gallery("square").unwrap();
        let pts = grid_points(&d, &GridSpec::Corner { corner: 0, levels: 3 }).unwrap();
        let v = d.corners()[0].vertex;
        assert_eq!(pts.len(), 15);
        for p in &pts {
            let k = -(p.distance(v).log2());
            assert!((k - k.round()).abs() < 1e-12 && (1.0..=3.0).contains(&k.round()));
        }
        assert!(grid_points(&d, &GridSpec::Corner { corner: 9, levels: 3 }).is_err());
    }

    #[test]
    fn levels_reach_target() {
        assert_eq!(corner_levels(16), 10);
        assert!(0.5f64.powi(corner_levels(8) as i32) >= 0.25 / 64.0);
        assert!(0.5f64.powi(corner_levels(8) as i32 + 1) < 0.25 / 64.0);
    }

    #[test]
    fn disc_argmin_is_the_circle() {
        let d = gallery("disc").unwrap();
        let r = ratio_study(&d, "disc", &[4, 8], &[GridSpec::Cartesian { nx: 7, ny: 7 }], &StudyOptions::default())
            .unwrap();
        assert!(r.records.iter().all(|x| x.argmin == "curve:0" && x.ratio.is_finite() && x.ratio > 0.0));
        assert_eq!(r.summaries.len(), 2);
        let (s, o) = RatioReport::summarize(&r.records, &r.ns);
        assert_eq!(s, r.summaries);
        assert_eq!(o, r.overall_spread);
    }

    #[test]
    fn square_corner_term_takes_over() {
        let d = gallery("square").unwrap();
        let n = 8;
        let r = ratio_study(&d, "square", &[n], &[GridSpec::Corner { corner: 0, levels: 9 }], &StudyOptions::default())
            .unwrap();
        let v = d.corners()[0].vertex;
        for rec in &r.records {
            let a = d.corners()[0].arm_minus.nearest_point(rec.x).distance;
            let b = d.corners()[0].arm_plus.nearest_point(rec.x).distance;
            if a.max(b) < 0.25 / (n * n) as f64 && rec.x.distance(v) > 0.0 {
                assert!(rec.argmin.starts_with("corner"), "{rec:?}");
            }
        }
    }

    #[test]
    fn refuses_reflex_angles_in_full_mode() {
        use crate::geometry::{BoundaryLoop, Curve};
        let p = Point2::new;
        let v = [p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(1.0, 1.0), p(0.0, 2.0)];
        let curves = (0..5).map(|i| Curve::segment(v[i], v[(i + 1) % 5])).collect();
        let d = Domain::new(vec![BoundaryLoop::outer(curves)]).unwrap();
        let grid = [GridSpec::Cartesian { nx: 3, ny: 3 }];
        assert!(ratio_study(&d, "arrow", &[4], &grid, &StudyOptions::default()).is_err());
        let away = StudyOptions { mode: FormulaMode::AwayFromCorners, ..Default::default() };
        assert!(ratio_study(&d, "arrow", &[4], &grid, &away).is_ok());
    }
}
