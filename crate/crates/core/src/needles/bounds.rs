use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::planar::{disc_intersection, Needle, DEFAULT_ZETA};
use crate::christoffel::{build_evaluator, kernel_polynomial, BivariatePoly, ChristoffelEvaluator, EvaluatorOptions};
use crate::error::{Error, Result};
use crate::geometry::{gallery, local_linear_extension, Curve, Disc, Domain, Membership, Point2};

/// Where `x` sits relative to the boundary, measured against `δ = 0.1·diam`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "regime", content = "corner")]
pub enum Regime {
    Interior,
    Edge,
    /// Within `δ` of the given corner.
    Corner(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperConstruction {
    EnclosingDisc,
    Annulus,
    TwoAnnuli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerConstruction {
    CenteredDisc,
    TangentDisc,
    Grain,
    /// Nothing could be inscribed; the bound is 0.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub zeta: f64,
    /// Exterior disc radius in units of `δ`; `None` uses `max(2, 4/ζ)`.
    pub gamma: Option<f64>,
    pub evaluator: EvaluatorOptions,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig { zeta: DEFAULT_ZETA, gamma: None, evaluator: EvaluatorOptions::default() }
    }
}

impl BoundsConfig {
    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or((4.0 / self.zeta).max(2.0))
    }
}

#[derive(Debug, Clone)]
pub struct UpperBound {
    pub bound: f64,
    pub witness: BivariatePoly,
    pub regime: Regime,
    pub construction: UpperConstruction,
}

#[derive(Debug, Clone)]
pub struct LowerBound {
    pub bound: f64,
    pub reference: Option<Domain>,
    pub regime: Regime,
    pub construction: LowerConstruction,
}

struct Grain {
    domain: Domain,
    ev: ChristoffelEvaluator,
}

/// Certified two-sided bounds on `λ_n(D, ·)` for one domain and degree.
///
/// Upper bounds integrate an explicit admissible witness over `D`; lower
/// bounds evaluate `λ_n` exactly on a reference domain inscribed in `D`.
pub struct CertifiedBounds {
    ev: ChristoffelEvaluator,
    unit: ChristoffelEvaluator,
    config: BoundsConfig,
    delta: f64,
    enclosing: Disc,
    extended_arms: Vec<Option<(Curve, Curve)>>,
    grains: Vec<OnceLock<Option<Grain>>>,
}

const SHRINK: f64 = 1.0 - 1e-10;

impl CertifiedBounds {
    pub fn new(domain: &Domain, n: usize, config: BoundsConfig) -> Result<Self> {
        let ev = build_evaluator(domain, n, &config.evaluator)?;
        Self::from_evaluator(ev, config)
    }

    pub fn from_evaluator(ev: ChristoffelEvaluator, config: BoundsConfig) -> Result<Self> {
        if !(config.zeta > 0.0 && config.zeta < 0.5) {
            return Err(Error::InvalidParameter(format!("ζ = {} must lie in (0, 1/2)", config.zeta)));
        }
        let n = ev.degree();
        let unit = build_evaluator(&gallery::disc(), n, &config.evaluator)?;
        let domain = ev.domain();
        let center = domain.bbox().center();
        let radius = (0..domain.loops().len())
            .flat_map(|i| domain.polyline(i).iter().map(|p| p.distance(center)).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        // Polylines may cut inside curved pieces by the flattening tolerance.
        let slack = 10.0 * domain.config().flatten_rel * domain.diameter();
        let extended_arms = domain
            .corners()
            .iter()
            .map(|c| {
                let m = local_linear_extension(&c.arm_minus, c.arm_length).ok()?;
                let p = local_linear_extension(&c.arm_plus, c.arm_length).ok()?;
                Some((m, p))
            })
            .collect();
        let grains = domain.corners().iter().map(|_| OnceLock::new()).collect();
        Ok(CertifiedBounds {
            delta: domain.delta_geom(),
            enclosing: Disc::new(center, (radius + slack) * (1.0 + 1e-9)),
            ev,
            unit,
            config,
            extended_arms,
            grains,
        })
    }

    pub fn evaluator(&self) -> &ChristoffelEvaluator {
        &self.ev
    }

    pub fn domain(&self) -> &Domain {
        self.ev.domain()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn regime(&self, x: Point2) -> Regime {
        let d = self.domain();
        let nearest = d
            .corners()
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.vertex.distance(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((j, dist)) if dist <= self.delta => Regime::Corner(j),
            _ if d.boundary_distance(x) <= self.delta => Regime::Edge,
            _ => Regime::Interior,
        }
    }

    fn check_point(&self, x: Point2) -> Result<()> {
        if !x.is_finite() || self.domain().contains(x) == Membership::Outside {
            return Err(Error::Precondition(format!("point ({}, {}) is not in the domain", x.x, x.y)));
        }
        Ok(())
    }

    /// `true` when the open disc misses the boundary and its center lies outside `D`.
    fn avoids_domain(&self, c: Point2, r: f64) -> bool {
        let d = self.domain();
        d.contains(c) == Membership::Outside && d.boundary_distance(c) >= r * SHRINK
    }

    fn inscribed(&self, c: Point2, r: f64) -> bool {
        let d = self.domain();
        d.contains(c) == Membership::Inside && d.boundary_distance(c) >= r * SHRINK
    }

    /// `λ_n(B(c, r), x)` by scaling the unit-disc evaluator.
    fn disc_lambda(&self, c: Point2, r: f64, x: Point2) -> f64 {
        r * r * self.unit.lambda((x - c) / r)
    }

    fn disc_witness(&self, x: Point2) -> Witness {
        let Disc { center, radius } = self.enclosing;
        let p = kernel_polynomial(&self.unit, (x - center) / radius);
        Witness::Kernel { poly: p, center, radius }
    }

    fn annulus_witness(&self, x: Point2) -> Option<Witness> {
        let d = self.domain();
        let (i, np) = d.nearest_boundary_point(x);
        let u = if np.distance > 1e-12 * d.diameter() {
            (np.point - x) / np.distance
        } else {
            d.outward_normal(i, np.s)
        };
        let n = self.ev.degree();
        let mut r = self.config.gamma() * self.delta;
        while r >= 0.25 * self.delta {
            let c = np.point + u * r;
            if self.avoids_domain(c, r) {
                let lam = x.distance(c).max(r);
                let r2 = r + 1.01 * d.diameter();
                return Needle::narrowed(n, c, r, r2, lam, x - c).ok().map(Witness::Planar);
            }
            r *= 0.5;
        }
        None
    }

    fn two_annuli_witness(&self, j: usize, x: Point2) -> Option<Witness> {
        let (arm_m, arm_p) = self.extended_arms[j].as_ref()?;
        let d = self.domain();
        let zeta = self.config.zeta;
        let foot = |arm: &Curve| {
            let q = arm.nearest_point(x);
            let t = arm.tangent(q.s);
            (q.point, Point2::new(t.y, -t.x))
        };
        let (ym, um) = foot(arm_m);
        let (yp, up) = foot(arm_p);
        let n = self.ev.degree();
        let ext = self.domain().corners()[j].arm_length;
        let mut r = self.config.gamma() * self.delta;
        for _ in 0..3 {
            let (cm, cp) = (ym + um * r, yp + up * r);
            let h = cm.distance(cp) / (2.0 * r);
            let close = [cm, cp].iter().all(|c| x.distance(*c) <= (1.0 + 0.5 * zeta) * r);
            if h >= zeta && h <= 1.0 - zeta && close && self.avoids_domain(cm, r) && self.avoids_domain(cp, r) {
                let r2 = r + 1.01 * d.diameter() + ext;
                return Needle::two_annuli(n, cm, cp, r, r2, x).ok().map(Witness::Planar);
            }
            r *= 0.5;
        }
        None
    }

    /// Admissible witness chosen by regime, and `∫_D witness²`.
    pub fn upper(&self, x: Point2) -> Result<UpperBound> {
        self.check_point(x)?;
        let regime = self.regime(x);
        let mut pick = None;
        if let Regime::Corner(j) = regime {
            pick = self.two_annuli_witness(j, x).map(|w| (w, UpperConstruction::TwoAnnuli));
        }
        if pick.is_none() && regime != Regime::Interior {
            pick = self.annulus_witness(x).map(|w| (w, UpperConstruction::Annulus));
        }
        let (w, construction) = pick.unwrap_or_else(|| (self.disc_witness(x), UpperConstruction::EnclosingDisc));
        let mut witness = BivariatePoly::project(self.ev.basis(), |y| w.eval(y));
        let at_x = witness.eval(x);
        if !(at_x.is_finite() && at_x.abs() > 0.0) {
            return Err(Error::Precondition(format!("witness vanishes at ({}, {})", x.x, x.y)));
        }
        witness.coeffs.iter_mut().for_each(|c| *c /= at_x);
        let bound = self.ev.integrate_square(|y| witness.eval(y));
        Ok(UpperBound { bound, witness, regime, construction })
    }

    fn grain(&self, j: usize) -> Option<&Grain> {
        self.grains[j].get_or_init(|| self.build_grain(j)).as_ref()
    }

    /// Largest grain tangent to both arms at the vertex with radius
    /// `2δ·2^{-k}` that passes the sampled inclusion test.
    fn build_grain(&self, j: usize) -> Option<Grain> {
        let d = self.domain();
        let corner = &d.corners()[j];
        let v = corner.vertex;
        let inward = |t: Point2| Point2::new(-t.y, t.x);
        let np = inward(corner.arm_plus.tangent(0.0));
        let nm = inward(corner.arm_minus.tangent(1.0));
        let boundary: Vec<Point2> = (0..d.loops().len()).flat_map(|i| d.polyline(i).to_vec()).collect();
        let mut r = 2.0 * self.delta;
        for _ in 0..12 {
            let (cp, cm) = (v + np * r, v + nm * r);
            if let Ok(g) = disc_intersection(cp, cm, r) {
                let margin = r * (1.0 - 1e-9);
                let pierced = boundary
                    .iter()
                    .any(|z| z.distance(cp) < margin && z.distance(cm) < margin);
                let outside = g
                    .curves()
                    .iter()
                    .flat_map(|c| (0..=64).map(move |k| c.point(k as f64 / 64.0)))
                    .any(|z| d.contains(z) == Membership::Outside);
                if !pierced && !outside {
                    match build_evaluator(&g, self.ev.degree(), &self.config.evaluator) {
                        Ok(ev) => return Some(Grain { domain: g, ev }),
                        Err(e) => {
                            log::warn!("grain evaluator at corner {j} failed: {e}");
                            return None;
                        }
                    }
                }
            }
            r *= 0.5;
        }
        None
    }

    /// Best of the centered, tangent and corner-grain reference domains.
    pub fn lower(&self, x: Point2) -> Result<LowerBound> {
        self.check_point(x)?;
        let regime = self.regime(x);
        let d = self.domain();
        let mut best: (f64, Option<Domain>, LowerConstruction) = (0.0, None, LowerConstruction::Trivial);
        let mut offer = |v: f64, reference: Option<Domain>, kind| {
            if v > best.0 {
                best = (v, reference, kind);
            }
        };
        let (i, np) = d.nearest_boundary_point(x);
        if np.distance > 0.0 {
            let r = np.distance * SHRINK;
            offer(self.disc_lambda(x, r, x), Disc::new(x, r).to_domain().ok(), LowerConstruction::CenteredDisc);
        }
        let u = if np.distance > 1e-12 * d.diameter() {
            (x - np.point) / np.distance
        } else {
            -d.outward_normal(i, np.s)
        };
        let mut r = 0.25 * self.delta;
        for _ in 0..20 {
            let c = np.point + u * r;
            if x.distance(c) <= r * (1.0 + 1e-9) && self.inscribed(c, r) {
                let rr = r * SHRINK;
                offer(self.disc_lambda(c, rr, x), Disc::new(c, rr).to_domain().ok(), LowerConstruction::TangentDisc);
                break;
            }
            r *= 0.5;
        }
        for (j, corner) in d.corners().iter().enumerate() {
            if corner.vertex.distance(x) > 4.0 * self.delta {
                continue;
            }
            if let Some(g) = self.grain(j) {
                if g.domain.contains(x).in_closure() {
                    offer(g.ev.lambda(x), Some(g.domain.clone()), LowerConstruction::Grain);
                }
            }
        }
        let (bound, reference, construction) = best;
        Ok(LowerBound { bound, reference, regime, construction })
    }
}

/// Witness before projection onto the domain's basis.
enum Witness {
    Planar(Needle),
    Kernel { poly: BivariatePoly, center: Point2, radius: f64 },
}

impl Witness {
    fn eval(&self, y: Point2) -> f64 {
        match self {
            Witness::Planar(n) => n.eval(y),
            Witness::Kernel { poly, center, radius } => poly.eval((y - *center) / *radius),
        }
    }
}

/// `∫_D P²` for an admissible witness `P`; never below `λ_n(D, x)`.
pub fn certified_upper_bound(domain: &Domain, x: Point2, n: usize) -> Result<(f64, BivariatePoly)> {
    let b = CertifiedBounds::new(domain, n, BoundsConfig::default())?.upper(x)?;
    Ok((b.bound, b.witness))
}

/// `λ_n` of a reference domain inscribed in `D`; never above `λ_n(D, x)`.
pub fn certified_lower_bound(domain: &Domain, x: Point2, n: usize) -> Result<(f64, Option<Domain>)> {
    let b = CertifiedBounds::new(domain, n, BoundsConfig::default())?.lower(x)?;
    Ok((b.bound, b.reference))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(d: &Domain, n: usize) -> CertifiedBounds {
        CertifiedBounds::new(d, n, BoundsConfig::default()).unwrap()
    }

    #[test]
    fn deep_interior_of_disc() {
        let b = bounds(&gallery::disc(), 8);
        let x = Point2::new(0.1, -0.2);
        let lam = b.evaluator().lambda(x);
        let up = b.upper(x).unwrap();
        assert_eq!(up.regime, Regime::Interior);
        assert!((up.witness.eval(x) - 1.0).abs() < 1e-10);
        assert!(up.bound >= lam * (1.0 - 1e-8) && up.bound <= 100.0 * lam, "{} {lam}", up.bound);
        let low = b.lower(x).unwrap();
        assert!(low.bound <= lam * (1.0 + 1e-8));
    }

    #[test]
    fn centered_disc_is_exact_at_origin() {
        let b = bounds(&gallery::disc(), 6);
        let lam = b.evaluator().lambda(Point2::ORIGIN);
        let low = b.lower(Point2::ORIGIN).unwrap();
        assert_eq!(low.construction, LowerConstruction::CenteredDisc);
        assert!((low.bound - lam).abs() <= 1e-8 * lam);
    }

    #[test]
    fn half_disc_lower_bound() {
        let b = bounds(&gallery::half_disc(), 6);
        for x in [Point2::new(0.0, 0.5), Point2::new(0.3, 0.1), Point2::new(-0.6, 0.6)] {
            let lam = b.evaluator().lambda(x);
            let low = b.lower(x).unwrap();
            assert!(low.bound > 0.0 && low.bound <= lam * (1.0 + 1e-8), "{x:?}: {} vs {lam}", low.bound);
        }
    }

    #[test]
    fn regimes_and_constructions_on_square() {
        let b = bounds(&gallery::square(), 8);
        let edge = Point2::new(0.0, -0.99);
        assert_eq!(b.regime(edge), Regime::Edge);
        assert_eq!(b.upper(edge).unwrap().construction, UpperConstruction::Annulus);
        let corner = Point2::new(0.98, 0.97);
        assert!(matches!(b.regime(corner), Regime::Corner(_)));
        let up = b.upper(corner).unwrap();
        assert_eq!(up.construction, UpperConstruction::TwoAnnuli);
        let lam = b.evaluator().lambda(corner);
        assert!(up.bound >= lam * (1.0 - 1e-8));
        let low = b.lower(corner).unwrap();
        assert_eq!(low.construction, LowerConstruction::Grain);
        assert!(low.bound <= lam * (1.0 + 1e-8));
    }

    #[test]
    fn lens_corner_sandwich() {
        let d = gallery::lens(1.0).unwrap();
        let b = bounds(&d, 16);
        let v = d.corners()[0].vertex;
        let x = v + (Point2::ORIGIN - v).normalized() * 0.02;
        let lam = b.evaluator().lambda(x);
        let up = b.upper(x).unwrap();
        let low = b.lower(x).unwrap();
        assert!(low.bound <= lam * (1.0 + 1e-8) && lam <= up.bound * (1.0 + 1e-8));
        assert!(up.bound / lam < 1e3, "{}", up.bound / lam);
    }

    #[test]
    fn rejects_outside_points() {
        let b = bounds(&gallery::square(), 4);
        assert!(b.upper(Point2::new(2.0, 0.0)).is_err());
        assert!(b.lower(Point2::new(2.0, 0.0)).is_err());
    }
}
