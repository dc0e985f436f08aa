use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::univariate::{univariate_needle, UnivariatePoly};
use crate::christoffel::BivariatePoly;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryLoop, BoundingBox, Curve, Domain, Point2};
use crate::quadrature::rules::gauss_legendre;
use crate::quadrature::PolyBasis;

/// Default ζ in the two-annuli hypotheses.
pub const DEFAULT_ZETA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Factor {
    /// `q((r2² − |y − c|²) / (r2² − r1²))`.
    Radial { center: Point2, r1: f64, r2: f64, q: UnivariatePoly },
    /// `q(dir · (y − origin) / scale)`.
    Linear { origin: Point2, dir: Point2, scale: f64, q: UnivariatePoly },
}

impl Factor {
    fn eval(&self, y: Point2) -> f64 {
        match self {
            Factor::Radial { center, r1, r2, q } => {
                q.eval((r2 * r2 - (y - *center).norm_sq()) / (r2 * r2 - r1 * r1))
            }
            Factor::Linear { origin, dir, scale, q } => q.eval(dir.dot(y - *origin) / scale),
        }
    }

    fn degree(&self) -> usize {
        match self {
            Factor::Radial { q, .. } => 2 * q.degree(),
            Factor::Linear { q, .. } => q.degree(),
        }
    }
}

/// A product of ridge and radial needles, evaluated in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Needle {
    factors: Vec<Factor>,
}

fn check_radii(r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::InvalidParameter(format!("radii must satisfy 0 < r1 < r2, got {r1}, {r2}")));
    }
    Ok(())
}

fn radial_factor(n: usize, center: Point2, r1: f64, r2: f64, lam: f64) -> Result<Factor> {
    check_radii(r1, r2)?;
    if !(lam >= r1 && lam <= r2) {
        return Err(Error::InvalidParameter(format!("anchor radius {lam} outside [{r1}, {r2}]")));
    }
    let t = ((lam * lam - r1 * r1) / (r2 * r2 - r1 * r1)).clamp(0.0, 1.0);
    Ok(Factor::Radial { center, r1, r2, q: univariate_needle(n, t)? })
}

impl Needle {
    /// Equal to 1 on the circle `|y − center| = lam`; degree at most `n`.
    pub fn radial(n: usize, center: Point2, r1: f64, r2: f64, lam: f64) -> Result<Needle> {
        Ok(Needle { factors: vec![radial_factor(n, center, r1, r2, lam)?] })
    }

    /// Radial needle of degree `n/2` times a ridge needle across `direction`,
    /// equal to 1 at `center + lam·direction`.
    pub fn narrowed(n: usize, center: Point2, r1: f64, r2: f64, lam: f64, direction: Point2) -> Result<Needle> {
        if n < 2 {
            return Err(Error::InvalidParameter("narrowed needle needs degree at least 2".into()));
        }
        let u = direction.normalized();
        let radial = radial_factor(n / 2, center, r1, r2, lam)?;
        let ridge = Factor::Linear { origin: center, dir: u.perp(), scale: r2, q: univariate_needle(n, 1.0)? };
        Ok(Needle { factors: vec![radial, ridge] })
    }

    /// Product of two radial needles of degree `n/2` about `c1`, `c2`, each
    /// anchored at the circle through `x`.
    pub fn two_annuli(n: usize, c1: Point2, c2: Point2, r1: f64, r2: f64, x: Point2) -> Result<Needle> {
        if n < 2 {
            return Err(Error::InvalidParameter("two-annuli needle needs degree at least 2".into()));
        }
        let lam = |c: Point2| x.distance(c).clamp(r1, r2);
        Ok(Needle {
            factors: vec![
                radial_factor(n / 2, c1, r1, r2, lam(c1))?,
                radial_factor(n / 2, c2, r1, r2, lam(c2))?,
            ],
        })
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(Factor::degree).sum()
    }

    pub fn eval(&self, y: Point2) -> f64 {
        self.factors.iter().map(|f| f.eval(y)).product()
    }

    /// Expansion in `basis`, exact up to rounding when `basis` has degree at
    /// least [`Needle::degree`].
    pub fn to_poly(&self, basis: &PolyBasis) -> Result<BivariatePoly> {
        if basis.degree() < self.degree() {
            return Err(Error::InvalidParameter(format!(
                "basis degree {} below needle degree {}",
                basis.degree(),
                self.degree()
            )));
        }
        Ok(BivariatePoly::project(basis, |y| self.eval(y)))
    }
}

fn square_box(center: Point2, half: f64) -> BoundingBox {
    BoundingBox { min: center - Point2::new(half, half), max: center + Point2::new(half, half) }
}

/// Radial needle about the origin for the annulus `r1 ≤ |y| ≤ r2`.
pub fn radial_needle(n: usize, r1: f64, r2: f64, lam: f64) -> Result<BivariatePoly> {
    let needle = Needle::radial(n, Point2::ORIGIN, r1, r2, lam)?;
    needle.to_poly(&PolyBasis::new(n, square_box(Point2::ORIGIN, r2))?)
}

/// Narrowed annulus needle equal to 1 at `(lam, 0)`.
pub fn narrowed_annulus_needle(n: usize, r1: f64, r2: f64, lam: f64) -> Result<BivariatePoly> {
    let needle = Needle::narrowed(n, Point2::ORIGIN, r1, r2, lam, Point2::new(1.0, 0.0))?;
    needle.to_poly(&PolyBasis::new(n, square_box(Point2::ORIGIN, r2))?)
}

/// Hypothesis check for the two-annuli configuration with centers
/// `c_i = (−1)^i (0, r1 h)`.
pub fn two_annuli_preconditions(r1: f64, r2: f64, h: f64, x: Point2, zeta: f64) -> Result<(Point2, Point2)> {
    if !(zeta > 0.0 && zeta < 0.5) {
        return Err(Error::Precondition(format!("ζ = {zeta} must lie in (0, 1/2)")));
    }
    check_radii(r1, r2)?;
    if !(h >= zeta && h <= 1.0 - zeta) {
        return Err(Error::Precondition(format!("offset h = {h} outside [ζ, 1 − ζ] = [{zeta}, {}]", 1.0 - zeta)));
    }
    let c1 = Point2::new(0.0, -r1 * h);
    let c2 = Point2::new(0.0, r1 * h);
    let tol = 1e-12 * r2;
    for (i, c) in [c1, c2].iter().enumerate() {
        let d = x.distance(*c);
        if d < r1 - tol || d > r2 + tol {
            return Err(Error::Precondition(format!("x is not in annulus {}: |x − c| = {d}", i + 1)));
        }
        if d > (1.0 + 0.5 * zeta) * r1 + tol {
            return Err(Error::Precondition(format!(
                "|x − c_{}| = {d} exceeds (1 + ζ/2) r1 = {}",
                i + 1,
                (1.0 + 0.5 * zeta) * r1
            )));
        }
    }
    Ok((c1, c2))
}

/// Two-annuli needle in the canonical frame, with [`DEFAULT_ZETA`].
pub fn two_annuli_needle(n: usize, r1: f64, r2: f64, h: f64, x: Point2) -> Result<BivariatePoly> {
    two_annuli_needle_with_zeta(n, r1, r2, h, x, DEFAULT_ZETA)
}

pub fn two_annuli_needle_with_zeta(n: usize, r1: f64, r2: f64, h: f64, x: Point2, zeta: f64) -> Result<BivariatePoly> {
    let (c1, c2) = two_annuli_preconditions(r1, r2, h, x, zeta)?;
    let needle = Needle::two_annuli(n, c1, c2, r1, r2, x)?;
    let half = r2 + r1 * h;
    needle.to_poly(&PolyBasis::new(n, square_box(Point2::ORIGIN, half))?)
}

/// Boundary arcs of `B(c1, r) ∩ B(c2, r)`, counterclockwise.
fn lens_arcs(c1: Point2, c2: Point2, r: f64) -> Result<Vec<Curve>> {
    let d = c1.distance(c2);
    if !(d > 0.0 && d < 2.0 * r) {
        return Err(Error::InvalidDomain(format!("discs of radius {r} at distance {d} do not form a lens")));
    }
    let phi = (0.5 * d / r).acos();
    let a12 = (c2 - c1).angle();
    Ok(vec![Curve::arc(c1, r, a12 - phi, 2.0 * phi), Curve::arc(c2, r, a12 + PI - phi, 2.0 * phi)])
}

/// `B(c1, r) ∩ B(c2, r)`: a grain.
pub fn disc_intersection(c1: Point2, c2: Point2, r: f64) -> Result<Domain> {
    Domain::new(vec![BoundaryLoop::outer(lens_arcs(c1, c2, r)?)])
}

/// `{r1 ≤ |y − c1| ≤ r2} ∩ {r1 ≤ |y − c2| ≤ r2}` when the union of the inner
/// discs lies inside the outer lens.
pub fn annuli_intersection(c1: Point2, c2: Point2, r1: f64, r2: f64) -> Result<Domain> {
    check_radii(r1, r2)?;
    let d = c1.distance(c2);
    if !(d > 0.0 && d < 2.0 * r1) || d + r1 >= r2 {
        return Err(Error::InvalidDomain(format!(
            "annuli with radii {r1}, {r2} and center distance {d} do not meet in a lens with one hole"
        )));
    }
    let phi = (0.5 * d / r1).acos();
    let a12 = (c2 - c1).angle();
    let sweep = 2.0 * PI - 2.0 * phi;
    // The peanut r1-hole, traced counterclockwise and then reversed.
    let hole = BoundaryLoop::hole(vec![
        Curve::arc(c1, r1, a12 + phi, sweep),
        Curve::arc(c2, r1, a12 + PI + phi, sweep),
    ])
    .reversed();
    Domain::new(vec![BoundaryLoop::outer(lens_arcs(c1, c2, r2)?), hole])
}

/// `∫ f` over `r1 ≤ |y − c| ≤ r2` in polar coordinates; exact for polynomials
/// of total degree at most `degree`.
pub fn annulus_integral<F: Fn(Point2) -> f64 + Sync>(center: Point2, r1: f64, r2: f64, degree: usize, f: F) -> f64 {
    let (x, w) = gauss_legendre(degree / 2 + 2);
    let m = degree + 2;
    let half = 0.5 * (r2 - r1);
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let r = r1 + half * (x[i] + 1.0);
            let ring: f64 = (0..m)
                .map(|k| f(center + Point2::polar(r, 2.0 * PI * k as f64 / m as f64)))
                .sum();
            w[i] * half * r * ring * 2.0 * PI / m as f64
        })
        .sum()
}
