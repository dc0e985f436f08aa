//! Reference domains used by the experiments.

use std::f64::consts::PI;

use super::{BoundaryLoop, Curve, Domain, Point2};
use crate::error::{Error, Result};

fn build(curves: Vec<Curve>) -> Domain {
    Domain::new(vec![BoundaryLoop::outer(curves)]).expect("gallery domain is valid")
}

fn polygon(vertices: &[Point2]) -> Vec<Curve> {
    (0..vertices.len())
        .map(|i| Curve::segment(vertices[i], vertices[(i + 1) % vertices.len()]))
        .collect()
}

/// Unit disc.
pub fn disc() -> Domain {
    build(vec![Curve::arc(Point2::ORIGIN, 1.0, 0.0, 2.0 * PI)])
}

/// `[-1, 1]²`.
pub fn square() -> Domain {
    let p = Point2::new;
    build(polygon(&[p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)]))
}

/// Equilateral triangle inscribed in the unit circle.
pub fn triangle() -> Domain {
    let v: Vec<Point2> = [-30.0f64, 90.0, 210.0]
        .iter()
        .map(|d| Point2::polar(1.0, d.to_radians()))
        .collect();
    build(polygon(&v))
}

/// `B ∩ (B + (0, h))` for the unit disc `B`, `0 < h < 2`.
pub fn lens(h: f64) -> Result<Domain> {
    if !(h > 0.0 && h < 2.0) {
        return Err(Error::InvalidParameter(format!("lens offset {h} must lie in (0, 2)")));
    }
    let a = (1.0 - 0.25 * h * h).sqrt();
    let phi = (0.5 * h).atan2(a);
    Ok(build(vec![
        Curve::arc(Point2::ORIGIN, 1.0, phi, PI - 2.0 * phi),
        Curve::arc(Point2::new(0.0, h), 1.0, PI + phi, PI - 2.0 * phi),
    ]))
}

/// Exact area of [`lens`].
pub fn lens_area(h: f64) -> f64 {
    let th = (0.5 * h).acos();
    2.0 * (th - th.sin() * th.cos())
}

/// Smooth star-shaped domain `r(θ) = 1 + 0.3 cos 3θ`.
pub fn blob() -> Domain {
    build(vec![Curve::polar(Point2::ORIGIN, vec![1.0, 0.0, 0.0, 0.3], vec![], 0.0, 2.0 * PI)])
}

/// Convex hull of the unit disc and a point below it: one corner of angle π/4.
pub fn drop() -> Domain {
    let apex = Point2::new(0.0, -1.0 / (PI / 8.0).sin());
    let a0 = -PI / 8.0;
    let sweep = 5.0 * PI / 4.0;
    let t0 = Point2::polar(1.0, a0);
    let t1 = Point2::polar(1.0, a0 + sweep);
    build(vec![
        Curve::segment(apex, t0),
        Curve::arc(Point2::ORIGIN, 1.0, a0, sweep),
        Curve::segment(t1, apex),
    ])
}

/// Upper half of the unit disc.
pub fn half_disc() -> Domain {
    build(vec![
        Curve::arc(Point2::ORIGIN, 1.0, 0.0, PI),
        Curve::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)),
    ])
}

pub fn annulus(inner: f64, outer: f64) -> Result<Domain> {
    if !(inner > 0.0 && outer > inner) {
        return Err(Error::InvalidParameter("annulus radii must satisfy 0 < inner < outer".into()));
    }
    Domain::new(vec![
        BoundaryLoop::outer(vec![Curve::arc(Point2::ORIGIN, outer, 0.0, 2.0 * PI)]),
        BoundaryLoop::hole(vec![Curve::arc(Point2::ORIGIN, inner, 0.0, -2.0 * PI)]),
    ])
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] = ["disc", "square", "triangle", "lens", "blob", "drop", "half-disc"];

/// Looks up a gallery domain; `lens` takes an optional offset as `lens:0.5`.
pub fn by_name(name: &str) -> Result<Domain> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    match (base, arg) {
        ("disc", None) => Ok(disc()),
        ("square", None) => Ok(square()),
        ("triangle", None) => Ok(triangle()),
        ("lens", None) => lens(1.0),
        ("lens", Some(h)) => {
            let h: f64 = h
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad lens offset '{h}'")))?;
            lens(h)
        }
        ("blob", None) => Ok(blob()),
        ("drop", None) => Ok(drop()),
        ("half-disc", None) => Ok(half_disc()),
        _ => Err(Error::InvalidParameter(format!(
            "unknown gallery domain '{name}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_builds() {
        for n in NAMES {
            by_name(n).unwrap();
        }
        assert!(by_name("lens:0.5").is_ok());
        assert!(by_name("lens:3").is_err());
        assert!(by_name("hexagon").is_err());
    }

    #[test]
    fn corner_counts() {
        assert_eq!(disc().corners().len(), 0);
        assert_eq!(blob().corners().len(), 0);
        assert_eq!(square().corners().len(), 4);
        assert_eq!(triangle().corners().len(), 3);
        assert_eq!(lens(1.0).unwrap().corners().len(), 2);
        assert_eq!(half_disc().corners().len(), 2);
        let d = drop();
        assert_eq!(d.corners().len(), 1);
        assert!((d.corners()[0].angle - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn lens_angles_and_area() {
        let h = 1.0;
        let d = lens(h).unwrap();
        // The tangents at the tip are perpendicular to the radii to the two centers.
        let expected = 2.0 * (0.5 * h).acos();
        for c in d.corners() {
            assert!((c.angle - expected).abs() < 1e-12, "{}", c.angle);
        }
        assert!((d.polygon_area() - lens_area(h)).abs() < 1e-5);
        assert!((lens_area(1.0) - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn polygon_areas() {
        assert!((square().polygon_area() - 4.0).abs() < 1e-12);
        assert!((triangle().polygon_area() - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((disc().polygon_area() - PI).abs() < 1e-5);
    }
}
