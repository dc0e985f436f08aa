use std::f64::consts::PI;

use super::{segments_intersect, BoundaryLoop, Curve, Domain, Point2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point2, radius: f64) -> Self {
        Disc { center, radius }
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.distance(self.center) <= self.radius
    }

    pub fn boundary(&self) -> Curve {
        Curve::arc(self.center, self.radius, 0.0, 2.0 * PI)
    }

    pub fn to_domain(&self) -> Result<Domain> {
        Domain::new(vec![BoundaryLoop::outer(vec![self.boundary()])])
    }
}

/// The outer and inner discs `B±(r, y) = y ± r u(y)` tangent to `curve` at
/// `y`, where `u` is the outward normal of a positively oriented boundary.
pub fn tangent_discs(r: f64, y: Point2, curve: &Curve) -> Result<(Disc, Disc)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("disc radius {r} must be positive")));
    }
    let q = curve.nearest_point(y);
    let tol = 1e-9 * (1.0 + curve.length());
    if q.distance > tol {
        return Err(Error::NotOnCurve { distance: q.distance });
    }
    let t = curve.tangent(q.s);
    let u = Point2::new(t.y, -t.x);
    Ok((Disc::new(y + u * r, r), Disc::new(y - u * r, r)))
}

/// Sampled estimate of the largest `r` such that both tangent discs of
/// radius `r` meet the curve only at their point of tangency.
///
/// Bisection runs for a fixed number of steps on `[0, L]` so the result lies
/// on a fixed dyadic lattice and is reproducible.
pub fn rolling_radius_estimate(curve: &Curve, samples: usize) -> f64 {
    let samples = samples.max(8);
    let closed = curve.start().distance(curve.end()) <= 1e-12 * (1.0 + curve.length());
    let last = if closed { samples } else { samples + 1 };
    let pts: Vec<(Point2, Point2)> = (0..last)
        .map(|k| {
            let s = k as f64 / samples as f64;
            let t = curve.tangent(s);
            (curve.point(s), Point2::new(t.y, -t.x))
        })
        .collect();
    let admissible = |r: f64| {
        for (i, (y, u)) in pts.iter().enumerate() {
            for c in [*y + *u * r, *y - *u * r] {
                for (k, (z, _)) in pts.iter().enumerate() {
                    if k != i && (*z - c).norm_sq() < r * r * (1.0 + 1e-12) {
                        return false;
                    }
                }
            }
        }
        true
    };
    let (mut lo, mut hi) = (0.0, curve.length());
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The curve prolonged by tangent segments of length `len` at both ends.
///
/// The parametrization is split proportionally to arc length.
pub fn local_linear_extension(curve: &Curve, len: f64) -> Result<Curve> {
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::InvalidParameter(format!("extension length {len} must be positive")));
    }
    let a = curve.start();
    let b = curve.end();
    let head = Curve::segment(a - curve.tangent(0.0) * len, a);
    let tail = Curve::segment(b, b + curve.tangent(1.0) * len);
    let l = curve.length();
    let total = l + 2.0 * len;
    let ext = Curve::Chain {
        pieces: vec![head, curve.clone(), tail],
        breaks: vec![0.0, len / total, (len + l) / total, 1.0],
    };
    let m = 256;
    let pts: Vec<Point2> = (0..=m).map(|k| ext.point(k as f64 / m as f64)).collect();
    for i in 0..m {
        for j in i + 2..m {
            if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return Err(Error::SelfIntersection("extended curve crosses itself".into()));
            }
        }
    }
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_discs_on_unit_circle() {
        let c = Curve::arc(Point2::ORIGIN, 1.0, 0.0, 2.0 * PI);
        let y = Point2::polar(1.0, 0.3);
        let (outer, inner) = tangent_discs(0.25, y, &c).unwrap();
        assert!(outer.center.distance(y * 1.25) < 1e-12);
        assert!(inner.center.distance(y * 0.75) < 1e-12);
        assert!(matches!(
            tangent_discs(0.25, Point2::new(0.5, 0.0), &c),
            Err(Error::NotOnCurve { .. })
        ));
        assert!(tangent_discs(0.0, y, &c).is_err());
    }

    #[test]
    fn rolling_radius_of_circle_and_segment() {
        let c = Curve::arc(Point2::ORIGIN, 1.0, 0.0, 2.0 * PI);
        let r = rolling_radius_estimate(&c, 256);
        assert!((r - 1.0).abs() < 1e-3, "{r}");
        let s = Curve::segment(Point2::ORIGIN, Point2::new(1.0, 0.0));
        assert!(rolling_radius_estimate(&s, 64) > 0.99);
    }

    #[test]
    fn extension_of_quarter_arc() {
        let c = Curve::arc(Point2::ORIGIN, 1.0, 0.0, PI / 2.0);
        let e = local_linear_extension(&c, 0.5).unwrap();
        assert!(e.start().distance(Point2::new(1.0, -0.5)) < 1e-14);
        assert!(e.end().distance(Point2::new(-0.5, 1.0)) < 1e-14);
        assert!((e.length() - (PI / 2.0 + 1.0)).abs() < 1e-10);
        let mid = e.point(0.5);
        assert!((mid.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn extension_of_spiral_like_arc_fails() {
        let c = Curve::arc(Point2::ORIGIN, 1.0, 0.0, 350f64.to_radians());
        assert!(matches!(local_linear_extension(&c, 1.0), Err(Error::SelfIntersection(_))));
    }
}
