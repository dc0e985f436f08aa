//! Boundary curves, domains and the geometric queries used by the rest of the crate.

mod curve;
mod discs;
mod domain;
pub mod gallery;
mod io;

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub use curve::{Curve, CurvePoint, NearestPoint};
pub use discs::{local_linear_extension, rolling_radius_estimate, tangent_discs, Disc};
pub use domain::{
    homothety, BoundaryLoop, CornerData, CurveRef, Domain, GeometryConfig, Membership,
    Orientation,
};
pub use io::{DomainFile, LoopSpec};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2::new(a[0], a[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Point2::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point2 {
        self / self.norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    fn div(self, k: f64) -> Point2 {
        Point2::new(self.x / k, self.y / k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Affine map `z ↦ M z + t` with `M` stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine2 {
    pub m: [[f64; 2]; 2],
    pub t: Point2,
}

/// Decomposition of a similarity `z ↦ k R(φ) F z + t` where `F` is either the
/// identity or the reflection `(x, y) ↦ (x, −y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: f64,
    pub reflected: bool,
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
        t: Point2::ORIGIN,
    };

    pub fn new(m: [[f64; 2]; 2], t: Point2) -> Self {
        Affine2 { m, t }
    }

    pub fn translation(t: Point2) -> Self {
        Affine2 { t, ..Self::IDENTITY }
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Affine2::new([[c, -s], [s, c]], Point2::ORIGIN)
    }

    /// `z ↦ center + k (z − center)`.
    pub fn scaling_about(center: Point2, k: f64) -> Self {
        Affine2::new([[k, 0.0], [0.0, k]], center * (1.0 - k))
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        self.apply_vec(p) + self.t
    }

    pub fn apply_vec(&self, v: Point2) -> Point2 {
        Point2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine2) -> Affine2 {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        Affine2::new(m, self.apply(other.t))
    }

    pub fn inverse(&self) -> Option<Affine2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = [
            [self.m[1][1] / d, -self.m[0][1] / d],
            [-self.m[1][0] / d, self.m[0][0] / d],
        ];
        let inv = Affine2::new(m, Point2::ORIGIN);
        Some(Affine2::new(m, -inv.apply_vec(self.t)))
    }

    pub fn as_similarity(&self) -> Option<Similarity> {
        let [[a, b], [c, d]] = self.m;
        let scale = (a * a + c * c).sqrt();
        if scale == 0.0 {
            return None;
        }
        let tol = 1e-13 * scale;
        if (a - d).abs() <= tol && (b + c).abs() <= tol {
            Some(Similarity { scale, rotation: c.atan2(a), reflected: false })
        } else if (a + d).abs() <= tol && (b - c).abs() <= tol {
            Some(Similarity { scale, rotation: c.atan2(a), reflected: true })
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Point2,
    pub max: Point2,
}

impl BoundingBox {
    pub fn new(min: Point2, max: Point2) -> Self {
        BoundingBox { min, max }
    }

    pub fn from_points<I: IntoIterator<Item = Point2>>(pts: I) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut bb = BoundingBox::new(first, first);
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        (self.min + self.max) * 0.5
    }

    pub fn expanded(&self, pad: f64) -> Self {
        BoundingBox::new(
            self.min - Point2::new(pad, pad),
            self.max + Point2::new(pad, pad),
        )
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Closed-segment intersection test for polylines.
pub(crate) fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    // Orientations below `tol` count as collinear, so nearly collinear
    // neighbours on a mapped straight edge do not register as crossings.
    let tol = 1e-12 * ((b - a).norm() + (d - c).norm()).powi(2);
    let sign = |p: Point2, q: Point2, r: Point2| {
        let v = (q - p).cross(r - p);
        if v > tol {
            1
        } else if v < -tol {
            -1
        } else {
            0
        }
    };
    let d1 = sign(c, d, a);
    let d2 = sign(c, d, b);
    let d3 = sign(a, b, c);
    let d4 = sign(a, b, d);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    let on_seg = |p: Point2, q: Point2, r: Point2| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (d1 == 0 && on_seg(c, d, a))
        || (d2 == 0 && on_seg(c, d, b))
        || (d3 == 0 && on_seg(a, b, c))
        || (d4 == 0 && on_seg(a, b, d))
}

/// Distance from `p` to the closed segment `[a, b]`.
pub(crate) fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}
