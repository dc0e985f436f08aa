use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::curve::NearestPoint;
use super::{point_segment_distance, segments_intersect, Affine2, BoundingBox, Curve, Point2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Traversed counterclockwise.
    Outer,
    /// Traversed clockwise.
    Hole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLoop {
    pub orientation: Orientation,
    pub curves: Vec<Curve>,
}

impl BoundaryLoop {
    pub fn outer(curves: Vec<Curve>) -> Self {
        BoundaryLoop { orientation: Orientation::Outer, curves }
    }

    pub fn hole(curves: Vec<Curve>) -> Self {
        BoundaryLoop { orientation: Orientation::Hole, curves }
    }

    pub fn reversed(&self) -> Self {
        BoundaryLoop {
            orientation: self.orientation,
            curves: self.curves.iter().rev().map(Curve::reversed).collect(),
        }
    }
}

/// Tolerances for domain validation and queries. Relative entries are
/// multiplied by the domain diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Junctions whose turning angle is within this many radians of π are smooth.
    pub tol_angle: f64,
    /// Corner arm length; `None` uses `min(L/3, 0.1·diam)` per corner.
    pub arm_length: Option<f64>,
    pub join_rel: f64,
    pub flatten_rel: f64,
    pub boundary_rel: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            tol_angle: 1e-6,
            arm_length: None,
            join_rel: 1e-9,
            flatten_rel: 1e-6,
            boundary_rel: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveRef {
    pub loop_index: usize,
    pub curve_index: usize,
    /// Position in [`Domain::curves`].
    pub global: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerData {
    pub vertex: Point2,
    /// Interior angle in `(0, 2π)`.
    pub angle: f64,
    /// Curve ending at the vertex.
    pub incoming: CurveRef,
    /// Curve starting at the vertex.
    pub outgoing: CurveRef,
    /// Final portion of the incoming curve, ending at the vertex.
    pub arm_minus: Curve,
    /// Initial portion of the outgoing curve, starting at the vertex.
    pub arm_plus: Curve,
    pub arm_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    pub fn in_closure(self) -> bool {
        self != Membership::Outside
    }
}

#[derive(Debug, Clone)]
struct Polygon {
    points: Vec<Point2>,
}

/// A bounded open set whose boundary is a finite union of closed loops of
/// regular curves.
#[derive(Debug, Clone)]
pub struct Domain {
    loops: Vec<BoundaryLoop>,
    refs: Vec<CurveRef>,
    curves: Vec<Curve>,
    corners: Vec<CornerData>,
    polygons: Vec<Polygon>,
    bbox: BoundingBox,
    diameter: f64,
    polygon_area: f64,
    config: GeometryConfig,
}

impl Domain {
    pub fn new(loops: Vec<BoundaryLoop>) -> Result<Domain> {
        Self::with_config(loops, GeometryConfig::default())
    }

    pub fn with_config(loops: Vec<BoundaryLoop>, config: GeometryConfig) -> Result<Domain> {
        if loops.is_empty() {
            return Err(Error::InvalidDomain("no boundary loops".into()));
        }
        let mut refs = Vec::new();
        let mut curves = Vec::new();
        for (li, lp) in loops.iter().enumerate() {
            if lp.curves.is_empty() {
                return Err(Error::InvalidDomain(format!("loop {li} has no curves")));
            }
            for (ci, c) in lp.curves.iter().enumerate() {
                refs.push(CurveRef { loop_index: li, curve_index: ci, global: curves.len() });
                curves.push(c.clone());
            }
        }

        let coarse: Vec<Point2> = curves
            .iter()
            .flat_map(|c| (0..=64).map(move |k| c.point(k as f64 / 64.0)))
            .collect();
        if coarse.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidDomain("non-finite curve coordinates".into()));
        }
        let diameter = point_set_diameter(&coarse);
        if diameter <= 0.0 {
            return Err(Error::InvalidDomain("domain has zero extent".into()));
        }

        for r in &refs {
            check_regular(&curves[r.global], r)?;
        }
        let join_tol = config.join_rel * diameter;
        for (li, lp) in loops.iter().enumerate() {
            let k = lp.curves.len();
            for ci in 0..k {
                let gap = lp.curves[ci].end().distance(lp.curves[(ci + 1) % k].start());
                if gap > join_tol {
                    return Err(Error::OpenChain { loop_index: li, curve: ci, gap });
                }
            }
        }

        let flat_tol = config.flatten_rel * diameter;
        let mut polygons = Vec::new();
        for lp in &loops {
            let mut points = Vec::new();
            for c in &lp.curves {
                let mut pts = vec![c.point(0.0)];
                flatten(c, 0.0, 1.0, c.point(0.0), c.point(1.0), flat_tol, 0, &mut pts);
                pts.pop();
                points.extend(pts);
            }
            polygons.push(Polygon { points });
        }

        let mut polygon_area = 0.0;
        for (li, (lp, poly)) in loops.iter().zip(&polygons).enumerate() {
            let a = shoelace(&poly.points);
            let ok = match lp.orientation {
                Orientation::Outer => a > 0.0,
                Orientation::Hole => a < 0.0,
            };
            if !ok {
                return Err(Error::InvalidDomain(format!(
                    "loop {li} is traversed against its declared {:?} orientation",
                    lp.orientation
                )));
            }
            polygon_area += a;
        }
        if polygon_area <= 0.0 {
            return Err(Error::InvalidDomain("enclosed area is not positive".into()));
        }

        check_simple(&loops, &curves, &refs)?;
        check_holes(&loops, &polygons)?;

        let bbox = BoundingBox::from_points(polygons.iter().flat_map(|p| p.points.iter().copied()))
            .expect("non-empty boundary");

        let mut domain = Domain {
            loops,
            refs,
            curves,
            corners: Vec::new(),
            polygons,
            bbox,
            diameter,
            polygon_area,
            config,
        };
        domain.corners = domain.find_corners(config.tol_angle, config.arm_length)?;
        domain.warn_curvature_jumps();
        Ok(domain)
    }

    pub fn loops(&self) -> &[BoundaryLoop] {
        &self.loops
    }

    /// All boundary curves in loop order.
    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve_refs(&self) -> &[CurveRef] {
        &self.refs
    }

    pub fn corners(&self) -> &[CornerData] {
        &self.corners
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn config(&self) -> &GeometryConfig {
        &self.config
    }

    /// Area of the flattened boundary polygon; accurate to the flattening tolerance.
    pub fn polygon_area(&self) -> f64 {
        self.polygon_area
    }

    /// Scale `0.1·diam` separating the near-corner and near-boundary regimes.
    pub fn delta_geom(&self) -> f64 {
        0.1 * self.diameter
    }

    pub fn boundary_tolerance(&self) -> f64 {
        self.config.boundary_rel * self.diameter
    }

    /// Flattened boundary polygon of loop `i`.
    pub fn polyline(&self, i: usize) -> &[Point2] {
        &self.polygons[i].points
    }

    /// Area centroid of the flattened boundary.
    pub fn polygon_centroid(&self) -> Point2 {
        let mut a = 0.0;
        let mut c = Point2::ORIGIN;
        for poly in &self.polygons {
            let p = &poly.points;
            for i in 0..p.len() {
                let (u, v) = (p[i], p[(i + 1) % p.len()]);
                let w = u.cross(v);
                a += w;
                c += (u + v) * w;
            }
        }
        c / (3.0 * a)
    }

    /// Interior angles `α_j` of all corners.
    pub fn corner_angles(&self) -> Vec<f64> {
        self.corners.iter().map(|c| c.angle).collect()
    }

    /// Distance from `x` to the curve with global index `i`.
    pub fn distance_to_curve(&self, x: Point2, i: usize) -> NearestPoint {
        self.curves[i].nearest_point(x)
    }

    /// Nearest boundary point over all curves.
    pub fn nearest_boundary_point(&self, x: Point2) -> (usize, NearestPoint) {
        let mut best = (0, self.curves[0].nearest_point(x));
        for (i, c) in self.curves.iter().enumerate().skip(1) {
            let q = c.nearest_point(x);
            if q.distance < best.1.distance {
                best = (i, q);
            }
        }
        best
    }

    pub fn boundary_distance(&self, x: Point2) -> f64 {
        self.nearest_boundary_point(x).1.distance
    }

    pub fn distance_to_corners(&self, x: Point2) -> f64 {
        self.corners
            .iter()
            .map(|c| c.vertex.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Outward unit normal of curve `i` at parameter `s`.
    pub fn outward_normal(&self, i: usize, s: f64) -> Point2 {
        let t = self.curves[i].tangent(s);
        Point2::new(t.y, -t.x)
    }

    /// Classifies `x` against the closure of the domain.
    pub fn contains(&self, x: Point2) -> Membership {
        let flat_tol = self.config.flatten_rel * self.diameter;
        let bdry_tol = self.boundary_tolerance();
        if !self.bbox.expanded(2.0 * flat_tol + bdry_tol).contains(x) {
            return Membership::Outside;
        }
        let mut inside = false;
        let mut near = f64::INFINITY;
        for poly in &self.polygons {
            let p = &poly.points;
            let m = p.len();
            for i in 0..m {
                let (a, b) = (p[i], p[(i + 1) % m]);
                if (a.y > x.y) != (b.y > x.y) {
                    let xc = a.x + (x.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if x.x < xc {
                        inside = !inside;
                    }
                }
                let lo_x = a.x.min(b.x) - near;
                let hi_x = a.x.max(b.x) + near;
                if x.x >= lo_x && x.x <= hi_x {
                    near = near.min(point_segment_distance(x, a, b));
                }
            }
        }
        if near > 2.0 * flat_tol + bdry_tol {
            return if inside { Membership::Inside } else { Membership::Outside };
        }
        let (i, q) = self.nearest_boundary_point(x);
        if q.distance <= bdry_tol {
            return Membership::Boundary;
        }
        if q.s > 1e-9 && q.s < 1.0 - 1e-9 {
            let u = self.outward_normal(i, q.s);
            if (x - q.point).dot(u) > 0.0 {
                Membership::Outside
            } else {
                Membership::Inside
            }
        } else if inside {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// Recomputes the corner set with a different angle tolerance.
    pub fn detect_corners(&self, tol_angle: f64) -> Result<Vec<CornerData>> {
        self.find_corners(tol_angle, self.config.arm_length)
    }

    fn find_corners(&self, tol_angle: f64, arm: Option<f64>) -> Result<Vec<CornerData>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for lp in &self.loops {
            let k = lp.curves.len();
            for ci in 0..k {
                let next = (ci + 1) % k;
                let a = &lp.curves[ci];
                let b = &lp.curves[next];
                let t_minus = a.tangent(1.0);
                let t_plus = b.tangent(0.0);
                let mut angle = (-t_minus).angle() - t_plus.angle();
                angle = angle.rem_euclid(2.0 * PI);
                if (angle - PI).abs() <= tol_angle {
                    continue;
                }
                if angle < 1e-9 || angle > 2.0 * PI - 1e-9 {
                    return Err(Error::InvalidDomain("boundary has a cusp".into()));
                }
                let incoming = self.refs[offset + ci];
                let outgoing = self.refs[offset + next];
                let limit = a.length().min(b.length());
                let eps = arm.unwrap_or_else(|| (limit / 3.0).min(self.delta_geom()));
                let (arm_minus, arm_plus) = make_arms(a, b, eps)?;
                out.push(CornerData {
                    vertex: b.start(),
                    angle,
                    incoming,
                    outgoing,
                    arm_minus,
                    arm_plus,
                    arm_length: eps,
                });
            }
            offset += k;
        }
        Ok(out)
    }

    /// Arms of corner `j` of length `eps`, as (incoming, outgoing).
    pub fn corner_arms(&self, j: usize, eps: f64) -> Result<(Curve, Curve)> {
        let c = self
            .corners
            .get(j)
            .ok_or_else(|| Error::InvalidParameter(format!("no corner with index {j}")))?;
        make_arms(&self.curves[c.incoming.global], &self.curves[c.outgoing.global], eps)
    }

    fn warn_curvature_jumps(&self) {
        for lp in &self.loops {
            let k = lp.curves.len();
            for ci in 0..k {
                let a = lp.curves[ci].at(1.0);
                let b = lp.curves[(ci + 1) % k].at(0.0);
                let (ta, tb) = (a.d1.normalized(), b.d1.normalized());
                if ta.dot(tb) < 1.0 - 1e-10 {
                    continue;
                }
                let ka = a.d1.cross(a.d2) / a.d1.norm().powi(3);
                let kb = b.d1.cross(b.d2) / b.d1.norm().powi(3);
                if (ka - kb).abs() > 1e-6 * (1.0 + ka.abs().max(kb.abs())) {
                    log::warn!(
                        "curvature jumps from {ka:.6} to {kb:.6} at a smooth junction near ({:.4}, {:.4})",
                        b.pos.x,
                        b.pos.y
                    );
                }
            }
        }
    }

    /// Image under an invertible affine map; orientation-reversing maps
    /// reverse every loop so the domain stays on the left of its boundary.
    pub fn transformed(&self, t: &Affine2) -> Result<Domain> {
        let flip = t.det() < 0.0;
        let loops = self
            .loops
            .iter()
            .map(|lp| {
                let mapped = BoundaryLoop {
                    orientation: lp.orientation,
                    curves: lp.curves.iter().map(|c| c.transformed(t)).collect(),
                };
                if flip { mapped.reversed() } else { mapped }
            })
            .collect();
        let mut config = self.config;
        config.arm_length = config.arm_length.map(|a| a * t.det().abs().sqrt());
        Domain::with_config(loops, config)
    }
}

/// The homothetic copy `x + μ(D − x)`.
pub fn homothety(domain: &Domain, x: Point2, mu: f64) -> Result<Domain> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("homothety ratio {mu} must be positive")));
    }
    domain.transformed(&Affine2::scaling_about(x, mu))
}

fn make_arms(a: &Curve, b: &Curve, eps: f64) -> Result<(Curve, Curve)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("arm length {eps} must be positive")));
    }
    let (la, lb) = (a.length(), b.length());
    let limit = 0.5 * la.min(lb);
    if eps > limit {
        return Err(Error::ArmTooLong { requested: eps, limit });
    }
    let minus = a.restrict(a.param_at_length(la - eps), 1.0);
    let plus = b.restrict(0.0, b.param_at_length(eps));
    let pm: Vec<Point2> = (0..=32).map(|k| minus.point(k as f64 / 32.0)).collect();
    let pp: Vec<Point2> = (0..=32).map(|k| plus.point(k as f64 / 32.0)).collect();
    for i in 0..31 {
        for j in 1..32 {
            if segments_intersect(pm[i], pm[i + 1], pp[j], pp[j + 1]) {
                return Err(Error::SelfIntersection("corner arms meet away from the vertex".into()));
            }
        }
    }
    Ok((minus, plus))
}

fn check_regular(c: &Curve, r: &CurveRef) -> Result<()> {
    let speeds: Vec<f64> = (0..=64).map(|k| c.at(k as f64 / 64.0).d1.norm()).collect();
    let scale = speeds.iter().cloned().fold(0.0, f64::max);
    for (k, v) in speeds.iter().enumerate() {
        if !(*v > 1e-10 * scale) || scale == 0.0 {
            return Err(Error::DegenerateCurve {
                loop_index: r.loop_index,
                curve: r.curve_index,
                s: k as f64 / 64.0,
            });
        }
    }
    Ok(())
}

fn flatten(c: &Curve, s0: f64, s1: f64, p0: Point2, p1: Point2, tol: f64, depth: u32, out: &mut Vec<Point2>) {
    let sm = 0.5 * (s0 + s1);
    let pm = c.point(sm);
    let q1 = c.point(0.5 * (s0 + sm));
    let q3 = c.point(0.5 * (sm + s1));
    let dev = point_segment_distance(pm, p0, p1)
        .max(point_segment_distance(q1, p0, p1))
        .max(point_segment_distance(q3, p0, p1));
    if depth < 3 || (dev > tol && depth < 24) {
        flatten(c, s0, sm, p0, pm, tol, depth + 1, out);
        flatten(c, sm, s1, pm, p1, tol, depth + 1, out);
    } else {
        out.push(p1);
    }
}

fn shoelace(p: &[Point2]) -> f64 {
    let m = p.len();
    0.5 * (0..m).map(|i| p[i].cross(p[(i + 1) % m])).sum::<f64>()
}

fn point_set_diameter(p: &[Point2]) -> f64 {
    let mut d2: f64 = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            d2 = d2.max((p[i] - p[j]).norm_sq());
        }
    }
    d2.sqrt()
}

fn check_simple(loops: &[BoundaryLoop], curves: &[Curve], refs: &[CurveRef]) -> Result<()> {
    const PER_CURVE: usize = 32;
    let mut loop_polys: Vec<Vec<Point2>> = Vec::new();
    let mut start = 0;
    for lp in loops {
        let mut pts = Vec::new();
        for g in start..start + lp.curves.len() {
            pts.extend((0..PER_CURVE).map(|k| curves[g].point(k as f64 / PER_CURVE as f64)));
        }
        start += lp.curves.len();
        loop_polys.push(pts);
    }
    let _ = refs;
    for (li, p) in loop_polys.iter().enumerate() {
        let m = p.len();
        for i in 0..m {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                if segments_intersect(p[i], p[(i + 1) % m], p[j], p[(j + 1) % m]) {
                    return Err(Error::SelfIntersection(format!("loop {li} crosses itself")));
                }
            }
        }
    }
    for a in 0..loop_polys.len() {
        for b in a + 1..loop_polys.len() {
            let (p, q) = (&loop_polys[a], &loop_polys[b]);
            for i in 0..p.len() {
                for j in 0..q.len() {
                    if segments_intersect(p[i], p[(i + 1) % p.len()], q[j], q[(j + 1) % q.len()]) {
                        return Err(Error::SelfIntersection(format!("loops {a} and {b} intersect")));
                    }
                }
            }
        }
    }
    Ok(())
}

fn polygon_contains(p: &[Point2], x: Point2) -> bool {
    let m = p.len();
    let mut inside = false;
    for i in 0..m {
        let (a, b) = (p[i], p[(i + 1) % m]);
        if (a.y > x.y) != (b.y > x.y) {
            let xc = a.x + (x.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x.x < xc {
                inside = !inside;
            }
        }
    }
    inside
}

fn check_holes(loops: &[BoundaryLoop], polys: &[Polygon]) -> Result<()> {
    for (hi, lp) in loops.iter().enumerate() {
        if lp.orientation != Orientation::Hole {
            continue;
        }
        let probe = polys[hi].points[0];
        let count = loops
            .iter()
            .zip(polys)
            .filter(|(l, p)| l.orientation == Orientation::Outer && polygon_contains(&p.points, probe))
            .count();
        if count != 1 {
            return Err(Error::InvalidDomain(format!(
                "hole {hi} lies inside {count} outer loops (expected exactly one)"
            )));
        }
    }
    Ok(())
}
