use serde::{Deserialize, Serialize};

use super::{Affine2, Point2};
use crate::error::{Error, Result};
use crate::quadrature::rules::gauss_legendre;

/// Tolerance for accepting a parameter slightly outside `[0, 1]`.
const PARAM_SLACK: f64 = 1e-12;

/// A regular parametrized curve on `s ∈ [0, 1]`.
///
/// The first four variants are the user-facing kinds. The remaining ones are
/// produced by geometric operations (general affine images, extensions and
/// restrictions of composite curves) and are not part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Curve {
    Segment {
        start: Point2,
        end: Point2,
    },
    /// `center + radius (cos θ, sin θ)` with `θ = start_angle + s·sweep`.
    CircularArc {
        center: Point2,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// Power-basis coefficients: `x(s) = Σ x[k] s^k`.
    CubicParametric { x: [f64; 4], y: [f64; 4] },
    /// `center + r(θ) (cos θ, sin θ)` with
    /// `r(θ) = Σ_j cos[j] cos(jθ) + sin[j] sin(jθ)` and `θ` running linearly
    /// from `theta_start` to `theta_end`.
    PolarGraph {
        center: Point2,
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        theta_start: f64,
        theta_end: f64,
    },
    #[serde(skip)]
    Mapped { base: Box<Curve>, map: Affine2 },
    /// Concatenation; piece `i` covers `[breaks[i], breaks[i + 1]]`.
    #[serde(skip)]
    Chain { pieces: Vec<Curve>, breaks: Vec<f64> },
    /// `base` reparametrized from `[s0, s1]` (possibly `s0 > s1`).
    #[serde(skip)]
    Restricted { base: Box<Curve>, s0: f64, s1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub pos: Point2,
    pub d1: Point2,
    pub d2: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestPoint {
    pub s: f64,
    pub point: Point2,
    pub distance: f64,
}

impl Curve {
    pub fn segment(start: Point2, end: Point2) -> Curve {
        Curve::Segment { start, end }
    }

    pub fn arc(center: Point2, radius: f64, start_angle: f64, sweep: f64) -> Curve {
        Curve::CircularArc { center, radius, start_angle, sweep }
    }

    /// Cubic Bézier curve converted to power form.
    pub fn bezier(p0: Point2, p1: Point2, p2: Point2, p3: Point2) -> Curve {
        let coeffs = |a: f64, b: f64, c: f64, d: f64| {
            [a, 3.0 * (b - a), 3.0 * (a - 2.0 * b + c), d - a + 3.0 * (b - c)]
        };
        Curve::CubicParametric {
            x: coeffs(p0.x, p1.x, p2.x, p3.x),
            y: coeffs(p0.y, p1.y, p2.y, p3.y),
        }
    }

    pub fn polar(center: Point2, cos: Vec<f64>, sin: Vec<f64>, theta_start: f64, theta_end: f64) -> Curve {
        Curve::PolarGraph { center, cos, sin, theta_start, theta_end }
    }

    /// Position and first two derivatives, checking the parameter range.
    pub fn eval(&self, s: f64) -> Result<CurvePoint> {
        if !(-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&s) || s.is_nan() {
            return Err(Error::ParameterOutOfDomain { s });
        }
        Ok(self.at(s.clamp(0.0, 1.0)))
    }

    pub fn point(&self, s: f64) -> Point2 {
        self.at(s).pos
    }

    pub fn start(&self) -> Point2 {
        self.at(0.0).pos
    }

    pub fn end(&self) -> Point2 {
        self.at(1.0).pos
    }

    /// Unchecked evaluation; polynomial kinds extrapolate outside `[0, 1]`.
    pub fn at(&self, s: f64) -> CurvePoint {
        match self {
            Curve::Segment { start, end } => CurvePoint {
                pos: *start + (*end - *start) * s,
                d1: *end - *start,
                d2: Point2::ORIGIN,
            },
            Curve::CircularArc { center, radius, start_angle, sweep } => {
                let th = start_angle + s * sweep;
                let (sn, cs) = th.sin_cos();
                CurvePoint {
                    pos: *center + Point2::new(cs, sn) * *radius,
                    d1: Point2::new(-sn, cs) * (radius * sweep),
                    d2: Point2::new(cs, sn) * (-radius * sweep * sweep),
                }
            }
            Curve::CubicParametric { x, y } => {
                let poly = |c: &[f64; 4]| {
                    (
                        c[0] + s * (c[1] + s * (c[2] + s * c[3])),
                        c[1] + s * (2.0 * c[2] + 3.0 * s * c[3]),
                        2.0 * c[2] + 6.0 * s * c[3],
                    )
                };
                let (px, dx, ddx) = poly(x);
                let (py, dy, ddy) = poly(y);
                CurvePoint {
                    pos: Point2::new(px, py),
                    d1: Point2::new(dx, dy),
                    d2: Point2::new(ddx, ddy),
                }
            }
            Curve::PolarGraph { center, cos, sin, theta_start, theta_end } => {
                let span = theta_end - theta_start;
                let th = theta_start + s * span;
                let (mut r, mut r1, mut r2) = (0.0, 0.0, 0.0);
                for (j, a) in cos.iter().enumerate() {
                    let jf = j as f64;
                    let (sj, cj) = (jf * th).sin_cos();
                    r += a * cj;
                    r1 -= a * jf * sj;
                    r2 -= a * jf * jf * cj;
                }
                for (j, b) in sin.iter().enumerate() {
                    let jf = j as f64;
                    let (sj, cj) = (jf * th).sin_cos();
                    r += b * sj;
                    r1 += b * jf * cj;
                    r2 -= b * jf * jf * sj;
                }
                let (sn, cs) = th.sin_cos();
                let radial = Point2::new(cs, sn);
                let tangential = Point2::new(-sn, cs);
                CurvePoint {
                    pos: *center + radial * r,
                    d1: (radial * r1 + tangential * r) * span,
                    d2: (radial * (r2 - r) + tangential * (2.0 * r1)) * (span * span),
                }
            }
            Curve::Mapped { base, map } => {
                let p = base.at(s);
                CurvePoint {
                    pos: map.apply(p.pos),
                    d1: map.apply_vec(p.d1),
                    d2: map.apply_vec(p.d2),
                }
            }
            Curve::Chain { pieces, breaks } => {
                let k = pieces.len();
                let mut i = breaks[1..k].partition_point(|&b| b <= s);
                if i >= k {
                    i = k - 1;
                }
                let (a, b) = (breaks[i], breaks[i + 1]);
                let h = b - a;
                let p = pieces[i].at((s - a) / h);
                CurvePoint { pos: p.pos, d1: p.d1 / h, d2: p.d2 / (h * h) }
            }
            Curve::Restricted { base, s0, s1 } => {
                let h = s1 - s0;
                let p = base.at(s0 + s * h);
                CurvePoint { pos: p.pos, d1: p.d1 * h, d2: p.d2 * (h * h) }
            }
        }
    }

    /// Unit tangent at `s`.
    pub fn tangent(&self, s: f64) -> Point2 {
        self.at(s).d1.normalized()
    }

    /// Arc length of the sub-curve between parameters `a` and `b`.
    pub fn length_between(&self, a: f64, b: f64) -> f64 {
        match self {
            Curve::Segment { start, end } => (b - a).abs() * start.distance(*end),
            Curve::CircularArc { radius, sweep, .. } => (b - a).abs() * radius * sweep.abs(),
            Curve::Chain { pieces, breaks } => {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let mut total = 0.0;
                for (i, piece) in pieces.iter().enumerate() {
                    let (pa, pb) = (breaks[i], breaks[i + 1]);
                    let l = lo.max(pa);
                    let r = hi.min(pb);
                    if r > l {
                        let h = pb - pa;
                        total += piece.length_between((l - pa) / h, (r - pa) / h);
                    }
                }
                total
            }
            _ => {
                let (x, w) = gauss_legendre(12);
                let panels = 16;
                let h = (b - a) / panels as f64;
                let mut total = 0.0;
                for p in 0..panels {
                    let mid = a + (p as f64 + 0.5) * h;
                    for (xi, wi) in x.iter().zip(&w) {
                        total += wi * self.at(mid + 0.5 * h * xi).d1.norm();
                    }
                }
                (0.5 * h * total).abs()
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.length_between(0.0, 1.0)
    }

    /// Parameter at which the arc length measured from `s = 0` equals `target`.
    pub fn param_at_length(&self, target: f64) -> f64 {
        let total = self.length();
        if target <= 0.0 {
            return 0.0;
        }
        if target >= total {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut s = target / total;
        for _ in 0..60 {
            let f = self.length_between(0.0, s) - target;
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            if f.abs() <= 1e-15 * total.max(1.0) {
                break;
            }
            let speed = self.at(s).d1.norm();
            let next = s - f / speed;
            s = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-16 {
                break;
            }
        }
        s
    }

    /// The sub-curve on `[s0, s1]`, reparametrized to `[0, 1]`.
    pub fn restrict(&self, s0: f64, s1: f64) -> Curve {
        match self {
            Curve::Segment { .. } => Curve::Segment { start: self.point(s0), end: self.point(s1) },
            Curve::CircularArc { center, radius, start_angle, sweep } => Curve::CircularArc {
                center: *center,
                radius: *radius,
                start_angle: start_angle + s0 * sweep,
                sweep: (s1 - s0) * sweep,
            },
            Curve::CubicParametric { x, y } => Curve::CubicParametric {
                x: substitute_cubic(x, s0, s1 - s0),
                y: substitute_cubic(y, s0, s1 - s0),
            },
            Curve::PolarGraph { center, cos, sin, theta_start, theta_end } => {
                let span = theta_end - theta_start;
                Curve::PolarGraph {
                    center: *center,
                    cos: cos.clone(),
                    sin: sin.clone(),
                    theta_start: theta_start + s0 * span,
                    theta_end: theta_start + s1 * span,
                }
            }
            Curve::Mapped { base, map } => {
                Curve::Mapped { base: Box::new(base.restrict(s0, s1)), map: *map }
            }
            Curve::Restricted { base, s0: a, s1: b } => {
                let h = b - a;
                Curve::Restricted { base: base.clone(), s0: a + s0 * h, s1: a + s1 * h }
            }
            Curve::Chain { .. } => Curve::Restricted { base: Box::new(self.clone()), s0, s1 },
        }
    }

    /// Same trace, opposite direction.
    pub fn reversed(&self) -> Curve {
        match self {
            Curve::Chain { pieces, breaks } => Curve::Chain {
                pieces: pieces.iter().rev().map(Curve::reversed).collect(),
                breaks: breaks.iter().rev().map(|b| 1.0 - b).collect(),
            },
            Curve::Restricted { base, s0, s1 } => {
                Curve::Restricted { base: base.clone(), s0: *s1, s1: *s0 }
            }
            _ => self.restrict(1.0, 0.0),
        }
    }

    /// Image under an affine map, keeping the closed-form kind when possible.
    pub fn transformed(&self, t: &Affine2) -> Curve {
        match self {
            Curve::Segment { start, end } => {
                Curve::Segment { start: t.apply(*start), end: t.apply(*end) }
            }
            Curve::CubicParametric { x, y } => {
                let mut nx = [0.0; 4];
                let mut ny = [0.0; 4];
                for k in 0..4 {
                    let v = t.apply_vec(Point2::new(x[k], y[k]));
                    nx[k] = v.x;
                    ny[k] = v.y;
                }
                let origin = t.t;
                nx[0] += origin.x;
                ny[0] += origin.y;
                Curve::CubicParametric { x: nx, y: ny }
            }
            Curve::CircularArc { center, radius, start_angle, sweep } => match t.as_similarity() {
                Some(sim) => {
                    let (start_angle, sweep) = if sim.reflected {
                        (sim.rotation - start_angle, -sweep)
                    } else {
                        (sim.rotation + start_angle, *sweep)
                    };
                    Curve::CircularArc {
                        center: t.apply(*center),
                        radius: radius * sim.scale,
                        start_angle,
                        sweep,
                    }
                }
                None => self.mapped(t),
            },
            Curve::PolarGraph { center, cos, sin, theta_start, theta_end } => {
                match t.as_similarity() {
                    Some(sim) => {
                        let n = cos.len().max(sin.len());
                        let (k, phi) = (sim.scale, sim.rotation);
                        let mut nc = vec![0.0; n];
                        let mut ns = vec![0.0; n];
                        for j in 0..n {
                            let a = cos.get(j).copied().unwrap_or(0.0);
                            let b = sin.get(j).copied().unwrap_or(0.0);
                            let (sj, cj) = (j as f64 * phi).sin_cos();
                            if sim.reflected {
                                nc[j] = k * (a * cj + b * sj);
                                ns[j] = k * (a * sj - b * cj);
                            } else {
                                nc[j] = k * (a * cj - b * sj);
                                ns[j] = k * (a * sj + b * cj);
                            }
                        }
                        let (ts, te) = if sim.reflected {
                            (phi - theta_start, phi - theta_end)
                        } else {
                            (phi + theta_start, phi + theta_end)
                        };
                        Curve::PolarGraph {
                            center: t.apply(*center),
                            cos: nc,
                            sin: ns,
                            theta_start: ts,
                            theta_end: te,
                        }
                    }
                    None => self.mapped(t),
                }
            }
            Curve::Mapped { base, map } => base.mapped(&t.compose(map)),
            Curve::Chain { pieces, breaks } => Curve::Chain {
                pieces: pieces.iter().map(|p| p.transformed(t)).collect(),
                breaks: breaks.clone(),
            },
            Curve::Restricted { base, s0, s1 } => {
                Curve::Restricted { base: Box::new(base.transformed(t)), s0: *s0, s1: *s1 }
            }
        }
    }

    fn mapped(&self, t: &Affine2) -> Curve {
        Curve::Mapped { base: Box::new(self.clone()), map: *t }
    }

    /// Closest point of the curve to `x`.
    ///
    /// Seeds from 64 uniform samples, then a safeguarded Newton iteration on
    /// `φ'(s)·(φ(s) − x) = 0` inside each bracketing sample interval.
    pub fn nearest_point(&self, x: Point2) -> NearestPoint {
        const SEEDS: usize = 64;
        let f: Vec<f64> = (0..=SEEDS)
            .map(|k| (self.at(k as f64 / SEEDS as f64).pos - x).norm_sq())
            .collect();
        let mut best = NearestPoint { s: 0.0, point: self.at(0.0).pos, distance: f[0].sqrt() };
        let consider = |s: f64, best: &mut NearestPoint| {
            let p = self.at(s).pos;
            let d = p.distance(x);
            if d < best.distance {
                *best = NearestPoint { s, point: p, distance: d };
            }
        };
        consider(1.0, &mut best);
        for k in 0..=SEEDS {
            let left = if k == 0 { f64::INFINITY } else { f[k - 1] };
            let right = if k == SEEDS { f64::INFINITY } else { f[k + 1] };
            if f[k] > left || f[k] > right {
                continue;
            }
            let lo = k.saturating_sub(1) as f64 / SEEDS as f64;
            let hi = (k + 1).min(SEEDS) as f64 / SEEDS as f64;
            let s = self.refine_nearest(x, lo, hi, k as f64 / SEEDS as f64);
            consider(s, &mut best);
        }
        best
    }

    fn refine_nearest(&self, x: Point2, mut lo: f64, mut hi: f64, start: f64) -> f64 {
        let g = |s: f64| {
            let p = self.at(s);
            (p.d1.dot(p.pos - x), p.d1.norm_sq() + p.d2.dot(p.pos - x))
        };
        let (glo, _) = g(lo);
        let (ghi, _) = g(hi);
        if glo >= 0.0 && ghi >= 0.0 {
            return lo;
        }
        if glo <= 0.0 && ghi <= 0.0 {
            return hi;
        }
        // A minimum of the squared distance: g goes from negative to positive.
        if glo > 0.0 {
            return start;
        }
        let mut s = start.clamp(lo, hi);
        for _ in 0..30 {
            let (gs, dg) = g(s);
            if gs == 0.0 {
                return s;
            }
            if gs < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = s - gs / dg;
            let next = if dg > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - s).abs() <= 1e-16 * (1.0 + s.abs()) {
                return next;
            }
            s = next;
        }
        s
    }
}

/// Coefficients of `c(a + h u)` in powers of `u`.
fn substitute_cubic(c: &[f64; 4], a: f64, h: f64) -> [f64; 4] {
    let d0 = c[0] + a * (c[1] + a * (c[2] + a * c[3]));
    let d1 = c[1] + a * (2.0 * c[2] + 3.0 * a * c[3]);
    let d2 = c[2] + 3.0 * a * c[3];
    let d3 = c[3];
    [d0, d1 * h, d2 * h * h, d3 * h * h * h]
}
