//! Area integrals over curved domains by reduction to boundary integrals.
//!
//! Two reductions are available. The vertical one writes
//! `∫∫_D g = ∮ −(∫_{y0}^{y} g(x, s) ds) dx` with `y0` at the bottom of the
//! bounding box. The radial one writes
//! `∫∫_D g = ∮ [(φ − c) × φ'] ∫_0^1 g(c + τ(φ − c)) τ dτ ds` for a center `c`;
//! when `D` is star-shaped about `c` all its weights are positive and all its
//! nodes lie in `D`. Both use a Gauss–Legendre rule for the inner integral and
//! adaptive Gauss–Kronrod subdivision for the boundary integral.

mod basis;
mod gram;
pub mod rules;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use basis::{basis_dimension, PolyBasis};
pub use gram::{assemble_gram, gram_matrix, FactorMethod, GramFactor, GramMatrix};

use crate::christoffel::BivariatePoly;
use crate::error::{Error, Result};
use crate::geometry::{Curve, Domain, Point2};
use rules::{gauss_legendre, kronrod15, KronrodRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Radial when the domain is a single loop star-shaped about its centroid, else vertical.
    Auto,
    Vertical,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub outer_tol: f64,
    pub max_depth: u32,
    /// Inner Gauss–Legendre nodes; `None` picks the minimum exact count.
    pub inner_order: Option<usize>,
    pub reduction: Reduction,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { outer_tol: 1e-10, max_depth: 18, inner_order: None, reduction: Reduction::Auto }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.outer_tol > 0.0) || !self.outer_tol.is_finite() {
            return Err(Error::InvalidParameter(format!("outer_tol {} must be positive", self.outer_tol)));
        }
        if self.inner_order == Some(0) {
            return Err(Error::InvalidParameter("inner_order must be positive".into()));
        }
        Ok(())
    }
}

/// A 2D rule `Σ w_i g(x_i)` on a domain.
#[derive(Debug, Clone)]
pub struct Cubature {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
    /// Reduction actually used.
    pub reduction: Reduction,
    /// Polynomial degree the inner rule integrates exactly.
    pub degree: usize,
    pub panels: usize,
    /// Estimated error relative to the integrand magnitude.
    pub error_estimate: f64,
}

impl Cubature {
    pub fn integrate<F: Fn(Point2) -> f64 + Sync>(&self, f: F) -> f64 {
        self.points
            .par_iter()
            .zip(self.weights.par_iter())
            .with_min_len(256)
            .map(|(p, w)| w * f(*p))
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    }

    pub fn all_weights_positive(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Error probe driving subdivision: integrates over one panel with the
/// Kronrod and Gauss weights and returns `(error, magnitude)`.
pub trait PanelProbe: Sync {
    fn probe(&self, nodes: &[Point2], kronrod: &[f64], gauss: &[f64]) -> (f64, f64);
}

pub struct ScalarProbe<F>(pub F);

impl<F: Fn(Point2) -> f64 + Sync> PanelProbe for ScalarProbe<F> {
    fn probe(&self, nodes: &[Point2], kronrod: &[f64], gauss: &[f64]) -> (f64, f64) {
        let (mut k, mut g, mut m) = (0.0, 0.0, 0.0);
        for i in 0..nodes.len() {
            let v = (self.0)(nodes[i]);
            k += kronrod[i] * v;
            g += gauss[i] * v;
            m += (kronrod[i] * v).abs();
        }
        ((k - g).abs(), m)
    }
}

/// Probe on all products of basis functions; the error is the largest entry change.
pub struct GramProbe<'a>(pub &'a PolyBasis);

impl PanelProbe for GramProbe<'_> {
    fn probe(&self, nodes: &[Point2], kronrod: &[f64], gauss: &[f64]) -> (f64, f64) {
        use nalgebra::DMatrix;
        let n = self.0.dim();
        let m = nodes.len();
        let mut phi = DMatrix::<f64>::zeros(m, n);
        let mut row = vec![0.0; n];
        for (i, p) in nodes.iter().enumerate() {
            self.0.eval_into(*p, &mut row);
            for k in 0..n {
                phi[(i, k)] = row[k];
            }
        }
        let mut wk = phi.clone();
        let mut dw = phi.clone();
        for i in 0..m {
            for k in 0..n {
                wk[(i, k)] *= kronrod[i];
                dw[(i, k)] *= kronrod[i] - gauss[i];
            }
        }
        let diff = phi.tr_mul(&dw);
        let err = diff.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut mag = 0.0f64;
        for k in 0..n {
            let d: f64 = (0..m).map(|i| (kronrod[i] * phi[(i, k)] * phi[(i, k)]).abs()).sum();
            mag = mag.max(d);
        }
        (err, mag)
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    curve: usize,
    s0: f64,
    s1: f64,
    depth: u32,
}

struct Setup<'a> {
    curves: &'a [Curve],
    reduction: Reduction,
    center: Point2,
    y0: f64,
    inner_x: Vec<f64>,
    inner_w: Vec<f64>,
    kr: KronrodRule,
}

impl Setup<'_> {
    fn nodes(&self, p: &Panel) -> (Vec<Point2>, Vec<f64>, Vec<f64>) {
        let m = self.inner_x.len();
        let mut pts = Vec::with_capacity(15 * m);
        let mut wk = Vec::with_capacity(15 * m);
        let mut wg = Vec::with_capacity(15 * m);
        let half = 0.5 * (p.s1 - p.s0);
        let mid = 0.5 * (p.s1 + p.s0);
        let curve = &self.curves[p.curve];
        for j in 0..15 {
            let s = mid + half * self.kr.nodes[j];
            let cp = curve.at(s);
            let (ok, og) = (half * self.kr.kronrod[j], half * self.kr.gauss[j]);
            match self.reduction {
                Reduction::Radial => {
                    let r = cp.pos - self.center;
                    let factor = r.cross(cp.d1);
                    for i in 0..m {
                        let tau = 0.5 * (1.0 + self.inner_x[i]);
                        let wi = 0.5 * self.inner_w[i] * tau * factor;
                        pts.push(self.center + r * tau);
                        wk.push(ok * wi);
                        wg.push(og * wi);
                    }
                }
                _ => {
                    let h = cp.pos.y - self.y0;
                    let factor = -cp.d1.x * 0.5 * h;
                    for i in 0..m {
                        let y = self.y0 + 0.5 * h * (1.0 + self.inner_x[i]);
                        let wi = self.inner_w[i] * factor;
                        pts.push(Point2::new(cp.pos.x, y));
                        wk.push(ok * wi);
                        wg.push(og * wi);
                    }
                }
            }
        }
        (pts, wk, wg)
    }
}

fn star_shaped_about(domain: &Domain, c: Point2) -> bool {
    if domain.loops().len() != 1 {
        return false;
    }
    domain.curves().iter().all(|curve| {
        (0..=256).all(|k| {
            let p = curve.at(k as f64 / 256.0);
            let r = p.pos - c;
            r.cross(p.d1) > 1e-9 * r.norm() * p.d1.norm()
        })
    })
}

fn resolve_reduction(domain: &Domain, requested: Reduction) -> Result<(Reduction, Point2)> {
    let c = domain.polygon_centroid();
    match requested {
        Reduction::Vertical => Ok((Reduction::Vertical, c)),
        Reduction::Radial => Ok((Reduction::Radial, c)),
        Reduction::Auto => {
            if star_shaped_about(domain, c) {
                Ok((Reduction::Radial, c))
            } else {
                Ok((Reduction::Vertical, c))
            }
        }
    }
}

/// Builds an adaptive rule exact in the inner direction for polynomials of
/// total degree `degree`, refined until `probe` meets `spec.outer_tol`.
pub fn build_cubature(domain: &Domain, degree: usize, spec: &QuadratureSpec, probe: &dyn PanelProbe) -> Result<Cubature> {
    spec.validate()?;
    let (reduction, center) = resolve_reduction(domain, spec.reduction)?;
    // The radial inner integrand carries an extra factor τ: degree + 1 ≤ 2m − 1.
    let m = spec.inner_order.unwrap_or(degree / 2 + 1).max(1);
    let (inner_x, inner_w) = gauss_legendre(m);
    let setup = Setup {
        curves: domain.curves(),
        reduction,
        center,
        y0: domain.bbox().min.y,
        inner_x,
        inner_w,
        kr: kronrod15(),
    };
    let ncurves = domain.curves().len() as f64;
    let diam = domain.diameter();

    let mut pending: Vec<Panel> = Vec::new();
    for (i, c) in domain.curves().iter().enumerate() {
        if reduction == Reduction::Vertical {
            if let Curve::Segment { start, end } = c {
                if start.x == end.x {
                    continue;
                }
            }
        }
        let k = ((4.0 * c.length() / diam).ceil() as usize).clamp(1, 16);
        for j in 0..k {
            pending.push(Panel { curve: i, s0: j as f64 / k as f64, s1: (j + 1) as f64 / k as f64, depth: 0 });
        }
    }

    let mut done: Vec<(Panel, f64, f64)> = Vec::new();
    loop {
        let evaluated: Vec<(Panel, f64, f64)> = pending
            .par_iter()
            .map(|p| {
                let (x, wk, wg) = setup.nodes(p);
                let (e, m) = probe.probe(&x, &wk, &wg);
                (*p, e, m)
            })
            .collect();
        done.extend(evaluated);
        let magnitude: f64 = done.iter().map(|d| d.2).sum();
        let target = spec.outer_tol * magnitude.max(f64::MIN_POSITIVE);
        let mut keep = Vec::with_capacity(done.len());
        pending = Vec::new();
        for (p, e, m) in done.drain(..) {
            let allowed = target * (p.s1 - p.s0) / ncurves;
            if e > allowed && p.depth < spec.max_depth {
                let mid = 0.5 * (p.s0 + p.s1);
                pending.push(Panel { s1: mid, depth: p.depth + 1, ..p });
                pending.push(Panel { s0: mid, depth: p.depth + 1, ..p });
            } else {
                keep.push((p, e, m));
            }
        }
        done = keep;
        if pending.is_empty() {
            let total_err: f64 = done.iter().map(|d| d.1).sum();
            if total_err > target {
                return Err(Error::NonConvergence {
                    achieved: total_err / magnitude.max(f64::MIN_POSITIVE),
                    target: spec.outer_tol,
                });
            }
            break;
        }
    }

    done.sort_by(|a, b| a.0.curve.cmp(&b.0.curve).then(a.0.s0.total_cmp(&b.0.s0)));
    let magnitude: f64 = done.iter().map(|d| d.2).sum();
    let total_err: f64 = done.iter().map(|d| d.1).sum();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (p, _, _) in &done {
        let (x, wk, _) = setup.nodes(p);
        points.extend(x);
        weights.extend(wk);
    }
    Ok(Cubature {
        points,
        weights,
        reduction,
        degree: 2 * m - 1,
        panels: done.len(),
        error_estimate: total_err / magnitude.max(f64::MIN_POSITIVE),
    })
}

/// `∫∫_D g` for a polynomial integrand.
pub fn area_integral(domain: &Domain, integrand: &BivariatePoly, spec: &QuadratureSpec) -> Result<f64> {
    let f = |p: Point2| integrand.eval(p);
    let cub = build_cubature(domain, integrand.degree(), spec, &ScalarProbe(f))?;
    Ok(cub.integrate(f))
}

/// `∫∫_D g` for a closure that is a polynomial of total degree at most `degree`.
pub fn integrate_fn<F: Fn(Point2) -> f64 + Sync>(domain: &Domain, degree: usize, spec: &QuadratureSpec, f: F) -> Result<f64> {
    let cub = build_cubature(domain, degree, spec, &ScalarProbe(&f))?;
    Ok(cub.integrate(&f))
}

/// Cubature adequate for the Gram matrix of `basis` on `domain`.
pub fn gram_cubature(domain: &Domain, basis: &PolyBasis, spec: &QuadratureSpec) -> Result<Cubature> {
    build_cubature(domain, 2 * basis.degree(), spec, &GramProbe(basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gallery;
    use std::f64::consts::PI;

    fn both() -> [QuadratureSpec; 2] {
        [
            QuadratureSpec { reduction: Reduction::Vertical, ..Default::default() },
            QuadratureSpec { reduction: Reduction::Radial, ..Default::default() },
        ]
    }

    #[test]
    fn disc_moments() {
        let d = gallery::disc();
        for spec in both() {
            let one = integrate_fn(&d, 0, &spec, |_| 1.0).unwrap();
            assert!((one - PI).abs() < 1e-10 * PI);
            let x = integrate_fn(&d, 1, &spec, |p| p.x).unwrap();
            assert!(x.abs() < 1e-12);
            let xx = integrate_fn(&d, 2, &spec, |p| p.x * p.x).unwrap();
            assert!((xx - PI / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn square_separable_moment() {
        let d = gallery::square();
        for spec in both() {
            let v = integrate_fn(&d, 4, &spec, |p| p.x * p.x * p.y * p.y).unwrap();
            assert!((v - 4.0 / 9.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn auto_picks_radial_for_star_shaped() {
        let spec = QuadratureSpec::default();
        let d = gallery::blob();
        let c = build_cubature(&d, 4, &spec, &ScalarProbe(|_| 1.0)).unwrap();
        assert_eq!(c.reduction, Reduction::Radial);
        assert!(c.all_weights_positive());
        assert!(c.points.iter().all(|p| d.contains(*p).in_closure()));
        let a = gallery::annulus(0.5, 1.0).unwrap();
        let c = build_cubature(&a, 4, &spec, &ScalarProbe(|_| 1.0)).unwrap();
        assert_eq!(c.reduction, Reduction::Vertical);
        let v = c.integrate(|_| 1.0);
        assert!((v - 0.75 * PI).abs() < 1e-10);
    }

    #[test]
    fn blob_area_polar_formula() {
        // ∫ r²/2 dθ with r = 1 + 0.3 cos 3θ gives π(1 + 0.045).
        let d = gallery::blob();
        for spec in both() {
            let v = integrate_fn(&d, 0, &spec, |_| 1.0).unwrap();
            assert!((v - PI * 1.045).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn orientation_reversal_negates_loop_contribution() {
        let d = gallery::disc();
        let spec = QuadratureSpec { reduction: Reduction::Vertical, ..Default::default() };
        let f = |p: Point2| 1.0 + p.y * p.y;
        let lp = d.loops()[0].reversed();
        let curves: Vec<Curve> = lp.curves.clone();
        let setup = Setup {
            curves: &curves,
            reduction: Reduction::Vertical,
            center: Point2::ORIGIN,
            y0: d.bbox().min.y,
            inner_x: gauss_legendre(4).0,
            inner_w: gauss_legendre(4).1,
            kr: kronrod15(),
        };
        let mut rev = 0.0;
        for j in 0..64 {
            let p = Panel { curve: 0, s0: j as f64 / 64.0, s1: (j + 1) as f64 / 64.0, depth: 0 };
            let (x, w, _) = setup.nodes(&p);
            rev += x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum::<f64>();
        }
        let fwd = integrate_fn(&d, 2, &spec, f).unwrap();
        assert!((fwd + rev).abs() < 1e-10, "{fwd} {rev}");
    }

    #[test]
    fn additivity_over_chord() {
        let spec = QuadratureSpec::default();
        let f = |p: Point2| 1.0 + p.x * p.y + p.x.powi(3);
        let whole = integrate_fn(&gallery::disc(), 3, &spec, f).unwrap();
        let upper = integrate_fn(&gallery::half_disc(), 3, &spec, f).unwrap();
        let lower_domain = gallery::half_disc()
            .transformed(&crate::geometry::Affine2::new([[1.0, 0.0], [0.0, -1.0]], Point2::ORIGIN))
            .unwrap();
        let lower = integrate_fn(&lower_domain, 3, &spec, f).unwrap();
        assert!((whole - upper - lower).abs() < 1e-10);
    }

    #[test]
    fn polygon_results_stable_in_tolerance() {
        let d = gallery::triangle();
        let f = |p: Point2| (1.0 + p.x - 0.3 * p.y).powi(10);
        let a = integrate_fn(&d, 10, &QuadratureSpec::default(), f).unwrap();
        let spec = QuadratureSpec { outer_tol: 5e-11, ..Default::default() };
        let b = integrate_fn(&d, 10, &spec, f).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs());
    }

    #[test]
    fn depth_limit_reports_nonconvergence() {
        let d = gallery::disc();
        let spec = QuadratureSpec { max_depth: 0, outer_tol: 1e-15, ..Default::default() };
        let r = integrate_fn(&d, 2, &spec, |p| (30.0 * p.x).cos());
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
