//! Evaluation of `λ_n(D, x) = 1 / (φ(x)ᵀ G⁻¹ φ(x))` and of the extremal polynomial.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Domain, Point2};
use crate::quadrature::rules::gauss_legendre;
use crate::quadrature::{assemble_gram, gram_cubature, Cubature, GramMatrix, PolyBasis, QuadratureSpec};
use crate::MAX_DEGREE;

pub use crate::linalg::PrecisionMode;

/// A polynomial expanded in a [`PolyBasis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoly {
    pub basis: PolyBasis,
    pub coeffs: Vec<f64>,
}

impl BivariatePoly {
    pub fn new(basis: PolyBasis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                basis.dim(),
                coeffs.len()
            )));
        }
        Ok(BivariatePoly { basis, coeffs })
    }

    pub fn constant(basis: PolyBasis, value: f64) -> Self {
        let phi0 = basis.eval(basis.bbox().center())[0];
        let mut coeffs = vec![0.0; basis.dim()];
        coeffs[0] = value / phi0;
        BivariatePoly { basis, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn eval(&self, p: Point2) -> f64 {
        let v = self.basis.eval(p);
        v.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    /// Orthogonal projection onto `basis` with a tensor Gauss rule on its box;
    /// exact when `f` is a polynomial of total degree at most `basis.degree()`.
    pub fn project<F: Fn(Point2) -> f64 + Sync>(basis: &PolyBasis, f: F) -> Self {
        let n = basis.degree();
        let (x, w) = gauss_legendre(n + 1);
        let bb = basis.bbox();
        let dim = basis.dim();
        let coeffs = (0..x.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![0.0; dim];
                let mut row = vec![0.0; dim];
                for j in 0..x.len() {
                    let p = Point2::new(
                        bb.min.x + 0.5 * (x[i] + 1.0) * bb.width(),
                        bb.min.y + 0.5 * (x[j] + 1.0) * bb.height(),
                    );
                    let ww = w[i] * w[j] * 0.25 * bb.width() * bb.height() * f(p);
                    basis.eval_into(p, &mut row);
                    for k in 0..dim {
                        acc[k] += ww * row[k];
                    }
                }
                acc
            })
            .reduce(
                || vec![0.0; dim],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        BivariatePoly { basis: basis.clone(), coeffs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorOptions {
    pub quadrature: QuadratureSpec,
    pub precision: PrecisionMode,
    /// Rebuild in extended precision when `ε·cond` exceeds [`ESCALATION_THRESHOLD`].
    pub auto_escalate: bool,
}

impl Default for EvaluatorOptions {
    fn default() -> Self {
        EvaluatorOptions {
            quadrature: QuadratureSpec::default(),
            precision: PrecisionMode::Double,
            auto_escalate: true,
        }
    }
}

impl EvaluatorOptions {
    pub fn with_precision(precision: PrecisionMode) -> Self {
        EvaluatorOptions { precision, ..Default::default() }
    }
}

pub const ESCALATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ChristoffelEvaluator {
    domain: Domain,
    n: usize,
    basis: PolyBasis,
    cubature: Cubature,
    gram: GramMatrix,
}

/// Builds and factors the Gram matrix of `P_n` on `domain`.
pub fn build_evaluator(domain: &Domain, n: usize, options: &EvaluatorOptions) -> Result<ChristoffelEvaluator> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge { n, max: MAX_DEGREE });
    }
    let basis = PolyBasis::new(n, domain.bbox())?;
    let cubature = gram_cubature(domain, &basis, &options.quadrature)?;
    let gram = match options.precision {
        PrecisionMode::Extended => assemble_gram(&cubature, &basis, PrecisionMode::Extended)?,
        PrecisionMode::Double => match assemble_gram(&cubature, &basis, PrecisionMode::Double) {
            Ok(g) if !options.auto_escalate || g.effective_condition() * f64::EPSILON <= ESCALATION_THRESHOLD => g,
            Ok(g) => {
                log::info!(
                    "degree {n}: condition estimate {:.3e} triggers extended precision",
                    g.cond_estimate
                );
                assemble_gram(&cubature, &basis, PrecisionMode::Extended)?
            }
            Err(Error::IndefiniteGram { .. }) if options.auto_escalate => {
                log::info!("degree {n}: double factorization failed, retrying in extended precision");
                assemble_gram(&cubature, &basis, PrecisionMode::Extended)?
            }
            Err(e) => return Err(e),
        },
    };
    Ok(ChristoffelEvaluator { domain: domain.clone(), n, basis, cubature, gram })
}

impl ChristoffelEvaluator {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn basis(&self) -> &PolyBasis {
        &self.basis
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn cubature(&self) -> &Cubature {
        &self.cubature
    }

    pub fn precision_mode(&self) -> PrecisionMode {
        self.gram.precision()
    }

    pub fn cond_estimate(&self) -> f64 {
        self.gram.cond_estimate
    }

    /// `λ_n(D, x)`; defined for every `x` in the plane.
    pub fn lambda(&self, x: Point2) -> f64 {
        let phi = self.basis.eval(x);
        1.0 / self.gram.inverse_quadratic_form(&phi)
    }

    pub fn lambda_many(&self, xs: &[Point2]) -> Vec<f64> {
        xs.par_iter().map(|x| self.lambda(*x)).collect()
    }

    /// `∫_D p²` with the evaluator's cubature.
    pub fn integrate_square<F: Fn(Point2) -> f64 + Sync>(&self, p: F) -> f64 {
        self.cubature.integrate(|y| {
            let v = p(y);
            v * v
        })
    }
}

/// The extremal polynomial `K_n(x, ·) / K_n(x, x)`: equal to 1 at `x` with `∫_D P² = λ_n(D, x)`.
pub fn kernel_polynomial(ev: &ChristoffelEvaluator, x: Point2) -> BivariatePoly {
    let phi = ev.basis.eval(x);
    let coeffs = ev.gram.normalized_solve(&phi);
    BivariatePoly { basis: ev.basis.clone(), coeffs }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: Point2,
    /// Grid spacing along the larger side of the region's bounding box.
    pub resolution: f64,
    pub points: usize,
}

/// `max |p|` over a membership-filtered grid on `region` plus boundary samples.
pub fn sup_on_region(p: &BivariatePoly, region: &Domain, grid_density: usize) -> Result<SupEstimate> {
    let density = grid_density.max(2);
    let bb: BoundingBox = region.bbox();
    let mut pts: Vec<Point2> = Vec::new();
    for i in 0..density {
        for j in 0..density {
            let q = Point2::new(
                bb.min.x + bb.width() * i as f64 / (density - 1) as f64,
                bb.min.y + bb.height() * j as f64 / (density - 1) as f64,
            );
            pts.push(q);
        }
    }
    let mut pts: Vec<Point2> = pts.into_par_iter().filter(|q| region.contains(*q).in_closure()).collect();
    for c in region.curves() {
        let k = 4 * density;
        pts.extend((0..=k).map(|i| c.point(i as f64 / k as f64)));
    }
    if pts.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let vals: Vec<f64> = pts.par_iter().map(|q| p.eval(*q).abs()).collect();
    let (mut best, mut arg) = (f64::NEG_INFINITY, pts[0]);
    for (v, q) in vals.iter().zip(&pts) {
        if *v > best {
            best = *v;
            arg = *q;
        }
    }
    Ok(SupEstimate {
        value: best,
        argmax: arg,
        resolution: bb.width().max(bb.height()) / (density - 1) as f64,
        points: pts.len(),
    })
}
