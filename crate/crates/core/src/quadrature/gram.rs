use nalgebra::DMatrix;
use twofloat::TwoFloat;

use super::{gram_cubature, Cubature, PolyBasis, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::linalg::{gram_double_double, Cholesky, PrecisionMode, Real};

#[derive(Debug, Clone)]
pub enum GramFactor {
    Double(Cholesky<f64>),
    Extended(Cholesky<TwoFloat>),
}

/// How the double-precision factor was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMethod {
    /// Householder QR of `diag(√w) Φ`; never forms `G` for the factor.
    Qr,
    Cholesky,
}

/// `G_kl = ∫_D φ_k φ_l` with a factorization `G = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub n: usize,
    pub dim: usize,
    /// Row-major entries (rounded to double in extended mode).
    pub entries: Vec<f64>,
    pub factor: GramFactor,
    pub method: FactorMethod,
    /// 2-norm condition number estimate of `G`.
    pub cond_estimate: f64,
}

impl GramMatrix {
    pub fn precision(&self) -> PrecisionMode {
        match self.factor {
            GramFactor::Double(_) => PrecisionMode::Double,
            GramFactor::Extended(_) => PrecisionMode::Extended,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|k| self.entries[k * self.dim + k]).sum()
    }

    /// Relative accuracy to expect from solves: `ε·cond(factor)`.
    pub fn effective_condition(&self) -> f64 {
        match self.method {
            FactorMethod::Qr => self.cond_estimate.sqrt(),
            FactorMethod::Cholesky => self.cond_estimate,
        }
    }

    /// `φᵀ G⁻¹ φ`.
    pub fn inverse_quadratic_form(&self, phi: &[f64]) -> f64 {
        match &self.factor {
            GramFactor::Double(c) => c.inverse_quadratic_form(phi),
            GramFactor::Extended(c) => {
                let b: Vec<TwoFloat> = phi.iter().map(|&v| TwoFloat::from(v)).collect();
                c.inverse_quadratic_form(&b).to_f64()
            }
        }
    }

    /// `G⁻¹ φ / (φᵀ G⁻¹ φ)`.
    pub fn normalized_solve(&self, phi: &[f64]) -> Vec<f64> {
        match &self.factor {
            GramFactor::Double(c) => {
                let mut z = phi.to_vec();
                c.forward(&mut z);
                let q: f64 = z.iter().map(|v| v * v).sum();
                c.backward(&mut z);
                z.iter().map(|v| v / q).collect()
            }
            GramFactor::Extended(c) => {
                let mut z: Vec<TwoFloat> = phi.iter().map(|&v| TwoFloat::from(v)).collect();
                c.forward(&mut z);
                let q = z.iter().fold(TwoFloat::from(0.0), |a, &v| a + v * v);
                c.backward(&mut z);
                z.iter().map(|&v| v.quot(q).to_f64()).collect()
            }
        }
    }
}

fn basis_columns(cub: &Cubature, basis: &PolyBasis) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = basis.dim();
    let m = cub.len();
    let mut cols = vec![vec![0.0; m]; n];
    let mut signs = vec![0.0; m];
    let mut row = vec![0.0; n];
    for (i, (p, w)) in cub.points.iter().zip(&cub.weights).enumerate() {
        basis.eval_into(*p, &mut row);
        let sw = w.abs().sqrt();
        signs[i] = if *w < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            cols[k][i] = sw * row[k];
        }
    }
    (cols, signs)
}

/// Assembles and factors the Gram matrix of `basis` with the rule `cub`.
pub fn assemble_gram(cub: &Cubature, basis: &PolyBasis, precision: PrecisionMode) -> Result<GramMatrix> {
    let n = basis.dim();
    let (cols, signs) = basis_columns(cub, basis);
    let positive = signs.iter().all(|&s| s > 0.0);
    match precision {
        PrecisionMode::Double => {
            let m = cub.len();
            let u = DMatrix::from_fn(m, n, |i, k| cols[k][i]);
            drop(cols);
            let su = DMatrix::from_fn(m, n, |i, k| signs[i] * u[(i, k)]);
            let g = u.tr_mul(&su);
            let entries: Vec<f64> = (0..n * n).map(|k| g[(k / n, k % n)]).collect();
            let (chol, method) = if positive && m >= n {
                let r = u.qr().r();
                let mut l = vec![0.0; n * n];
                for i in 0..n {
                    if !(r[(i, i)].abs() > 0.0) {
                        return Err(Error::IndefiniteGram { minor: i + 1, size: n });
                    }
                    for k in 0..=i {
                        l[i * n + k] = r[(k, i)];
                    }
                }
                (Cholesky::from_lower(l, n), FactorMethod::Qr)
            } else {
                let c = Cholesky::factor(&entries, n)
                    .map_err(|minor| Error::IndefiniteGram { minor, size: n })?;
                (c, FactorMethod::Cholesky)
            };
            let cond_estimate = chol.condition_estimate(60);
            Ok(GramMatrix {
                n: basis.degree(),
                dim: n,
                entries,
                factor: GramFactor::Double(chol),
                method,
                cond_estimate,
            })
        }
        PrecisionMode::Extended => {
            let g = gram_double_double(&cols, &signs);
            let entries: Vec<f64> = g.iter().map(|v| v.to_f64()).collect();
            let chol = Cholesky::factor(&g, n).map_err(|minor| Error::IndefiniteGram { minor, size: n })?;
            let cond_estimate = chol.to_f64().condition_estimate(60);
            Ok(GramMatrix {
                n: basis.degree(),
                dim: n,
                entries,
                factor: GramFactor::Extended(chol),
                method: FactorMethod::Cholesky,
                cond_estimate,
            })
        }
    }
}

/// Gram matrix of the canonical basis on the domain's bounding box, in double precision.
pub fn gram_matrix(domain: &Domain, n: usize, spec: &QuadratureSpec) -> Result<GramMatrix> {
    let basis = PolyBasis::new(n, domain.bbox())?;
    let cub = gram_cubature(domain, &basis, spec)?;
    assemble_gram(&cub, &basis, PrecisionMode::Double)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gallery;
    use crate::quadrature::Reduction;
    use rand::{RngExt, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn degree_zero_disc() {
        let g = gram_matrix(&gallery::disc(), 0, &QuadratureSpec::default()).unwrap();
        // Constant basis value on the [-1,1]² box is 1/2.
        assert!((g.entries[0] - 0.25 * PI).abs() < 1e-12);
    }

    #[test]
    fn square_gram_is_identity() {
        for reduction in [Reduction::Vertical, Reduction::Radial] {
            let spec = QuadratureSpec { reduction, ..Default::default() };
            let g = gram_matrix(&gallery::square(), 6, &spec).unwrap();
            for k in 0..g.dim {
                for l in 0..g.dim {
                    let e = if k == l { 1.0 } else { 0.0 };
                    assert!((g.entries[k * g.dim + l] - e).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn disc_parity_blocks_vanish() {
        let g = gram_matrix(&gallery::disc(), 6, &QuadratureSpec::default()).unwrap();
        let basis = PolyBasis::new(6, gallery::disc().bbox()).unwrap();
        for (k, &(a, b)) in basis.index().iter().enumerate() {
            for (l, &(c, d)) in basis.index().iter().enumerate() {
                if (a + c) % 2 == 1 || (b + d) % 2 == 1 {
                    assert!(g.entries[k * g.dim + l].abs() < 1e-12);
                }
            }
        }
        assert!(g.trace() > 0.0);
    }

    #[test]
    fn positive_definite_on_random_vectors() {
        let d = gallery::lens(1.0).unwrap();
        let g = gram_matrix(&d, 8, &QuadratureSpec::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let v: Vec<f64> = (0..g.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut q = 0.0;
            for k in 0..g.dim {
                for l in 0..g.dim {
                    q += v[k] * g.entries[k * g.dim + l] * v[l];
                }
            }
            assert!(q > 0.0);
        }
    }

    #[test]
    fn extended_and_double_agree() {
        let d = gallery::disc();
        let basis = PolyBasis::new(6, d.bbox()).unwrap();
        let cub = gram_cubature(&d, &basis, &QuadratureSpec::default()).unwrap();
        let a = assemble_gram(&cub, &basis, PrecisionMode::Double).unwrap();
        let b = assemble_gram(&cub, &basis, PrecisionMode::Extended).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x - y).abs() < 1e-13);
        }
        let phi = basis.eval(crate::geometry::Point2::new(0.3, 0.2));
        let qa = a.inverse_quadratic_form(&phi);
        let qb = b.inverse_quadratic_form(&phi);
        assert!((qa - qb).abs() < 1e-12 * qb);
        assert_eq!(a.method, FactorMethod::Qr);
    }
}
