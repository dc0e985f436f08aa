use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point2};

/// Products `L_a(x) L_b(y)` with `a + b ≤ n` of Legendre polynomials that
/// are orthonormal on the sides of a box, in graded lexicographic order:
/// degree ascending, and within degree `d` the pairs `(d, 0), (d−1, 1), …, (0, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyBasis {
    n: usize,
    bbox: BoundingBox,
    index: Vec<(usize, usize)>,
}

pub fn basis_dimension(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

impl PolyBasis {
    pub fn new(n: usize, bbox: BoundingBox) -> Result<Self> {
        if !(bbox.width() > 0.0 && bbox.height() > 0.0) {
            return Err(Error::InvalidParameter("basis box must have positive width and height".into()));
        }
        let mut index = Vec::with_capacity(basis_dimension(n));
        for d in 0..=n {
            for a in (0..=d).rev() {
                index.push((a, d - a));
            }
        }
        Ok(PolyBasis { n, bbox, index })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn index(&self) -> &[(usize, usize)] {
        &self.index
    }

    /// Position of `(a, b)` in the canonical order.
    pub fn position(a: usize, b: usize) -> usize {
        let d = a + b;
        basis_dimension(d) - d - 1 + b
    }

    pub fn eval(&self, p: Point2) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(p, &mut out);
        out
    }

    pub fn eval_into(&self, p: Point2, out: &mut [f64]) {
        let mut lx = [0.0; 64];
        let mut ly = [0.0; 64];
        legendre_values(self.n, p.x, self.bbox.min.x, self.bbox.max.x, &mut lx);
        legendre_values(self.n, p.y, self.bbox.min.y, self.bbox.max.y, &mut ly);
        for (o, &(a, b)) in out.iter_mut().zip(&self.index) {
            *o = lx[a] * ly[b];
        }
    }
}

/// Values of the orthonormal Legendre polynomials of degree `0..=n` on `[lo, hi]`.
fn legendre_values(n: usize, x: f64, lo: f64, hi: f64, out: &mut [f64]) {
    let len = hi - lo;
    let u = (2.0 * x - lo - hi) / len;
    let (mut p0, mut p1) = (1.0, u);
    out[0] = 1.0;
    if n >= 1 {
        out[1] = u;
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * u * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
        out[k + 1] = p2;
    }
    for (k, v) in out.iter_mut().enumerate().take(n + 1) {
        *v *= ((2 * k + 1) as f64 / len).sqrt();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::rules::gauss_legendre;
    use rand::{RngExt, SeedableRng};

    fn unit_box() -> BoundingBox {
        BoundingBox::new(Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0))
    }

    #[test]
    fn ordering_and_dimension() {
        let b = PolyBasis::new(3, unit_box()).unwrap();
        assert_eq!(b.dim(), 10);
        assert_eq!(&b.index()[..6], &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (k, &(a, c)) in b.index().iter().enumerate() {
            assert_eq!(PolyBasis::position(a, c), k);
        }
    }

    #[test]
    fn degree_one_at_center() {
        let bb = BoundingBox::new(Point2::new(0.0, 2.0), Point2::new(4.0, 3.0));
        let b = PolyBasis::new(1, bb).unwrap();
        let v = b.eval(bb.center());
        assert!((v[0] - 1.0 / (4.0f64).sqrt()).abs() < 1e-15);
        assert_eq!(v[1], 0.0);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn orthonormal_on_box() {
        let bb = BoundingBox::new(Point2::new(-0.5, 1.0), Point2::new(2.0, 1.7));
        let b = PolyBasis::new(6, bb).unwrap();
        let (x, w) = gauss_legendre(8);
        let n = b.dim();
        let mut g = vec![0.0; n * n];
        for (xi, wi) in x.iter().zip(&w) {
            for (yj, wj) in x.iter().zip(&w) {
                let p = Point2::new(
                    bb.min.x + 0.5 * (xi + 1.0) * bb.width(),
                    bb.min.y + 0.5 * (yj + 1.0) * bb.height(),
                );
                let v = b.eval(p);
                let ww = wi * wj * 0.25 * bb.width() * bb.height();
                for k in 0..n {
                    for l in 0..n {
                        g[k * n + l] += ww * v[k] * v[l];
                    }
                }
            }
        }
        for k in 0..n {
            for l in 0..n {
                let e = if k == l { 1.0 } else { 0.0 };
                assert!((g[k * n + l] - e).abs() < 1e-12);
            }
        }
    }

    /// Explicit orthonormal Legendre polynomials on [-1, 1] in monomial form.
    fn legendre_monomial(k: usize, u: f64) -> f64 {
        let p = match k {
            0 => 1.0,
            1 => u,
            2 => 0.5 * (3.0 * u * u - 1.0),
            3 => 0.5 * (5.0 * u.powi(3) - 3.0 * u),
            4 => (35.0 * u.powi(4) - 30.0 * u * u + 3.0) / 8.0,
            5 => (63.0 * u.powi(5) - 70.0 * u.powi(3) + 15.0 * u) / 8.0,
            6 => (231.0 * u.powi(6) - 315.0 * u.powi(4) + 105.0 * u * u - 5.0) / 16.0,
            _ => unreachable!(),
        };
        p * ((2 * k + 1) as f64 / 2.0).sqrt()
    }

    #[test]
    fn recurrence_matches_monomial_expansion() {
        let b = PolyBasis::new(6, unit_box()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v = b.eval(p);
            for (k, &(a, c)) in b.index().iter().enumerate() {
                let direct = legendre_monomial(a, p.x) * legendre_monomial(c, p.y);
                assert!((v[k] - direct).abs() < 1e-12);
            }
        }
    }
}
