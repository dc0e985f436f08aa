use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::rules::gauss_legendre;
use crate::rho::rho_star;

/// Constant against which every univariate needle's decay profile is checked.
pub const NEEDLE_CONSTANT: f64 = 10.0;

/// Number of equispaced samples on `[-1, 1]` used to validate a needle.
pub const VALIDATION_SAMPLES: usize = 10_000;

/// A polynomial on `[-1, 1]` in the Chebyshev basis `Σ c_k T_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariatePoly {
    pub coeffs: Vec<f64>,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        UnivariatePoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw recurrence; valid for any real `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s * b1 - b2 + self.coeffs[0]
    }

    /// `∫_{-1}^{1} Q²`, exact up to rounding.
    pub fn l2_norm_squared(&self) -> f64 {
        let (x, w) = gauss_legendre(self.degree() + 1);
        x.iter().zip(&w).map(|(s, w)| w * self.eval(*s).powi(2)).sum()
    }
}

/// `T_0(a), …, T_m(a)` by the three-term recurrence.
fn chebyshev_values(a: f64, m: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(m + 1);
    t.push(1.0);
    if m >= 1 {
        t.push(a);
    }
    for k in 2..=m {
        t.push(2.0 * a * t[k - 1] - t[k - 2]);
    }
    t
}

/// The decay envelope `ρ/(ρ + |a − s|)` with `ρ = ρ*_n(t)` and `a = 1 − t`.
pub fn univariate_envelope(n: usize, t: f64, s: f64) -> Result<f64> {
    let rho = rho_star(n, t)?;
    Ok(rho / (rho + (1.0 - t - s).abs()))
}

/// Needle of degree `⌊n/2⌋` with `Q(1 − t) = 1`, built from the Fejér kernel
/// anchored at `1 − t` and validated against the decay envelope.
pub fn univariate_needle(n: usize, t: f64) -> Result<UnivariatePoly> {
    let q = univariate_needle_unchecked(n, t)?;
    let c = univariate_decay_constant(&q, n, t)?;
    if c > NEEDLE_CONSTANT {
        return Err(Error::DecayValidation { observed: c, limit: NEEDLE_CONSTANT });
    }
    Ok(q)
}

pub(crate) fn univariate_needle_unchecked(n: usize, t: f64) -> Result<UnivariatePoly> {
    if n == 0 {
        return Err(Error::InvalidParameter("needle degree must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfDomain { s: t });
    }
    let a = 1.0 - t;
    let m = n / 2 + 1;
    let ta = chebyshev_values(a, m - 1);
    let mut coeffs: Vec<f64> = (0..m)
        .map(|k| if k == 0 { 1.0 } else { 2.0 * (1.0 - k as f64 / m as f64) * ta[k] })
        .collect();
    let q = UnivariatePoly::new(coeffs.clone());
    let scale = q.eval(a);
    coeffs.iter_mut().for_each(|c| *c /= scale);
    Ok(UnivariatePoly::new(coeffs))
}

/// `max_s |Q(s)| / envelope(s)` over the validation sample.
pub fn univariate_decay_constant(q: &UnivariatePoly, n: usize, t: f64) -> Result<f64> {
    let rho = rho_star(n, t)?;
    let a = 1.0 - t;
    let last = (VALIDATION_SAMPLES - 1) as f64;
    let c = (0..VALIDATION_SAMPLES)
        .into_par_iter()
        .map(|k| {
            let s = -1.0 + 2.0 * k as f64 / last;
            q.eval(s).abs() * (rho + (a - s).abs()) / rho
        })
        .reduce(|| 0.0, f64::max);
    Ok(c.max(q.eval(a).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clenshaw_matches_cosines() {
        let q = UnivariatePoly::new(vec![0.5, -1.0, 0.25, 2.0]);
        for &s in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            let th: f64 = f64::acos(s);
            let direct = 0.5 - th.cos() + 0.25 * (2.0 * th).cos() + 2.0 * (3.0 * th).cos();
            assert!((q.eval(s) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn degree_and_anchor() {
        for n in [1, 2, 5, 8, 16, 33] {
            for t in [0.0, 0.25, 1.0] {
                let q = univariate_needle(n, t).unwrap();
                assert!(q.degree() <= n / 2);
                assert!((q.eval(1.0 - t) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn profile_at_t_one() {
        let q = univariate_needle(16, 1.0).unwrap();
        let c = univariate_decay_constant(&q, 16, 1.0).unwrap();
        assert!(c >= 1.0 && c <= NEEDLE_CONSTANT, "{c}");
    }

    #[test]
    fn constant_stable_across_degrees() {
        let c8 = univariate_decay_constant(&univariate_needle(8, 0.25).unwrap(), 8, 0.25).unwrap();
        let c32 = univariate_decay_constant(&univariate_needle(32, 0.25).unwrap(), 32, 0.25).unwrap();
        assert!(c32 <= 1.5 * c8 && c8 <= 1.5 * c32, "{c8} {c32}");
    }

    #[test]
    fn norm_by_quadrature() {
        let q = UnivariatePoly::new(vec![0.0, 1.0]);
        assert!((q.l2_norm_squared() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(univariate_needle(0, 0.5).is_err());
        assert!(univariate_needle(4, 1.5).is_err());
        assert!(univariate_needle(4, -0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn validated_everywhere(n in 1usize..40, t in 0.0f64..=1.0) {
            let q = univariate_needle(n, t).unwrap();
            prop_assert!((q.eval(1.0 - t) - 1.0).abs() < 1e-13);
        }
    }
}
