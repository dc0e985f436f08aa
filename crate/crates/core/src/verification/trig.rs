use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// `T(θ) = Σ_k a_k cos kθ + b_k sin kθ`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let len = cos.len().max(sin.len()).max(1);
        let mut cos = cos;
        let mut sin = sin;
        cos.resize(len, 0.0);
        sin.resize(len, 0.0);
        TrigPoly { cos, sin }
    }

    /// `cos(nθ)`.
    pub fn chebyshev(n: usize) -> Self {
        let mut cos = vec![0.0; n + 1];
        cos[n] = 1.0;
        TrigPoly::new(cos, vec![])
    }

    /// Independent standard normal coefficients; `b_0 = 0`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let cos: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
        let sin: Vec<f64> = (0..=n).map(|k| if k == 0 { 0.0 } else { rng.sample(StandardNormal) }).collect();
        TrigPoly { cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len() - 1
    }

    /// `(T(θ), T'(θ))`.
    pub fn eval_with_derivative(&self, theta: f64) -> (f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let (mut v, mut dv) = (0.0, 0.0);
        for k in 0..self.cos.len() {
            let kf = k as f64;
            v += self.cos[k] * c + self.sin[k] * s;
            dv += kf * (self.sin[k] * c - self.cos[k] * s);
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        (v, dv)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_with_derivative(theta).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let t = TrigPoly::random(7, &mut rng);
        for &th in &[-2.0, -0.4, 0.0, 1.3] {
            let h = 1e-6;
            let fd = (t.eval(th + h) - t.eval(th - h)) / (2.0 * h);
            assert!((t.eval_with_derivative(th).1 - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn chebyshev_case() {
        let t = TrigPoly::chebyshev(5);
        let (v, d) = t.eval_with_derivative(0.3);
        assert!((v - (1.5f64).cos()).abs() < 1e-13);
        assert!((d + 5.0 * (1.5f64).sin()).abs() < 1e-12);
        assert_eq!(TrigPoly::new(vec![2.0], vec![]).eval_with_derivative(1.0).1, 0.0);
    }
}
