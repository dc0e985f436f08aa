//! Dense symmetric positive-definite factorizations in working or
//! double-double precision.

use std::ops::{Add, Div, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    Double,
    /// Gram accumulation, factorization and solves in double-double arithmetic.
    Extended,
}

impl std::fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrecisionMode::Double => "double",
            PrecisionMode::Extended => "extended",
        })
    }
}

impl std::str::FromStr for PrecisionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" => Ok(PrecisionMode::Double),
            "extended" => Ok(PrecisionMode::Extended),
            _ => Err(format!("unknown precision mode '{s}' (expected double or extended)")),
        }
    }
}

pub trait Real:
    Copy
    + Send
    + Sync
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Correctly rounded (to the type's precision) quotient.
    fn quot(self, d: Self) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn quot(self, d: Self) -> Self {
        self / d
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    // The crate's division is only accurate to about one double ulp; one
    // correction step restores double-double accuracy.
    fn quot(self, d: Self) -> Self {
        let q = self / d;
        q + (self - q * d) / d
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`, stored row-major.
#[derive(Debug, Clone)]
pub struct Cholesky<R> {
    n: usize,
    l: Vec<R>,
}

impl<R: Real> Cholesky<R> {
    /// Factors a symmetric matrix given row-major. On failure returns the
    /// 1-based order of the first leading minor that is not positive.
    pub fn factor(a: &[R], n: usize) -> Result<Self, usize> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![R::zero(); n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > R::zero()) {
                return Err(j + 1);
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            let (head, tail) = l.split_at_mut((j + 1) * n);
            let row_j = &head[j * n..j * n + j];
            tail.par_chunks_mut(n).enumerate().for_each(|(off, row_i)| {
                let i = j + 1 + off;
                let mut s = a[i * n + j];
                for k in 0..j {
                    s = s - row_i[k] * row_j[k];
                }
                row_i[j] = s.quot(djj);
            });
        }
        Ok(Cholesky { n, l })
    }

    /// Wraps an existing lower-triangular factor.
    pub fn from_lower(l: Vec<R>, n: usize) -> Self {
        assert_eq!(l.len(), n * n);
        Cholesky { n, l }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> &[R] {
        &self.l
    }

    /// Solves `L z = b` in place.
    pub fn forward(&self, b: &mut [R]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let mut s = b[i];
            for k in 0..i {
                s = s - row[k] * b[k];
            }
            b[i] = s.quot(self.l[i * n + i]);
        }
    }

    /// Solves `Lᵀ x = z` in place.
    pub fn backward(&self, b: &mut [R]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * b[k];
            }
            b[i] = s.quot(self.l[i * n + i]);
        }
    }

    pub fn solve(&self, b: &mut [R]) {
        self.forward(b);
        self.backward(b);
    }

    /// `bᵀ A⁻¹ b = |L⁻¹ b|²`.
    pub fn inverse_quadratic_form(&self, b: &[R]) -> R {
        let mut z = b.to_vec();
        self.forward(&mut z);
        z.iter().fold(R::zero(), |acc, &v| acc + v * v)
    }

    pub fn to_f64(&self) -> Cholesky<f64> {
        Cholesky { n: self.n, l: self.l.iter().map(|v| v.to_f64()).collect() }
    }
}

impl Cholesky<f64> {
    /// `A v = L (Lᵀ v)`.
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut w = vec![0.0; n];
        for k in 0..n {
            let mut s = 0.0;
            for i in k..n {
                s += self.l[i * n + k] * v[i];
            }
            w[k] = s;
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.l[i * n + k] * w[k];
            }
            out[i] = s;
        }
        out
    }

    /// Power and inverse power iteration estimate of the 2-norm condition number.
    pub fn condition_estimate(&self, iterations: usize) -> f64 {
        let n = self.n;
        if n == 1 {
            return 1.0;
        }
        let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let normalize = |v: &mut Vec<f64>| {
            let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= s);
            s
        };
        let mut v = start.clone();
        normalize(&mut v);
        let mut lmax = 0.0;
        for _ in 0..iterations {
            v = self.apply(&v);
            lmax = normalize(&mut v);
        }
        let mut v = start;
        normalize(&mut v);
        let mut inv = 0.0;
        for _ in 0..iterations {
            self.solve(&mut v);
            inv = normalize(&mut v);
        }
        lmax * inv
    }
}

/// `Σ_i s_i u_ik u_il` for all `k ≤ l` in double-double, where `u` holds
/// columns of length `m` and `s` holds signs. Returned row-major and symmetric.
pub fn gram_double_double(columns: &[Vec<f64>], signs: &[f64]) -> Vec<TwoFloat> {
    let n = columns.len();
    let rows: Vec<Vec<TwoFloat>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let ck: Vec<f64> = columns[k].iter().zip(signs).map(|(a, s)| a * s).collect();
            (k..n)
                .map(|l| {
                    let cl = &columns[l];
                    let mut acc = TwoFloat::from(0.0);
                    for i in 0..ck.len() {
                        acc += TwoFloat::new_mul(ck[i], cl[i]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut g = vec![TwoFloat::from(0.0); n * n];
    for (k, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let l = k + off;
            g[k * n + l] = v;
            g[l * n + k] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> Vec<f64> {
        (0..n * n).map(|k| 1.0 / ((k / n + k % n + 1) as f64)).collect()
    }

    #[test]
    fn factor_and_solve() {
        let a = vec![4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let c = Cholesky::factor(&a, 3).unwrap();
        let mut b = vec![1.0, 2.0, 3.0];
        c.solve(&mut b);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * b[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_reports_minor() {
        let a = vec![1.0, 2.0, 2.0, 1.0];
        assert_eq!(Cholesky::factor(&a, 2).unwrap_err(), 2);
        let a = vec![-1.0, 0.0, 0.0, 1.0];
        assert_eq!(Cholesky::factor(&a, 2).unwrap_err(), 1);
    }

    #[test]
    fn double_double_solves_hilbert() {
        // Hilbert matrix of order 10 has condition number about 1.6e13.
        let n = 10;
        let h = hilbert(n);
        let hd: Vec<TwoFloat> = (0..n * n)
            .map(|k| TwoFloat::from(1.0).quot(TwoFloat::from((k / n + k % n + 1) as f64)))
            .collect();
        let ones = vec![1.0; n];
        let rhs: Vec<TwoFloat> = (0..n)
            .map(|i| (0..n).fold(TwoFloat::from(0.0), |acc, j| acc + hd[i * n + j]))
            .collect();
        let c = Cholesky::factor(&hd, n).unwrap();
        let mut x = rhs;
        c.solve(&mut x);
        let err = x.iter().zip(&ones).map(|(a, b)| (a.to_f64() - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let cond = Cholesky::factor(&h, n).unwrap().condition_estimate(60);
        assert!(cond > 1e12 && cond < 1e14, "{cond}");
    }

    #[test]
    fn dd_gram_matches_direct() {
        let cols = vec![vec![1.0, 2.0, 3.0], vec![0.5, -1.0, 2.0]];
        let signs = vec![1.0, -1.0, 1.0];
        let g = gram_double_double(&cols, &signs);
        assert_eq!(g[0].to_f64(), 1.0 - 4.0 + 9.0);
        assert_eq!(g[1].to_f64(), 0.5 + 2.0 + 6.0);
        assert_eq!(g[2].to_f64(), g[1].to_f64());
    }
}
