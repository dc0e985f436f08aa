//! Independent reference for `λ_n`: fan triangulation of a flattened
//! boundary, collapsed-square Gauss rules on each triangle, a Chebyshev
//! product basis and a dense Cholesky solve.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Gauss–Legendre on `[0, 1]` from the Jacobi matrix eigenproblem.
pub fn gauss01(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| (0.5 * (eig.eigenvalues[i] + 1.0), eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn chebyshev(t: f64, n: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if n >= 1 {
        out[1] = t;
    }
    for k in 2..=n {
        out[k] = 2.0 * t * out[k - 1] - out[k - 2];
    }
}

pub struct Oracle {
    n: usize,
    cols: Vec<(usize, usize)>,
    gram: DMatrix<f64>,
    scale: f64,
}

impl Oracle {
    /// `polygon`: counterclockwise vertices of a polygon star-shaped about
    /// `center`; the basis lives on `[-scale, scale]²`.
    pub fn new(polygon: &[[f64; 2]], center: [f64; 2], n: usize, scale: f64) -> Oracle {
        let cols: Vec<(usize, usize)> = (0..=n).flat_map(|k| (0..=k).map(move |b| (k - b, b))).collect();
        let dim = cols.len();
        let (g, w) = gauss01(n + 1);
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        let chunk = 4096;
        let mut rows: Vec<f64> = Vec::with_capacity(chunk * dim);
        let mut tx = vec![0.0; n + 1];
        let mut ty = vec![0.0; n + 1];
        let flush = |rows: &mut Vec<f64>, gram: &mut DMatrix<f64>| {
            if rows.is_empty() {
                return;
            }
            let m = DMatrix::from_row_slice(rows.len() / dim, dim, rows);
            *gram += m.transpose() * &m;
            rows.clear();
        };
        let m = polygon.len();
        for i in 0..m {
            let a = center;
            let b = polygon[i];
            let c = polygon[(i + 1) % m];
            let det = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            for (u, wu) in g.iter().zip(&w) {
                for (v, wv) in g.iter().zip(&w) {
                    let x = a[0] + u * (b[0] - a[0]) + u * v * (c[0] - b[0]);
                    let y = a[1] + u * (b[1] - a[1]) + u * v * (c[1] - b[1]);
                    let sw = (wu * wv * u * det.abs()).sqrt();
                    chebyshev(x / scale, n, &mut tx);
                    chebyshev(y / scale, n, &mut ty);
                    rows.extend(cols.iter().map(|&(p, q)| sw * tx[p] * ty[q]));
                    if rows.len() >= chunk * dim {
                        flush(&mut rows, &mut gram);
                    }
                }
            }
        }
        flush(&mut rows, &mut gram);
        Oracle { n, cols, gram, scale }
    }

    /// `λ_k(x)` for any `k ≤ n`, from the leading block of the Gram matrix.
    pub fn lambda(&self, k: usize, x: [f64; 2]) -> f64 {
        assert!(k <= self.n);
        let dim = (k + 1) * (k + 2) / 2;
        let block = self.gram.view((0, 0), (dim, dim)).into_owned();
        let chol = block.cholesky().expect("oracle Gram is positive definite");
        let mut tx = vec![0.0; self.n + 1];
        let mut ty = vec![0.0; self.n + 1];
        chebyshev(x[0] / self.scale, self.n, &mut tx);
        chebyshev(x[1] / self.scale, self.n, &mut ty);
        let phi = DVector::from_iterator(dim, self.cols[..dim].iter().map(|&(p, q)| tx[p] * ty[q]));
        let z = chol.l().solve_lower_triangular(&phi).expect("nonsingular factor");
        1.0 / z.norm_squared()
    }
}

/// Regular `m`-gon inscribed in the unit circle.
pub fn circle_polygon(m: usize) -> Vec<[f64; 2]> {
    (0..m)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}
