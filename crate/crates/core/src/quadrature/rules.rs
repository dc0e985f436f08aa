//! One-dimensional rules on `[-1, 1]`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Gauss–Legendre nodes (ascending) and weights.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&m) {
        return r.clone();
    }
    let r = compute_gauss_legendre(m);
    cache.lock().unwrap().insert(m, r.clone());
    r
}

fn compute_gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "rule needs at least one node");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// `(P_m(z), P_m'(z))` by the three-term recurrence.
fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 1..m {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod nodes with Kronrod weights and the embedded 7-point
/// Gauss weights (zero at the Kronrod-only nodes).
pub struct KronrodRule {
    pub nodes: [f64; 15],
    pub kronrod: [f64; 15],
    pub gauss: [f64; 15],
}

pub fn kronrod15() -> KronrodRule {
    let mut nodes = [0.0; 15];
    let mut kronrod = [0.0; 15];
    let mut gauss = [0.0; 15];
    for i in 0..7 {
        nodes[i] = -XGK[i];
        nodes[14 - i] = XGK[i];
        kronrod[i] = WGK[i];
        kronrod[14 - i] = WGK[i];
        if i % 2 == 1 {
            gauss[i] = WG[i / 2];
            gauss[14 - i] = WG[i / 2];
        }
    }
    nodes[7] = 0.0;
    kronrod[7] = WGK[7];
    gauss[7] = WG[3];
    KronrodRule { nodes, kronrod, gauss }
}
