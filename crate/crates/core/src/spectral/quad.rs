//! Small quadrature and interpolation helpers.

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            return (vec![0.0], vec![2.0]);
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(&t, &wt)| (mid + half * t, half * wt)).collect()
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes) of
/// samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct Pchip {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn uniform(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 2, "pchip needs two samples");
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            let (a, b) = (delta[k - 1], delta[k]);
            if a * b > 0.0 {
                // harmonic mean (uniform spacing)
                d[k] = 2.0 * a * b / (a + b);
            }
        }
        d[0] = end_slope(delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        d[n - 1] = end_slope(delta[n - 2], if n > 2 { delta[n - 3] } else { delta[n - 2] });
        Self { x0, h, y, d }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = (x - self.x0) / self.h;
        if s <= 0.0 {
            return self.y[0];
        }
        if s >= (n - 1) as f64 {
            return self.y[n - 1];
        }
        let k = (s.floor() as usize).min(n - 2);
        let t = s - k as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * self.h * self.d[k] + h01 * self.y[k + 1] + h11 * self.h * self.d[k + 1]
    }
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    let d = 0.5 * (3.0 * d0 - d1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Cubic Hermite interpolation from values and exact derivatives on a uniform grid.
pub fn hermite_uniform(x0: f64, h: f64, y: &[f64], dy: &[f64], x: f64) -> f64 {
    let n = y.len();
    let s = ((x - x0) / h).clamp(0.0, (n - 1) as f64);
    let k = (s.floor() as usize).min(n - 2);
    let t = s - k as f64;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y[k]
        + (t3 - 2.0 * t2 + t) * h * dy[k]
        + (-2.0 * t3 + 3.0 * t2) * y[k + 1]
        + (t3 - t2) * h * dy[k + 1]
}
