//! Filon-type quadrature for `(1/2pi) int a(xi) exp(i (psi(xi) + x xi)) dxi`.
//!
//! The grid is cut into panels of two intervals. On each panel the phase is
//! linearized at the midpoint node using the stored analytic slope; what the
//! linearization misses is moved into the amplitude, which is then
//! interpolated by a quadratic through the three panel nodes. The product of
//! that quadratic with `exp(i k u)` is integrated exactly through the moments
//! `m_j(theta) = int_{-1}^{1} v^j exp(i theta v) dv`, so the cost does not grow
//! with the oscillation frequency, only with the curvature of the phase.

use num_complex::Complex64;
use rayon::prelude::*;

use super::function::SpectralFunction;
use super::INV_TWO_PI;
use crate::error::{Error, Result};

/// Admissible panel phase residual `|psi(c +- h) - psi(c) -+ psi'(c) h|` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilonGuard {
    pub max_residual: f64,
}

impl Default for FilonGuard {
    fn default() -> Self {
        Self { max_residual: 0.25 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    center: f64,
    half_width: f64,
    slope: f64,
    c0: Complex64,
    c1: Complex64,
    c2: Complex64,
}

const SERIES_CUTOFF: f64 = 0.5;

/// Moments `(m0, m1 / i, m2)`; `m0`, `m2` are real and `m1` purely imaginary.
#[inline]
pub(crate) fn moments(theta: f64) -> (f64, f64, f64) {
    if theta.abs() < SERIES_CUTOFF {
        // m_j = sum_n (i theta)^n / n! * 2 / (j + n + 1) over j + n even
        let t2 = theta * theta;
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        let mut term = 1.0; // (-1)^p theta^(2p) / (2p)!
        let mut p = 0usize;
        while p < 12 {
            let n = 2 * p;
            m0 += term * 2.0 / (n as f64 + 1.0);
            m2 += term * 2.0 / (n as f64 + 3.0);
            // odd power n + 1 for m1: (-1)^p theta^(2p+1) / (2p+1)!
            let odd = term * theta / (n as f64 + 1.0);
            m1 += odd * 2.0 / (n as f64 + 3.0);
            term *= -t2 / ((n as f64 + 1.0) * (n as f64 + 2.0));
            p += 1;
            if term.abs() < 1e-18 {
                break;
            }
        }
        (m0, m1, m2)
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        let m0 = 2.0 * s / theta;
        let m1 = 2.0 * (s - theta * c) / t2;
        let m2 = 2.0 * ((t2 - 2.0) * s + 2.0 * theta * c) / (t2 * theta);
        (m0, m1, m2)
    }
}

fn build_panels(f: &SpectralFunction, guard: FilonGuard) -> Result<Vec<Panel>> {
    let Some((a, b)) = f.support_indices() else {
        return Ok(Vec::new());
    };
    let grid = f.grid();
    let n = grid.count();
    let h = grid.spacing();
    // widen by one node so the edge panels see the zero neighbours
    let start = a.saturating_sub(1);
    let end = (b + 1).min(n - 1);
    let amp = f.amplitude();
    let phase = f.phase();
    let slope = f.phase_slope();

    let mut panels = Vec::with_capacity((end - start) / 2 + 1);
    let mut worst: f64 = 0.0;
    let mut k = start;
    while k + 2 <= end {
        let (l, m, r) = (k, k + 1, k + 2);
        if amp[l].norm_sqr() + amp[m].norm_sqr() + amp[r].norm_sqr() > 0.0 {
            let s = slope[m];
            let res_l = phase[l] - phase[m] + s * h;
            let res_r = phase[r] - phase[m] - s * h;
            worst = worst.max(res_l.abs()).max(res_r.abs());
            let e = Complex64::cis(phase[m]);
            let fl = amp[l] * Complex64::cis(res_l);
            let f0 = amp[m];
            let fr = amp[r] * Complex64::cis(res_r);
            panels.push(Panel {
                center: grid.node(m),
                half_width: h,
                slope: s,
                c0: e * f0,
                c1: e * (fr - fl) * 0.5,
                c2: e * (fr - f0 * 2.0 + fl) * 0.5,
            });
        }
        k += 2;
    }
    if k < end {
        // one interval left over: linear amplitude, secant phase
        let (l, r) = (k, k + 1);
        if amp[l].norm_sqr() + amp[r].norm_sqr() > 0.0 {
            let s = (phase[r] - phase[l]) / h;
            let e = Complex64::cis(0.5 * (phase[l] + phase[r]));
            panels.push(Panel {
                center: 0.5 * (grid.node(l) + grid.node(r)),
                half_width: 0.5 * h,
                slope: s,
                c0: e * (amp[l] + amp[r]) * 0.5,
                c1: e * (amp[r] - amp[l]) * 0.5,
                c2: Complex64::new(0.0, 0.0),
            });
        }
    }
    if worst > guard.max_residual {
        return Err(Error::resolution("filon panel phase residual", worst, guard.max_residual));
    }
    Ok(panels)
}

/// Largest panel phase residual on the grid of `f`; `<= guard.max_residual`
/// means the Filon backend is admissible.
pub fn filon_residual(f: &SpectralFunction) -> f64 {
    let Some((a, b)) = f.support_indices() else {
        return 0.0;
    };
    let h = f.grid().spacing();
    let (phase, slope) = (f.phase(), f.phase_slope());
    let end = (b + 1).min(f.grid().count() - 1);
    let mut worst: f64 = 0.0;
    let mut k = a.saturating_sub(1);
    while k + 2 <= end {
        let s = slope[k + 1];
        worst = worst
            .max((phase[k] - phase[k + 1] + s * h).abs())
            .max((phase[k + 2] - phase[k + 1] - s * h).abs());
        k += 2;
    }
    worst
}

/// `(1/2pi) int f^(xi) exp(i x xi) dxi` at each `x` by Filon quadrature.
pub fn evaluate_filon(f: &SpectralFunction, xs: &[f64], guard: FilonGuard) -> Result<Vec<Complex64>> {
    let panels = build_panels(f, guard)?;
    Ok(xs
        .par_iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &panels {
                let theta = (p.slope + x) * p.half_width;
                let (m0, m1, m2) = moments(theta);
                let inner = p.c0 * m0 + p.c1 * Complex64::new(0.0, m1) + p.c2 * m2;
                acc += inner * Complex64::cis(x * p.center) * p.half_width;
            }
            acc * INV_TWO_PI
        })
        .collect())
}
