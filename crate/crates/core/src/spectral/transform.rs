use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::function::SpectralFunction;
use super::INV_TWO_PI;
use crate::error::{Error, Result};

/// Largest fold buffer the fast path will allocate (complex entries).
pub const MAX_FFT_LEN: usize = 1 << 26;

/// The Fourier convention shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierConventions {
    /// Sign of the exponent in `u^(xi) = int u(x) exp(sign * i x xi) dx`.
    pub forward_sign: f64,
    /// Factor in `u(x) = c * int u^(xi) exp(i x xi) dxi`.
    pub inverse_normalization: f64,
    /// Factor in `int |u|^2 dx = c * int |u^|^2 dxi`.
    pub plancherel_factor: f64,
}

pub const FOURIER: FourierConventions = FourierConventions {
    forward_sign: -1.0,
    inverse_normalization: INV_TWO_PI,
    plancherel_factor: INV_TWO_PI,
};

pub fn fourier_conventions() -> FourierConventions {
    FOURIER
}

/// A-priori resolution criterion for trapezoid quadrature of oscillatory
/// frequency integrals: `dxi * max |d(phase)/dxi| <= theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBudget {
    pub theta: f64,
}

impl Default for PhaseBudget {
    fn default() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_4,
        }
    }
}

impl PhaseBudget {
    /// Spacing needed to resolve a phase rate `rate`.
    pub fn max_spacing(&self, rate: f64) -> f64 {
        if rate <= 0.0 {
            f64::INFINITY
        } else {
            self.theta / rate
        }
    }

    /// Ratio `dxi * rate / theta` (<= 1 means the guard holds).
    pub fn usage(&self, f: &SpectralFunction, x_lo: f64, x_hi: f64) -> f64 {
        f.grid().spacing() * f.max_phase_rate(x_lo, x_hi) / self.theta
    }

    pub fn check(&self, f: &SpectralFunction, x_lo: f64, x_hi: f64, context: &str) -> Result<()> {
        let measured = f.grid().spacing() * f.max_phase_rate(x_lo, x_hi);
        if measured > self.theta {
            return Err(Error::resolution(context, measured, self.theta));
        }
        Ok(())
    }
}

/// Uniform physical sample points `x0 + j * dx`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformNodes {
    pub x0: f64,
    pub dx: f64,
    pub count: usize,
}

impl UniformNodes {
    /// Nodes covering `[lo, hi]` with step at most `max_step`, first node at `lo`.
    pub fn covering(lo: f64, hi: f64, max_step: f64) -> Self {
        let steps = ((hi - lo) / max_step).ceil().max(1.0) as usize;
        Self {
            x0: lo,
            dx: (hi - lo) / steps as f64,
            count: steps + 1,
        }
    }

    /// Nodes starting at `lo` with the given exact step, reaching at least `hi`.
    pub fn with_step(lo: f64, hi: f64, step: f64) -> Self {
        let steps = ((hi - lo) / step - 1e-9).ceil().max(1.0) as usize;
        Self {
            x0: lo,
            dx: step,
            count: steps + 1,
        }
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn last(&self) -> f64 {
        self.node(self.count - 1)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.node(j)).collect()
    }
}

/// `(1/2pi) int exp(i x xi) f^(xi) dxi` by the composite trapezoid rule, by
/// direct summation at arbitrary points. Fails when the phase budget is
/// violated on the requested x range.
pub fn evaluate_physical(f: &SpectralFunction, xs: &[f64], budget: PhaseBudget) -> Result<Vec<Complex64>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    budget.check(f, lo, hi, "evaluate_physical")?;
    Ok(evaluate_direct(f, xs))
}

pub(crate) fn evaluate_direct(f: &SpectralFunction, xs: &[f64]) -> Vec<Complex64> {
    let Some((a, b)) = f.support_indices() else {
        return vec![Complex64::new(0.0, 0.0); xs.len()];
    };
    let grid = f.grid();
    let terms: Vec<(f64, Complex64)> = (a..=b)
        .map(|k| (grid.node(k), f.value(k) * grid.weight(k)))
        .collect();
    xs.par_iter()
        .map(|&x| {
            let s: Complex64 = terms.iter().map(|&(xi, c)| c * Complex64::cis(x * xi)).sum();
            s * INV_TWO_PI
        })
        .collect()
}

/// Integer `L` with `dx * dxi = 2 pi / L`, if the two spacings are dual.
pub fn dual_length(dxi: f64, dx: f64) -> Option<usize> {
    let l = TAU / (dx * dxi);
    let r = l.round();
    if r >= 1.0 && (l - r).abs() <= 1e-7 * r {
        Some(r as usize)
    } else {
        None
    }
}

/// Evaluate on uniform nodes. When the node step is dual to the grid spacing
/// the whole batch is a single length-`L` inverse FFT of the folded samples;
/// otherwise falls back to direct summation.
pub fn evaluate_on_uniform(f: &SpectralFunction, nodes: UniformNodes, budget: PhaseBudget) -> Result<Vec<Complex64>> {
    budget.check(f, nodes.x0, nodes.last(), "evaluate_on_uniform")?;
    let terms = f.support_indices().map_or(0, |(a, b)| b - a + 1);
    match dual_length(f.grid().spacing(), nodes.dx) {
        // direct summation wins when the fold buffer dwarfs the work
        Some(l) if l <= MAX_FFT_LEN && fft_is_cheaper(terms, nodes.count, l) => Ok(evaluate_fft(f, nodes, l)),
        _ => Ok(evaluate_direct(f, &nodes.to_vec())),
    }
}

fn fft_is_cheaper(terms: usize, points: usize, l: usize) -> bool {
    let fft_cost = l as f64 * (l as f64).log2().max(1.0) * 2.0 + terms as f64;
    fft_cost < terms as f64 * points as f64
}

pub(crate) fn evaluate_fft(f: &SpectralFunction, nodes: UniformNodes, l: usize) -> Vec<Complex64> {
    let Some((a, b)) = f.support_indices() else {
        return vec![Complex64::new(0.0, 0.0); nodes.count];
    };
    let grid = f.grid();
    let dxi = grid.spacing();
    let xi0 = grid.xi_min();
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    // samples are streamed into the fold buffer, never materialized
    for k in a..=b {
        let c = f.value(k) * grid.weight(k) * Complex64::cis(nodes.x0 * k as f64 * dxi);
        buf[k % l] += c;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(l).process(&mut buf);
    (0..nodes.count)
        .map(|j| {
            let x = nodes.node(j);
            buf[j % l] * Complex64::cis(x * xi0) * INV_TWO_PI
        })
        .collect()
}
