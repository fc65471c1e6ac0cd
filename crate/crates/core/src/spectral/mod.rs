//! Frequency-grid representation of band-limited functions, the shared
//! Fourier convention, Bessel potentials, norms and windowed energies.

pub mod filon;
pub mod function;
pub mod grid;
pub mod quad;
pub mod transform;
pub mod window;

pub use filon::{evaluate_filon, filon_residual, FilonGuard};
pub use function::SpectralFunction;
pub use grid::FrequencyGrid;
pub use transform::{
    evaluate_on_uniform, evaluate_physical, fourier_conventions, FourierConventions, PhaseBudget, UniformNodes,
};
pub use window::{bridge, SmoothWindow, TransitionProfile};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const INV_TWO_PI: f64 = 0.5 * std::f64::consts::FRAC_1_PI;

/// Default physical step for window quadratures.
pub const DEFAULT_X_STEP: f64 = 0.05;

/// Extra physical bandwidth (rad/length) allowed for the window's own spectrum
/// when sizing the band-limited trapezoid step.
const WINDOW_BANDWIDTH: f64 = std::f64::consts::TAU;

/// Evaluation backend for physical-space values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Trapezoid if the phase budget holds, Filon otherwise.
    Auto,
    /// Trapezoid rule (fast transform on dual nodes, direct sum elsewhere).
    OversampledFft,
    /// Filon quadrature with local phase linearization.
    Filon,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::OversampledFft => "oversampled_fft",
            Backend::Filon => "filon",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "oversampled_fft" | "fft" => Ok(Backend::OversampledFft),
            "filon" => Ok(Backend::Filon),
            other => Err(Error::Config(format!("unknown backend '{other}'"))),
        }
    }
}

/// Physical samples together with the backend that produced them.
#[derive(Debug, Clone)]
pub struct PhysicalSamples {
    pub nodes: UniformNodes,
    pub values: Vec<Complex64>,
    pub backend: Backend,
    /// Fraction of the backend's guard that was used (<= 1).
    pub guard_usage: f64,
}

/// Evaluate on uniform nodes with the requested backend. `Auto` prefers the
/// trapezoid path and falls back to Filon when the phase budget fails.
pub fn evaluate_with_backend(
    f: &SpectralFunction,
    nodes: UniformNodes,
    backend: Backend,
    budget: PhaseBudget,
    guard: FilonGuard,
) -> Result<PhysicalSamples> {
    let trapezoid_usage = budget.usage(f, nodes.x0, nodes.last());
    let run_filon = |f: &SpectralFunction| -> Result<PhysicalSamples> {
        let values = evaluate_filon(f, &nodes.to_vec(), guard)?;
        Ok(PhysicalSamples {
            nodes,
            values,
            backend: Backend::Filon,
            guard_usage: filon_residual(f) / guard.max_residual,
        })
    };
    match backend {
        Backend::OversampledFft => Ok(PhysicalSamples {
            nodes,
            values: evaluate_on_uniform(f, nodes, budget)?,
            backend: Backend::OversampledFft,
            guard_usage: trapezoid_usage,
        }),
        Backend::Filon => run_filon(f),
        Backend::Auto if trapezoid_usage <= 1.0 => Ok(PhysicalSamples {
            nodes,
            values: evaluate_on_uniform(f, nodes, budget)?,
            backend: Backend::OversampledFft,
            guard_usage: trapezoid_usage,
        }),
        Backend::Auto => run_filon(f),
    }
}

/// Physical step that makes the window trapezoid exact for data band-limited
/// to `|xi| <= xi_max`: `|g|^2` then lives in `|omega| <= 2 xi_max`.
pub fn band_limited_step(xi_max: f64) -> f64 {
    std::f64::consts::TAU / (2.0 * xi_max + WINDOW_BANDWIDTH)
}

/// Effective physical step for window quadratures of `f`: the requested step,
/// capped by the band-limit criterion.
pub fn window_step(f: &SpectralFunction, requested: f64) -> f64 {
    let xi_max = f
        .support()
        .map_or(0.0, |(a, b)| a.abs().max(b.abs()));
    requested.min(band_limited_step(xi_max))
}

/// Result of a windowed energy evaluation.
#[derive(Debug, Clone)]
pub struct WindowedEnergy {
    pub value: f64,
    pub x_step: f64,
    pub backend: Backend,
    pub guard_usage: f64,
}

/// `int w(x) |Lambda^sigma f(x)|^2 dx` over the window support by the
/// trapezoid rule on physical samples.
pub fn windowed_energy(f: &SpectralFunction, w: &SmoothWindow, sigma: f64, x_step: f64) -> Result<f64> {
    windowed_energy_with(f, w, sigma, x_step, Backend::OversampledFft, PhaseBudget::default(), FilonGuard::default())
        .map(|e| e.value)
}

pub fn windowed_energy_with(
    f: &SpectralFunction,
    w: &SmoothWindow,
    sigma: f64,
    x_step: f64,
    backend: Backend,
    budget: PhaseBudget,
    guard: FilonGuard,
) -> Result<WindowedEnergy> {
    let g = f.bessel_potential(sigma);
    let (lo, hi) = w.support();
    let nodes = window_nodes(&g, lo, hi, x_step);
    let samples = evaluate_with_backend(&g, nodes, backend, budget, guard)?;
    Ok(WindowedEnergy {
        value: window_integral(w, &samples),
        x_step: nodes.dx,
        backend: samples.backend,
        guard_usage: samples.guard_usage,
    })
}

/// Uniform nodes over `[lo, hi]` with the band-limited step, dual to the
/// grid spacing whenever possible so the fast path applies.
pub fn window_nodes(f: &SpectralFunction, lo: f64, hi: f64, x_step: f64) -> UniformNodes {
    let step = window_step(f, x_step);
    let dxi = f.grid().spacing();
    let l = (std::f64::consts::TAU / (step * dxi)).ceil();
    let dual = std::f64::consts::TAU / (l * dxi);
    UniformNodes::with_step(lo, hi, dual)
}

/// Trapezoid of `w(x) |u(x)|^2` on the sample nodes.
pub fn window_integral(w: &SmoothWindow, samples: &PhysicalSamples) -> f64 {
    let nodes = samples.nodes;
    let last = nodes.count - 1;
    samples
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let edge = if j == 0 || j == last { 0.5 } else { 1.0 };
            edge * w.eval(nodes.node(j)) * v.norm_sqr()
        })
        .sum::<f64>()
        * nodes.dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_function_has_zero_windowed_energy() {
        let g = FrequencyGrid::symmetric(3.0, 0.01).unwrap();
        let f = SpectralFunction::zeros(g);
        let w = SmoothWindow::new((-2.0, 2.0), (-3.0, 3.0)).unwrap();
        assert_eq!(windowed_energy(&f, &w, 0.3, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn wide_window_recovers_plancherel() {
        let g = FrequencyGrid::symmetric(12.0, 0.02).unwrap();
        let f = SpectralFunction::sample(
            g,
            |xi| Complex64::new((-0.5 * xi * xi).exp(), 0.0),
            |_| 0.0,
            |_| 0.0,
            true,
        )
        .unwrap();
        let w = SmoothWindow::new((-15.0, 15.0), (-20.0, 20.0)).unwrap();
        let e = windowed_energy(&f, &w, 0.0, 0.05).unwrap();
        assert!((e - f.l2_norm_sq()).abs() < 1e-10, "{e} vs {}", f.l2_norm_sq());
    }

    #[test]
    fn backend_names_round_trip() {
        for b in [Backend::Auto, Backend::OversampledFft, Backend::Filon] {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("nope".parse::<Backend>().is_err());
    }
}
