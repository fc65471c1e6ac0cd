use num_complex::Complex64;

use super::grid::FrequencyGrid;
use super::INV_TWO_PI;
use crate::error::{Error, Result};

/// Relative tolerance used when verifying the Hermitian symmetry flag.
const HERMITIAN_TOL: f64 = 1e-12;

/// A band-limited function stored through its Fourier transform on a uniform
/// frequency grid.
///
/// Each sample is kept in polar-like split form `amplitude * exp(i * phase)`:
/// the amplitude is expected to vary slowly on the grid, while the phase (and
/// its analytic derivative `phase_slope`) carries every fast oscillation, such
/// as spatial shifts `exp(i 50 xi)` or propagator factors `exp(i xi^3 t)`.
/// Keeping the phase explicit makes the resolution guards exact and lets the
/// Filon backend integrate the oscillation analytically.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    grid: FrequencyGrid,
    amplitude: Vec<Complex64>,
    phase: Vec<f64>,
    phase_slope: Vec<f64>,
    hermitian: bool,
}

impl SpectralFunction {
    /// Build from raw parts. Fails when any entry is non-finite, lengths
    /// disagree with the grid, or the Hermitian flag is set but violated.
    pub fn from_parts(
        grid: FrequencyGrid,
        amplitude: Vec<Complex64>,
        phase: Vec<f64>,
        phase_slope: Vec<f64>,
        hermitian: bool,
    ) -> Result<Self> {
        let n = grid.count();
        if amplitude.len() != n || phase.len() != n || phase_slope.len() != n {
            return Err(Error::Grid(format!(
                "sample arrays must have length {n} (got {}, {}, {})",
                amplitude.len(),
                phase.len(),
                phase_slope.len()
            )));
        }
        if amplitude.iter().any(|a| !a.re.is_finite() || !a.im.is_finite())
            || phase.iter().chain(&phase_slope).any(|p| !p.is_finite())
        {
            return Err(Error::Domain("spectral samples must be finite".into()));
        }
        let f = Self {
            grid,
            amplitude,
            phase,
            phase_slope,
            hermitian,
        };
        if hermitian {
            f.check_hermitian()?;
        }
        Ok(f)
    }

    /// Sample `amplitude(xi) * exp(i * phase(xi))` on `grid`, with `phase_slope`
    /// the analytic derivative of `phase`.
    pub fn sample(
        grid: FrequencyGrid,
        amplitude: impl Fn(f64) -> Complex64,
        phase: impl Fn(f64) -> f64,
        phase_slope: impl Fn(f64) -> f64,
        hermitian: bool,
    ) -> Result<Self> {
        let nodes: Vec<f64> = grid.nodes().collect();
        Self::from_parts(
            grid,
            nodes.iter().map(|&x| amplitude(x)).collect(),
            nodes.iter().map(|&x| phase(x)).collect(),
            nodes.iter().map(|&x| phase_slope(x)).collect(),
            hermitian,
        )
    }

    /// Non-oscillatory samples (zero phase).
    pub fn from_values(grid: FrequencyGrid, values: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        let n = values.len();
        Self::from_parts(grid, values, vec![0.0; n], vec![0.0; n], hermitian)
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        let n = grid.count();
        Self {
            grid,
            amplitude: vec![Complex64::new(0.0, 0.0); n],
            phase: vec![0.0; n],
            phase_slope: vec![0.0; n],
            hermitian: grid.is_symmetric(),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn phase_slope(&self) -> &[f64] {
        &self.phase_slope
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Full sample value `f^(xi_k)`.
    #[inline]
    pub fn value(&self, k: usize) -> Complex64 {
        self.amplitude[k] * Complex64::cis(self.phase[k])
    }

    pub fn values(&self) -> Vec<Complex64> {
        (0..self.grid.count()).map(|k| self.value(k)).collect()
    }

    /// Index range `[first, last]` of nodes with nonzero amplitude, or `None`
    /// for the zero function.
    pub fn support_indices(&self) -> Option<(usize, usize)> {
        let first = self.amplitude.iter().position(|a| a.norm_sqr() > 0.0)?;
        let last = self.amplitude.iter().rposition(|a| a.norm_sqr() > 0.0)?;
        Some((first, last))
    }

    /// Frequency interval spanned by the nonzero samples.
    pub fn support(&self) -> Option<(f64, f64)> {
        self.support_indices()
            .map(|(a, b)| (self.grid.node(a), self.grid.node(b)))
    }

    /// Largest `|phase_slope + x|` over the support, for `x` in `[x_lo, x_hi]`.
    /// This is the maximal rate of oscillation (in radians per unit frequency)
    /// of the integrand `exp(i x xi) f^(xi)`.
    pub fn max_phase_rate(&self, x_lo: f64, x_hi: f64) -> f64 {
        let Some((a, b)) = self.support_indices() else {
            return 0.0;
        };
        self.phase_slope[a..=b]
            .iter()
            .zip(&self.amplitude[a..=b])
            .filter(|(_, amp)| amp.norm_sqr() > 0.0)
            .map(|(s, _)| (s + x_lo).abs().max((s + x_hi).abs()))
            .fold(0.0, f64::max)
    }

    /// Pointwise multiplication of the amplitude by a real or complex multiplier.
    pub fn map_amplitude(&self, mut m: impl FnMut(f64, Complex64) -> Complex64, hermitian: bool) -> Self {
        let amplitude = self
            .amplitude
            .iter()
            .enumerate()
            .map(|(k, &a)| m(self.grid.node(k), a))
            .collect();
        Self {
            grid: self.grid,
            amplitude,
            phase: self.phase.clone(),
            phase_slope: self.phase_slope.clone(),
            hermitian,
        }
    }

    /// Apply `amplitude *= gain(xi)`, `phase += dphase(xi)`, `phase_slope += dslope(xi)`.
    pub(crate) fn modulate(
        &self,
        gain: impl Fn(f64) -> f64,
        dphase: impl Fn(f64) -> f64,
        dslope: impl Fn(f64) -> f64,
        hermitian: bool,
    ) -> Self {
        let n = self.grid.count();
        let mut out = self.clone();
        out.hermitian = hermitian;
        for k in 0..n {
            let xi = self.grid.node(k);
            // phases stay consistent off the support: quadrature panels straddle its edges
            if self.amplitude[k].norm_sqr() != 0.0 {
                out.amplitude[k] = self.amplitude[k] * gain(xi);
            }
            out.phase[k] += dphase(xi);
            out.phase_slope[k] += dslope(xi);
        }
        out
    }

    /// Bessel potential `Lambda^sigma`, the multiplier `(1 + xi^2)^(sigma/2)`.
    pub fn bessel_potential(&self, sigma: f64) -> Self {
        if sigma == 0.0 {
            return self.clone();
        }
        self.map_amplitude(|xi, a| a * (1.0 + xi * xi).powf(0.5 * sigma), self.hermitian)
    }

    /// `||f||^2 = (1/2pi) int |f^|^2 dxi` by the trapezoid rule.
    pub fn l2_norm_sq(&self) -> f64 {
        let s: f64 = self
            .amplitude
            .iter()
            .enumerate()
            .map(|(k, a)| self.grid.weight(k) * a.norm_sqr())
            .sum();
        INV_TWO_PI * s
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.bessel_potential(s).l2_norm()
    }

    /// Weighted energy `(1/2pi) int weight(xi) |f^(xi)|^2 dxi`.
    pub fn weighted_energy(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let s: f64 = self
            .amplitude
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(k, a)| {
                let xi = self.grid.node(k);
                self.grid.weight(k) * weight(xi) * a.norm_sqr()
            })
            .sum();
        INV_TWO_PI * s
    }

    /// Verify `f^(-xi) = conj f^(xi)` at every mirrored node pair.
    pub fn check_hermitian(&self) -> Result<()> {
        if !self.grid.is_symmetric() {
            return Err(Error::Grid("hermitian data requires a symmetric grid".into()));
        }
        let n = self.grid.count();
        let peak = self.amplitude.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for k in 0..n / 2 {
            let a = self.value(k);
            let b = self.value(n - 1 - k).conj();
            // phases may be large; compare amplitudes in the rotated frame
            if (a - b).norm() > HERMITIAN_TOL * peak.max(f64::MIN_POSITIVE) * (1.0 + self.phase[k].abs()) {
                return Err(Error::Domain(format!(
                    "hermitian symmetry violated at xi = {}",
                    self.grid.node(k)
                )));
            }
        }
        Ok(())
    }

    /// Zero every sample outside `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let hermitian = self.hermitian && (lo + hi).abs() <= 1e-12 * hi.abs().max(1.0);
        self.map_amplitude(
            |xi, a| if xi < lo || xi > hi { Complex64::new(0.0, 0.0) } else { a },
            hermitian,
        )
    }
}
