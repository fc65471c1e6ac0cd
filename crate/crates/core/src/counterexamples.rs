//! Explicit data families: the slowly decaying profile `eta^`, even cutoffs
//! `chi_n`, one-sided cutoffs `mu_n`, the shifted data `phi_n`, the one-sided
//! data `psi_n`, the plateau window, and the generic test families used by
//! the baselines.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{bridge, FrequencyGrid, SmoothWindow, SpectralFunction};

/// Spatial shift of `phi_n`: `phi^_n` carries `exp(i SHIFT xi)`, so `phi_n` sits near `x = -SHIFT`.
pub const SHIFT: f64 = 50.0;
pub const WINDOW_PLATEAU: (f64, f64) = (-99.0, -5.0);
pub const WINDOW_SUPPORT: (f64, f64) = (-110.0, -1.0);

/// Default data-grid spacing: `min(0.01, theta / 110)` resolves `exp(i x xi)`
/// over the canonical window at `t = 0`.
pub fn default_spacing() -> f64 {
    0.01f64.min(FRAC_PI_4 / WINDOW_SUPPORT.0.abs())
}

/// `eta^(xi) = 1 / ((1 + xi^2)^(1/4) (1 + ln(1 + xi^2))^2)`.
pub fn eta_hat(xi: f64) -> f64 {
    let s = 1.0 + xi * xi;
    let l = 1.0 + s.ln();
    1.0 / (s.sqrt().sqrt() * l * l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffKind {
    /// Even, flat on `[-n, n]` (the flat interval is stored as `[0, n]`).
    TwoSidedEven,
    /// Flat on `[N, n + N]`, zero below `N`.
    OneSided,
}

/// A cutoff equal to 1 on its flat interval, with a unit-width bridge
/// transition of fixed shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    pub flat: (f64, f64),
}

impl CutoffSpec {
    pub fn eval(&self, xi: f64) -> f64 {
        match self.kind {
            CutoffKind::TwoSidedEven => bridge(xi.abs() - self.flat.1),
            CutoffKind::OneSided => {
                if xi < self.flat.0 {
                    0.0
                } else {
                    bridge(xi - self.flat.1)
                }
            }
        }
    }

    /// Right end of the support.
    pub fn outer(&self) -> f64 {
        self.flat.1 + 1.0
    }
}

pub fn chi_spec(n: u32) -> CutoffSpec {
    CutoffSpec { kind: CutoffKind::TwoSidedEven, flat: (0.0, n as f64) }
}

pub fn mu_spec(n: u32, big_n: f64) -> CutoffSpec {
    CutoffSpec { kind: CutoffKind::OneSided, flat: (big_n, n as f64 + big_n) }
}

pub fn chi_n(n: u32, xi: f64) -> f64 {
    chi_spec(n).eval(xi)
}

/// `mu_n`: 0 below `N`, 1 on `[N, n + N]`, bridge down to 0 at `n + N + 1`.
/// The jump at `N` is placed exactly on the first grid node by
/// [`psi_grid`].
pub fn mu_n(n: u32, big_n: f64, xi: f64) -> f64 {
    mu_spec(n, big_n).eval(xi)
}

/// `phi^_n(xi) = exp(i 50 xi) chi_n(xi) eta^(xi)`, Hermitian.
pub fn phi_n(n: u32, grid: FrequencyGrid) -> Result<SpectralFunction> {
    let need = n as f64 + 1.0;
    if !grid.is_symmetric() || grid.xi_max() < need {
        return Err(Error::Grid(format!(
            "phi_{n} needs a symmetric grid with xi_max >= {need}, got [{}, {}]",
            grid.xi_min(),
            grid.xi_max()
        )));
    }
    SpectralFunction::sample(
        grid,
        |xi| Complex64::new(chi_n(n, xi) * eta_hat(xi), 0.0),
        |xi| SHIFT * xi,
        |_| SHIFT,
        true,
    )
}

/// `psi^_n(xi) = mu_n(xi) eta^(xi)`, supported in `[N, n + N + 1]`.
pub fn psi_n(n: u32, big_n: f64, grid: FrequencyGrid) -> Result<SpectralFunction> {
    let need = n as f64 + big_n + 1.0;
    if grid.xi_max() < need || grid.xi_min() > big_n {
        return Err(Error::Grid(format!(
            "psi_{n} needs a grid covering [{big_n}, {need}], got [{}, {}]",
            grid.xi_min(),
            grid.xi_max()
        )));
    }
    SpectralFunction::sample(
        grid,
        |xi| Complex64::new(mu_n(n, big_n, xi) * eta_hat(xi), 0.0),
        |_| 0.0,
        |_| 0.0,
        false,
    )
}

/// Symmetric grid for `phi_n` with spacing at most `spacing`.
pub fn phi_grid(n: u32, spacing: f64) -> Result<FrequencyGrid> {
    FrequencyGrid::symmetric(n as f64 + 1.0, spacing)
}

/// One-sided grid for `psi_n` starting exactly at `N`.
pub fn psi_grid(n: u32, big_n: f64, spacing: f64) -> Result<FrequencyGrid> {
    FrequencyGrid::one_sided(big_n, n as f64 + big_n + 1.0, spacing)
}

/// The window: 1 on `[-99, -5]`, 0 outside `[-110, -1]`.
pub fn paper_window() -> SmoothWindow {
    SmoothWindow::new(WINDOW_PLATEAU, WINDOW_SUPPORT).expect("canonical window is nested")
}

pub fn make_window(plateau: (f64, f64), support: (f64, f64)) -> Result<SmoothWindow> {
    SmoothWindow::new(plateau, support)
}

/// Data families addressable by name in configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataFamily {
    /// `phi(n)`.
    Phi(u32),
    /// `psi(n)`; `N` comes from the symbol.
    Psi(u32),
    /// `gaussian(s)`: `u^(xi) = exp(-xi^2 / (2 s^2))`, truncated where it drops below `e^-40`.
    Gaussian(f64),
    /// `random_bandlimited(seed, band)`: a seeded sum of Gaussian bumps, Hermitian,
    /// supported in `|xi| <= band + 1`.
    RandomBandlimited { seed: u64, band: f64 },
    /// `bump(c, w)`: `exp(-(|xi| - c)^2 / (2 w^2))`, truncated below `e^-40`.
    Bump { center: f64, width: f64 },
}

impl DataFamily {
    /// Largest `|xi|` in the support.
    pub fn band_edge(&self, big_n: f64) -> f64 {
        match *self {
            DataFamily::Phi(n) => n as f64 + 1.0,
            DataFamily::Psi(n) => n as f64 + big_n + 1.0,
            DataFamily::Gaussian(s) => s * 80f64.sqrt(),
            DataFamily::RandomBandlimited { band, .. } => band + 1.0,
            DataFamily::Bump { center, width } => center + width * 80f64.sqrt(),
        }
    }

    /// Lower edge of the support (`-band_edge` for two-sided families).
    pub fn lower_edge(&self, big_n: f64) -> f64 {
        match self {
            DataFamily::Psi(_) => big_n,
            _ => -self.band_edge(big_n),
        }
    }

    /// A grid with spacing at most `spacing` covering the support.
    pub fn grid(&self, spacing: f64, big_n: f64) -> Result<FrequencyGrid> {
        match *self {
            DataFamily::Psi(n) => psi_grid(n, big_n, spacing),
            _ => FrequencyGrid::symmetric(self.band_edge(big_n), spacing),
        }
    }

    pub fn build(&self, grid: FrequencyGrid, big_n: f64) -> Result<SpectralFunction> {
        match *self {
            DataFamily::Phi(n) => phi_n(n, grid),
            DataFamily::Psi(n) => psi_n(n, big_n, grid),
            DataFamily::Gaussian(s) => gaussian(s, grid),
            DataFamily::RandomBandlimited { seed, band } => random_bandlimited(seed, band, grid),
            DataFamily::Bump { center, width } => bump(center, width, grid),
        }
    }
}

impl fmt::Display for DataFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataFamily::Phi(n) => write!(f, "phi({n})"),
            DataFamily::Psi(n) => write!(f, "psi({n})"),
            DataFamily::Gaussian(s) => write!(f, "gaussian({s})"),
            DataFamily::RandomBandlimited { seed, band } => write!(f, "random_bandlimited({seed}, {band})"),
            DataFamily::Bump { center, width } => write!(f, "bump({center}, {width})"),
        }
    }
}

impl FromStr for DataFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse data family '{s}'"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = s[..open].trim();
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
        match (name, args.as_slice()) {
            ("phi", [n]) => Ok(DataFamily::Phi(n.parse().map_err(|_| bad())?)),
            ("psi", [n]) => Ok(DataFamily::Psi(n.parse().map_err(|_| bad())?)),
            ("gaussian", [w]) => {
                let w: f64 = w.parse().map_err(|_| bad())?;
                if !(w > 0.0) {
                    return Err(bad());
                }
                Ok(DataFamily::Gaussian(w))
            }
            ("bump", [c, w]) => {
                let (center, width): (f64, f64) = (c.parse().map_err(|_| bad())?, w.parse().map_err(|_| bad())?);
                if !(width > 0.0) || !center.is_finite() {
                    return Err(bad());
                }
                Ok(DataFamily::Bump { center, width })
            }
            ("random_bandlimited", [seed, band]) => {
                let band: f64 = band.parse().map_err(|_| bad())?;
                if !(band > 0.0) {
                    return Err(bad());
                }
                Ok(DataFamily::RandomBandlimited { seed: seed.parse().map_err(|_| bad())?, band })
            }
            _ => Err(bad()),
        }
    }
}

pub fn gaussian(s: f64, grid: FrequencyGrid) -> Result<SpectralFunction> {
    let edge = s * 80f64.sqrt();
    SpectralFunction::sample(
        grid,
        |xi| {
            if xi.abs() > edge {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((-0.5 * xi * xi / (s * s)).exp(), 0.0)
            }
        },
        |_| 0.0,
        |_| 0.0,
        grid.is_symmetric(),
    )
}

/// Even band-pass data; vanishes identically near `xi = 0` once
/// `center > width sqrt(80)`.
pub fn bump(center: f64, width: f64, grid: FrequencyGrid) -> Result<SpectralFunction> {
    let reach = width * 80f64.sqrt();
    SpectralFunction::sample(
        grid,
        |xi| {
            let d = xi.abs() - center;
            if d.abs() > reach {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((-0.5 * d * d / (width * width)).exp(), 0.0)
            }
        },
        |_| 0.0,
        |_| 0.0,
        grid.is_symmetric(),
    )
}

const RANDOM_BUMPS: usize = 8;

/// Seeded Hermitian data: `sum_j c_j g(xi - xi_j) + conj(c_j) g(xi + xi_j)` with
/// `xi_j` uniform in `[0, band]`, `|c_j| <= 1`, bump width `band / 8`, times
/// an even cutoff flat on `|xi| <= band`.
pub fn random_bandlimited(seed: u64, band: f64, grid: FrequencyGrid) -> Result<SpectralFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, Complex64)> = (0..RANDOM_BUMPS)
        .map(|_| {
            let center = rng.random_range(0.0..band);
            let r: f64 = rng.random_range(0.2..1.0);
            let arg: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            (center, Complex64::from_polar(r, arg))
        })
        .collect();
    let width = band / 8.0;
    let g = |d: f64| (-0.5 * d * d / (width * width)).exp();
    let cutoff = CutoffSpec { kind: CutoffKind::TwoSidedEven, flat: (0.0, band) };
    SpectralFunction::sample(
        grid,
        |xi| {
            let c = cutoff.eval(xi);
            if c == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s: Complex64 = bumps
                .iter()
                .map(|&(x0, a)| a * g(xi - x0) + a.conj() * g(xi + x0))
                .sum();
            s * c
        },
        |_| 0.0,
        |_| 0.0,
        grid.is_symmetric(),
    )
}
