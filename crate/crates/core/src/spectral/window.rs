use crate::error::{Error, Result};

/// `E(u) = exp(-1/u)` for `u > 0`, zero otherwise.
#[inline]
fn flat_exp(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// C-infinity bridge from 1 (at `u <= 0`) to 0 (at `u >= 1`):
/// `rho(u) = E(1-u) / (E(1-u) + E(u))`. Monotone decreasing, `rho(1/2) = 1/2`.
#[inline]
pub fn bridge(u: f64) -> f64 {
    if u <= 0.0 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let a = flat_exp(1.0 - u);
    let b = flat_exp(u);
    a / (a + b)
}

/// Shape of the transition bands of a [`SmoothWindow`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionProfile {
    /// The exponential bridge [`bridge`].
    ExpBridge,
}

/// C-infinity plateau window: 1 on `[plateau.0, plateau.1]`, 0 outside
/// `[support.0, support.1]`, monotone on both transition bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWindow {
    plateau: (f64, f64),
    support: (f64, f64),
    profile: TransitionProfile,
}

impl SmoothWindow {
    pub fn new(plateau: (f64, f64), support: (f64, f64)) -> Result<Self> {
        let (a, b) = plateau;
        let (lo, hi) = support;
        if !(lo < a && a < b && b < hi) {
            return Err(Error::Nesting(format!(
                "need support.0 < plateau.0 < plateau.1 < support.1, got plateau [{a}, {b}], support [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            plateau,
            support,
            profile: TransitionProfile::ExpBridge,
        })
    }

    pub fn plateau(&self) -> (f64, f64) {
        self.plateau
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn profile(&self) -> TransitionProfile {
        self.profile
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.plateau;
        let (lo, hi) = self.support;
        if x <= lo || x >= hi {
            0.0
        } else if x < a {
            bridge((a - x) / (a - lo))
        } else if x <= b {
            1.0
        } else {
            bridge((x - b) / (hi - b))
        }
    }

    /// `int w(x) dx`, exact up to the symmetric bridge identity
    /// `int_0^1 rho = 1/2`.
    pub fn integral(&self) -> f64 {
        let (a, b) = self.plateau;
        let (lo, hi) = self.support;
        (b - a) + 0.5 * (a - lo) + 0.5 * (hi - b)
    }
}
