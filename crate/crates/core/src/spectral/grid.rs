use crate::error::{Error, Result};

/// Uniform grid of angular frequencies `xi_min, xi_min + dxi, ..., xi_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    xi_min: f64,
    xi_max: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(xi_min: f64, xi_max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Grid(format!("grid needs at least 2 nodes, got {count}")));
        }
        if !(xi_min.is_finite() && xi_max.is_finite()) || xi_max <= xi_min {
            return Err(Error::Grid(format!(
                "grid bounds must satisfy xi_min < xi_max, got [{xi_min}, {xi_max}]"
            )));
        }
        Ok(Self { xi_min, xi_max, count })
    }

    /// Symmetric grid `[-xi_max, xi_max]` with an odd node count, so `xi = 0` is a node,
    /// and spacing no larger than `max_spacing`.
    pub fn symmetric(xi_max: f64, max_spacing: f64) -> Result<Self> {
        if max_spacing <= 0.0 || xi_max <= 0.0 {
            return Err(Error::Grid("symmetric grid needs positive extent and spacing".into()));
        }
        let half = (xi_max / max_spacing).ceil() as usize;
        Self::new(-xi_max, xi_max, 2 * half.max(1) + 1)
    }

    /// Symmetric grid whose spacing is exactly dual to the physical step `x_step`,
    /// i.e. `dxi * x_step = 2 pi / L` for an integer `L`. Extent is rounded up so
    /// that `xi_max` is a whole number of steps.
    pub fn symmetric_matched(xi_max: f64, max_spacing: f64, x_step: f64) -> Result<Self> {
        let dxi = matched_spacing(max_spacing, x_step)?;
        let half = (xi_max / dxi).ceil() as usize;
        let extent = half as f64 * dxi;
        Self::new(-extent, extent, 2 * half.max(1) + 1)
    }

    /// Grid starting exactly at `xi_start` (used for one-sided data whose
    /// support begins with a jump at `xi_start`).
    pub fn one_sided(xi_start: f64, xi_end: f64, max_spacing: f64) -> Result<Self> {
        if max_spacing <= 0.0 {
            return Err(Error::Grid("spacing must be positive".into()));
        }
        let steps = ((xi_end - xi_start) / max_spacing).ceil().max(1.0) as usize;
        Self::new(xi_start, xi_start + steps as f64 * max_spacing, steps + 1)
    }

    /// Like [`FrequencyGrid::one_sided`] with the spacing dual to `x_step`.
    pub fn one_sided_matched(xi_start: f64, xi_end: f64, max_spacing: f64, x_step: f64) -> Result<Self> {
        let dxi = matched_spacing(max_spacing, x_step)?;
        Self::one_sided(xi_start, xi_end, dxi)
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.xi_max - self.xi_min) / (self.count - 1) as f64
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        // endpoints are hit exactly and symmetric grids are exactly odd
        if k + 1 == self.count {
            self.xi_max
        } else if self.is_symmetric() && 2 * k + 1 == self.count {
            0.0
        } else if self.is_symmetric() && 2 * k + 1 > self.count {
            -(self.xi_min + (self.count - 1 - k) as f64 * self.spacing())
        } else {
            self.xi_min + k as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.node(k))
    }

    /// Composite trapezoid weight of node `k` (includes the spacing).
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        let h = self.spacing();
        if k == 0 || k + 1 == self.count {
            0.5 * h
        } else {
            h
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.count % 2 == 1 && (self.xi_min + self.xi_max).abs() <= 1e-12 * self.xi_max.abs().max(1.0)
    }

    pub fn contains(&self, xi: f64) -> bool {
        let slack = 1e-12 * self.xi_max.abs().max(self.xi_min.abs()).max(1.0);
        xi >= self.xi_min - slack && xi <= self.xi_max + slack
    }
}

/// Largest spacing `<= max_spacing` such that `spacing * x_step = 2 pi / L`, `L` integer.
pub fn matched_spacing(max_spacing: f64, x_step: f64) -> Result<f64> {
    if max_spacing <= 0.0 || x_step <= 0.0 {
        return Err(Error::Grid("spacings must be positive".into()));
    }
    let l = (std::f64::consts::TAU / (x_step * max_spacing)).ceil();
    Ok(std::f64::consts::TAU / (l * x_step))
}
