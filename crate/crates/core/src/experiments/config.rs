//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::counterexamples::DataFamily;
use crate::error::{Error, Result};
use crate::functionals::{QuadratureSpec, TraceMultiplier};
use crate::spectral::Backend;
use crate::symbols::{DispersiveSymbol, PolynomialSymbol, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Thm1,
    Thm2,
    Baseline,
    #[serde(alias = "traceB")]
    Trace,
    #[serde(alias = "dissipative_y1")]
    Y1,
    ValidateSymbol,
    Evolve,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Thm1 => "thm1",
            ExperimentKind::Thm2 => "thm2",
            ExperimentKind::Baseline => "baseline",
            ExperimentKind::Trace => "trace",
            ExperimentKind::Y1 => "y1",
            ExperimentKind::ValidateSymbol => "validate_symbol",
            ExperimentKind::Evolve => "evolve",
        }
    }
}

/// A symbol by registry name or by coefficients.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SymbolSpec {
    Named(String),
    Polynomial {
        a: Vec<f64>,
        #[serde(default)]
        b: Vec<f64>,
        #[serde(default)]
        b_im: Vec<f64>,
    },
    Dispersive {
        law: String,
        m: Option<f64>,
    },
}

impl SymbolSpec {
    pub fn resolve(&self) -> Result<Symbol> {
        match self {
            SymbolSpec::Named(name) => match PolynomialSymbol::named(name) {
                Ok(p) => Ok(p.into()),
                Err(_) => Ok(DispersiveSymbol::named(name, None)?.into()),
            },
            SymbolSpec::Polynomial { a, b, b_im } => {
                let len = b.len().max(b_im.len());
                let b: Vec<Complex64> = (0..len)
                    .map(|k| Complex64::new(b.get(k).copied().unwrap_or(0.0), b_im.get(k).copied().unwrap_or(0.0)))
                    .collect();
                Ok(PolynomialSymbol::new(a.clone(), b)?.into())
            }
            SymbolSpec::Dispersive { law, m } => Ok(DispersiveSymbol::named(law, *m)?.into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub x_step: Option<f64>,
    pub t_step: Option<f64>,
    /// Frequency spacing of the data grids.
    pub spacing: Option<f64>,
    pub x_nodes: Option<usize>,
    pub rel_tol: Option<f64>,
    pub time_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Required last/first ratio of a diverging sequence.
    pub growth_factor: f64,
    /// Bounded means `max <= bounded_ratio * median`.
    pub bounded_ratio: f64,
    /// Allowed last/first ratio of the data norms.
    pub norm_ratio: f64,
    /// Allowed max/min spread of baseline ratios.
    pub spread: f64,
    /// Allowed extrapolated time tail relative to `J_n`.
    pub tail_fraction: f64,
    /// Relative step below which a sequence does not count as growing.
    pub growth_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { growth_factor: 2.0, bounded_ratio: 5.0, norm_ratio: 1.05, spread: 3.0, tail_fraction: 0.01, growth_tol: 1e-3 }
    }
}

fn default_epsilon() -> f64 {
    0.25
}
fn one() -> f64 {
    1.0
}
fn default_t_max() -> f64 {
    200.0
}
fn default_seeds() -> usize {
    20
}
fn default_band() -> f64 {
    4.0
}
fn default_j_max() -> u32 {
    128
}
fn default_window() -> [f64; 2] {
    [-20.0, 20.0]
}
fn default_backend() -> String {
    "auto".into()
}

/// One experiment. Keys follow the notation of the estimates (`T`, `R`,
/// `T_max`, `N`); frequencies are in rad/length.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub symbol: SymbolSpec,
    #[serde(default)]
    pub n_schedule: Vec<u32>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(rename = "T", default = "one")]
    pub t: f64,
    #[serde(rename = "R", default = "one")]
    pub r: f64,
    #[serde(rename = "T_max", default = "default_t_max")]
    pub t_max: f64,
    /// Frequency threshold of the whole-time counterexample.
    #[serde(rename = "N", default = "one")]
    pub big_n: f64,
    #[serde(default = "default_backend")]
    pub backend: String,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Number of seeded random data in baselines.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// Band of the random data.
    #[serde(default = "default_band")]
    pub band: f64,
    /// Extra data families for `trace` and `evolve`.
    #[serde(default)]
    pub data: Vec<String>,
    /// Keep only `xi >= N` (smooth taper) in `trace` runs.
    #[serde(default)]
    pub one_sided: bool,
    /// Derivative order of the trace norm; defaults to the gain exponent.
    pub order: Option<f64>,
    /// `homogeneous` (`|xi|^order`) or `bessel` (`(1 + xi^2)^(order/2)`).
    #[serde(default)]
    pub trace_multiplier: TraceMultiplier,
    /// `x` values of time-domain certificates.
    #[serde(default)]
    pub x_samples: Vec<f64>,
    /// Largest `n` for which `J_n` is synthesized in time.
    #[serde(default = "default_j_max")]
    pub j_max_n: u32,
    /// Optional sweep over `T`.
    #[serde(default)]
    pub t_sweep: Vec<f64>,
    /// Spatial range of `evolve` dumps.
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    /// Emit a gnuplot script next to the CSV.
    #[serde(default)]
    pub plot: bool,
    #[serde(default)]
    pub quadrature: QuadratureOverrides,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Built-in canonical run for a subcommand used when no file is given.
    pub fn canonical(kind: ExperimentKind) -> Self {
        let (symbol, schedule): (&str, Vec<u32>) = match kind {
            ExperimentKind::Thm1 => ("airy", vec![8, 16, 32, 64, 128, 256]),
            ExperimentKind::Thm2 => ("schrodinger", vec![8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096]),
            ExperimentKind::Baseline => ("airy", vec![]),
            ExperimentKind::Trace | ExperimentKind::Evolve | ExperimentKind::ValidateSymbol => ("airy", vec![]),
            ExperimentKind::Y1 => ("heat", vec![]),
        };
        let mut cfg = Self::from_toml(&format!("symbol = \"{symbol}\"")).expect("canonical config");
        cfg.kind = Some(kind);
        cfg.n_schedule = schedule;
        if kind == ExperimentKind::Y1 {
            cfg.epsilon = 0.0;
        }
        cfg
    }

    pub fn backend(&self) -> Result<Backend> {
        self.backend.parse()
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        let o = &self.quadrature;
        QuadratureSpec {
            x_step: o.x_step.unwrap_or(d.x_step),
            t_step: o.t_step.unwrap_or(d.t_step),
            t: self.t,
            t_max: self.t_max,
            r: self.r,
            x_nodes: o.x_nodes.unwrap_or(d.x_nodes),
            rel_tol: o.rel_tol.unwrap_or(d.rel_tol),
            time_tol: o.time_tol.unwrap_or(d.time_tol),
        }
    }

    pub fn data_families(&self) -> Result<Vec<DataFamily>> {
        self.data.iter().map(|s| s.parse()).collect()
    }

    /// Checks that do not depend on the experiment kind, plus the schedule
    /// and `epsilon` requirements of the sharpness runs.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let Some(k) = self.kind {
            if k != kind {
                return bad(format!("config is for '{}', not '{}'", k.name(), kind.name()));
            }
        }
        for (name, v) in [("T", self.t), ("R", self.r), ("T_max", self.t_max)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.t_sweep.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return bad("t_sweep entries must be positive".into());
        }
        let q = self.quadrature();
        let spacing = self.quadrature.spacing.unwrap_or(1e-2);
        for (name, v) in [("x_step", q.x_step), ("t_step", q.t_step), ("spacing", spacing), ("rel_tol", q.rel_tol), ("time_tol", q.time_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("quadrature.{name} must be positive, got {v}"));
            }
        }
        if q.x_nodes == 0 {
            return bad("quadrature.x_nodes must be positive".into());
        }
        self.backend()?;
        self.data_families()?;
        if matches!(kind, ExperimentKind::Thm1 | ExperimentKind::Thm2) {
            if self.n_schedule.is_empty() {
                return bad("n_schedule is empty".into());
            }
            if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
                return bad("n_schedule must be strictly increasing".into());
            }
            if self.n_schedule[0] < 2 {
                return bad("n_schedule entries must be at least 2".into());
            }
            if !(0.0..0.5).contains(&self.epsilon) {
                return bad(format!("epsilon must lie in [0, 1/2) (0 is the control run), got {}", self.epsilon));
            }
        }
        if self.s < 0.0 || !self.s.is_finite() {
            return bad(format!("s must be nonnegative, got {}", self.s));
        }
        if !(self.band > 0.0) {
            return bad("band must be positive".into());
        }
        if self.window[0] >= self.window[1] {
            return bad("window must be increasing".into());
        }
        Ok(())
    }
}
