use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A quadrature resolution guard was violated. `oversampling` is the
    /// minimal factor by which the offending spacing must be refined.
    #[error("resolution guard violated in {context}: measured {measured:.4e} exceeds budget {budget:.4e} (refine by at least {oversampling:.1}x)")]
    Resolution {
        context: String,
        measured: f64,
        budget: f64,
        oversampling: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("classification failed: {message}{}", if *.mirror_fixes { " (the mirror substitution x -> -x would fix this)" } else { "" })]
    Classification { message: String, mirror_fixes: bool },

    #[error("validation failed at xi = {node}: {reason}")]
    Validation { node: f64, reason: String },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("orientation error: {0}")]
    Orientation(String),

    #[error("phase monotonicity error: {0}")]
    PhaseMonotonicity(String),

    #[error("window nesting error: {0}")]
    Nesting(String),

    #[error("division error: {0}")]
    Division(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn resolution(context: impl Into<String>, measured: f64, budget: f64) -> Self {
        Error::Resolution {
            context: context.into(),
            measured,
            budget,
            oversampling: (measured / budget).max(1.0),
        }
    }
}
