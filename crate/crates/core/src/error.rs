use thiserror::Error;

/// Errors raised by the simulator.
///
/// Configuration-type variants map to CLI exit status 1, everything else to 2
/// (see [`Error::is_config`]).
#[derive(Debug, Error)]
pub enum Error {
    /// A qubit count or matrix dimension exceeds a configured cap.
    #[error("size error: {what} = {value} exceeds cap {cap}")]
    Size {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A scalar argument fell outside its admissible range.
    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The ground state of H(s) is not unique.
    #[error("degenerate ground state at s = {s} (E1 - E0 = {gap:e})")]
    Degenerate { s: f64, gap: f64 },

    /// A numerical invariant was breached (Hermiticity, trace, positivity,
    /// unitarity, or a failed decomposition).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The per-step coherence suppression is too weak for the success bound.
    #[error("measurement too weak: k_tilde = {0} >= 1")]
    MeasurementTooWeak(f64),

    /// One or more configuration violations, each with a path to the field.
    #[error("invalid configuration:\n{}", format_violations(.0))]
    Config(Vec<ConfigViolation>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidInput(_) | Error::Size { .. }
        )
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

/// A single schema or range violation in an experiment configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    /// JSON-pointer-like path to the offending field, e.g. `sweep.axis`.
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn format_violations(v: &[ConfigViolation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
