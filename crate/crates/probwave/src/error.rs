use thiserror::Error;

/// Unified error type for the whole library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} = {value} outside supported range [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("grid too short: {len} points, need at least {min}")]
    GridTooShort { len: usize, min: usize },

    #[error("grid is not strictly increasing at index {index}")]
    GridNotIncreasing { index: usize },

    #[error("grid spacing at index {index} deviates from uniform by {rel:e} (relative)")]
    GridNotUniform { index: usize, rel: f64 },

    #[error("density is zero everywhere on the grid")]
    DegenerateDensity,

    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("no trades inside the window [{start_ms}, {end_ms})")]
    EmptyWindow { start_ms: i64, end_ms: i64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tick inference failed: {0}")]
    TickInference(String),

    #[error("integration blew up at y = {y:.6} (energy {energy})")]
    SolverBlowUp { y: f64, energy: f64 },

    #[error("no energy bracket found for level {index} (scanned up to {e_max})")]
    SpectrumBracket { index: usize, e_max: f64 },

    #[error("invalid solver configuration: {0}")]
    SolverConfig(String),

    #[error("fit did not produce a usable result: {0}")]
    Fit(String),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
