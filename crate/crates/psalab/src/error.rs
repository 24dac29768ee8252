use thiserror::Error;

/// Errors raised by state construction, transformations and scenario parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state must have at least one mode")]
    EmptyState,
    #[error("mode index {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("mode indices must be distinct, got {0} twice")]
    ModeCollision(usize),
    #[error("covariance matrix must be square with even dimension, got {rows}x{cols}")]
    BadCovarianceShape { rows: usize, cols: usize },
    #[error("covariance matrix is not symmetric (defect {0:.3e})")]
    AsymmetricCovariance(f64),
    #[error("gain strength must be finite and nonnegative, got {0}")]
    InvalidGainStrength(f64),
    #[error("reflectivity must lie in [0, 1], got {0}")]
    ReflectivityOutOfRange(f64),
    #[error("electronic gain must be positive, got {0}")]
    InvalidElectronicGain(f64),
    #[error("local-oscillator power must be positive, got {0}")]
    InvalidLoPower(f64),
    #[error("linear combination needs at least one term")]
    EmptyCombination,
    #[error("phase scan needs at least one phase")]
    EmptyPhaseList,
    #[error("mode ladder invalid: {0}")]
    InvalidLadder(String),
    #[error("mode gains invalid: {0}")]
    InvalidGains(String),
    #[error("overlap normalization defect {defect:.3e} exceeds tolerance {tolerance:.0e}")]
    NormalizationDefect { defect: f64, tolerance: f64 },
    #[error("spectral grid invalid: {0}")]
    BadSpectralGrid(String),
    #[error("Fock state invalid: {0}")]
    BadFockState(String),
    #[error("Fock-space cutoff too small: population {population:.3e} at level {n_max}")]
    CutoffExceeded { population: f64, n_max: usize },
    #[error("requested unitary dimension {0} too large to materialize")]
    UnitaryTooLarge(usize),
    #[error("measurement description invalid: {0}")]
    BadMeasurement(String),
    #[error("config error at line {line} ({field}): {message}")]
    Config {
        line: usize,
        field: String,
        message: String,
    },
    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
