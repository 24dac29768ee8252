//! Simulation library for measuring continuous-variable entanglement with
//! phase-sensitive-amplifier (PSA) assisted homodyne detection.
//!
//! The crate models zero-mean Gaussian states as covariance matrices
//! ([`gaussian`]), the detectors reading them ([`measurement`]), the
//! scheme-level normalized noise and inseparability figures ([`metrics`]),
//! the temporal-multimode extension ([`multimode`]), and an independent
//! truncated-Fock-space oracle ([`fock`]) that cross-validates the covariance
//! algebra ([`crosscheck`]). The [`scenario`] module drives parameter sweeps
//! and CSV output for the `psalab` binary.

pub mod crosscheck;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod measurement;
pub mod metrics;
pub mod multimode;
pub mod scenario;

pub use error::{Error, Result};
pub use gaussian::{GainParam, GaussianState, LossChannel, QuadratureSelector};
pub use metrics::{MeasurementReport, Port, SchemeSpec, SourceSpec};
