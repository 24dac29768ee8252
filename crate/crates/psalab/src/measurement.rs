//! Detector models: balanced homodyne detection (BHD), the electronic
//! combiner joining two BHDs, and the power detector reading the output
//! intensity of a phase-sensitive amplifier (PSA).
//!
//! The shot-noise limit of any measurement here is obtained by re-running the
//! identical chain with vacuum substituted at the amplifier inputs (i.e. at
//! the source outputs), never after the detection losses.

use crate::error::{Error, Result};
use crate::gaussian::{GainParam, GaussianState, LossChannel, QuadratureSelector};

/// One balanced homodyne detector: local-oscillator phase, electronic gain
/// `q`, detection loss and LO power. The defaults (`q = 1`, `|alpha_L|^2 = 1`)
/// drop the amplification factors, which cancel in every normalized quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BhdConfig {
    pub lo_phase: f64,
    pub electronic_gain: f64,
    pub detection_loss: LossChannel,
    pub lo_amplitude_sq: f64,
}

impl BhdConfig {
    pub fn new(lo_phase: f64) -> Self {
        Self {
            lo_phase,
            ..Self::default()
        }
    }

    pub fn with_loss(mut self, loss: LossChannel) -> Self {
        self.detection_loss = loss;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.electronic_gain.is_nan() || self.electronic_gain <= 0.0 {
            return Err(Error::InvalidElectronicGain(self.electronic_gain));
        }
        if self.lo_amplitude_sq.is_nan() || self.lo_amplitude_sq <= 0.0 {
            return Err(Error::InvalidLoPower(self.lo_amplitude_sq));
        }
        Ok(())
    }

    fn current_weight(&self) -> f64 {
        self.electronic_gain * self.lo_amplitude_sq.sqrt()
    }
}

impl Default for BhdConfig {
    fn default() -> Self {
        Self {
            lo_phase: 0.0,
            electronic_gain: 1.0,
            detection_loss: LossChannel::lossless(),
            lo_amplitude_sq: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombinerSign {
    Difference,
    Sum,
}

/// Electronic combiner applied to the photocurrents of two BHDs:
/// `i_a - k i_b` or `i_a + k i_b`, with `k` the adjustable gain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CombinerConfig {
    pub gain: f64,
    pub sign: CombinerSign,
}

impl CombinerConfig {
    pub fn difference(gain: f64) -> Self {
        Self {
            gain,
            sign: CombinerSign::Difference,
        }
    }

    pub fn sum(gain: f64) -> Self {
        Self {
            gain,
            sign: CombinerSign::Sum,
        }
    }

    fn signed_gain(&self) -> f64 {
        match self.sign {
            CombinerSign::Difference => -self.gain,
            CombinerSign::Sum => self.gain,
        }
    }
}

/// Mean intensity registered by a power detector behind a PSA, broken into
/// the amplified-quadrature term, the de-amplified-quadrature term and the
/// `-1/2` commutator term; `mean` is their sum.
#[derive(Clone, Copy, Debug)]
pub struct IntensityReading {
    mean: f64,
    terms: [f64; 3],
}

impl IntensityReading {
    fn from_terms(terms: [f64; 3]) -> Self {
        Self {
            mean: terms[0] + terms[1] + terms[2],
            terms,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn terms(&self) -> [f64; 3] {
        self.terms
    }

    /// The first term alone: the approximation valid when the amplifier gain
    /// is high enough for it to dominate.
    pub fn high_gain_approximation(&self) -> f64 {
        self.terms[0]
    }
}

/// Variance of the photocurrent of one BHD reading `mode`; detection loss is
/// applied to the mode before readout.
pub fn bhd_variance(state: &GaussianState, mode: usize, cfg: &BhdConfig) -> Result<f64> {
    cfg.validate()?;
    let lossy = state.apply_loss(mode, cfg.detection_loss)?;
    let var = lossy.quad_variance(QuadratureSelector::new(mode, cfg.lo_phase))?;
    Ok(cfg.electronic_gain.powi(2) * cfg.lo_amplitude_sq * var)
}

/// Variance of the combined photocurrent `i_a ± k i_b` of two BHDs, each with
/// its own LO phase and detection loss.
pub fn joint_bhd_variance(
    state: &GaussianState,
    mode_a: usize,
    mode_b: usize,
    cfg_a: &BhdConfig,
    cfg_b: &BhdConfig,
    comb: &CombinerConfig,
) -> Result<f64> {
    if mode_a == mode_b {
        return Err(Error::ModeCollision(mode_a));
    }
    cfg_a.validate()?;
    cfg_b.validate()?;
    let lossy = state
        .apply_loss(mode_a, cfg_a.detection_loss)?
        .apply_loss(mode_b, cfg_b.detection_loss)?;
    lossy.linear_combo_variance(&[
        (
            QuadratureSelector::new(mode_a, cfg_a.lo_phase),
            cfg_a.current_weight(),
        ),
        (
            QuadratureSelector::new(mode_b, cfg_b.lo_phase),
            comb.signed_gain() * cfg_b.current_weight(),
        ),
    ])
}

/// Exact mean intensity behind a degenerate PSA, from the input-state
/// quadrature variances. With pump phase `phi` the amplified input quadrature
/// sits at angle `phi/2`:
///
/// ```text
/// <I> = (G+g)^2/4 * Var X(phi/2) + (G-g)^2/4 * Var X(phi/2 + pi/2) - 1/2
/// ```
///
/// scaled by `(1 - L)` when a loss channel precedes the (ideal) detector.
/// Vacuum input gives exactly `g^2`, the shot-noise limit of this readout.
pub fn degenerate_psa_intensity(
    input: &GaussianState,
    mode: usize,
    gain: &GainParam,
    loss_after: LossChannel,
) -> Result<IntensityReading> {
    let theta = gain.phase() / 2.0;
    let t = loss_after.transmissivity();
    let g = gain.strength();
    let gc = gain.conj_amplitude();
    let amp = input.quad_variance(QuadratureSelector::new(mode, theta))?;
    let deamp = input.quad_variance(QuadratureSelector::new(
        mode,
        theta + std::f64::consts::FRAC_PI_2,
    ))?;
    Ok(IntensityReading::from_terms([
        t * (gc + g).powi(2) / 4.0 * amp,
        t * (gc - g).powi(2) / 4.0 * deamp,
        -t * 0.5,
    ]))
}

/// Exact mean intensity at output `mode_a` of a non-degenerate PSA fed with
/// two input modes carrying equal mean intensity (as the symmetric entangled
/// source does):
///
/// ```text
/// <I> = (G+g)^2/16 * [Var(Xa+Xb) + Var(Ya-Yb)]
///     + (G-g)^2/16 * [Var(Xa-Xb) + Var(Ya+Yb)] - 1/2
/// ```
///
/// with all quadratures taken at the half pump phase, scaled by `(1 - L)`
/// after loss. Vacuum inputs give exactly `g^2`.
pub fn nondegenerate_psa_intensity(
    input: &GaussianState,
    mode_a: usize,
    mode_b: usize,
    gain: &GainParam,
    loss_after: LossChannel,
) -> Result<IntensityReading> {
    if mode_a == mode_b {
        return Err(Error::ModeCollision(mode_a));
    }
    let theta = gain.phase() / 2.0;
    let ortho = theta + std::f64::consts::FRAC_PI_2;
    let t = loss_after.transmissivity();
    let g = gain.strength();
    let gc = gain.conj_amplitude();
    let combo = |angle: f64, sign: f64| -> Result<f64> {
        input.linear_combo_variance(&[
            (QuadratureSelector::new(mode_a, angle), 1.0),
            (QuadratureSelector::new(mode_b, angle), sign),
        ])
    };
    let amplified = combo(theta, 1.0)? + combo(ortho, -1.0)?;
    let deamplified = combo(theta, -1.0)? + combo(ortho, 1.0)?;
    Ok(IntensityReading::from_terms([
        t * (gc + g).powi(2) / 16.0 * amplified,
        t * (gc - g).powi(2) / 16.0 * deamplified,
        -t * 0.5,
    ]))
}

/// The optional amplifier stage in front of the detectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PsaStage {
    None,
    Degenerate {
        mode: usize,
        gain: GainParam,
    },
    Nondegenerate {
        mode_a: usize,
        mode_b: usize,
        gain: GainParam,
    },
}

/// What sits at the end of the chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Detector {
    Bhd {
        mode: usize,
        cfg: BhdConfig,
    },
    JointBhd {
        mode_a: usize,
        mode_b: usize,
        cfg_a: BhdConfig,
        cfg_b: BhdConfig,
        comb: CombinerConfig,
    },
    Power {
        mode: usize,
        loss: LossChannel,
    },
}

/// A full measurement description: amplifier stage plus detector. Evaluating
/// it on vacuum input yields the shot-noise limit, because vacuum replaces
/// the amplifier inputs while losses and gains stay in place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub n_modes: usize,
    pub psa: PsaStage,
    pub detector: Detector,
}

impl Measurement {
    /// Runs the chain on `input`: applies the PSA stage, then evaluates the
    /// detector (losses included). Returns a current variance for BHD
    /// detectors and a mean intensity for the power detector.
    pub fn evaluate(&self, input: &GaussianState) -> Result<f64> {
        if input.n_modes() != self.n_modes {
            return Err(Error::BadMeasurement(format!(
                "input has {} modes, measurement expects {}",
                input.n_modes(),
                self.n_modes
            )));
        }
        let amplified = match &self.psa {
            PsaStage::None => input.clone(),
            PsaStage::Degenerate { mode, gain } => input.apply_degenerate_psa(*mode, gain)?,
            PsaStage::Nondegenerate {
                mode_a,
                mode_b,
                gain,
            } => input.apply_nondegenerate_psa(*mode_a, *mode_b, gain)?,
        };
        match &self.detector {
            Detector::Bhd { mode, cfg } => bhd_variance(&amplified, *mode, cfg),
            Detector::JointBhd {
                mode_a,
                mode_b,
                cfg_a,
                cfg_b,
                comb,
            } => joint_bhd_variance(&amplified, *mode_a, *mode_b, cfg_a, cfg_b, comb),
            Detector::Power { mode, loss } => {
                let n = amplified.mean_photon_number(*mode)?;
                Ok(loss.transmissivity() * n)
            }
        }
    }

    /// Shot-noise limit: the identical chain evaluated on vacuum.
    pub fn snl(&self) -> Result<f64> {
        self.evaluate(&GaussianState::vacuum(self.n_modes)?)
    }
}

/// Shot-noise limit of a measurement description (vacuum substituted at the
/// amplifier inputs).
pub fn snl_of(measurement: &Measurement) -> Result<f64> {
    measurement.snl()
}
