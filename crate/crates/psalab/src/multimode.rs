//! Temporal-mode model of pulsed entanglement: Schmidt-mode gain ladders,
//! local-oscillator overlap decompositions, and the multimode inseparability
//! read by the traditional and PSA-assisted schemes.
//!
//! Mode functions are never derived from pump physics here; callers supply
//! either overlap coefficients directly or sampled spectra for discrete inner
//! products.

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metrics::Port;

const WEIGHT_NORM_TOL: f64 = 1e-10;
const PAIR_NORM_TOL: f64 = 1e-12;
const OVERLAP_NORM_TOL: f64 = 1e-6;
const SPECTRUM_NORM_TOL: f64 = 1e-8;

/// Gain estimates from formulas that assume a dominant, well-amplified
/// fundamental mode; `low_gain` marks results where the fundamental PSA gain
/// is below the trustworthy regime, `fundamental_dark` marks overlaps that
/// cannot see the fundamental mode at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultimodeEstimate {
    pub value: f64,
    /// Index of the mode pair carrying the largest weight (the limit the
    /// estimate converges to as the pump grows).
    pub leading_mode: usize,
    pub low_gain: bool,
    pub fundamental_dark: bool,
}

/// Schmidt-mode weight ladder `r_1 > r_2 > ... > 0` with `sum r_j^2 = 1`,
/// plus the pump-strength parameter generating per-mode gains
/// `cosh(r_j G')`, `sinh(r_j G')`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeLadder {
    weights: Vec<f64>,
    pump_strength: f64,
}

impl ModeLadder {
    pub fn new(weights: Vec<f64>, pump_strength: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidLadder("no weights".into()));
        }
        if !pump_strength.is_finite() || pump_strength < 0.0 {
            return Err(Error::InvalidLadder(format!(
                "pump strength {pump_strength} must be finite and nonnegative"
            )));
        }
        for pair in weights.windows(2) {
            if pair[0].is_nan() || pair[1].is_nan() || pair[0] <= pair[1] {
                return Err(Error::InvalidLadder(format!(
                    "weights must be strictly descending, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
            return Err(Error::InvalidLadder("weights must be positive".into()));
        }
        let norm: f64 = weights.iter().map(|w| w * w).sum();
        if (norm - 1.0).abs() > WEIGHT_NORM_TOL {
            return Err(Error::InvalidLadder(format!(
                "sum of squared weights is {norm}, expected 1"
            )));
        }
        Ok(Self {
            weights,
            pump_strength,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pump_strength(&self) -> f64 {
        self.pump_strength
    }

    pub fn with_pump(&self, pump_strength: f64) -> Result<Self> {
        Self::new(self.weights.clone(), pump_strength)
    }
}

/// Per-mode amplitude gain pairs `(mu_j, nu_j)` with `mu_j^2 - nu_j^2 = 1`,
/// ordered by descending gain.
#[derive(Clone, Debug, PartialEq)]
pub struct MultimodeGains {
    pairs: Vec<(f64, f64)>,
}

impl MultimodeGains {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidGains("no gain pairs".into()));
        }
        for (j, (mu, nu)) in pairs.iter().enumerate() {
            if (mu * mu - nu * nu - 1.0).abs() > PAIR_NORM_TOL {
                return Err(Error::InvalidGains(format!(
                    "pair {j}: mu^2 - nu^2 = {} != 1",
                    mu * mu - nu * nu
                )));
            }
        }
        for pair in pairs.windows(2) {
            if pair[0].0 < pair[1].0 {
                return Err(Error::InvalidGains(
                    "gains must be ordered by descending mu".into(),
                ));
            }
        }
        Ok(Self { pairs })
    }

    /// Builds gains directly from per-mode conversion strengths `nu_j`
    /// (the direct amplitudes are derived).
    pub fn from_strengths(strengths: &[f64]) -> Result<Self> {
        Self::new(
            strengths
                .iter()
                .map(|nu| ((1.0 + nu * nu).sqrt(), *nu))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// `(mu_j, nu_j)`, treating modes beyond the stored ladder as unpumped.
    fn pair(&self, j: usize) -> (f64, f64) {
        self.pairs.get(j).copied().unwrap_or((1.0, 0.0))
    }
}

/// Hyperbolic gains from a weight ladder: `G_j = cosh(r_j G')`,
/// `g_j = sinh(r_j G')`.
pub fn gains_from_ladder(ladder: &ModeLadder) -> MultimodeGains {
    MultimodeGains {
        pairs: ladder
            .weights()
            .iter()
            .map(|r| {
                let arg = r * ladder.pump_strength();
                (arg.cosh(), arg.sinh())
            })
            .collect(),
    }
}

/// Complex mode-matching coefficients of the two local oscillators onto the
/// Schmidt modes, plus the LO global phases.
#[derive(Clone, Debug, PartialEq)]
pub struct LoOverlap {
    xi: Vec<Complex64>,
    zeta: Vec<Complex64>,
    pub phi0: f64,
    pub psi0: f64,
}

impl LoOverlap {
    pub fn new(xi: Vec<Complex64>, zeta: Vec<Complex64>, phi0: f64, psi0: f64) -> Result<Self> {
        for coeffs in [&xi, &zeta] {
            let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
            let defect = (norm - 1.0).abs();
            if defect > OVERLAP_NORM_TOL {
                return Err(Error::NormalizationDefect {
                    defect,
                    tolerance: OVERLAP_NORM_TOL,
                });
            }
        }
        Ok(Self {
            xi,
            zeta,
            phi0,
            psi0,
        })
    }

    /// Real nonnegative moduli, e.g. `[0.8, 0.6]`, with both LOs in phase.
    pub fn from_moduli(xi: &[f64], zeta: &[f64]) -> Result<Self> {
        Self::new(
            xi.iter().map(|m| Complex64::new(*m, 0.0)).collect(),
            zeta.iter().map(|m| Complex64::new(*m, 0.0)).collect(),
            0.0,
            0.0,
        )
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    pub fn zeta(&self) -> &[Complex64] {
        &self.zeta
    }

    fn xi_at(&self, j: usize) -> Complex64 {
        self.xi.get(j).copied().unwrap_or(Complex64::ZERO)
    }

    fn zeta_at(&self, j: usize) -> Complex64 {
        self.zeta.get(j).copied().unwrap_or(Complex64::ZERO)
    }

    fn n_modes(&self, gains: &MultimodeGains) -> usize {
        self.xi.len().max(self.zeta.len()).max(gains.len())
    }
}

/// Uniformly sampled spectra: the LO spectrum of each arm and the Schmidt
/// mode functions of both arms, all on one frequency grid and each with unit
/// discrete norm.
#[derive(Clone, Debug)]
pub struct SpectralGrid {
    omega: Vec<f64>,
    lo_a: Vec<Complex64>,
    lo_b: Vec<Complex64>,
    modes_a: Vec<Vec<Complex64>>,
    modes_b: Vec<Vec<Complex64>>,
}

impl SpectralGrid {
    pub fn new(
        omega: Vec<f64>,
        lo_a: Vec<Complex64>,
        lo_b: Vec<Complex64>,
        modes_a: Vec<Vec<Complex64>>,
        modes_b: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::BadSpectralGrid("need at least two samples".into()));
        }
        let step = omega[1] - omega[0];
        if step.is_nan() || step <= 0.0 {
            return Err(Error::BadSpectralGrid("grid must be increasing".into()));
        }
        for w in omega.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step {
                return Err(Error::BadSpectralGrid("grid must be uniform".into()));
            }
        }
        let grid = Self {
            omega,
            lo_a,
            lo_b,
            modes_a,
            modes_b,
        };
        let n = grid.omega.len();
        for (name, f) in grid.named_functions() {
            if f.len() != n {
                return Err(Error::BadSpectralGrid(format!(
                    "{name} sampled on {} points, grid has {n}",
                    f.len()
                )));
            }
            let norm: f64 = f.iter().map(|c| c.norm_sqr()).sum::<f64>() * step;
            if (norm - 1.0).abs() > SPECTRUM_NORM_TOL {
                return Err(Error::BadSpectralGrid(format!(
                    "{name} has discrete norm {norm}, expected 1"
                )));
            }
        }
        Ok(grid)
    }

    fn named_functions(&self) -> Vec<(String, &[Complex64])> {
        let mut out: Vec<(String, &[Complex64])> =
            vec![("lo_a".into(), &self.lo_a), ("lo_b".into(), &self.lo_b)];
        for (j, m) in self.modes_a.iter().enumerate() {
            out.push((format!("mode_a[{j}]"), m));
        }
        for (j, m) in self.modes_b.iter().enumerate() {
            out.push((format!("mode_b[{j}]"), m));
        }
        out
    }

    fn step(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }
}

/// Overlap coefficients computed from sampled spectra, with the residual norm
/// not captured by the supplied mode set.
#[derive(Clone, Debug)]
pub struct SpectralOverlap {
    pub xi: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
    /// `1 - sum |xi_j|^2`: nonzero when the mode set is incomplete.
    pub defect_a: f64,
    pub defect_b: f64,
}

impl SpectralOverlap {
    /// Promotes the coefficients to a validated [`LoOverlap`]; fails when the
    /// supplied modes do not span the LO spectra.
    pub fn into_overlap(self, phi0: f64, psi0: f64) -> Result<LoOverlap> {
        LoOverlap::new(self.xi, self.zeta, phi0, psi0)
    }
}

/// Discrete inner products `xi_j = sum_k A_LO(w_k) phi_j*(w_k) dw` (and the
/// same with `B_LO`, `psi_j` for the other arm).
pub fn overlap_from_spectra(grid: &SpectralGrid) -> SpectralOverlap {
    let step = grid.step();
    let project = |lo: &[Complex64], modes: &[Vec<Complex64>]| -> Vec<Complex64> {
        modes
            .iter()
            .map(|mode| {
                lo.iter()
                    .zip(mode.iter())
                    .map(|(a, m)| a * m.conj())
                    .sum::<Complex64>()
                    * step
            })
            .collect()
    };
    let xi = project(&grid.lo_a, &grid.modes_a);
    let zeta = project(&grid.lo_b, &grid.modes_b);
    let defect = |coeffs: &[Complex64]| 1.0 - coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    SpectralOverlap {
        defect_a: defect(&xi),
        defect_b: defect(&zeta),
        xi,
        zeta,
    }
}

fn check_overlap(lo: &LoOverlap) -> Result<()> {
    for coeffs in [lo.xi(), lo.zeta()] {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let defect = (norm - 1.0).abs();
        if defect > OVERLAP_NORM_TOL {
            return Err(Error::NormalizationDefect {
                defect,
                tolerance: OVERLAP_NORM_TOL,
            });
        }
    }
    Ok(())
}

/// Inseparability recorded by the traditional dual-homodyne scheme on a
/// multimode source:
///
/// ```text
/// I = sum_j [ (mu_j^2+nu_j^2)(|xi_j|^2+|zeta_j|^2)
///             - 4 mu_j nu_j |xi_j||zeta_j| cos(theta_j + theta'_j + phi0 + psi0) ]
/// ```
///
/// For perfect single-mode matching this collapses to `2 (mu_j0 - nu_j0)^2`.
pub fn multimode_traditional_inseparability(gains: &MultimodeGains, lo: &LoOverlap) -> Result<f64> {
    check_overlap(lo)?;
    let n = lo.n_modes(gains);
    let common = lo.phi0 + lo.psi0;
    let mut total = 0.0;
    for j in 0..n {
        let (mu, nu) = gains.pair(j);
        let xi = lo.xi_at(j);
        let zeta = lo.zeta_at(j);
        let weight = xi.norm_sqr() + zeta.norm_sqr();
        let delta = xi.arg() + zeta.arg() + common;
        total +=
            (mu * mu + nu * nu) * weight - 4.0 * mu * nu * xi.norm() * zeta.norm() * delta.cos();
    }
    Ok(total)
}

/// Traditional multimode inseparability as a function of a common pump-phase
/// offset added to `phi0 + psi0`. Per-mode phase shifts that preserve
/// `theta_j + theta'_j` leave every entry unchanged.
pub fn multimode_phase_sensitivity(
    gains: &MultimodeGains,
    lo: &LoOverlap,
    pump_phase_offsets: &[f64],
) -> Result<Vec<f64>> {
    pump_phase_offsets
        .iter()
        .map(|offset| {
            let shifted = LoOverlap {
                xi: lo.xi().to_vec(),
                zeta: lo.zeta().to_vec(),
                phi0: lo.phi0 + offset,
                psi0: lo.psi0,
            };
            multimode_traditional_inseparability(gains, &shifted)
        })
        .collect()
}

/// Fundamental PSA gain below which the large-gain formulas should not be
/// trusted (the single-mode analysis shows sizeable deviations there).
const TRUSTED_FUNDAMENTAL_GAIN: f64 = 3.0;

fn weighted_average(
    src: &MultimodeGains,
    psa: &MultimodeGains,
    weights: &[f64],
    fundamental_gain: f64,
) -> Result<MultimodeEstimate> {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    let mut leading = 0usize;
    let mut leading_weight = -1.0;
    for (j, w) in weights.iter().enumerate() {
        let (mu, nu) = src.pair(j);
        let gj = psa.pair(j).0;
        let wj = w * gj * gj;
        numerator += wj * 2.0 * (mu - nu).powi(2);
        denominator += wj;
        if wj > leading_weight {
            leading_weight = wj;
            leading = j;
        }
    }
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::NormalizationDefect {
            defect: 1.0,
            tolerance: OVERLAP_NORM_TOL,
        });
    }
    Ok(MultimodeEstimate {
        value: numerator / denominator,
        leading_mode: leading,
        low_gain: fundamental_gain < TRUSTED_FUNDAMENTAL_GAIN,
        fundamental_dark: weights.first().copied().unwrap_or(0.0) == 0.0,
    })
}

/// Large-gain inseparability read by a single BHD at one PSA output:
/// `I = 2 sum_j w_j G_j^2 (mu_j - nu_j)^2 / sum_j w_j G_j^2` with
/// `w_j = |xi_j|^2` for port 1 and `|zeta_j|^2` for port 2. Converges to the
/// fundamental-mode value when the pump grows and `|xi_1| > 0`; otherwise it
/// converges to the lowest visible mode, which the estimate flags.
pub fn multimode_psa_single_inseparability(
    src_gains: &MultimodeGains,
    psa_ladder: &ModeLadder,
    lo: &LoOverlap,
    port: Port,
) -> Result<MultimodeEstimate> {
    check_overlap(lo)?;
    let psa = gains_from_ladder(psa_ladder);
    let n = lo.n_modes(src_gains).max(psa.len());
    let weights: Vec<f64> = (0..n)
        .map(|j| match port {
            Port::One => lo.xi_at(j).norm_sqr(),
            Port::Two => lo.zeta_at(j).norm_sqr(),
        })
        .collect();
    weighted_average(src_gains, &psa, &weights, psa.pair(0).0)
}

/// Large-gain inseparability of the PSA-assisted joint measurement; the mode
/// weights become `(|xi_j| + |zeta_j|)^2 G_j^2`, so either LO seeing the
/// fundamental mode is enough for convergence to its inseparability.
pub fn multimode_psa_joint_inseparability(
    src_gains: &MultimodeGains,
    psa_ladder: &ModeLadder,
    lo: &LoOverlap,
) -> Result<MultimodeEstimate> {
    check_overlap(lo)?;
    let psa = gains_from_ladder(psa_ladder);
    let n = lo.n_modes(src_gains).max(psa.len());
    let weights: Vec<f64> = (0..n)
        .map(|j| (lo.xi_at(j).norm() + lo.zeta_at(j).norm()).powi(2))
        .collect();
    weighted_average(src_gains, &psa, &weights, psa.pair(0).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pair_gains() -> MultimodeGains {
        MultimodeGains::new(vec![
            (1.0f64.cosh(), 1.0f64.sinh()),
            (0.5f64.cosh(), 0.5f64.sinh()),
        ])
        .unwrap()
    }

    fn complex(r: f64) -> Complex64 {
        Complex64::new(r, 0.0)
    }

    #[test]
    fn ladder_validation() {
        assert!(ModeLadder::new(vec![0.8, 0.6], 2.0).is_ok());
        assert!(ModeLadder::new(vec![0.6, 0.8], 2.0).is_err());
        assert!(ModeLadder::new(vec![0.8, 0.8], 2.0).is_err());
        assert!(ModeLadder::new(vec![0.9, 0.1], 2.0).is_err()); // norm != 1
        assert!(ModeLadder::new(vec![1.0], -1.0).is_err());
    }

    #[test]
    fn ladder_gains_hyperbolic() {
        let ladder = ModeLadder::new(vec![0.8, 0.6], 2.0).unwrap();
        let gains = gains_from_ladder(&ladder);
        let [(g1, s1), (g2, s2)] = gains.pairs() else {
            panic!()
        };
        assert!((g1 - 1.6f64.cosh()).abs() < 1e-12);
        assert!((s1 - 1.6f64.sinh()).abs() < 1e-12);
        assert!((g1 - 2.5775).abs() < 1e-4);
        assert!((s1 - 2.3756).abs() < 1e-4);
        assert!((g2 - 1.8107).abs() < 1e-4);
        assert!((s2 - 1.5095).abs() < 1e-4);

        let off = gains_from_ladder(&ladder.with_pump(0.0).unwrap());
        for (mu, nu) in off.pairs() {
            assert_eq!(*mu, 1.0);
            assert_eq!(*nu, 0.0);
        }

        // degenerate single-mode ladder reduces to an ordinary gain pair
        let single = ModeLadder::new(vec![1.0], 0.7).unwrap();
        let g = gains_from_ladder(&single);
        assert!((g.pair(0).0 - 0.7f64.cosh()).abs() < 1e-15);
        assert!((g.pair(0).1 - 0.7f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn traditional_even_split() {
        let gains = two_pair_gains();
        let m = (0.5f64).sqrt();
        let lo = LoOverlap::from_moduli(&[m, m], &[m, m]).unwrap();
        let i = multimode_traditional_inseparability(&gains, &lo).unwrap();
        let expected = (-2.0f64).exp() + (-1.0f64).exp();
        assert!((i - expected).abs() < 1e-12);
        assert!((i - 0.50322).abs() < 1e-5);
    }

    #[test]
    fn traditional_crossed_overlaps_pathology() {
        let gains = two_pair_gains();
        let lo = LoOverlap::from_moduli(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        let i = multimode_traditional_inseparability(&gains, &lo).unwrap();
        let [(mu1, nu1), (mu2, nu2)] = gains.pairs() else {
            panic!()
        };
        let expected = mu1 * mu1 + mu2 * mu2 + nu1 * nu1 + nu2 * nu2;
        assert!((i - expected).abs() < 1e-12);
        assert!(i > 2.0);
        assert!((i - 5.305).abs() < 1e-3);
    }

    #[test]
    fn traditional_perfect_match_recovers_single_mode() {
        let gains = two_pair_gains();
        let lo = LoOverlap::from_moduli(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let i = multimode_traditional_inseparability(&gains, &lo).unwrap();
        let (mu1, nu1) = gains.pair(0);
        assert!((i - 2.0 * (mu1 - nu1).powi(2)).abs() < 1e-12);
        assert!((i - 0.27067).abs() < 1e-5);
    }

    #[test]
    fn phase_reparameterization_invariance() {
        let gains = two_pair_gains();
        let base = LoOverlap::new(
            vec![
                Complex64::from_polar(0.6, 0.3),
                Complex64::from_polar(0.8, -1.1),
            ],
            vec![
                Complex64::from_polar(0.9, 0.7),
                Complex64::from_polar((1.0f64 - 0.81).sqrt(), 2.0),
            ],
            0.25,
            -0.4,
        )
        .unwrap();
        let i0 = multimode_traditional_inseparability(&gains, &base).unwrap();

        // shift theta_j by +d_j and theta'_j by -d_j: nothing changes
        for (d1, d2) in [(0.4, -1.3), (2.2, 0.9)] {
            let shifted = LoOverlap::new(
                vec![
                    Complex64::from_polar(0.6, 0.3 + d1),
                    Complex64::from_polar(0.8, -1.1 + d2),
                ],
                vec![
                    Complex64::from_polar(0.9, 0.7 - d1),
                    Complex64::from_polar((1.0f64 - 0.81).sqrt(), 2.0 - d2),
                ],
                0.25,
                -0.4,
            )
            .unwrap();
            let i = multimode_traditional_inseparability(&gains, &shifted).unwrap();
            assert!((i - i0).abs() < 1e-12);
        }
    }

    #[test]
    fn common_phase_endpoints_single_mode() {
        let gains = MultimodeGains::from_strengths(&[0.9]).unwrap();
        let lo = LoOverlap::from_moduli(&[1.0], &[1.0]).unwrap();
        let scan = multimode_phase_sensitivity(&gains, &lo, &[0.0, std::f64::consts::PI]).unwrap();
        let (mu, nu) = gains.pair(0);
        assert!((scan[0] - 2.0 * (mu - nu).powi(2)).abs() < 1e-12);
        assert!((scan[1] - 2.0 * (mu + nu).powi(2)).abs() < 1e-12);

        // single mode with unit overlaps reproduces the single-mode source
        // inseparability
        let single =
            crate::metrics::source_metrics(&crate::metrics::SourceSpec::from_nu(0.9).unwrap());
        let i = multimode_traditional_inseparability(&gains, &lo).unwrap();
        assert!((i - single.inseparability).abs() < 1e-12);
    }

    #[test]
    fn psa_single_filters_toward_fundamental() {
        let gains = two_pair_gains();
        let m = (0.5f64).sqrt();
        let lo = LoOverlap::from_moduli(&[m, m], &[m, m]).unwrap();
        let ladder = ModeLadder::new(vec![0.8, 0.6], 6.0).unwrap();
        let est = multimode_psa_single_inseparability(&gains, &ladder, &lo, Port::One).unwrap();
        // independent evaluation of the weighted average at G' = 6
        let (w1, w2) = (4.8f64.cosh().powi(2), 3.6f64.cosh().powi(2));
        let expected = (w1 * 2.0 * (-2.0f64).exp() + w2 * 2.0 * (-1.0f64).exp()) / (w1 + w2);
        assert!((est.value - expected).abs() < 1e-12, "{}", est.value);
        assert!((est.value - 0.30940).abs() < 1e-4);
        assert_eq!(est.leading_mode, 0);
        assert!(!est.low_gain);
        assert!(!est.fundamental_dark);
        // at this pump the second mode still contributes at the ten-percent
        // level; the fundamental value is only reached further up
        let target = 2.0 * (-2.0f64).exp();
        assert!((est.value - target).abs() / target > 0.10);
        let strong = ModeLadder::new(vec![0.8, 0.6], 11.5).unwrap();
        let est = multimode_psa_single_inseparability(&gains, &strong, &lo, Port::One).unwrap();
        assert!((est.value - target).abs() / target < 0.02);

        // pump off: plain overlap-weighted average
        let off = ModeLadder::new(vec![0.8, 0.6], 0.0).unwrap();
        let est = multimode_psa_single_inseparability(&gains, &off, &lo, Port::One).unwrap();
        let expected = 0.5 * ((-2.0f64).exp() * 2.0) + 0.5 * ((-1.0f64).exp() * 2.0);
        assert!((est.value - expected).abs() < 1e-12);
        assert!(est.low_gain);

        // convergence to the fundamental value as the pump grows
        let target = 2.0 * (-2.0f64).exp();
        let mut last = f64::INFINITY;
        for pump in [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
            let ladder = ModeLadder::new(vec![0.8, 0.6], pump).unwrap();
            let est = multimode_psa_single_inseparability(&gains, &ladder, &lo, Port::One).unwrap();
            let dev = (est.value - target).abs();
            assert!(dev <= last + 1e-12, "pump={pump}");
            last = dev;
        }
    }

    #[test]
    fn psa_single_with_single_mode_ladder_reads_source_exactly() {
        // one Schmidt mode: the gain weight cancels at any pump
        let gains = MultimodeGains::from_strengths(&[0.85]).unwrap();
        let lo = LoOverlap::from_moduli(&[1.0], &[1.0]).unwrap();
        let (mu, nu) = gains.pair(0);
        for pump in [0.5, 2.0, 7.0] {
            let ladder = ModeLadder::new(vec![1.0], pump).unwrap();
            let est = multimode_psa_single_inseparability(&gains, &ladder, &lo, Port::One).unwrap();
            assert!((est.value - 2.0 * (mu - nu).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn psa_single_dark_fundamental_converges_to_next_mode() {
        let gains = two_pair_gains();
        let lo = LoOverlap::from_moduli(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        let ladder = ModeLadder::new(vec![0.8, 0.6], 8.0).unwrap();
        let est = multimode_psa_single_inseparability(&gains, &ladder, &lo, Port::One).unwrap();
        let (mu2, nu2) = gains.pair(1);
        assert!((est.value - 2.0 * (mu2 - nu2).powi(2)).abs() < 1e-12);
        assert_eq!(est.leading_mode, 1);
        assert!(est.fundamental_dark);

        // port 2 looks through zeta, which does see the fundamental
        let est = multimode_psa_single_inseparability(&gains, &ladder, &lo, Port::Two).unwrap();
        let (mu1, nu1) = gains.pair(0);
        assert!((est.value - 2.0 * (mu1 - nu1).powi(2)).abs() < 1e-12);
        assert_eq!(est.leading_mode, 0);
        assert!(!est.fundamental_dark);
    }

    #[test]
    fn psa_joint_rescues_crossed_overlaps() {
        let gains = two_pair_gains();
        let lo = LoOverlap::from_moduli(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        let target = 2.0 * (-2.0f64).exp();
        let mut last = f64::INFINITY;
        for pump in [2.0, 4.0, 6.0, 9.0, 12.0] {
            let ladder = ModeLadder::new(vec![0.8, 0.6], pump).unwrap();
            let est = multimode_psa_joint_inseparability(&gains, &ladder, &lo).unwrap();
            let dev = (est.value - target).abs();
            assert!(dev < last, "pump={pump}");
            assert_eq!(est.leading_mode, 0);
            last = dev;
        }

        // symmetric overlaps: joint equals single (common factor 4 cancels)
        let m = (0.5f64).sqrt();
        let sym = LoOverlap::from_moduli(&[m, m], &[m, m]).unwrap();
        let ladder = ModeLadder::new(vec![0.8, 0.6], 5.0).unwrap();
        let joint = multimode_psa_joint_inseparability(&gains, &ladder, &sym).unwrap();
        let single = multimode_psa_single_inseparability(&gains, &ladder, &sym, Port::One).unwrap();
        assert!((joint.value - single.value).abs() < 1e-12);

        // pump off: weights (|xi|+|zeta|)^2
        let off = ModeLadder::new(vec![0.8, 0.6], 0.0).unwrap();
        let est = multimode_psa_joint_inseparability(&gains, &off, &lo).unwrap();
        let i1 = 2.0 * (-2.0f64).exp();
        let i2 = 2.0 * (-1.0f64).exp();
        assert!((est.value - (i1 + i2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_padding_is_inert() {
        let gains = two_pair_gains();
        let m = (0.5f64).sqrt();
        let lo = LoOverlap::from_moduli(&[m, m], &[m, m]).unwrap();
        let padded = LoOverlap::from_moduli(&[m, m, 0.0, 0.0], &[m, m, 0.0]).unwrap();
        let a = multimode_traditional_inseparability(&gains, &lo).unwrap();
        let b = multimode_traditional_inseparability(&gains, &padded).unwrap();
        assert!((a - b).abs() < 1e-12);

        let ladder = ModeLadder::new(vec![0.8, 0.6], 3.0).unwrap();
        let a = multimode_psa_single_inseparability(&gains, &ladder, &lo, Port::One)
            .unwrap()
            .value;
        let b = multimode_psa_single_inseparability(&gains, &ladder, &padded, Port::One)
            .unwrap()
            .value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn convexity_bounds() {
        let gains = two_pair_gains();
        let min_i = 2.0 * (-2.0f64).exp();
        let max_i = gains
            .pairs()
            .iter()
            .map(|(mu, nu)| 2.0 * (mu + nu).powi(2))
            .fold(f64::MIN, f64::max);
        for (a, b) in [(1.0, 0.0), (0.8, 0.6), (0.6, 0.8), (0.0, 1.0)] {
            let lo = LoOverlap::from_moduli(&[a, b], &[a, b]).unwrap();
            for offset in [0.0, 0.8, 2.4] {
                let i = multimode_phase_sensitivity(&gains, &lo, &[offset]).unwrap()[0];
                assert!(i >= min_i - 1e-12);
                assert!(i <= max_i + 1e-12);
            }
        }
    }

    #[test]
    fn overlap_normalization_enforced() {
        let gains = two_pair_gains();
        let bad = LoOverlap {
            xi: vec![complex(0.5), complex(0.5)],
            zeta: vec![complex(1.0)],
            phi0: 0.0,
            psi0: 0.0,
        };
        assert!(matches!(
            multimode_traditional_inseparability(&gains, &bad),
            Err(Error::NormalizationDefect { .. })
        ));
        assert!(LoOverlap::from_moduli(&[0.5, 0.5], &[1.0]).is_err());
    }

    #[test]
    fn spectra_projection() {
        // 3-point grid; modes are orthonormal indicator-like vectors
        let n = 64usize;
        let step = 0.1;
        let omega: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
        let norm = 1.0 / (n as f64 * step).sqrt();
        // two orthonormal modes: flat and alternating
        let phi1: Vec<Complex64> = (0..n).map(|_| complex(norm)).collect();
        let phi2: Vec<Complex64> = (0..n)
            .map(|k| complex(if k % 2 == 0 { norm } else { -norm }))
            .collect();

        // LO = phi1 exactly
        let grid = SpectralGrid::new(
            omega.clone(),
            phi1.clone(),
            phi1.clone(),
            vec![phi1.clone(), phi2.clone()],
            vec![phi1.clone(), phi2.clone()],
        )
        .unwrap();
        let overlap = overlap_from_spectra(&grid);
        assert!((overlap.xi[0].norm() - 1.0).abs() < 1e-10);
        assert!(overlap.xi[1].norm() < 1e-10);
        assert!(overlap.defect_a.abs() < 1e-10);
        assert!(overlap.into_overlap(0.0, 0.0).is_ok());

        // LO = (phi1 + phi2)/sqrt(2)
        let mix: Vec<Complex64> = phi1
            .iter()
            .zip(phi2.iter())
            .map(|(a, b)| (a + b) / complex(2.0f64.sqrt()))
            .collect();
        let grid = SpectralGrid::new(
            omega.clone(),
            mix.clone(),
            mix.clone(),
            vec![phi1.clone(), phi2.clone()],
            vec![phi1.clone(), phi2.clone()],
        )
        .unwrap();
        let overlap = overlap_from_spectra(&grid);
        let r = (0.5f64).sqrt();
        assert!((overlap.xi[0].norm() - r).abs() < 1e-8);
        assert!((overlap.xi[1].norm() - r).abs() < 1e-8);

        // LO orthogonal to every supplied mode: all coefficients vanish and
        // the defect is flagged
        let grid = SpectralGrid::new(
            omega,
            phi1.clone(),
            phi1.clone(),
            vec![phi2.clone()],
            vec![phi2],
        )
        .unwrap();
        let overlap = overlap_from_spectra(&grid);
        assert!(overlap.xi[0].norm() < 1e-10);
        assert!((overlap.defect_a - 1.0).abs() < 1e-10);
        assert!(overlap.into_overlap(0.0, 0.0).is_err());
    }

    #[test]
    fn spectra_grid_validation() {
        let omega = vec![0.0, 0.1, 0.25]; // not uniform
        let f = vec![complex(1.0); 3];
        assert!(SpectralGrid::new(omega, f.clone(), f.clone(), vec![], vec![]).is_err());
    }
}
