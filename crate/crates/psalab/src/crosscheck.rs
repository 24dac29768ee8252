//! Cross-validation of the covariance algebra against the truncated
//! Fock-space oracle. Every check builds the same optical chain along both
//! paths and compares a variance or an intensity; the paths share no code.
//!
//! The oracle is trustworthy for moderate strengths only (dense truncated
//! tensors), so the suite sweeps conversion strengths up to a configurable
//! bound, 0.8 by default.

use crate::error::Result;
use crate::fock::{QuadraticGenerator, TruncatedState};
use crate::gaussian::{GainParam, GaussianState, LossChannel, QuadratureSelector};
use crate::measurement::{degenerate_psa_intensity, nondegenerate_psa_intensity};

/// Agreement tolerance between the two paths at the default cutoff.
pub const ORACLE_TOL: f64 = 1e-6;

/// Tolerance for the truncation-convergence rows (cutoff minus ten vs
/// cutoff).
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct CrossCheckConfig {
    pub max_strength: f64,
    pub n_max: usize,
}

impl Default for CrossCheckConfig {
    fn default() -> Self {
        Self {
            max_strength: 0.8,
            n_max: 40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckRow {
    pub name: String,
    pub gaussian: f64,
    pub fock: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    fn new(name: impl Into<String>, gaussian: f64, fock: f64, tolerance: f64) -> Self {
        let difference = (gaussian - fock).abs();
        Self {
            name: name.into(),
            gaussian,
            fock,
            difference,
            tolerance,
            passed: difference <= tolerance,
        }
    }
}

fn tms(phase: f64) -> QuadraticGenerator {
    QuadraticGenerator::TwoModeSqueeze {
        mode_a: 0,
        mode_b: 1,
        phase,
    }
}

fn x(mode: usize) -> QuadratureSelector {
    QuadratureSelector::x(mode)
}

fn y(mode: usize) -> QuadratureSelector {
    QuadratureSelector::y(mode)
}

struct Pair {
    gauss: GaussianState,
    fock: TruncatedState,
}

impl Pair {
    fn vacuum(n_modes: usize, n_max: usize) -> Result<Self> {
        Ok(Self {
            gauss: GaussianState::vacuum(n_modes)?,
            fock: TruncatedState::vacuum(n_modes, n_max)?,
        })
    }

    fn two_mode_pa(self, gain: &GainParam) -> Result<Self> {
        Ok(Self {
            gauss: self.gauss.apply_two_mode_pa(0, 1, gain)?,
            fock: self
                .fock
                .evolve(&tms(gain.phase()), gain.strength().asinh())?,
        })
    }

    fn degenerate_psa(self, mode: usize, gain: &GainParam) -> Result<Self> {
        Ok(Self {
            gauss: self.gauss.apply_degenerate_psa(mode, gain)?,
            fock: self.fock.evolve(
                &QuadraticGenerator::SingleModeSqueeze {
                    mode,
                    phase: gain.phase(),
                },
                gain.strength().asinh(),
            )?,
        })
    }

    fn loss(self, mode: usize, loss: LossChannel) -> Result<Self> {
        Ok(Self {
            gauss: self.gauss.apply_loss(mode, loss)?,
            fock: self.fock.apply_loss(mode, loss.reflectivity())?,
        })
    }

    fn phase(self, mode: usize, angle: f64) -> Result<Self> {
        Ok(Self {
            gauss: self.gauss.apply_phase(mode, angle)?,
            fock: self
                .fock
                .evolve(&QuadraticGenerator::PhaseShift { mode }, angle)?,
        })
    }

    fn variance_row(
        &self,
        name: impl Into<String>,
        terms: &[(QuadratureSelector, f64)],
        tol: f64,
    ) -> Result<CheckRow> {
        Ok(CheckRow::new(
            name,
            self.gauss.linear_combo_variance(terms)?,
            self.fock.quad_moments(terms)?,
            tol,
        ))
    }

    fn intensity_row(&self, name: impl Into<String>, mode: usize, tol: f64) -> Result<CheckRow> {
        Ok(CheckRow::new(
            name,
            self.gauss.mean_photon_number(mode)?,
            self.fock.intensity_mean(mode)?,
            tol,
        ))
    }
}

/// Runs the whole suite; the returned rows carry both values, the difference
/// and a per-row pass flag.
pub fn run_suite(cfg: &CrossCheckConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let n_max = cfg.n_max;
    let hi = cfg.max_strength;
    let mid = 0.5 * hi;

    // vacuum sanity
    let vac = Pair::vacuum(2, 16.min(n_max))?;
    rows.push(vac.variance_row(
        "vacuum Var(X1-X2)",
        &[(x(0), 1.0), (x(1), -1.0)],
        ORACLE_TOL,
    )?);

    // entangled source at a few strengths: squeezed, anti-squeezed and
    // single-beam variances plus the beam intensity
    for nu in [0.3, mid, hi] {
        let gain = GainParam::from_strength(nu)?;
        let pair = Pair::vacuum(2, n_max)?.two_mode_pa(&gain)?;
        rows.push(pair.variance_row(
            format!("PA nu={nu:.2} Var(X1-X2)"),
            &[(x(0), 1.0), (x(1), -1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.variance_row(
            format!("PA nu={nu:.2} Var(Y1+Y2)"),
            &[(y(0), 1.0), (y(1), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.variance_row(
            format!("PA nu={nu:.2} Var(X1+X2)"),
            &[(x(0), 1.0), (x(1), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.variance_row(
            format!("PA nu={nu:.2} Var(X1)"),
            &[(x(0), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row(format!("PA nu={nu:.2} <n1>"), 0, ORACLE_TOL)?);
    }

    // detection loss after the source: ancilla + beamsplitter + trace vs the
    // covariance loss map
    {
        let gain = GainParam::from_strength(0.3)?;
        let loss = LossChannel::new(0.4)?;
        let pair = Pair::vacuum(2, n_max)?.two_mode_pa(&gain)?.loss(0, loss)?;
        rows.push(pair.variance_row(
            "PA nu=0.30 + loss L=0.4 Var(X1-X2)",
            &[(x(0), 1.0), (x(1), -1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.variance_row(
            "PA nu=0.30 + loss L=0.4 Var(X1)",
            &[(x(0), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row("PA nu=0.30 + loss L=0.4 <n1>", 0, ORACLE_TOL)?);
    }

    // degenerate PSA on vacuum and on a squeezed input
    for g in [0.3, hi] {
        let gain = GainParam::from_strength(g)?;
        let pair = Pair::vacuum(1, n_max)?.degenerate_psa(0, &gain)?;
        rows.push(pair.variance_row(
            format!("degenerate PSA g={g:.2} Var(X)"),
            &[(x(0), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.variance_row(
            format!("degenerate PSA g={g:.2} Var(Y)"),
            &[(y(0), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row(format!("degenerate PSA g={g:.2} <n>"), 0, ORACLE_TOL)?);
    }
    {
        let prep = GainParam::new(mid, std::f64::consts::PI)?;
        let gain = GainParam::from_strength(hi)?;
        let pair = Pair::vacuum(1, n_max)?
            .degenerate_psa(0, &prep)?
            .degenerate_psa(0, &gain)?;
        rows.push(pair.variance_row(
            "squeezed input + degenerate PSA Var(X)",
            &[(x(0), 1.0)],
            ORACLE_TOL,
        )?);
    }

    // non-degenerate PSA at the de-amplification phase, including the
    // dis-entangler point g = nu where the output returns to vacuum
    {
        let nu = mid;
        let source = GainParam::from_strength(nu)?;
        let psa = GainParam::deamplifying(nu)?;
        let pair = Pair::vacuum(2, n_max)?
            .two_mode_pa(&source)?
            .two_mode_pa(&psa)?;
        rows.push(pair.variance_row(
            format!("dis-entangler nu=g={nu:.2} Var(X1)"),
            &[(x(0), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row(format!("dis-entangler nu=g={nu:.2} <n1>"), 0, ORACLE_TOL)?);
    }
    {
        let source = GainParam::from_strength(0.4)?;
        let psa = GainParam::deamplifying(hi)?;
        let pair = Pair::vacuum(2, n_max)?
            .two_mode_pa(&source)?
            .two_mode_pa(&psa)?;
        rows.push(pair.variance_row(
            "PA + de-amplifying PSA Var(X1-X2)",
            &[(x(0), 1.0), (x(1), -1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row("PA + de-amplifying PSA <n1>", 0, ORACLE_TOL)?);
    }

    // amplifying composition: source + PSA at phase 0 act as one larger PA
    {
        let source = GainParam::from_strength(0.3)?;
        let psa = GainParam::from_strength(0.4)?;
        let pair = Pair::vacuum(2, n_max)?
            .two_mode_pa(&source)?
            .two_mode_pa(&psa)?;
        rows.push(pair.variance_row(
            "composed PA Var(X1-X2)",
            &[(x(0), 1.0), (x(1), -1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row("composed PA <n1>", 0, ORACLE_TOL)?);
    }

    // LO phase bookkeeping: rotated quadrature of one source beam
    {
        let source = GainParam::from_strength(mid)?;
        let pair = Pair::vacuum(2, n_max)?
            .two_mode_pa(&source)?
            .phase(0, std::f64::consts::PI / 3.0)?;
        rows.push(pair.variance_row(
            "phase-rotated beam Var(X1(pi/3) - X2)",
            &[(x(0), 1.0), (x(1), -1.0)],
            ORACLE_TOL,
        )?);
    }

    // arbitrary pump phases: the correlated-quadrature variance is
    // phase-sensitive, Var(X1-X2) = 2(mu^2 + nu^2 - 2 mu nu cos(phase))
    {
        let gain = GainParam::new(mid, 1.3)?;
        let pair = Pair::vacuum(2, n_max)?.two_mode_pa(&gain)?;
        rows.push(pair.variance_row(
            "PA at pump phase 1.3 Var(X1-X2)",
            &[(x(0), 1.0), (x(1), -1.0)],
            ORACLE_TOL,
        )?);
        let analytic = 2.0
            * (gain.conj_amplitude().powi(2) + mid * mid
                - 2.0 * gain.conj_amplitude() * mid * (1.3f64).cos());
        rows.push(CheckRow::new(
            "PA at pump phase 1.3 vs analytic",
            pair.gauss
                .linear_combo_variance(&[(x(0), 1.0), (x(1), -1.0)])?,
            analytic,
            ORACLE_TOL,
        ));
    }
    {
        let prep = GainParam::new(mid, std::f64::consts::PI)?;
        let gain = GainParam::new(hi, 0.9)?;
        let pair = Pair::vacuum(1, n_max)?
            .degenerate_psa(0, &prep)?
            .degenerate_psa(0, &gain)?;
        rows.push(pair.variance_row(
            "squeezed input + PSA at pump phase 0.9 Var(X)",
            &[(x(0), 1.0)],
            ORACLE_TOL,
        )?);
        rows.push(pair.intensity_row(
            "squeezed input + PSA at pump phase 0.9 <n>",
            0,
            ORACLE_TOL,
        )?);
    }

    // power-detector formula paths against the Fock intensities
    {
        let prep = GainParam::new(mid, std::f64::consts::PI)?;
        let gain = GainParam::from_strength(hi)?;
        let input = Pair::vacuum(1, n_max)?.degenerate_psa(0, &prep)?;
        let reading = degenerate_psa_intensity(&input.gauss, 0, &gain, LossChannel::lossless())?;
        let fock_out = input.fock.evolve(
            &QuadraticGenerator::SingleModeSqueeze {
                mode: 0,
                phase: gain.phase(),
            },
            gain.strength().asinh(),
        )?;
        rows.push(CheckRow::new(
            "degenerate intensity formula vs Fock",
            reading.mean(),
            fock_out.intensity_mean(0)?,
            ORACLE_TOL,
        ));

        let source = GainParam::from_strength(0.3)?;
        let psa = GainParam::deamplifying(hi)?;
        let input = Pair::vacuum(2, n_max)?.two_mode_pa(&source)?;
        let reading =
            nondegenerate_psa_intensity(&input.gauss, 0, 1, &psa, LossChannel::lossless())?;
        let fock_out = input
            .fock
            .evolve(&tms(psa.phase()), psa.strength().asinh())?;
        rows.push(CheckRow::new(
            "non-degenerate intensity formula vs Fock",
            reading.mean(),
            fock_out.intensity_mean(0)?,
            ORACLE_TOL,
        ));
    }

    // truncation convergence: the strongest source, cutoff n_max vs n_max-10
    {
        let gain = GainParam::from_strength(hi)?;
        let fine = Pair::vacuum(2, n_max)?.two_mode_pa(&gain)?;
        let coarse = Pair::vacuum(2, n_max.saturating_sub(10).max(12))?.two_mode_pa(&gain)?;
        let terms = [(x(0), 1.0), (x(1), -1.0)];
        rows.push(CheckRow::new(
            "truncation convergence Var(X1-X2)",
            coarse.fock.quad_moments(&terms)?,
            fine.fock.quad_moments(&terms)?,
            CONVERGENCE_TOL,
        ));
    }

    Ok(rows)
}

/// Formats the rows as an aligned pass/fail table.
pub fn format_table(rows: &[CheckRow]) -> String {
    let name_width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    out.push_str(&format!(
        "{:name_width$}  {:>14}  {:>14}  {:>10}  {:>8}  result\n",
        "case", "covariance", "fock", "|diff|", "tol"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:name_width$}  {:>14.9}  {:>14.9}  {:>10.3e}  {:>8.1e}  {}\n",
            row.name,
            row.gaussian,
            row.fock,
            row.difference,
            row.tolerance,
            if row.passed { "PASS" } else { "FAIL" }
        ));
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    out.push_str(&format!(
        "{} checks, {} passed, {} failed\n",
        rows.len(),
        rows.len() - failed,
        failed
    ));
    out
}
