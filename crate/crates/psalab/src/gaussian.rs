//! Zero-mean multimode Gaussian states as real covariance matrices.
//!
//! Quadratures are ordered `(X1, Y1, X2, Y2, ...)` with the vacuum variance
//! of every quadrature normalized to 1, so the vacuum covariance matrix is
//! the identity. All unitary optics (parametric amplification, phase-sensitive
//! amplification, phase shifts) act as symplectic congruences on the
//! covariance matrix; loss is the usual beamsplitter admixture of vacuum.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Squeeze-type gain: `strength` is the conversion amplitude (the `nu` of a
/// source amplifier or the `g` of a phase-sensitive one), `conj_amplitude`
/// the amplitude on the direct term, derived so that
/// `conj_amplitude^2 - strength^2 = 1`. `phase` is the pump phase relative to
/// the inputs: 0 amplifies, `pi` de-amplifies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainParam {
    strength: f64,
    conj_amplitude: f64,
    phase: f64,
}

impl GainParam {
    pub fn new(strength: f64, phase: f64) -> Result<Self> {
        if !strength.is_finite() || strength < 0.0 {
            return Err(Error::InvalidGainStrength(strength));
        }
        Ok(Self {
            strength,
            conj_amplitude: (1.0 + strength * strength).sqrt(),
            phase,
        })
    }

    /// Gain at the amplification phase (`phase = 0`).
    pub fn from_strength(strength: f64) -> Result<Self> {
        Self::new(strength, 0.0)
    }

    /// Gain at the de-amplification phase (`phase = pi`).
    pub fn deamplifying(strength: f64) -> Result<Self> {
        Self::new(strength, std::f64::consts::PI)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn conj_amplitude(&self) -> f64 {
        self.conj_amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        Self { phase, ..*self }
    }
}

/// Beamsplitter loss channel with reflectivity `L` in `[0, 1]`; the lost
/// fraction is replaced by vacuum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossChannel {
    reflectivity: f64,
}

impl LossChannel {
    pub fn new(reflectivity: f64) -> Result<Self> {
        if !reflectivity.is_finite() || !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::ReflectivityOutOfRange(reflectivity));
        }
        Ok(Self { reflectivity })
    }

    pub const fn lossless() -> Self {
        Self { reflectivity: 0.0 }
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn transmissivity(&self) -> f64 {
        1.0 - self.reflectivity
    }
}

impl Default for LossChannel {
    fn default() -> Self {
        Self::lossless()
    }
}

/// Selects the quadrature `X(angle) = a e^{-i angle} + a^dag e^{i angle}` of
/// one mode; `angle = 0` is X, `angle = pi/2` is Y.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSelector {
    pub mode: usize,
    pub angle: f64,
}

impl QuadratureSelector {
    pub fn new(mode: usize, angle: f64) -> Self {
        Self { mode, angle }
    }

    pub fn x(mode: usize) -> Self {
        Self { mode, angle: 0.0 }
    }

    pub fn y(mode: usize) -> Self {
        Self {
            mode,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Physicality diagnostic: symmetry defect of the covariance matrix and the
/// minimum eigenvalue of `cov + i*Omega` (negative beyond tolerance means the
/// uncertainty bound is violated).
#[derive(Clone, Copy, Debug)]
pub struct PhysicalityReport {
    pub symmetry_defect: f64,
    pub min_uncertainty_eigenvalue: f64,
    pub passed: bool,
}

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const UNCERTAINTY_TOL: f64 = 1e-9;

/// Symplectic matrices for the optical elements, in the `(X1, Y1, ...)`
/// quadrature ordering. Every unitary element is a congruence
/// `cov -> S cov S^T` with `S Omega S^T = Omega`.
pub mod symplectic {
    use super::*;

    /// The symplectic form `Omega`: block-diagonal `[[0, 1], [-1, 0]]`.
    pub fn form(n_modes: usize) -> DMatrix<f64> {
        let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for m in 0..n_modes {
            omega[(2 * m, 2 * m + 1)] = 1.0;
            omega[(2 * m + 1, 2 * m)] = -1.0;
        }
        omega
    }

    /// Reflection-like block `K(phase)`; its +1 eigenvector is the quadrature
    /// at angle `phase / 2`, which the squeezers amplify.
    fn squeeze_block(phase: f64) -> [[f64; 2]; 2] {
        let (s, c) = phase.sin_cos();
        [[c, s], [s, -c]]
    }

    /// Two-mode squeezer `a1 -> mu a1 + nu e^{i phase} a2^dag` (and 1 <-> 2).
    /// With `phase = 0` this is the entangling parametric amplifier; with
    /// `phase = pi` it de-amplifies the correlated quadratures.
    pub fn two_mode_squeezer(
        n_modes: usize,
        mode_a: usize,
        mode_b: usize,
        conj_amplitude: f64,
        strength: f64,
        phase: f64,
    ) -> DMatrix<f64> {
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let k = squeeze_block(phase);
        for (i, j) in [(mode_a, mode_b), (mode_b, mode_a)] {
            s[(2 * i, 2 * i)] = conj_amplitude;
            s[(2 * i + 1, 2 * i + 1)] = conj_amplitude;
            for r in 0..2 {
                for c in 0..2 {
                    s[(2 * i + r, 2 * j + c)] = strength * k[r][c];
                }
            }
        }
        s
    }

    /// Degenerate squeezer `a -> G a + g e^{i phase} a^dag`.
    pub fn single_mode_squeezer(
        n_modes: usize,
        mode: usize,
        conj_amplitude: f64,
        strength: f64,
        phase: f64,
    ) -> DMatrix<f64> {
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let k = squeeze_block(phase);
        for r in 0..2 {
            for c in 0..2 {
                let delta = if r == c { conj_amplitude } else { 0.0 };
                s[(2 * mode + r, 2 * mode + c)] = delta + strength * k[r][c];
            }
        }
        s
    }

    /// Phase shift `a -> a e^{i angle}` on one mode.
    pub fn phase_rotation(n_modes: usize, mode: usize, angle: f64) -> DMatrix<f64> {
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (sn, cs) = angle.sin_cos();
        s[(2 * mode, 2 * mode)] = cs;
        s[(2 * mode, 2 * mode + 1)] = -sn;
        s[(2 * mode + 1, 2 * mode)] = sn;
        s[(2 * mode + 1, 2 * mode + 1)] = cs;
        s
    }

    /// Max-abs entry of `S Omega S^T - Omega`; zero for exact symplectic maps.
    pub fn defect(s: &DMatrix<f64>) -> f64 {
        let n_modes = s.nrows() / 2;
        let omega = form(n_modes);
        let residual = s * &omega * s.transpose() - omega;
        residual.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// A zero-mean Gaussian state over `n_modes` optical modes.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// The vacuum of `n_modes` modes: identity covariance, exactly.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::EmptyState);
        }
        Ok(Self {
            n_modes,
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Wraps an existing covariance matrix (must be square, even-dimensioned
    /// and symmetric; physicality is *not* enforced here, use
    /// [`GaussianState::check_physicality`]).
    pub fn from_cov(cov: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = cov.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::BadCovarianceShape { rows, cols });
        }
        let scale = cov.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let defect = symmetry_defect(&cov) / scale;
        if defect > SYMMETRY_TOL {
            return Err(Error::AsymmetricCovariance(defect));
        }
        Ok(Self {
            n_modes: rows / 2,
            cov,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.n_modes,
            });
        }
        Ok(())
    }

    fn check_pair(&self, mode_a: usize, mode_b: usize) -> Result<()> {
        self.check_mode(mode_a)?;
        self.check_mode(mode_b)?;
        if mode_a == mode_b {
            return Err(Error::ModeCollision(mode_a));
        }
        Ok(())
    }

    fn transformed(&self, s: &DMatrix<f64>) -> Self {
        let cov = s * &self.cov * s.transpose();
        Self {
            n_modes: self.n_modes,
            cov: symmetrized(cov),
        }
    }

    /// Two-mode parametric amplifier on `(mode_a, mode_b)`. Strength 0 is the
    /// exact identity.
    pub fn apply_two_mode_pa(
        &self,
        mode_a: usize,
        mode_b: usize,
        gain: &GainParam,
    ) -> Result<Self> {
        self.check_pair(mode_a, mode_b)?;
        if gain.strength() == 0.0 {
            return Ok(self.clone());
        }
        let s = symplectic::two_mode_squeezer(
            self.n_modes,
            mode_a,
            mode_b,
            gain.conj_amplitude(),
            gain.strength(),
            gain.phase(),
        );
        Ok(self.transformed(&s))
    }

    /// Degenerate phase-sensitive amplifier on one mode: with `phase = 0` the
    /// X variance scales by `(G+g)^2` and the Y variance by `(G-g)^2`.
    pub fn apply_degenerate_psa(&self, mode: usize, gain: &GainParam) -> Result<Self> {
        self.check_mode(mode)?;
        if gain.strength() == 0.0 {
            return Ok(self.clone());
        }
        let s = symplectic::single_mode_squeezer(
            self.n_modes,
            mode,
            gain.conj_amplitude(),
            gain.strength(),
            gain.phase(),
        );
        Ok(self.transformed(&s))
    }

    /// Non-degenerate phase-sensitive amplifier coupling two modes,
    /// `a1 -> G a1 + g e^{i phase} a2^dag`. The same symplectic map as
    /// [`GaussianState::apply_two_mode_pa`]; kept separate to mirror the two
    /// roles (entanglement source vs. measurement-assisting amplifier).
    pub fn apply_nondegenerate_psa(
        &self,
        mode_a: usize,
        mode_b: usize,
        gain: &GainParam,
    ) -> Result<Self> {
        self.apply_two_mode_pa(mode_a, mode_b, gain)
    }

    /// Beamsplitter loss: the mode block becomes `(1-L) sigma + L I`, its
    /// cross blocks scale by `sqrt(1-L)`.
    pub fn apply_loss(&self, mode: usize, loss: LossChannel) -> Result<Self> {
        self.check_mode(mode)?;
        let l = loss.reflectivity();
        if l == 0.0 {
            return Ok(self.clone());
        }
        let t = 1.0 - l;
        let root_t = t.sqrt();
        let mut cov = self.cov.clone();
        let base = 2 * mode;
        for r in 0..2 * self.n_modes {
            for c in 0..2 * self.n_modes {
                let r_in = r == base || r == base + 1;
                let c_in = c == base || c == base + 1;
                match (r_in, c_in) {
                    (true, true) => {
                        cov[(r, c)] *= t;
                        if r == c {
                            cov[(r, c)] += l;
                        }
                    }
                    (true, false) | (false, true) => cov[(r, c)] *= root_t,
                    (false, false) => {}
                }
            }
        }
        Ok(Self {
            n_modes: self.n_modes,
            cov,
        })
    }

    /// Phase shift `a -> a e^{i angle}` on one mode.
    pub fn apply_phase(&self, mode: usize, angle: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if angle == 0.0 {
            return Ok(self.clone());
        }
        let s = symplectic::phase_rotation(self.n_modes, mode, angle);
        Ok(self.transformed(&s))
    }

    /// Variance of the quadrature `X(angle)` of one mode.
    pub fn quad_variance(&self, sel: QuadratureSelector) -> Result<f64> {
        self.check_mode(sel.mode)?;
        let (s, c) = sel.angle.sin_cos();
        let i = 2 * sel.mode;
        Ok(c * c * self.cov[(i, i)]
            + 2.0 * s * c * self.cov[(i, i + 1)]
            + s * s * self.cov[(i + 1, i + 1)])
    }

    /// Variance of a weighted sum of quadratures, the quantity a joint
    /// homodyne measurement records.
    pub fn linear_combo_variance(&self, terms: &[(QuadratureSelector, f64)]) -> Result<f64> {
        if terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        let mut v = vec![0.0f64; 2 * self.n_modes];
        for (sel, weight) in terms {
            self.check_mode(sel.mode)?;
            let (s, c) = sel.angle.sin_cos();
            v[2 * sel.mode] += weight * c;
            v[2 * sel.mode + 1] += weight * s;
        }
        let mut acc = 0.0;
        for (r, vr) in v.iter().enumerate() {
            if *vr == 0.0 {
                continue;
            }
            for (c, vc) in v.iter().enumerate() {
                if *vc != 0.0 {
                    acc += vr * vc * self.cov[(r, c)];
                }
            }
        }
        Ok(acc)
    }

    /// Mean photon number of one mode: `(tr sigma_mode)/4 - 1/2` for a
    /// zero-mean state.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        Ok((self.cov[(i, i)] + self.cov[(i + 1, i + 1)]) / 4.0 - 0.5)
    }

    /// Symmetry and uncertainty-bound diagnostic. The uncertainty check uses
    /// the real embedding of the Hermitian matrix `cov + i Omega`, whose
    /// spectrum it shares.
    pub fn check_physicality(&self) -> PhysicalityReport {
        let scale = self.cov.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let sym = symmetry_defect(&self.cov) / scale;
        let n = 2 * self.n_modes;
        let omega = symplectic::form(self.n_modes);
        let mut embed = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                embed[(r, c)] = self.cov[(r, c)];
                embed[(n + r, n + c)] = self.cov[(r, c)];
                embed[(r, n + c)] = -omega[(r, c)];
                embed[(n + r, c)] = omega[(r, c)];
            }
        }
        let eigen = embed.symmetric_eigenvalues();
        let min_eig = eigen.iter().copied().fold(f64::INFINITY, f64::min);
        PhysicalityReport {
            symmetry_defect: sym,
            min_uncertainty_eigenvalue: min_eig,
            passed: sym <= SYMMETRY_TOL && min_eig >= -UNCERTAINTY_TOL,
        }
    }
}

fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let mut defect = 0.0f64;
    for r in 0..m.nrows() {
        for c in (r + 1)..m.ncols() {
            defect = defect.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    defect
}

fn symmetrized(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for r in 0..m.nrows() {
        for c in (r + 1)..m.ncols() {
            let avg = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = avg;
            m[(c, r)] = avg;
        }
    }
    m
}
