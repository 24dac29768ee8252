//! Brute-force validator in a truncated Fock basis.
//!
//! States live on up to three modes with a per-mode photon cutoff. The same
//! optical elements the covariance path implements are realized here
//! nonperturbatively, as exponentials of quadratic generators applied to
//! state vectors (split into substeps so each Taylor series converges fast).
//! Loss is a physical beamsplitter onto a vacuum ancilla followed by a
//! partial trace, so the oracle shares no code path or approximation with
//! the covariance algebra it checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::QuadratureSelector;

/// Largest number of simultaneously tracked system modes.
pub const MAX_ORACLE_MODES: usize = 3;

/// Population allowed at the cutoff level before results are refused.
pub const CUTOFF_POPULATION_TOL: f64 = 1e-8;

/// Largest dense density matrix (entry count) the oracle will materialize.
const MAX_DENSITY_ENTRIES: usize = 8_000_000;

/// Largest dense unitary dimension [`build_unitary`] will materialize.
const MAX_UNITARY_DIM: usize = 2048;

/// Quadratic generators; the evolution parameter supplies the squeeze
/// parameter, beamsplitter angle or phase angle at application time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadraticGenerator {
    /// `K = e^{i phase} a^dag b^dag - e^{-i phase} a b`; parameter `r` gives
    /// amplitudes `(cosh r, sinh r)` matching a two-mode amplifier of
    /// strength `sinh r`.
    TwoModeSqueeze {
        mode_a: usize,
        mode_b: usize,
        phase: f64,
    },
    /// `K = (e^{i phase} a^dag^2 - e^{-i phase} a^2) / 2`; parameter `s`
    /// gives a degenerate amplifier with `(G, g) = (cosh s, sinh s)`.
    SingleModeSqueeze { mode: usize, phase: f64 },
    /// `K = a^dag b - a b^dag`; parameter `theta` mixes
    /// `a -> cos(theta) a + sin(theta) b`, so reflectivity `L` corresponds
    /// to `theta = asin(sqrt(L))`.
    Beamsplitter { mode_a: usize, mode_b: usize },
    /// `K = i n`; parameter `alpha` sends `a -> a e^{i alpha}`.
    PhaseShift { mode: usize },
}

impl QuadraticGenerator {
    fn modes(&self) -> (usize, Option<usize>) {
        match *self {
            QuadraticGenerator::TwoModeSqueeze { mode_a, mode_b, .. }
            | QuadraticGenerator::Beamsplitter { mode_a, mode_b } => (mode_a, Some(mode_b)),
            QuadraticGenerator::SingleModeSqueeze { mode, .. }
            | QuadraticGenerator::PhaseShift { mode } => (mode, None),
        }
    }

    /// Crude operator-norm bound used to pick the substep count.
    fn norm_bound(&self, n_max: usize) -> f64 {
        let n = (n_max + 1) as f64;
        match self {
            QuadraticGenerator::TwoModeSqueeze { .. } => 2.0 * n,
            QuadraticGenerator::SingleModeSqueeze { .. } => 1.5 * n,
            QuadraticGenerator::Beamsplitter { .. } => 2.0 * n,
            QuadraticGenerator::PhaseShift { .. } => n,
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    /// Amplitude vector; may carry extra purification modes appended after
    /// the system modes by loss channels.
    Pure(Vec<Complex64>),
    /// Dense density matrix over the system modes, row-major.
    Density(Vec<Complex64>),
}

/// A state of up to three modes in a truncated Fock space.
#[derive(Clone, Debug)]
pub struct TruncatedState {
    n_modes: usize,
    n_max: usize,
    /// Purification modes currently attached (pure representation only).
    ancillas: usize,
    repr: Repr,
}

impl TruncatedState {
    pub fn vacuum(n_modes: usize, n_max: usize) -> Result<Self> {
        Self::fock_basis(&vec![0; n_modes], n_max)
    }

    /// Basis state `|n_1, n_2, ...>`.
    pub fn fock_basis(occupations: &[usize], n_max: usize) -> Result<Self> {
        let n_modes = occupations.len();
        if n_modes == 0 || n_modes > MAX_ORACLE_MODES {
            return Err(Error::BadFockState(format!(
                "need between 1 and {MAX_ORACLE_MODES} modes, got {n_modes}"
            )));
        }
        if n_max < 2 {
            return Err(Error::BadFockState(format!("cutoff {n_max} too small")));
        }
        if let Some(bad) = occupations.iter().find(|n| **n > n_max) {
            return Err(Error::BadFockState(format!(
                "occupation {bad} exceeds cutoff {n_max}"
            )));
        }
        let dim1 = n_max + 1;
        let mut amplitudes = vec![Complex64::ZERO; dim1.pow(n_modes as u32)];
        let mut idx = 0usize;
        let mut stride = 1usize;
        for n in occupations {
            idx += n * stride;
            stride *= dim1;
        }
        amplitudes[idx] = Complex64::ONE;
        Ok(Self {
            n_modes,
            n_max,
            ancillas: 0,
            repr: Repr::Pure(amplitudes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn dim1(&self) -> usize {
        self.n_max + 1
    }

    fn system_dim(&self) -> usize {
        self.dim1().pow(self.n_modes as u32)
    }

    fn total_modes(&self) -> usize {
        self.n_modes + self.ancillas
    }

    /// Norm (pure) or trace (density) deviation from one.
    pub fn norm_defect(&self) -> f64 {
        match &self.repr {
            Repr::Pure(psi) => (psi.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs(),
            Repr::Density(rho) => {
                let dim = self.system_dim();
                let trace: f64 = (0..dim).map(|i| rho[i * dim + i].re).sum();
                (trace - 1.0).abs()
            }
        }
    }

    /// Largest probability of finding any mode (ancillas included) at the
    /// cutoff level; results are refused when it exceeds the tolerance.
    pub fn cutoff_population(&self) -> f64 {
        let dim1 = self.dim1();
        let mut worst = 0.0f64;
        match &self.repr {
            Repr::Pure(psi) => {
                for mode in 0..self.total_modes() {
                    let stride = dim1.pow(mode as u32);
                    let pop: f64 = psi
                        .iter()
                        .enumerate()
                        .filter(|(idx, _)| (idx / stride) % dim1 == self.n_max)
                        .map(|(_, a)| a.norm_sqr())
                        .sum();
                    worst = worst.max(pop);
                }
            }
            Repr::Density(rho) => {
                let dim = self.system_dim();
                for mode in 0..self.n_modes {
                    let stride = dim1.pow(mode as u32);
                    let pop: f64 = (0..dim)
                        .filter(|i| (i / stride) % dim1 == self.n_max)
                        .map(|i| rho[i * dim + i].re)
                        .sum();
                    worst = worst.max(pop);
                }
            }
        }
        worst
    }

    fn check_cutoff(&self) -> Result<()> {
        let population = self.cutoff_population();
        if population > CUTOFF_POPULATION_TOL {
            return Err(Error::CutoffExceeded {
                population,
                n_max: self.n_max,
            });
        }
        Ok(())
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

    /// Applies `exp(parameter * K)` for the generator's `K`.
    pub fn evolve(&self, generator: &QuadraticGenerator, parameter: f64) -> Result<Self> {
        let (a, b) = generator.modes();
        self.check_mode(a)?;
        if let Some(b) = b {
            self.check_mode(b)?;
            if a == b {
                return Err(Error::ModeCollision(a));
            }
        }
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Pure(psi) => {
                evolve_vector(
                    psi,
                    generator,
                    parameter,
                    out.n_modes + out.ancillas,
                    out.n_max,
                );
            }
            Repr::Density(rho) => {
                evolve_density(rho, generator, parameter, out.n_modes, out.n_max);
            }
        }
        Ok(out)
    }

    /// Loss as a beamsplitter of reflectivity `loss` onto a fresh vacuum
    /// ancilla. Pure states keep the ancilla as a purification mode (the
    /// partial trace over it is implicit in every later expectation value
    /// and can be materialized with [`TruncatedState::reduced_density`]);
    /// density matrices are traced immediately.
    pub fn apply_loss(&self, mode: usize, loss: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::ReflectivityOutOfRange(loss));
        }
        let theta = loss.sqrt().asin();
        match &self.repr {
            Repr::Pure(psi) => {
                let dim1 = self.dim1();
                let old_len = psi.len();
                let mut grown = vec![Complex64::ZERO; old_len * dim1];
                grown[..old_len].copy_from_slice(psi);
                let total = self.total_modes() + 1;
                let generator = QuadraticGenerator::Beamsplitter {
                    mode_a: mode,
                    mode_b: total - 1,
                };
                evolve_vector(&mut grown, &generator, theta, total, self.n_max);
                Ok(Self {
                    n_modes: self.n_modes,
                    n_max: self.n_max,
                    ancillas: self.ancillas + 1,
                    repr: Repr::Pure(grown),
                })
            }
            Repr::Density(rho) => {
                let dim = self.system_dim();
                let dim1 = self.dim1();
                let big = dim * dim1;
                if big * big > MAX_DENSITY_ENTRIES {
                    return Err(Error::BadFockState(format!(
                        "density of {big}^2 entries exceeds the oracle budget"
                    )));
                }
                let mut grown = vec![Complex64::ZERO; big * big];
                for r in 0..dim {
                    for c in 0..dim {
                        grown[r * big + c] = rho[r * dim + c];
                    }
                }
                let generator = QuadraticGenerator::Beamsplitter {
                    mode_a: mode,
                    mode_b: self.n_modes,
                };
                evolve_density(&mut grown, &generator, theta, self.n_modes + 1, self.n_max);
                let reduced = trace_out_tail(&grown, dim, dim1);
                Ok(Self {
                    n_modes: self.n_modes,
                    n_max: self.n_max,
                    ancillas: 0,
                    repr: Repr::Density(reduced),
                })
            }
        }
    }

    /// Materializes the density matrix over the system modes, tracing out
    /// any purification modes attached by loss channels.
    pub fn reduced_density(&self) -> Result<Self> {
        let dim = self.system_dim();
        if dim * dim > MAX_DENSITY_ENTRIES {
            return Err(Error::BadFockState(format!(
                "density of {dim}^2 entries exceeds the oracle budget"
            )));
        }
        let rho = match &self.repr {
            Repr::Density(rho) => rho.clone(),
            Repr::Pure(psi) => {
                let blocks = psi.len() / dim;
                let mut rho = vec![Complex64::ZERO; dim * dim];
                for k in 0..blocks {
                    let block = &psi[k * dim..(k + 1) * dim];
                    for r in 0..dim {
                        if block[r] == Complex64::ZERO {
                            continue;
                        }
                        for c in 0..dim {
                            rho[r * dim + c] += block[r] * block[c].conj();
                        }
                    }
                }
                rho
            }
        };
        Ok(Self {
            n_modes: self.n_modes,
            n_max: self.n_max,
            ancillas: 0,
            repr: Repr::Density(rho),
        })
    }

    /// Variance of a weighted sum of quadratures, `Var(sum_i w_i X_i(angle_i))`,
    /// evaluated with truncated operator matrices. Refuses states whose
    /// cutoff population is too large to trust.
    pub fn quad_moments(&self, terms: &[(QuadratureSelector, f64)]) -> Result<f64> {
        if terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        for (sel, _) in terms {
            self.check_mode(sel.mode)?;
        }
        self.check_cutoff()?;
        let total = self.total_modes();
        match &self.repr {
            Repr::Pure(psi) => {
                let o_psi = apply_quad_sum(psi, terms, total, self.n_max);
                let mean: Complex64 = psi
                    .iter()
                    .zip(o_psi.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let second: f64 = o_psi.iter().map(|a| a.norm_sqr()).sum();
                Ok(second - mean.re * mean.re)
            }
            Repr::Density(rho) => {
                let dim = self.system_dim();
                let a = apply_quad_sum_density(rho, terms, self.n_modes, self.n_max);
                let mean: f64 = (0..dim).map(|i| a[i * dim + i].re).sum();
                let b = apply_quad_sum_density(&a, terms, self.n_modes, self.n_max);
                let second: f64 = (0..dim).map(|i| b[i * dim + i].re).sum();
                Ok(second - mean * mean)
            }
        }
    }

    /// Mean photon number of one system mode.
    pub fn intensity_mean(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        self.check_cutoff()?;
        let dim1 = self.dim1();
        let stride = dim1.pow(mode as u32);
        match &self.repr {
            Repr::Pure(psi) => Ok(psi
                .iter()
                .enumerate()
                .map(|(idx, a)| ((idx / stride) % dim1) as f64 * a.norm_sqr())
                .sum()),
            Repr::Density(rho) => {
                let dim = self.system_dim();
                Ok((0..dim)
                    .map(|i| ((i / stride) % dim1) as f64 * rho[i * dim + i].re)
                    .sum())
            }
        }
    }

    /// Probability of each occupation of one mode (diagnostics and tests).
    pub fn mode_populations(&self, mode: usize) -> Result<Vec<f64>> {
        self.check_mode(mode)?;
        let dim1 = self.dim1();
        let stride = dim1.pow(mode as u32);
        let mut pops = vec![0.0; dim1];
        match &self.repr {
            Repr::Pure(psi) => {
                for (idx, a) in psi.iter().enumerate() {
                    pops[(idx / stride) % dim1] += a.norm_sqr();
                }
            }
            Repr::Density(rho) => {
                let dim = self.system_dim();
                for i in 0..dim {
                    pops[(i / stride) % dim1] += rho[i * dim + i].re;
                }
            }
        }
        Ok(pops)
    }
}

/// Scatters `K |psi>` for one generator (unit parameter) into `out`.
fn apply_generator(
    psi: &[Complex64],
    out: &mut [Complex64],
    generator: &QuadraticGenerator,
    n_modes: usize,
    n_max: usize,
) {
    let dim1 = n_max + 1;
    let _ = n_modes;
    match *generator {
        QuadraticGenerator::TwoModeSqueeze {
            mode_a,
            mode_b,
            phase,
        } => {
            let (sa, sb) = (dim1.pow(mode_a as u32), dim1.pow(mode_b as u32));
            let up = Complex64::from_polar(1.0, phase);
            let down = Complex64::from_polar(1.0, -phase);
            for (idx, amp) in psi.iter().enumerate() {
                if *amp == Complex64::ZERO {
                    continue;
                }
                let na = (idx / sa) % dim1;
                let nb = (idx / sb) % dim1;
                if na < n_max && nb < n_max {
                    let c = (((na + 1) * (nb + 1)) as f64).sqrt();
                    out[idx + sa + sb] += up * c * amp;
                }
                if na > 0 && nb > 0 {
                    let c = ((na * nb) as f64).sqrt();
                    out[idx - sa - sb] -= down * c * amp;
                }
            }
        }
        QuadraticGenerator::SingleModeSqueeze { mode, phase } => {
            let s = dim1.pow(mode as u32);
            let up = Complex64::from_polar(0.5, phase);
            let down = Complex64::from_polar(0.5, -phase);
            for (idx, amp) in psi.iter().enumerate() {
                if *amp == Complex64::ZERO {
                    continue;
                }
                let n = (idx / s) % dim1;
                if n + 2 <= n_max {
                    let c = (((n + 1) * (n + 2)) as f64).sqrt();
                    out[idx + 2 * s] += up * c * amp;
                }
                if n >= 2 {
                    let c = ((n * (n - 1)) as f64).sqrt();
                    out[idx - 2 * s] -= down * c * amp;
                }
            }
        }
        QuadraticGenerator::Beamsplitter { mode_a, mode_b } => {
            let (sa, sb) = (dim1.pow(mode_a as u32), dim1.pow(mode_b as u32));
            for (idx, amp) in psi.iter().enumerate() {
                if *amp == Complex64::ZERO {
                    continue;
                }
                let na = (idx / sa) % dim1;
                let nb = (idx / sb) % dim1;
                if na < n_max && nb > 0 {
                    let c = (((na + 1) * nb) as f64).sqrt();
                    out[idx + sa - sb] += c * amp;
                }
                if na > 0 && nb < n_max {
                    let c = ((na * (nb + 1)) as f64).sqrt();
                    out[idx - sa + sb] -= c * amp;
                }
            }
        }
        QuadraticGenerator::PhaseShift { mode } => {
            let s = dim1.pow(mode as u32);
            for (idx, amp) in psi.iter().enumerate() {
                if *amp == Complex64::ZERO {
                    continue;
                }
                let n = ((idx / s) % dim1) as f64;
                out[idx] += Complex64::new(0.0, n) * amp;
            }
        }
    }
}

/// In-place `psi <- exp(parameter * K) psi` via scaling and per-substep
/// Taylor series; the truncated `K` is exactly anti-Hermitian, so the map is
/// unitary up to roundoff.
fn evolve_vector(
    psi: &mut [Complex64],
    generator: &QuadraticGenerator,
    parameter: f64,
    n_modes: usize,
    n_max: usize,
) {
    if parameter == 0.0 {
        return;
    }
    let steps = (parameter.abs() * generator.norm_bound(n_max))
        .ceil()
        .max(1.0) as usize;
    let dt = parameter / steps as f64;
    let dim = psi.len();
    let mut term = vec![Complex64::ZERO; dim];
    let mut next = vec![Complex64::ZERO; dim];
    for _ in 0..steps {
        term.copy_from_slice(psi);
        let mut term_norm: f64 = term.iter().map(|a| a.norm_sqr()).sum();
        for k in 1..=80u32 {
            next.iter_mut().for_each(|v| *v = Complex64::ZERO);
            apply_generator(&term, &mut next, generator, n_modes, n_max);
            let scale = Complex64::new(dt / k as f64, 0.0);
            for (t, n) in term.iter_mut().zip(next.iter()) {
                *t = scale * n;
            }
            for (p, t) in psi.iter_mut().zip(term.iter()) {
                *p += t;
            }
            term_norm = term.iter().map(|a| a.norm_sqr()).sum();
            if term_norm < 1e-34 {
                break;
            }
        }
        debug_assert!(term_norm < 1e-30, "Taylor series failed to converge");
    }
}

/// `rho <- U rho U^dag` using the vector evolution on columns:
/// first `A = U rho`, then `U A^dag` conjugate-transposed back.
fn evolve_density(
    rho: &mut [Complex64],
    generator: &QuadraticGenerator,
    parameter: f64,
    n_modes: usize,
    n_max: usize,
) {
    if parameter == 0.0 {
        return;
    }
    let dim = (n_max + 1).pow(n_modes as u32);
    debug_assert_eq!(rho.len(), dim * dim);
    let mut column = vec![Complex64::ZERO; dim];
    for pass in 0..2 {
        for c in 0..dim {
            for r in 0..dim {
                column[r] = rho[r * dim + c];
            }
            evolve_vector(&mut column, generator, parameter, n_modes, n_max);
            for r in 0..dim {
                rho[r * dim + c] = column[r];
            }
        }
        // conjugate-transpose between the two passes and once at the end,
        // which together implement A -> (U A^dag)^dag = A U^dag
        let _ = pass;
        for r in 0..dim {
            for c in (r + 1)..dim {
                let tmp = rho[r * dim + c].conj();
                rho[r * dim + c] = rho[c * dim + r].conj();
                rho[c * dim + r] = tmp;
            }
            rho[r * dim + r] = rho[r * dim + r].conj();
        }
    }
}

/// Partial trace over the last (highest-stride) mode of a density matrix.
fn trace_out_tail(rho: &[Complex64], dim_keep: usize, dim_tail: usize) -> Vec<Complex64> {
    let big = dim_keep * dim_tail;
    let mut out = vec![Complex64::ZERO; dim_keep * dim_keep];
    for k in 0..dim_tail {
        let off = k * dim_keep;
        for r in 0..dim_keep {
            for c in 0..dim_keep {
                out[r * dim_keep + c] += rho[(off + r) * big + off + c];
            }
        }
    }
    out
}

/// Applies `O = sum_i w_i X_{m_i}(theta_i)` to a vector (ancillas allowed).
fn apply_quad_sum(
    psi: &[Complex64],
    terms: &[(QuadratureSelector, f64)],
    n_modes: usize,
    n_max: usize,
) -> Vec<Complex64> {
    let _ = n_modes;
    let dim1 = n_max + 1;
    let mut out = vec![Complex64::ZERO; psi.len()];
    for (sel, weight) in terms {
        let s = dim1.pow(sel.mode as u32);
        let lower = Complex64::from_polar(*weight, -sel.angle);
        let raise = Complex64::from_polar(*weight, sel.angle);
        for (idx, amp) in psi.iter().enumerate() {
            if *amp == Complex64::ZERO {
                continue;
            }
            let n = (idx / s) % dim1;
            if n > 0 {
                out[idx - s] += lower * (n as f64).sqrt() * amp;
            }
            if n < n_max {
                out[idx + s] += raise * ((n + 1) as f64).sqrt() * amp;
            }
        }
    }
    out
}

/// `O rho` column by column.
fn apply_quad_sum_density(
    rho: &[Complex64],
    terms: &[(QuadratureSelector, f64)],
    n_modes: usize,
    n_max: usize,
) -> Vec<Complex64> {
    let dim = (n_max + 1).pow(n_modes as u32);
    let mut out = vec![Complex64::ZERO; dim * dim];
    let mut column = vec![Complex64::ZERO; dim];
    for c in 0..dim {
        for r in 0..dim {
            column[r] = rho[r * dim + c];
        }
        let applied = apply_quad_sum(&column, terms, n_modes, n_max);
        for r in 0..dim {
            out[r * dim + c] = applied[r];
        }
    }
    out
}

/// Dense matrix of `exp(parameter * K)` on the full truncated space, built
/// column by column. Useful for small cutoffs only; the dimension is capped.
pub fn build_unitary(
    generator: &QuadraticGenerator,
    parameter: f64,
    n_modes: usize,
    n_max: usize,
) -> Result<DMatrix<Complex64>> {
    let dim = (n_max + 1).pow(n_modes as u32);
    if dim > MAX_UNITARY_DIM {
        return Err(Error::UnitaryTooLarge(dim));
    }
    let (a, b) = generator.modes();
    for mode in [Some(a), b].into_iter().flatten() {
        if mode >= n_modes {
            return Err(Error::ModeOutOfRange { mode, n_modes });
        }
    }
    let mut u = DMatrix::zeros(dim, dim);
    let mut column = vec![Complex64::ZERO; dim];
    for c in 0..dim {
        column.iter_mut().for_each(|v| *v = Complex64::ZERO);
        column[c] = Complex64::ONE;
        evolve_vector(&mut column, generator, parameter, n_modes, n_max);
        for r in 0..dim {
            u[(r, c)] = column[r];
        }
    }
    Ok(u)
}
