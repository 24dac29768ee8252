//! C ABI over the psalab simulator: an opaque Gaussian-state handle with the
//! optical transformations, plus the closed-form scheme evaluators. All
//! functions return a status code; outputs go through pointers supplied by
//! the caller. The generated header lives in `include/psalab.h`.

#![deny(unsafe_op_in_unsafe_fn)]

use std::os::raw::c_char;

use psalab::gaussian::{GainParam, GaussianState, LossChannel, QuadratureSelector};
use psalab::metrics::{
    psa_joint_metrics, psa_power_detector_metrics, psa_single_bhd_metrics, source_metrics,
    traditional_metrics, Port,
};
use psalab::multimode::{
    multimode_psa_joint_inseparability, multimode_psa_single_inseparability,
    multimode_traditional_inseparability, LoOverlap, ModeLadder, MultimodeGains,
};
use psalab::{Error, SourceSpec};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsalabStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments violated a precondition (mode out of range, bad
    /// reflectivity, non-normalized overlaps, ...).
    InvalidArgument = 2,
}

/// Opaque multimode Gaussian state (covariance-matrix representation).
pub struct PsalabState {
    inner: GaussianState,
}

/// Raw and normalized variances of one measurement scheme.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PsalabReport {
    pub var_x_minus: f64,
    pub var_y_plus: f64,
    pub snl: f64,
    pub nor_x: f64,
    pub nor_y: f64,
    pub inseparability: f64,
}

/// Mean intensity, shot-noise limit and their ratio for the power-detector
/// scheme.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PsalabPowerRatio {
    pub mean: f64,
    pub snl: f64,
    pub ratio: f64,
}

/// Physicality diagnostic of a state handle.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PsalabPhysicality {
    pub symmetry_defect: f64,
    pub min_uncertainty_eigenvalue: f64,
    /// 1 when the state satisfies the uncertainty bound, 0 otherwise.
    pub passed: i32,
}

/// Multimode inseparability estimate with its validity flags.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PsalabMultimodeEstimate {
    pub value: f64,
    /// Zero-based index of the dominant mode pair.
    pub leading_mode: usize,
    /// 1 when the fundamental PSA gain is below the trusted regime.
    pub low_gain: i32,
    /// 1 when the local oscillators cannot see the fundamental mode.
    pub fundamental_dark: i32,
}

fn status_of(err: &Error) -> PsalabStatus {
    let _ = err;
    PsalabStatus::InvalidArgument
}

impl From<psalab::metrics::MeasurementReport> for PsalabReport {
    fn from(r: psalab::metrics::MeasurementReport) -> Self {
        Self {
            var_x_minus: r.var_x_minus,
            var_y_plus: r.var_y_plus,
            snl: r.snl,
            nor_x: r.nor_x,
            nor_y: r.nor_y,
            inseparability: r.inseparability,
        }
    }
}

unsafe fn state_ref<'a>(state: *const PsalabState) -> Option<&'a GaussianState> {
    unsafe { state.as_ref() }.map(|s| &s.inner)
}

fn parse_port(port: u32) -> Option<Port> {
    match port {
        1 => Some(Port::One),
        2 => Some(Port::Two),
        _ => None,
    }
}

/// Applies an in-place state update, mapping library errors to status codes.
unsafe fn update_state<F>(state: *mut PsalabState, f: F) -> PsalabStatus
where
    F: FnOnce(&GaussianState) -> psalab::Result<GaussianState>,
{
    let Some(handle) = (unsafe { state.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    match f(&handle.inner) {
        Ok(next) => {
            handle.inner = next;
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Creates the vacuum of `n_modes` modes. Returns null when `n_modes` is 0.
/// The handle must be released with `psalab_state_free`.
#[no_mangle]
pub extern "C" fn psalab_state_vacuum(n_modes: usize) -> *mut PsalabState {
    match GaussianState::vacuum(n_modes) {
        Ok(inner) => Box::into_raw(Box::new(PsalabState { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Deep-copies a state handle; returns null when `state` is null.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_state_clone(state: *const PsalabState) -> *mut PsalabState {
    match unsafe { state_ref(state) } {
        Some(inner) => Box::into_raw(Box::new(PsalabState {
            inner: inner.clone(),
        })),
        None => std::ptr::null_mut(),
    }
}

/// Releases a handle created by this library. Null is accepted.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_state_free(state: *mut PsalabState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Number of modes of the state.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_state_n_modes(
    state: *const PsalabState,
    out: *mut usize,
) -> PsalabStatus {
    match (unsafe { state_ref(state) }, unsafe { out.as_mut() }) {
        (Some(inner), Some(out)) => {
            *out = inner.n_modes();
            PsalabStatus::Ok
        }
        _ => PsalabStatus::NullPointer,
    }
}

/// Two-mode parametric amplifier of conversion strength `strength` and pump
/// phase `phase` (0 amplifies, pi de-amplifies) on modes `mode_a`, `mode_b`.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_apply_two_mode_pa(
    state: *mut PsalabState,
    mode_a: usize,
    mode_b: usize,
    strength: f64,
    phase: f64,
) -> PsalabStatus {
    unsafe {
        update_state(state, |s| {
            s.apply_two_mode_pa(mode_a, mode_b, &GainParam::new(strength, phase)?)
        })
    }
}

/// Degenerate phase-sensitive amplifier on one mode.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_apply_degenerate_psa(
    state: *mut PsalabState,
    mode: usize,
    strength: f64,
    phase: f64,
) -> PsalabStatus {
    unsafe {
        update_state(state, |s| {
            s.apply_degenerate_psa(mode, &GainParam::new(strength, phase)?)
        })
    }
}

/// Non-degenerate phase-sensitive amplifier coupling two modes.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_apply_nondegenerate_psa(
    state: *mut PsalabState,
    mode_a: usize,
    mode_b: usize,
    strength: f64,
    phase: f64,
) -> PsalabStatus {
    unsafe {
        update_state(state, |s| {
            s.apply_nondegenerate_psa(mode_a, mode_b, &GainParam::new(strength, phase)?)
        })
    }
}

/// Beamsplitter loss of reflectivity `reflectivity` in [0, 1] on one mode.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_apply_loss(
    state: *mut PsalabState,
    mode: usize,
    reflectivity: f64,
) -> PsalabStatus {
    unsafe {
        update_state(state, |s| {
            s.apply_loss(mode, LossChannel::new(reflectivity)?)
        })
    }
}

/// Phase shift `a -> a e^{i angle}` on one mode.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_apply_phase(
    state: *mut PsalabState,
    mode: usize,
    angle: f64,
) -> PsalabStatus {
    unsafe { update_state(state, |s| s.apply_phase(mode, angle)) }
}

/// Variance of the quadrature X(angle) of one mode (vacuum = 1).
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_quad_variance(
    state: *const PsalabState,
    mode: usize,
    angle: f64,
    out: *mut f64,
) -> PsalabStatus {
    let (Some(inner), Some(out)) = (unsafe { state_ref(state) }, unsafe { out.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    match inner.quad_variance(QuadratureSelector::new(mode, angle)) {
        Ok(v) => {
            *out = v;
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Variance of `sum_i weights[i] * X_{modes[i]}(angles[i])` over `len` terms.
///
/// # Safety
///
/// Array pointers must reference at least the stated number of readable
/// elements; output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_linear_combo_variance(
    state: *const PsalabState,
    modes: *const usize,
    angles: *const f64,
    weights: *const f64,
    len: usize,
    out: *mut f64,
) -> PsalabStatus {
    let Some(inner) = (unsafe { state_ref(state) }) else {
        return PsalabStatus::NullPointer;
    };
    if modes.is_null() || angles.is_null() || weights.is_null() || out.is_null() {
        return PsalabStatus::NullPointer;
    }
    let (modes, angles, weights) = unsafe {
        (
            std::slice::from_raw_parts(modes, len),
            std::slice::from_raw_parts(angles, len),
            std::slice::from_raw_parts(weights, len),
        )
    };
    let terms: Vec<(QuadratureSelector, f64)> = modes
        .iter()
        .zip(angles)
        .zip(weights)
        .map(|((m, a), w)| (QuadratureSelector::new(*m, *a), *w))
        .collect();
    match inner.linear_combo_variance(&terms) {
        Ok(v) => {
            unsafe { *out = v };
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Mean photon number of one mode.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_mean_photon_number(
    state: *const PsalabState,
    mode: usize,
    out: *mut f64,
) -> PsalabStatus {
    let (Some(inner), Some(out)) = (unsafe { state_ref(state) }, unsafe { out.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    match inner.mean_photon_number(mode) {
        Ok(v) => {
            *out = v;
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Symmetry and uncertainty-bound diagnostic of a state.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_check_physicality(
    state: *const PsalabState,
    out: *mut PsalabPhysicality,
) -> PsalabStatus {
    let (Some(inner), Some(out)) = (unsafe { state_ref(state) }, unsafe { out.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    let report = inner.check_physicality();
    *out = PsalabPhysicality {
        symmetry_defect: report.symmetry_defect,
        min_uncertainty_eigenvalue: report.min_uncertainty_eigenvalue,
        passed: report.passed as i32,
    };
    PsalabStatus::Ok
}

fn with_source<F>(nu: f64, out: *mut PsalabReport, f: F) -> PsalabStatus
where
    F: FnOnce(&SourceSpec) -> psalab::Result<psalab::metrics::MeasurementReport>,
{
    let Some(out) = (unsafe { out.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    let src = match SourceSpec::from_nu(nu) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    match f(&src) {
        Ok(report) => {
            *out = report.into();
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Noise reduction and inseparability straight out of a source of strength
/// `nu`.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_source_metrics(nu: f64, out: *mut PsalabReport) -> PsalabStatus {
    with_source(nu, out, |src| Ok(source_metrics(src)))
}

/// Traditional dual-homodyne measurement with equal per-arm detection loss.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_traditional_metrics(
    nu: f64,
    detection_loss: f64,
    out: *mut PsalabReport,
) -> PsalabStatus {
    with_source(nu, out, |src| {
        Ok(traditional_metrics(src, LossChannel::new(detection_loss)?))
    })
}

/// PSA-assisted joint measurement (de-amplifying PSA of strength `g`,
/// electrical gain `lambda`, equal per-arm loss).
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_psa_joint_metrics(
    nu: f64,
    g: f64,
    lambda: f64,
    detection_loss: f64,
    out: *mut PsalabReport,
) -> PsalabStatus {
    with_source(nu, out, |src| {
        Ok(psa_joint_metrics(
            src,
            &GainParam::deamplifying(g)?,
            lambda,
            LossChannel::new(detection_loss)?,
        ))
    })
}

/// Single BHD at one output (`port` is 1 or 2) of a de-amplifying PSA.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_psa_single_bhd_metrics(
    nu: f64,
    g: f64,
    port: u32,
    detection_loss: f64,
    out: *mut PsalabReport,
) -> PsalabStatus {
    let Some(port) = parse_port(port) else {
        return PsalabStatus::InvalidArgument;
    };
    with_source(nu, out, |src| {
        Ok(psa_single_bhd_metrics(
            src,
            &GainParam::deamplifying(g)?,
            port,
            LossChannel::new(detection_loss)?,
        ))
    })
}

/// Power detector behind a de-amplifying PSA: mean intensity, SNL and ratio.
///
/// # Safety
///
/// `state` must be null or a live handle from this library; output
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psalab_psa_power_detector_metrics(
    nu: f64,
    g: f64,
    detection_loss: f64,
    out: *mut PsalabPowerRatio,
) -> PsalabStatus {
    let Some(out) = (unsafe { out.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    let result = (|| -> psalab::Result<PsalabPowerRatio> {
        let src = SourceSpec::from_nu(nu)?;
        let r = psa_power_detector_metrics(
            &src,
            &GainParam::deamplifying(g)?,
            LossChannel::new(detection_loss)?,
        );
        Ok(PsalabPowerRatio {
            mean: r.mean,
            snl: r.snl,
            ratio: r.ratio,
        })
    })();
    match result {
        Ok(r) => {
            *out = r;
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn complex_overlaps(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Option<Vec<psalab::multimode::Complex64>> {
    if re.is_null() || im.is_null() {
        return None;
    }
    let (re, im) = unsafe {
        (
            std::slice::from_raw_parts(re, len),
            std::slice::from_raw_parts(im, len),
        )
    };
    Some(
        re.iter()
            .zip(im)
            .map(|(r, i)| psalab::multimode::Complex64::new(*r, *i))
            .collect(),
    )
}

#[allow(clippy::too_many_arguments)]
unsafe fn build_multimode_inputs(
    strengths: *const f64,
    n_gains: usize,
    xi_re: *const f64,
    xi_im: *const f64,
    n_xi: usize,
    zeta_re: *const f64,
    zeta_im: *const f64,
    n_zeta: usize,
    phi0: f64,
    psi0: f64,
) -> Result<(MultimodeGains, LoOverlap), PsalabStatus> {
    if strengths.is_null() {
        return Err(PsalabStatus::NullPointer);
    }
    let strengths = unsafe { std::slice::from_raw_parts(strengths, n_gains) };
    let gains = MultimodeGains::from_strengths(strengths).map_err(|e| status_of(&e))?;
    let xi = unsafe { complex_overlaps(xi_re, xi_im, n_xi) }.ok_or(PsalabStatus::NullPointer)?;
    let zeta =
        unsafe { complex_overlaps(zeta_re, zeta_im, n_zeta) }.ok_or(PsalabStatus::NullPointer)?;
    let lo = LoOverlap::new(xi, zeta, phi0, psi0).map_err(|e| status_of(&e))?;
    Ok((gains, lo))
}

/// Multimode inseparability of the traditional scheme. The source is given
/// by per-mode conversion strengths `nu_j` (descending), the local
/// oscillators by complex overlap coefficients split into re/im arrays.
///
/// # Safety
///
/// Array pointers must reference at least the stated number of readable
/// elements; output pointers must be valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psalab_multimode_traditional(
    strengths: *const f64,
    n_gains: usize,
    xi_re: *const f64,
    xi_im: *const f64,
    n_xi: usize,
    zeta_re: *const f64,
    zeta_im: *const f64,
    n_zeta: usize,
    phi0: f64,
    psi0: f64,
    out: *mut f64,
) -> PsalabStatus {
    if out.is_null() {
        return PsalabStatus::NullPointer;
    }
    let inputs = unsafe {
        build_multimode_inputs(
            strengths, n_gains, xi_re, xi_im, n_xi, zeta_re, zeta_im, n_zeta, phi0, psi0,
        )
    };
    let (gains, lo) = match inputs {
        Ok(v) => v,
        Err(status) => return status,
    };
    match multimode_traditional_inseparability(&gains, &lo) {
        Ok(v) => {
            unsafe { *out = v };
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Multimode inseparability of the PSA-assisted schemes. The PSA is a
/// Schmidt-mode ladder (`weights`, descending, unit square norm) driven at
/// `pump`. `port` 0 selects the joint measurement; 1 or 2 the single BHD at
/// that output.
///
/// # Safety
///
/// Array pointers must reference at least the stated number of readable
/// elements; output pointers must be valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psalab_multimode_psa(
    strengths: *const f64,
    n_gains: usize,
    weights: *const f64,
    n_weights: usize,
    pump: f64,
    xi_re: *const f64,
    xi_im: *const f64,
    n_xi: usize,
    zeta_re: *const f64,
    zeta_im: *const f64,
    n_zeta: usize,
    phi0: f64,
    psi0: f64,
    port: u32,
    out: *mut PsalabMultimodeEstimate,
) -> PsalabStatus {
    let Some(out) = (unsafe { out.as_mut() }) else {
        return PsalabStatus::NullPointer;
    };
    if weights.is_null() {
        return PsalabStatus::NullPointer;
    }
    let inputs = unsafe {
        build_multimode_inputs(
            strengths, n_gains, xi_re, xi_im, n_xi, zeta_re, zeta_im, n_zeta, phi0, psi0,
        )
    };
    let (gains, lo) = match inputs {
        Ok(v) => v,
        Err(status) => return status,
    };
    let weights = unsafe { std::slice::from_raw_parts(weights, n_weights) };
    let ladder = match ModeLadder::new(weights.to_vec(), pump) {
        Ok(l) => l,
        Err(e) => return status_of(&e),
    };
    let estimate = match port {
        0 => multimode_psa_joint_inseparability(&gains, &ladder, &lo),
        1 | 2 => {
            let port = parse_port(port).expect("validated");
            multimode_psa_single_inseparability(&gains, &ladder, &lo, port)
        }
        _ => return PsalabStatus::InvalidArgument,
    };
    match estimate {
        Ok(est) => {
            *out = PsalabMultimodeEstimate {
                value: est.value,
                leading_mode: est.leading_mode,
                low_gain: est.low_gain as i32,
                fundamental_dark: est.fundamental_dark as i32,
            };
            PsalabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn psalab_status_message(status: PsalabStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        PsalabStatus::Ok => b"ok\0",
        PsalabStatus::NullPointer => b"null pointer argument\0",
        PsalabStatus::InvalidArgument => b"invalid argument\0",
    };
    msg.as_ptr() as *const c_char
}
