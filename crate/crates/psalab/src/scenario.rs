//! Batch front end: line-oriented scenario configs with dotted keys,
//! parameter sweeps, CSV emission and the presets reproducing the reference
//! curves.
//!
//! Config format (one `key = value` per line, `#` starts a comment):
//!
//! ```text
//! scheme.kind = psa_joint        # traditional | psa_power | psa_joint | psa_single
//!                                # | multimode_traditional | multimode_psa_single
//!                                # | multimode_psa_joint
//! source.nu = 2.0
//! psa.g = 5.0
//! loss.ld = 0.6                  # both arms; loss.a / loss.b override per arm
//! combiner.gain = 1.0
//! sweep.param = loss             # nu | g | lambda | loss | loss_a | loss_b | phase | pump
//! sweep.range = 0:0.6:7          # start:stop:points
//! ```
//!
//! Multimode scenarios replace `source.nu` with `source.ladder.weights` +
//! `source.ladder.pump` (or explicit `source.strengths`), add
//! `psa.ladder.weights`/`psa.ladder.pump`, and describe the local
//! oscillators either inline (`lo.xi`, `lo.zeta`, complex `a+bi` entries)
//! or through `lo.spectra = <file>` pointing at a sampled-spectra config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{GainParam, LossChannel};
use crate::measurement::{CombinerConfig, CombinerSign};
use crate::metrics::{
    MeasurementReport, Port, SchemeSpec, SourceSpec, evaluate_scheme, source_metrics,
};
use crate::multimode::{
    LoOverlap, ModeLadder, MultimodeGains, SpectralGrid, gains_from_ladder,
    multimode_psa_joint_inseparability, multimode_psa_single_inseparability,
    multimode_traditional_inseparability, overlap_from_spectra,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Traditional,
    PsaPower,
    PsaJoint,
    PsaSingle,
    MultimodeTraditional,
    MultimodePsaSingle,
    MultimodePsaJoint,
}

impl SchemeKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "traditional" => Self::Traditional,
            "psa_power" => Self::PsaPower,
            "psa_joint" => Self::PsaJoint,
            "psa_single" => Self::PsaSingle,
            "multimode_traditional" => Self::MultimodeTraditional,
            "multimode_psa_single" => Self::MultimodePsaSingle,
            "multimode_psa_joint" => Self::MultimodePsaJoint,
            _ => return None,
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Traditional => "traditional",
            Self::PsaPower => "psa_power",
            Self::PsaJoint => "psa_joint",
            Self::PsaSingle => "psa_single",
            Self::MultimodeTraditional => "multimode_traditional",
            Self::MultimodePsaSingle => "multimode_psa_single",
            Self::MultimodePsaJoint => "multimode_psa_joint",
        }
    }

    fn is_multimode(&self) -> bool {
        matches!(
            self,
            Self::MultimodeTraditional | Self::MultimodePsaSingle | Self::MultimodePsaJoint
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceConfig {
    Nu(f64),
    Ladder { weights: Vec<f64>, pump: f64 },
    Strengths(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoConfig {
    pub xi: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
    pub phi0: f64,
    pub psi0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// A fully parsed scenario. Defaults: de-amplifying PSA, unit combiner gain,
/// lossless detection, port 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scheme: SchemeKind,
    pub source: SourceConfig,
    pub psa_g: f64,
    pub psa_phase: f64,
    pub psa_ladder: Option<(Vec<f64>, f64)>,
    pub loss_a: f64,
    pub loss_b: f64,
    pub combiner_gain: f64,
    pub combiner_sign: CombinerSign,
    pub port: Port,
    pub lo: Option<LoConfig>,
    pub sweep: Option<SweepConfig>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::Traditional,
            source: SourceConfig::Nu(0.0),
            psa_g: 0.0,
            psa_phase: std::f64::consts::PI,
            psa_ladder: None,
            loss_a: 0.0,
            loss_b: 0.0,
            combiner_gain: 1.0,
            combiner_sign: CombinerSign::Difference,
            port: Port::One,
            lo: None,
            sweep: None,
        }
    }
}

/// One evaluated sweep point. For BHD schemes the report fields carry the
/// photocurrent variances; for the power detector `var_*` is the mean
/// intensity and `nor_*` the intensity ratio; for multimode schemes the
/// inseparability is reported against its SNL of 2.
#[derive(Clone, Debug)]
pub struct ResultRow {
    pub param: String,
    pub value: f64,
    pub report: MeasurementReport,
    pub scheme: &'static str,
    pub flags: Vec<&'static str>,
}

fn config_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_f64(line: usize, field: &str, value: &str) -> Result<f64> {
    let parsed = value
        .trim()
        .parse::<f64>()
        .map_err(|e| config_err(line, field, format!("bad number `{value}`: {e}")))?;
    if !parsed.is_finite() {
        return Err(config_err(line, field, format!("`{value}` is not finite")));
    }
    Ok(parsed)
}

fn parse_f64_list(line: usize, field: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_f64(line, field, v))
        .collect()
}

/// Parses `a`, `a+bi`, `a-bi` or `bi` (exponents allowed in either part).
fn parse_complex(line: usize, field: &str, value: &str) -> Result<Complex64> {
    let v = value.trim();
    if let Some(body) = v.strip_suffix(['i', 'j']) {
        // find the sign splitting real and imaginary parts (not an exponent
        // sign and not a leading sign)
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re = parse_f64(line, field, &body[..i])?;
                let sign = if bytes[i] as char == '-' { -1.0 } else { 1.0 };
                let imag_str = body[i + 1..].trim();
                let im = if imag_str.is_empty() {
                    1.0
                } else {
                    parse_f64(line, field, imag_str)?
                };
                Ok(Complex64::new(re, sign * im))
            }
            None => {
                let imag_str = body.trim();
                let im = if imag_str.is_empty() || imag_str == "+" {
                    1.0
                } else if imag_str == "-" {
                    -1.0
                } else {
                    parse_f64(line, field, imag_str)?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        Ok(Complex64::new(parse_f64(line, field, v)?, 0.0))
    }
}

fn parse_complex_list(line: usize, field: &str, value: &str) -> Result<Vec<Complex64>> {
    value
        .split(',')
        .map(|v| parse_complex(line, field, v))
        .collect()
}

/// Splits a config text into `(line_number, key, value)` triples.
fn raw_entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let uncommented = raw.split('#').next().unwrap_or("");
        let trimmed = uncommented.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(config_err(line_no, trimmed, "expected `key = value`"));
        };
        entries.push((line_no, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Parses scenario text. `base_dir` resolves relative spectra references.
pub fn parse_scenario(text: &str, base_dir: Option<&Path>) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut ladder_weights: Option<Vec<f64>> = None;
    let mut ladder_pump: Option<f64> = None;
    let mut psa_weights: Option<Vec<f64>> = None;
    let mut psa_pump: Option<f64> = None;
    let mut lo_xi: Option<Vec<Complex64>> = None;
    let mut lo_zeta: Option<Vec<Complex64>> = None;
    let mut lo_phi0 = 0.0;
    let mut lo_psi0 = 0.0;
    let mut spectra: Option<(usize, PathBuf)> = None;
    let mut sweep_param: Option<String> = None;
    let mut sweep_range: Option<(usize, String)> = None;
    let mut scheme_seen = false;
    let mut source_seen = false;

    for (line, key, value) in raw_entries(text)? {
        match key.as_str() {
            "scheme.kind" => {
                cfg.scheme = SchemeKind::parse(&value)
                    .ok_or_else(|| config_err(line, &key, format!("unknown scheme `{value}`")))?;
                scheme_seen = true;
            }
            "source.nu" => {
                cfg.source = SourceConfig::Nu(parse_f64(line, &key, &value)?);
                source_seen = true;
            }
            "source.ladder.weights" => {
                ladder_weights = Some(parse_f64_list(line, &key, &value)?);
                source_seen = true;
            }
            "source.ladder.pump" => {
                ladder_pump = Some(parse_f64(line, &key, &value)?);
                source_seen = true;
            }
            "source.strengths" => {
                cfg.source = SourceConfig::Strengths(parse_f64_list(line, &key, &value)?);
                source_seen = true;
            }
            "psa.g" => cfg.psa_g = parse_f64(line, &key, &value)?,
            "psa.phase" => cfg.psa_phase = parse_f64(line, &key, &value)?,
            "psa.ladder.weights" => psa_weights = Some(parse_f64_list(line, &key, &value)?),
            "psa.ladder.pump" => psa_pump = Some(parse_f64(line, &key, &value)?),
            "loss.ld" => {
                let l = parse_f64(line, &key, &value)?;
                cfg.loss_a = l;
                cfg.loss_b = l;
            }
            "loss.a" => cfg.loss_a = parse_f64(line, &key, &value)?,
            "loss.b" => cfg.loss_b = parse_f64(line, &key, &value)?,
            "combiner.gain" => cfg.combiner_gain = parse_f64(line, &key, &value)?,
            "combiner.sign" => {
                cfg.combiner_sign = match value.as_str() {
                    "difference" => CombinerSign::Difference,
                    "sum" => CombinerSign::Sum,
                    other => {
                        return Err(config_err(
                            line,
                            &key,
                            format!("expected difference|sum, got `{other}`"),
                        ));
                    }
                }
            }
            "port" => {
                cfg.port = match value.as_str() {
                    "1" => Port::One,
                    "2" => Port::Two,
                    other => {
                        return Err(config_err(
                            line,
                            &key,
                            format!("expected 1|2, got `{other}`"),
                        ));
                    }
                }
            }
            "lo.xi" => lo_xi = Some(parse_complex_list(line, &key, &value)?),
            "lo.zeta" => lo_zeta = Some(parse_complex_list(line, &key, &value)?),
            "lo.phi0" => lo_phi0 = parse_f64(line, &key, &value)?,
            "lo.psi0" => lo_psi0 = parse_f64(line, &key, &value)?,
            "lo.spectra" => spectra = Some((line, PathBuf::from(&value))),
            "sweep.param" => sweep_param = Some(value),
            "sweep.range" => sweep_range = Some((line, value)),
            other => {
                return Err(config_err(line, other, "unknown key"));
            }
        }
    }

    if !scheme_seen {
        return Err(config_err(0, "scheme.kind", "missing"));
    }
    if !source_seen {
        return Err(config_err(
            0,
            "source",
            "missing: set source.nu, source.ladder.* or source.strengths",
        ));
    }

    match (ladder_weights, ladder_pump) {
        (Some(weights), Some(pump)) => cfg.source = SourceConfig::Ladder { weights, pump },
        (Some(_), None) | (None, Some(_)) => {
            return Err(config_err(
                0,
                "source.ladder",
                "needs both source.ladder.weights and source.ladder.pump",
            ));
        }
        (None, None) => {}
    }
    match (psa_weights, psa_pump) {
        (Some(weights), Some(pump)) => cfg.psa_ladder = Some((weights, pump)),
        (Some(_), None) | (None, Some(_)) => {
            return Err(config_err(
                0,
                "psa.ladder",
                "needs both psa.ladder.weights and psa.ladder.pump",
            ));
        }
        (None, None) => {}
    }

    if let Some((line, path)) = spectra {
        if lo_xi.is_some() || lo_zeta.is_some() {
            return Err(config_err(
                line,
                "lo.spectra",
                "give either inline lo.xi/lo.zeta or a spectra file, not both",
            ));
        }
        let resolved = match base_dir {
            Some(dir) if path.is_relative() => dir.join(&path),
            _ => path.clone(),
        };
        let text = std::fs::read_to_string(&resolved).map_err(|e| {
            config_err(
                line,
                "lo.spectra",
                format!("cannot read {}: {e}", resolved.display()),
            )
        })?;
        let grid = parse_spectra(&text)?;
        let overlap = overlap_from_spectra(&grid);
        let lo = overlap.into_overlap(lo_phi0, lo_psi0)?;
        cfg.lo = Some(LoConfig {
            xi: lo.xi().to_vec(),
            zeta: lo.zeta().to_vec(),
            phi0: lo_phi0,
            psi0: lo_psi0,
        });
    } else if let (Some(xi), Some(zeta)) = (lo_xi.clone(), lo_zeta.clone()) {
        cfg.lo = Some(LoConfig {
            xi,
            zeta,
            phi0: lo_phi0,
            psi0: lo_psi0,
        });
    } else if lo_xi.is_some() || lo_zeta.is_some() {
        return Err(config_err(0, "lo", "needs both lo.xi and lo.zeta"));
    }

    if let Some(param) = sweep_param {
        let Some((line, range)) = sweep_range else {
            return Err(config_err(0, "sweep.range", "missing"));
        };
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(config_err(
                line,
                "sweep.range",
                "expected start:stop:points",
            ));
        }
        let start = parse_f64(line, "sweep.range", parts[0])?;
        let stop = parse_f64(line, "sweep.range", parts[1])?;
        let points: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| config_err(line, "sweep.range", format!("bad point count: {e}")))?;
        if points < 1 {
            return Err(config_err(line, "sweep.range", "points must be >= 1"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(config_err(line, "sweep.range", "bounds must be finite"));
        }
        cfg.sweep = Some(SweepConfig {
            param,
            start,
            stop,
            points,
        });
    } else if sweep_range.is_some() {
        return Err(config_err(0, "sweep.param", "missing"));
    }

    Ok(cfg)
}

/// Spectra files use the same dotted-key format: `grid.omega` (uniform,
/// comma-separated), `lo.a`, `lo.b`, and `mode.a.N` / `mode.b.N` with N
/// counting from 1.
pub fn parse_spectra(text: &str) -> Result<SpectralGrid> {
    let mut omega: Option<Vec<f64>> = None;
    let mut lo_a: Option<Vec<Complex64>> = None;
    let mut lo_b: Option<Vec<Complex64>> = None;
    let mut modes_a: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    let mut modes_b: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();

    for (line, key, value) in raw_entries(text)? {
        match key.as_str() {
            "grid.omega" => omega = Some(parse_f64_list(line, &key, &value)?),
            "lo.a" => lo_a = Some(parse_complex_list(line, &key, &value)?),
            "lo.b" => lo_b = Some(parse_complex_list(line, &key, &value)?),
            other => {
                let parsed = other
                    .strip_prefix("mode.")
                    .and_then(|rest| rest.split_once('.'))
                    .and_then(|(arm, idx)| idx.parse::<usize>().ok().map(|i| (arm.to_string(), i)));
                match parsed {
                    Some((arm, idx)) if idx >= 1 && (arm == "a" || arm == "b") => {
                        let coeffs = parse_complex_list(line, &key, &value)?;
                        if arm == "a" {
                            modes_a.insert(idx, coeffs);
                        } else {
                            modes_b.insert(idx, coeffs);
                        }
                    }
                    _ => return Err(config_err(line, other, "unknown key")),
                }
            }
        }
    }

    let omega = omega.ok_or_else(|| config_err(0, "grid.omega", "missing"))?;
    let lo_a = lo_a.ok_or_else(|| config_err(0, "lo.a", "missing"))?;
    let lo_b = lo_b.ok_or_else(|| config_err(0, "lo.b", "missing"))?;
    let collect =
        |modes: BTreeMap<usize, Vec<Complex64>>, arm: &str| -> Result<Vec<Vec<Complex64>>> {
            let n = modes.len();
            let mut out = Vec::with_capacity(n);
            for j in 1..=n {
                match modes.get(&j) {
                    Some(m) => out.push(m.clone()),
                    None => {
                        return Err(config_err(
                            0,
                            &format!("mode.{arm}.{j}"),
                            "mode indices must be contiguous from 1",
                        ));
                    }
                }
            }
            Ok(out)
        };
    let modes_a = collect(modes_a, "a")?;
    let modes_b = collect(modes_b, "b")?;
    SpectralGrid::new(omega, lo_a, lo_b, modes_a, modes_b)
}

/// Canonical single-line serialization used in the CSV comment header; the
/// output parses back into the identical config (sweep excluded, since each
/// row carries its own parameter value).
pub fn serialize_config(cfg: &ScenarioConfig) -> String {
    let mut parts: Vec<String> = vec![format!("scheme.kind = {}", cfg.scheme.id())];
    match &cfg.source {
        SourceConfig::Nu(nu) => parts.push(format!("source.nu = {nu:.17e}")),
        SourceConfig::Ladder { weights, pump } => {
            parts.push(format!("source.ladder.weights = {}", join_f64(weights)));
            parts.push(format!("source.ladder.pump = {pump:.17e}"));
        }
        SourceConfig::Strengths(s) => parts.push(format!("source.strengths = {}", join_f64(s))),
    }
    parts.push(format!("psa.g = {:.17e}", cfg.psa_g));
    parts.push(format!("psa.phase = {:.17e}", cfg.psa_phase));
    if let Some((weights, pump)) = &cfg.psa_ladder {
        parts.push(format!("psa.ladder.weights = {}", join_f64(weights)));
        parts.push(format!("psa.ladder.pump = {pump:.17e}"));
    }
    parts.push(format!("loss.a = {:.17e}", cfg.loss_a));
    parts.push(format!("loss.b = {:.17e}", cfg.loss_b));
    parts.push(format!("combiner.gain = {:.17e}", cfg.combiner_gain));
    parts.push(format!(
        "combiner.sign = {}",
        match cfg.combiner_sign {
            CombinerSign::Difference => "difference",
            CombinerSign::Sum => "sum",
        }
    ));
    parts.push(format!(
        "port = {}",
        match cfg.port {
            Port::One => 1,
            Port::Two => 2,
        }
    ));
    if let Some(lo) = &cfg.lo {
        parts.push(format!("lo.xi = {}", join_complex(&lo.xi)));
        parts.push(format!("lo.zeta = {}", join_complex(&lo.zeta)));
        parts.push(format!("lo.phi0 = {:.17e}", lo.phi0));
        parts.push(format!("lo.psi0 = {:.17e}", lo.psi0));
    }
    parts.join("; ")
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.17e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn join_complex(values: &[Complex64]) -> String {
    values
        .iter()
        .map(|v| format!("{:.17e}{:+.17e}i", v.re, v.im))
        .collect::<Vec<_>>()
        .join(",")
}

fn set_sweep_param(cfg: &mut ScenarioConfig, param: &str, value: f64) -> Result<()> {
    match param {
        "nu" => match cfg.source {
            SourceConfig::Nu(_) => cfg.source = SourceConfig::Nu(value),
            _ => {
                return Err(config_err(
                    0,
                    "sweep.param",
                    "nu sweeps need a single-mode source",
                ));
            }
        },
        "g" => cfg.psa_g = value,
        "lambda" => cfg.combiner_gain = value,
        "loss" => {
            cfg.loss_a = value;
            cfg.loss_b = value;
        }
        "loss_a" => cfg.loss_a = value,
        "loss_b" => cfg.loss_b = value,
        "phase" => cfg.psa_phase = value,
        "pump" => match &mut cfg.psa_ladder {
            Some((_, pump)) => *pump = value,
            None => {
                return Err(config_err(
                    0,
                    "sweep.param",
                    "pump sweeps need psa.ladder.*",
                ));
            }
        },
        other => {
            return Err(config_err(
                0,
                "sweep.param",
                format!("unknown sweep parameter `{other}`"),
            ));
        }
    }
    Ok(())
}

fn multimode_lo(cfg: &ScenarioConfig) -> Result<LoOverlap> {
    let lo = cfg.lo.as_ref().ok_or_else(|| {
        config_err(
            0,
            "lo",
            "multimode schemes need lo.xi/lo.zeta or lo.spectra",
        )
    })?;
    LoOverlap::new(lo.xi.clone(), lo.zeta.clone(), lo.phi0, lo.psi0)
}

fn multimode_source(cfg: &ScenarioConfig) -> Result<MultimodeGains> {
    match &cfg.source {
        SourceConfig::Nu(_) => Err(config_err(
            0,
            "source",
            "multimode schemes need source.ladder.* or source.strengths",
        )),
        SourceConfig::Ladder { weights, pump } => {
            Ok(gains_from_ladder(&ModeLadder::new(weights.clone(), *pump)?))
        }
        SourceConfig::Strengths(s) => MultimodeGains::from_strengths(s),
    }
}

/// Evaluates the configured scheme at the config's current parameter values.
pub fn evaluate_point(cfg: &ScenarioConfig) -> Result<(MeasurementReport, Vec<&'static str>)> {
    if cfg.scheme.is_multimode() {
        let lo = multimode_lo(cfg)?;
        let gains = multimode_source(cfg)?;
        let (value, mut flags) = match cfg.scheme {
            SchemeKind::MultimodeTraditional => {
                (multimode_traditional_inseparability(&gains, &lo)?, vec![])
            }
            SchemeKind::MultimodePsaSingle | SchemeKind::MultimodePsaJoint => {
                let (weights, pump) = cfg.psa_ladder.clone().ok_or_else(|| {
                    config_err(0, "psa.ladder", "multimode PSA schemes need psa.ladder.*")
                })?;
                let ladder = ModeLadder::new(weights, pump)?;
                let est = if cfg.scheme == SchemeKind::MultimodePsaSingle {
                    multimode_psa_single_inseparability(&gains, &ladder, &lo, cfg.port)?
                } else {
                    multimode_psa_joint_inseparability(&gains, &ladder, &lo)?
                };
                let mut flags = Vec::new();
                if est.low_gain {
                    flags.push("low_psa_gain");
                }
                if est.fundamental_dark {
                    flags.push("fundamental_dark");
                }
                (est.value, flags)
            }
            _ => unreachable!(),
        };
        flags.sort_unstable();
        // inseparability against its SNL of 2
        return Ok((MeasurementReport::from_raw(value, value, 2.0), flags));
    }

    let SourceConfig::Nu(nu) = cfg.source else {
        return Err(config_err(
            0,
            "source",
            "single-mode schemes need source.nu",
        ));
    };
    let src = SourceSpec::from_nu(nu)?;
    let loss_a = LossChannel::new(cfg.loss_a)?;
    let loss_b = LossChannel::new(cfg.loss_b)?;
    let psa = GainParam::new(cfg.psa_g, cfg.psa_phase)?;
    let combiner = CombinerConfig {
        gain: cfg.combiner_gain,
        sign: cfg.combiner_sign,
    };
    let scheme = match cfg.scheme {
        SchemeKind::Traditional => SchemeSpec::TraditionalDualBhd {
            loss: [loss_a, loss_b],
            combiner,
        },
        SchemeKind::PsaJoint => SchemeSpec::PsaJointBhd {
            psa,
            loss: [loss_a, loss_b],
            combiner,
        },
        SchemeKind::PsaSingle => SchemeSpec::PsaSingleBhd {
            psa,
            loss: loss_a,
            port: cfg.port,
        },
        SchemeKind::PsaPower => SchemeSpec::PsaPowerDetector { psa, loss: loss_a },
        _ => unreachable!(),
    };
    Ok((evaluate_scheme(&src, &scheme)?, vec![]))
}

/// Runs a scenario: one row per sweep point (a single row when no sweep is
/// configured). Deterministic in the config bytes.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    let sweep = match &cfg.sweep {
        None => {
            let (report, flags) = evaluate_point(cfg)?;
            return Ok(vec![ResultRow {
                param: "none".into(),
                value: 0.0,
                report,
                scheme: cfg.scheme.id(),
                flags,
            }]);
        }
        Some(s) => s.clone(),
    };
    let mut rows = Vec::with_capacity(sweep.points);
    for i in 0..sweep.points {
        let value = if sweep.points == 1 {
            sweep.start
        } else {
            sweep.start + (sweep.stop - sweep.start) * i as f64 / (sweep.points - 1) as f64
        };
        let mut point = cfg.clone();
        point.sweep = None;
        set_sweep_param(&mut point, &sweep.param, value)?;
        let (report, flags) = evaluate_point(&point)?;
        rows.push(ResultRow {
            param: sweep.param.clone(),
            value,
            report,
            scheme: cfg.scheme.id(),
            flags,
        });
    }
    Ok(rows)
}

/// Serializes rows as CSV: a `#` comment line carrying the base config, a
/// header, then one row per sweep point with 12 significant digits.
pub fn rows_to_csv(cfg: &ScenarioConfig, rows: &[ResultRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {}", serialize_config(cfg));
    let _ = writeln!(
        out,
        "param,value,var_x_minus,var_y_plus,snl,nor_x,nor_y,inseparability,scheme,flags"
    );
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.param,
            fmt_sig(row.value),
            fmt_sig(r.var_x_minus),
            fmt_sig(r.var_y_plus),
            fmt_sig(r.snl),
            fmt_sig(r.nor_x),
            fmt_sig(r.nor_y),
            fmt_sig(r.inseparability),
            row.scheme,
            row.flags.join(";")
        );
    }
    out
}

/// 12 significant digits, scientific.
fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

/// A parsed-back CSV row (used by the round-trip test and by consumers that
/// re-evaluate emitted datasets).
#[derive(Clone, Debug)]
pub struct ParsedCsv {
    pub config: ScenarioConfig,
    pub rows: Vec<(String, f64, MeasurementReport)>,
}

/// Reads a CSV produced by [`rows_to_csv`] back into its config and rows.
pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| config_err(1, "csv", "empty file"))?;
    let config_line = header
        .strip_prefix("# config: ")
        .ok_or_else(|| config_err(1, "csv", "missing `# config:` comment"))?;
    let config = parse_scenario(&config_line.replace("; ", "\n"), None)?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if i == 0 && line.starts_with("param,") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 9 {
            return Err(config_err(i + 2, "csv", "short row"));
        }
        let num = |j: usize| -> Result<f64> { parse_f64(i + 2, "csv", fields[j]) };
        rows.push((
            fields[0].to_string(),
            num(1)?,
            MeasurementReport {
                var_x_minus: num(2)?,
                var_y_plus: num(3)?,
                snl: num(4)?,
                nor_x: num(5)?,
                nor_y: num(6)?,
                inseparability: num(7)?,
            },
        ));
    }
    Ok(ParsedCsv { config, rows })
}

/// One emitted dataset of a figure preset: either an evaluable scenario
/// (the CSV carries its config and round-trips) or a constant annotation
/// line such as a source level or the SNL.
#[derive(Clone, Debug)]
pub struct Curve {
    /// File stem, e.g. `ent_vs_gain_a_iii`.
    pub name: String,
    pub config: Option<ScenarioConfig>,
    /// Comment header for annotation curves without a config.
    pub comment: String,
    pub rows: Vec<ResultRow>,
}

impl Curve {
    fn scenario(name: String, config: ScenarioConfig, rows: Vec<ResultRow>) -> Self {
        Self {
            name,
            config: Some(config),
            comment: String::new(),
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        match &self.config {
            Some(cfg) => rows_to_csv(cfg, &self.rows),
            None => {
                let mut out = String::new();
                let _ = writeln!(out, "# {}", self.comment);
                let _ = writeln!(
                    out,
                    "param,value,var_x_minus,var_y_plus,snl,nor_x,nor_y,inseparability,scheme,flags"
                );
                for row in &self.rows {
                    let r = &row.report;
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        row.param,
                        fmt_sig(row.value),
                        fmt_sig(r.var_x_minus),
                        fmt_sig(r.var_y_plus),
                        fmt_sig(r.snl),
                        fmt_sig(r.nor_x),
                        fmt_sig(r.nor_y),
                        fmt_sig(r.inseparability),
                        row.scheme,
                        row.flags.join(";")
                    );
                }
                out
            }
        }
    }
}

const FIGURE_SOURCE_GAINS: [(f64, &str); 3] = [(0.3, "i"), (0.6, "ii"), (2.0, "iii")];

/// Constant annotation line (reference level or SNL) sampled on the grid of
/// the companion curves.
fn constant_curve(name: &str, comment: String, param: &str, grid: &[f64], level: f64) -> Curve {
    let rows = grid
        .iter()
        .map(|&value| ResultRow {
            param: param.to_string(),
            value,
            report: MeasurementReport::from_raw(2.0 * level, 2.0 * level, 2.0),
            scheme: "reference",
            flags: vec![],
        })
        .collect();
    Curve {
        name: name.to_string(),
        config: None,
        comment,
        rows,
    }
}

fn grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Builds the datasets of one figure preset, one curve per file.
pub fn figure_preset(name: &str) -> Result<Vec<Curve>> {
    match name {
        // normalized single-BHD noise vs PSA gain for three source levels,
        // their source reference levels, and the SNL line
        "ent_vs_gain_a" => {
            let mut curves = Vec::new();
            let g_grid = grid(0.0, 6.0, 121);
            for (nu, label) in FIGURE_SOURCE_GAINS {
                let cfg = ScenarioConfig {
                    scheme: SchemeKind::PsaSingle,
                    source: SourceConfig::Nu(nu),
                    sweep: Some(SweepConfig {
                        param: "g".into(),
                        start: 0.0,
                        stop: 6.0,
                        points: 121,
                    }),
                    ..ScenarioConfig::default()
                };
                let rows = run_scenario(&cfg)?;
                curves.push(Curve::scenario(format!("ent_vs_gain_a_{label}"), cfg, rows));
                let level = source_metrics(&SourceSpec::from_nu(nu)?).nor_x;
                curves.push(constant_curve(
                    &format!("ent_vs_gain_a_ref_{label}"),
                    format!("reference: source noise reduction for nu = {nu}"),
                    "g",
                    &g_grid,
                    level,
                ));
            }
            curves.push(constant_curve(
                "ent_vs_gain_a_snl",
                "reference: shot-noise limit".to_string(),
                "g",
                &g_grid,
                1.0,
            ));
            Ok(curves)
        }
        // the same quantity against the gain ratio g/nu
        "ent_vs_gain_ratio_b" => {
            let mut curves = Vec::new();
            let ratio_grid = grid(0.0, 3.0, 121);
            for (nu, label) in FIGURE_SOURCE_GAINS {
                let base = ScenarioConfig {
                    scheme: SchemeKind::PsaSingle,
                    source: SourceConfig::Nu(nu),
                    ..ScenarioConfig::default()
                };
                let mut rows = Vec::with_capacity(ratio_grid.len());
                for &ratio in &ratio_grid {
                    let mut point = base.clone();
                    point.psa_g = ratio * nu;
                    let (report, flags) = evaluate_point(&point)?;
                    rows.push(ResultRow {
                        param: "g_over_nu".into(),
                        value: ratio,
                        report,
                        scheme: base.scheme.id(),
                        flags,
                    });
                }
                curves.push(Curve::scenario(
                    format!("ent_vs_gain_ratio_b_{label}"),
                    base,
                    rows,
                ));
            }
            Ok(curves)
        }
        // jointly measured inseparability vs detection loss at fixed PSA gains
        "loss_jm_a" => {
            let mut curves = Vec::new();
            for g in [0.0, 2.0, 3.0, 5.0] {
                let cfg = ScenarioConfig {
                    scheme: SchemeKind::PsaJoint,
                    source: SourceConfig::Nu(2.0),
                    psa_g: g,
                    sweep: Some(SweepConfig {
                        param: "loss".into(),
                        start: 0.0,
                        stop: 0.6,
                        points: 61,
                    }),
                    ..ScenarioConfig::default()
                };
                let rows = run_scenario(&cfg)?;
                curves.push(Curve::scenario(format!("loss_jm_a_g{g:.0}"), cfg, rows));
            }
            Ok(curves)
        }
        // single-BHD inseparability vs detection loss, with the source level
        "loss_single_b" => {
            let mut curves = Vec::new();
            let l_grid = grid(0.0, 0.6, 61);
            for g in [2.0, 3.0, 5.0] {
                let cfg = ScenarioConfig {
                    scheme: SchemeKind::PsaSingle,
                    source: SourceConfig::Nu(2.0),
                    psa_g: g,
                    sweep: Some(SweepConfig {
                        param: "loss".into(),
                        start: 0.0,
                        stop: 0.6,
                        points: 61,
                    }),
                    ..ScenarioConfig::default()
                };
                let rows = run_scenario(&cfg)?;
                curves.push(Curve::scenario(format!("loss_single_b_g{g:.0}"), cfg, rows));
            }
            let level = source_metrics(&SourceSpec::from_nu(2.0)?).nor_x;
            curves.push(constant_curve(
                "loss_single_b_source",
                "reference: source inseparability level for nu = 2 (halved per quadrature)"
                    .to_string(),
                "loss",
                &l_grid,
                level,
            ));
            Ok(curves)
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}
