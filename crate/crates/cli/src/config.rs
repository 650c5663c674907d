//! JSON run configuration.
//!
//! Basis indices are 1-based here and in reports; they are shifted to the
//! 0-based core convention at this boundary. Complex numbers are either a
//! plain number or a `[re, im]` pair; matrices are row-major nested arrays.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::ValueEnum;
use incoherent_core::algorithms::FinalStep;
use incoherent_core::amplification::{GoodSubspace, Iterations, Phases, DEFAULT_L_MAX};
use incoherent_core::controllability::ControllabilityConfig;
use incoherent_core::hydrogen::{self, CasePreset, HydrogenModel};
use incoherent_core::measurement::MeasurementPartition;
use incoherent_core::{CMatrix, CVector, ControlPulse, PulseSegment, StateVector, SystemSpec, C64};
use num_rational::Rational64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Initial states further than this from unit norm are rejected.
pub const INITIAL_NORM_TOL: f64 = 1e-8;

pub const DEFAULT_MAX_ATTEMPTS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Analyze,
    Amplify,
    Algo1,
    Algo2,
    HydrogenCase1,
    HydrogenCase2,
    MeasureStats,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analyze => "analyze",
            Mode::Amplify => "amplify",
            Mode::Algo1 => "algo1",
            Mode::Algo2 => "algo2",
            Mode::HydrogenCase1 => "hydrogen-case1",
            Mode::HydrogenCase2 => "hydrogen-case2",
            Mode::MeasureStats => "measure-stats",
        }
    }

    pub fn samples(self) -> bool {
        !matches!(self, Mode::Analyze | Mode::Amplify)
    }

    fn preset(self) -> Option<CasePreset> {
        match self {
            Mode::HydrogenCase1 => Some(hydrogen::case1_preset()),
            Mode::HydrogenCase2 => Some(hydrogen::case2_preset()),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl ConfigError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field { path: path.into(), message: message.into() }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<RawComplex> for C64 {
    fn from(c: RawComplex) -> Self {
        match c {
            RawComplex::Real(re) => C64::new(re, 0.0),
            RawComplex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawAngle {
    Number(f64),
    Named(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawIterations {
    Fixed(u64),
    Named(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    duration: f64,
    value: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    edge_threshold: Option<f64>,
    degeneracy_tol: Option<f64>,
    max_denominator: Option<u64>,
    ratio_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Mode,
    system: Option<Value>,
    initial: Option<Vec<RawComplex>>,
    good: Option<usize>,
    subspace: Option<Vec<usize>>,
    partition: Option<Vec<Vec<usize>>>,
    phases: Option<[RawAngle; 2]>,
    iterations: Option<RawIterations>,
    l_max: Option<u64>,
    seed: Option<u64>,
    shots: Option<u64>,
    #[serde(default)]
    pre_rotation: bool,
    #[serde(default)]
    repeat_until_success: bool,
    max_attempts: Option<u64>,
    tolerances: Option<RawTolerances>,
    final_pulse: Option<Vec<RawSegment>>,
    target: Option<Vec<RawComplex>>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInlineSystem {
    drift: Vec<Value>,
    coupling: Vec<Vec<RawComplex>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPresetSystem {
    preset: String,
    ground_energy: Option<f64>,
    gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSource {
    Hydrogen(HydrogenModel),
    Inline(SystemSpec),
}

impl SystemSource {
    pub fn spec(&self) -> SystemSpec {
        match self {
            SystemSource::Hydrogen(m) => m.spec().expect("hydrogen coupling is Hermitian"),
            SystemSource::Inline(s) => s.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemSource::Hydrogen(_) => "hydrogen",
            SystemSource::Inline(_) => "inline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub system: SystemSource,
    pub initial: Option<StateVector>,
    /// Good set for amplification, 0-based.
    pub good: Option<GoodSubspace>,
    pub partition: Option<MeasurementPartition>,
    pub phases: Phases,
    pub iterations: Iterations,
    pub l_max: u64,
    pub seed: Option<u64>,
    pub shots: u64,
    pub pre_rotation: bool,
    pub repeat_until_success: bool,
    pub max_attempts: u64,
    pub controllability: ControllabilityConfig,
    pub final_step: Option<FinalStep>,
    pub out: Option<PathBuf>,
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        ConfigError::field(path, e.into_inner().to_string())
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    parse_value(value)
}

/// Validates an already parsed configuration document.
pub fn parse_value(value: Value) -> Result<RunConfig> {
    let raw: RawConfig = typed(value, "")?;
    let mode = raw.mode;
    let preset = mode.preset();

    let system = match (&raw.system, &preset) {
        (Some(v), _) => parse_system(v)?,
        (None, Some(_)) => SystemSource::Hydrogen(HydrogenModel::default()),
        (None, None) => return Err(ConfigError::field("system", format!("required for mode {}", mode.name()))),
    };
    if preset.is_some() && !matches!(system, SystemSource::Hydrogen(_)) {
        return Err(ConfigError::field("system", "hydrogen presets require the hydrogen system"));
    }
    let spec = system.spec();
    let n = spec.dim();

    let mut initial = raw.initial.as_deref().map(|v| parse_state(v, n, "initial")).transpose()?;
    let mut good = match (raw.good, &raw.subspace) {
        (Some(_), Some(_)) => return Err(ConfigError::field("subspace", "give either good or subspace, not both")),
        (Some(g), None) => Some(parse_good(&[g], n, "good")?),
        (None, Some(s)) => Some(parse_good(s, n, "subspace")?),
        (None, None) => None,
    };
    if let Some(p) = &preset {
        if raw.initial.is_some() {
            return Err(ConfigError::field("initial", format!("fixed by the {} preset", mode.name())));
        }
        if good.is_some() {
            return Err(ConfigError::field("good", format!("fixed by the {} preset", mode.name())));
        }
        initial = Some(p.initial.clone());
        good = Some(p.good.clone());
    }

    match mode {
        Mode::Amplify | Mode::Algo1 | Mode::Algo2 | Mode::MeasureStats if initial.is_none() => {
            return Err(ConfigError::field("initial", format!("required for mode {}", mode.name())));
        }
        Mode::Algo1 if raw.good.is_none() => {
            return Err(ConfigError::field("good", "required for mode algo1"));
        }
        Mode::Algo2 if raw.subspace.is_none() => {
            return Err(ConfigError::field("subspace", "required for mode algo2"));
        }
        Mode::Amplify if good.is_none() => {
            return Err(ConfigError::field("good", "amplify needs good or subspace"));
        }
        _ => {}
    }
    if mode.samples() && raw.seed.is_none() {
        return Err(ConfigError::field("seed", format!("required for sampling mode {}", mode.name())));
    }

    let partition = match &raw.partition {
        Some(blocks) => {
            if mode != Mode::MeasureStats {
                return Err(ConfigError::field("partition", "only used by measure-stats"));
            }
            let blocks = blocks
                .iter()
                .enumerate()
                .map(|(b, block)| {
                    block.iter().enumerate().map(|(k, &i)| one_based(i, n, &format!("partition[{b}][{k}]"))).collect()
                })
                .collect::<Result<Vec<Vec<usize>>>>()?;
            Some(MeasurementPartition::new(blocks, n).map_err(|e| ConfigError::field("partition", e.to_string()))?)
        }
        None => None,
    };

    let phases = match &raw.phases {
        Some([a, b]) => {
            let phi1 = parse_angle(a, "phases[0]")?;
            let phi2 = parse_angle(b, "phases[1]")?;
            Phases::new(phi1, phi2).map_err(|e| ConfigError::field("phases", e.to_string()))?
        }
        None => Phases::STANDARD,
    };
    let iterations = match raw.iterations {
        None => Iterations::Auto,
        Some(RawIterations::Fixed(l)) => Iterations::Fixed(l),
        Some(RawIterations::Named(s)) if s == "auto" => Iterations::Auto,
        Some(RawIterations::Named(s)) => {
            return Err(ConfigError::field("iterations", format!("expected \"auto\" or an integer, got {s:?}")))
        }
    };

    let shots = raw.shots.unwrap_or(1);
    if shots == 0 {
        return Err(ConfigError::field("shots", "must be at least 1"));
    }
    let max_attempts = raw.max_attempts.unwrap_or(DEFAULT_MAX_ATTEMPTS);
    if max_attempts == 0 {
        return Err(ConfigError::field("max_attempts", "must be at least 1"));
    }

    let tol = raw.tolerances.unwrap_or_default();
    let defaults = ControllabilityConfig::default();
    let controllability = ControllabilityConfig {
        edge_threshold: tol.edge_threshold.unwrap_or(defaults.edge_threshold),
        degeneracy_tol: tol.degeneracy_tol.unwrap_or(defaults.degeneracy_tol),
        max_denominator: tol.max_denominator.unwrap_or(defaults.max_denominator),
        ratio_tol: tol.ratio_tol.unwrap_or(defaults.ratio_tol),
    };
    for (name, v) in [
        ("edge_threshold", controllability.edge_threshold),
        ("degeneracy_tol", controllability.degeneracy_tol),
        ("ratio_tol", controllability.ratio_tol),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(ConfigError::field(format!("tolerances.{name}"), "must be a finite non-negative number"));
        }
    }
    if controllability.max_denominator == 0 {
        return Err(ConfigError::field("tolerances.max_denominator", "must be at least 1"));
    }

    let final_step = match raw.final_pulse {
        Some(segments) => {
            let pulse = ControlPulse::new(
                segments.into_iter().map(|s| PulseSegment { duration: s.duration, value: s.value }).collect(),
            )
            .map_err(|e| ConfigError::field("final_pulse", e.to_string()))?;
            let target = raw.target.as_deref().map(|t| parse_state(t, n, "target")).transpose()?;
            Some(FinalStep { pulse, target })
        }
        None if raw.target.is_some() => return Err(ConfigError::field("target", "requires final_pulse")),
        None => None,
    };

    Ok(RunConfig {
        mode,
        system,
        initial,
        good,
        partition,
        phases,
        iterations,
        l_max: raw.l_max.unwrap_or(DEFAULT_L_MAX),
        seed: raw.seed,
        shots,
        pre_rotation: raw.pre_rotation,
        repeat_until_success: raw.repeat_until_success,
        max_attempts,
        controllability,
        final_step,
        out: raw.out,
    })
}

fn parse_angle(a: &RawAngle, path: &str) -> Result<f64> {
    match a {
        RawAngle::Number(x) => Ok(*x),
        RawAngle::Named(s) => match s.trim() {
            "pi" => Ok(PI),
            "pi/2" => Ok(PI / 2.0),
            "0" => Ok(0.0),
            other => Err(ConfigError::field(path, format!("expected a number, \"pi\" or \"pi/2\", got {other:?}"))),
        },
    }
}

fn one_based(i: usize, n: usize, path: &str) -> Result<usize> {
    if i == 0 || i > n {
        Err(ConfigError::field(path, format!("index {i} outside 1..={n}")))
    } else {
        Ok(i - 1)
    }
}

fn parse_good(indices: &[usize], n: usize, path: &str) -> Result<GoodSubspace> {
    let zero = indices
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            one_based(
                i,
                n,
                &if indices.len() == 1 && path == "good" { path.to_string() } else { format!("{path}[{k}]") },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    GoodSubspace::new(zero, n).map_err(|e| ConfigError::field(path, e.to_string()))
}

fn parse_state(raw: &[RawComplex], n: usize, path: &str) -> Result<StateVector> {
    if raw.len() != n {
        return Err(ConfigError::field(path, format!("expected {n} amplitudes, got {}", raw.len())));
    }
    let v = CVector::from_iterator(n, raw.iter().map(|&c| C64::from(c)));
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > INITIAL_NORM_TOL {
        return Err(ConfigError::field(
            path,
            format!("state is not normalized: norm {norm} (squared {}), tolerance {INITIAL_NORM_TOL:e}", norm * norm),
        ));
    }
    StateVector::normalized(v).map_err(|e| ConfigError::field(path, e.to_string()))
}

fn parse_preset_name(name: &str, model: HydrogenModel) -> Result<SystemSource> {
    match name {
        "hydrogen" => Ok(SystemSource::Hydrogen(model)),
        other => Err(ConfigError::field("system", format!("unknown preset {other:?} (known: \"hydrogen\")"))),
    }
}

fn parse_system(v: &Value) -> Result<SystemSource> {
    match v {
        Value::String(name) => parse_preset_name(name, HydrogenModel::default()),
        Value::Object(map) if map.contains_key("preset") => {
            let raw: RawPresetSystem = typed(v.clone(), "system")?;
            let mut model = HydrogenModel::default();
            if let Some(e) = raw.ground_energy {
                model.ground_energy = e;
            }
            if let Some(gap) = raw.gap {
                if !(gap.is_finite() && gap > 0.0) {
                    return Err(ConfigError::field("system.gap", "must be positive"));
                }
                model.gap = gap;
            }
            parse_preset_name(&raw.preset, model)
        }
        _ => {
            let raw: RawInlineSystem = typed(v.clone(), "system")?;
            parse_inline(raw).map(SystemSource::Inline)
        }
    }
}

fn parse_inline(raw: RawInlineSystem) -> Result<SystemSpec> {
    let n = raw.drift.len();
    if n < 2 {
        return Err(ConfigError::field("system.drift", format!("need at least 2 levels, got {n}")));
    }
    if raw.coupling.len() != n {
        return Err(ConfigError::field("system.coupling", format!("expected {n} rows, got {}", raw.coupling.len())));
    }
    let mut b = CMatrix::zeros(n, n);
    for (i, row) in raw.coupling.iter().enumerate() {
        if row.len() != n {
            return Err(ConfigError::field(
                format!("system.coupling[{i}]"),
                format!("expected {n} entries, got {}", row.len()),
            ));
        }
        for (j, &c) in row.iter().enumerate() {
            b[(i, j)] = c.into();
        }
    }
    for i in 0..n {
        for j in i..n {
            let deviation = (b[(i, j)] - b[(j, i)].conj()).norm();
            if deviation > incoherent_core::HERMITICITY_TOL {
                return Err(ConfigError::field(
                    format!("system.coupling[{i}][{j}]"),
                    format!(
                        "coupling is not Hermitian: entry ({}, {}) = {} but conj of ({}, {}) = {} (deviation {deviation:e})",
                        i + 1,
                        j + 1,
                        fmt_c(b[(i, j)]),
                        j + 1,
                        i + 1,
                        fmt_c(b[(j, i)].conj())
                    ),
                ));
            }
        }
    }

    let exact = raw.drift.iter().any(Value::is_string);
    if exact {
        let drift = raw
            .drift
            .iter()
            .enumerate()
            .map(|(k, v)| {
                parse_rational(v).ok_or_else(|| {
                    ConfigError::field(
                        format!("system.drift[{k}]"),
                        "exact drift entries must be integers or \"p/q\" strings",
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SystemSpec::with_exact_drift(drift, b).map_err(|e| ConfigError::field("system", e.to_string()))
    } else {
        let drift = raw
            .drift
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.as_f64().ok_or_else(|| ConfigError::field(format!("system.drift[{k}]"), "expected a number"))
            })
            .collect::<Result<Vec<_>>>()?;
        SystemSpec::new(drift, b).map_err(|e| ConfigError::field("system", e.to_string()))
    }
}

fn parse_rational(v: &Value) -> Option<Rational64> {
    match v {
        Value::Number(x) => x.as_i64().map(Rational64::from_integer),
        Value::String(s) => {
            let s = s.trim();
            match s.split_once('/') {
                Some((p, q)) => {
                    let p: i64 = p.trim().parse().ok()?;
                    let q: i64 = q.trim().parse().ok()?;
                    (q != 0).then(|| Rational64::new(p, q))
                }
                None => s.parse().ok().map(Rational64::from_integer),
            }
        }
        _ => None,
    }
}

fn fmt_c(c: C64) -> String {
    format!("[{}, {}]", c.re, c.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn field_error(v: Value) -> (String, String) {
        match parse_value(v).unwrap_err() {
            ConfigError::Field { path, message } => (path, message),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimal_case1_fills_defaults() {
        let c = parse_config(r#"{"mode": "hydrogen-case1", "seed": 1}"#).unwrap();
        assert_eq!(c.mode, Mode::HydrogenCase1);
        assert_eq!(c.phases, Phases::STANDARD);
        assert_eq!(c.iterations, Iterations::Auto);
        assert_eq!(c.shots, 1);
        assert_eq!(c.good.unwrap().indices(), &[4]);
        assert!(matches!(c.system, SystemSource::Hydrogen(_)));
    }

    #[test]
    fn non_hermitian_coupling_names_entry() {
        let (path, message) = field_error(json!({
            "mode": "analyze",
            "system": {"drift": [0, 1], "coupling": [[0, [1, 1]], [[1, 1], 0]]}
        }));
        assert_eq!(path, "system.coupling[0][1]");
        assert!(message.contains("(1, 2)"), "{message}");
    }

    #[test]
    fn iterations_auto_and_seed() {
        let c = parse_value(json!({
            "mode": "algo1", "system": "hydrogen", "good": 5, "seed": 42, "iterations": "auto",
            "initial": [0.7, 0.5, 0.3, 0.4, 0.1]
        }))
        .unwrap();
        assert_eq!(c.iterations, Iterations::Auto);
        assert_eq!(c.seed, Some(42));
        let c = parse_value(json!({
            "mode": "amplify", "system": "hydrogen", "good": 5, "iterations": 3,
            "initial": [0.7, 0.5, 0.3, 0.4, 0.1]
        }))
        .unwrap();
        assert_eq!(c.iterations, Iterations::Fixed(3));
    }

    #[test]
    fn unnormalized_initial_reports_norm() {
        let (path, message) = field_error(json!({
            "mode": "amplify", "system": "hydrogen", "good": 5, "initial": [0.7, 0.5, 0.3, 0.4, 0.2]
        }));
        assert_eq!(path, "initial");
        assert!(message.contains("norm 1.014889"), "{message}");
        // Within 1e-8 is accepted and renormalized.
        let c = parse_value(json!({
            "mode": "amplify", "system": "hydrogen", "good": 5, "initial": [0.700000001, 0.5, 0.3, 0.4, 0.1]
        }))
        .unwrap();
        assert!((c.initial.unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_modes_need_a_seed() {
        let (path, _) = field_error(json!({"mode": "hydrogen-case2"}));
        assert_eq!(path, "seed");
        assert!(parse_value(json!({"mode": "analyze", "system": "hydrogen"})).is_ok());
    }

    #[test]
    fn schema_errors_carry_paths() {
        let (path, _) = field_error(json!({"mode": "analyze", "system": "hydrogen", "shots": "many"}));
        assert_eq!(path, "shots");
        let (path, _) =
            field_error(json!({"mode": "analyze", "system": {"drift": [0, 1], "coupling": [[0, 1], [1, "x"]]}}));
        assert!(path.starts_with("system.coupling[1]"), "{path}");
        let (path, _) = field_error(json!({"mode": "algo2", "system": "hydrogen", "seed": 1, "subspace": [1, 6],
            "initial": [0.1, 0.06, 0.08, 0.7, 0.7]}));
        assert_eq!(path, "subspace[1]");
        assert!(matches!(parse_config("{"), Err(ConfigError::Syntax(_))));
        let (path, _) = field_error(json!({"mode": "analyze", "system": "hydrogen", "bogus": 1}));
        assert_eq!(path, "bogus");
    }

    #[test]
    fn exact_drift_strings() {
        let c = parse_value(json!({
            "mode": "analyze",
            "system": {"drift": ["0", "1/2", 3], "coupling": [[0, 1, 0], [1, 0, 1], [0, 1, 0]]}
        }))
        .unwrap();
        let spec = c.system.spec();
        assert_eq!(spec.exact_drift().unwrap()[1], Rational64::new(1, 2));
        let (path, _) = field_error(json!({
            "mode": "analyze", "system": {"drift": ["0", 0.5], "coupling": [[0, 1], [1, 0]]}
        }));
        assert_eq!(path, "system.drift[1]");
    }

    #[test]
    fn presets_reject_overrides() {
        let (path, _) = field_error(json!({"mode": "hydrogen-case1", "seed": 1, "good": 2}));
        assert_eq!(path, "good");
    }

    #[test]
    fn phases_accept_pi() {
        let c = parse_value(json!({"mode": "amplify", "system": "hydrogen", "good": 5,
            "initial": [0.7, 0.5, 0.3, 0.4, 0.1], "phases": ["pi", 1.0]}))
        .unwrap();
        assert_eq!(c.phases, Phases::new(PI, 1.0).unwrap());
    }
}
