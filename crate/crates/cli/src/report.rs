//! JSON report schema. Indices are 1-based, complex numbers `[re, im]`.

use serde::{Deserialize, Serialize};

use incoherent_core::controllability::ControllabilityReport;
use incoherent_core::measurement::Histogram;
use incoherent_core::StateVector;

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controllability: Option<ControllabilitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplification: Option<AmplificationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementSection>,
    #[serde(default, rename = "final", skip_serializing_if = "Option::is_none")]
    pub final_step: Option<FinalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

impl Report {
    pub fn new(provenance: Provenance) -> Self {
        Self {
            provenance,
            warnings: Vec::new(),
            controllability: None,
            amplification: None,
            measurement: None,
            final_step: None,
            error: None,
        }
    }

    pub fn failed(provenance: Provenance, kind: &str, message: impl Into<String>) -> Self {
        let mut r = Self::new(provenance);
        r.error = Some(ErrorRecord { kind: kind.to_string(), message: message.into() });
        r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the canonical (key-sorted, compact) effective configuration.
    pub config_sha256: String,
    pub mode: Option<String>,
    pub system: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneratePairRecord {
    pub first: [usize; 2],
    pub second: [usize; 2],
    pub frequency: f64,
    pub zero_frequency: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrationalRecord {
    pub numerator: [usize; 2],
    pub denominator: [usize; 2],
    pub ratio: f64,
    pub best_numerator: i64,
    pub best_denominator: u64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub vertices: Vec<usize>,
    pub verdict: String,
    pub degenerate_pairs: usize,
    pub irrational_witnesses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllabilitySection {
    pub edges: Vec<[usize; 2]>,
    pub components: Vec<Vec<usize>>,
    pub degenerate_pairs: Vec<DegeneratePairRecord>,
    pub irrational_witnesses: Vec<IrrationalRecord>,
    pub global_verdict: String,
    pub subspace_verdicts: Vec<ComponentRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Verdict of the component matching the requested subspace, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_verdict: Option<String>,
}

fn pair(p: (usize, usize)) -> [usize; 2] {
    [p.0 + 1, p.1 + 1]
}

pub fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

impl From<&ControllabilityReport> for ControllabilitySection {
    fn from(r: &ControllabilityReport) -> Self {
        Self {
            edges: r.graph.edges().iter().map(|&e| pair(e)).collect(),
            components: r.components.iter().map(|c| one_based(c)).collect(),
            degenerate_pairs: r
                .degenerate_pairs
                .iter()
                .map(|d| DegeneratePairRecord {
                    first: pair(d.first),
                    second: pair(d.second),
                    frequency: d.first_frequency,
                    zero_frequency: d.zero_frequency,
                })
                .collect(),
            irrational_witnesses: r
                .irrational_witnesses
                .iter()
                .map(|w| IrrationalRecord {
                    numerator: pair(w.numerator),
                    denominator: pair(w.denominator),
                    ratio: w.ratio,
                    best_numerator: w.best.numer,
                    best_denominator: w.best.denom,
                    error: w.best.error,
                })
                .collect(),
            global_verdict: r.global_verdict.label().to_string(),
            subspace_verdicts: r
                .subspace_verdicts
                .iter()
                .map(|c| ComponentRecord {
                    vertices: one_based(&c.vertices),
                    verdict: c.verdict.label().to_string(),
                    degenerate_pairs: c.degenerate_pairs.len(),
                    irrational_witnesses: c.irrational_witnesses.len(),
                })
                .collect(),
            notes: r.notes.clone(),
            subspace_verdict: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationSection {
    pub good: Vec<usize>,
    pub phases: [f64; 2],
    pub iterations: u64,
    pub auto_iterations: bool,
    pub l_max: u64,
    pub pre_rotation_applied: bool,
    pub initial_good_weight: f64,
    pub theta: f64,
    pub predicted_success: f64,
    /// `|c_i|` before amplification, per index.
    pub pre_amplification: Vec<f64>,
    /// `|c_i|` after amplification, per index.
    pub post_amplification: Vec<f64>,
    pub amplified_state: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub block: usize,
    pub probability: f64,
    pub success: bool,
    pub collapsed: Vec<Complex>,
    /// Measurements taken, counting the successful one.
    pub attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRecord {
    pub shots: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub deviation_sigmas: Vec<f64>,
}

impl From<&Histogram> for HistogramRecord {
    fn from(h: &Histogram) -> Self {
        Self {
            shots: h.shots,
            counts: h.counts.clone(),
            frequencies: h.frequencies(),
            deviation_sigmas: (0..h.counts.len()).map(|b| h.deviation_sigmas(b)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSection {
    pub seed: u64,
    pub partition: Vec<Vec<usize>>,
    pub probabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<OutcomeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<HistogramRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalSection {
    pub pulse_duration: f64,
    pub segments: usize,
    pub state: Vec<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

pub fn amplitudes(state: &StateVector) -> Vec<Complex> {
    state.amplitudes().iter().map(|c| [c.re, c.im]).collect()
}
