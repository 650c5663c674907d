//! End-to-end incoherent control runs.
//!
//! Both algorithms share one pipeline: prepare `U` with `U e_0 = ψ₀`, build
//! `Q`, apply it `L` times, then measure the good-vs-rest partition. They
//! differ in what counts as good:
//!
//! * [`run_algorithm1`] targets a single eigenstate from which the final
//!   target is reachable,
//! * [`run_algorithm2`] targets a controllable subspace, and attaches the
//!   controllability verdict for it.
//!
//! The last coherent step (driving the collapsed state to the target) is not
//! synthesized. A caller supplied [`FinalStep`] pulse is propagated instead
//! and its fidelity reported.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::amplification::{
    mixing_rotation, AmplificationPlan, Decomposition, GoodSubspace, Iterations, Phases, DEFAULT_L_MAX, ZERO_OVERLAP,
};
use crate::controllability::{assess, ControllabilityConfig, Verdict};
use crate::measurement::{born_probabilities, sample_shot, MeasurementOutcome, MeasurementPartition};
use crate::operator::{apply_operator, UnitaryOperator};
use crate::propagate::{propagate, ControlPulse};
use crate::state::StateVector;
use crate::system::SystemSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub phases: Phases,
    pub iterations: Iterations,
    pub l_max: u64,
    /// Mix some amplitude into the good set when the initial state has none.
    pub pre_rotation: bool,
    pub seed: u64,
    /// Measurement stream used for this run. Repeated attempts use
    /// consecutive shots of the same seed.
    pub shot: u64,
}

impl RunOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            phases: Phases::STANDARD,
            iterations: Iterations::Auto,
            l_max: DEFAULT_L_MAX,
            pre_rotation: false,
            seed: 0,
            shot: 0,
        }
    }
}

/// Coherent pulse applied after a successful measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalStep {
    pub pulse: ControlPulse,
    pub target: Option<StateVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    EigenstateTarget,
    Subspace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllabilityNote {
    pub component: Vec<usize>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub algorithm: AlgorithmKind,
    /// Rotation applied to the initial state before planning, if any.
    pub pre_rotation: Option<UnitaryOperator>,
    /// State actually amplified (the initial state, pre-rotated if requested).
    pub prepared: StateVector,
    pub plan: AmplificationPlan,
    pub pre_amplification: Vec<f64>,
    pub post_amplification: Vec<f64>,
    pub amplified: StateVector,
    pub predicted_success: f64,
    /// Born probabilities of `{good, rest}` on the amplified state.
    pub block_probabilities: Vec<f64>,
    pub partition: MeasurementPartition,
    pub measurement: MeasurementOutcome,
    pub final_state: Option<StateVector>,
    pub fidelity: Option<f64>,
    pub controllability: Option<ControllabilityNote>,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Whether the measurement landed in the good block.
    pub fn succeeded(&self) -> bool {
        self.measurement.block_index == 0
    }

    /// The good/bad split the run started from.
    pub fn initial_decomposition(&self) -> Result<Decomposition> {
        crate::amplification::decompose(&self.prepared, &self.plan.good)
    }
}

fn run(
    kind: AlgorithmKind,
    spec: &SystemSpec,
    initial: &StateVector,
    good: &GoodSubspace,
    options: &RunOptions,
    final_step: Option<&FinalStep>,
) -> Result<RunReport> {
    if initial.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: initial.dim() });
    }
    if good.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: good.dim() });
    }
    let mut warnings = Vec::new();
    if spec.is_trivial() {
        warnings.push(String::from("[A, B] = 0: the coupling commutes with the drift"));
    }

    let (prepared, pre_rotation) = if initial.weight_on(good.indices()) <= ZERO_OVERLAP {
        if !options.pre_rotation {
            return Err(Error::ZeroGoodOverlap);
        }
        let r = mixing_rotation(initial, good)?;
        warnings.push(String::from("initial state had no good component; applied pre-rotation"));
        (apply_operator(&r, initial)?, Some(r))
    } else {
        (initial.clone(), None)
    };

    let plan = AmplificationPlan::new(&prepared, good, options.phases, options.iterations, options.l_max)?;
    let amplified = plan.amplify()?;
    let partition = MeasurementPartition::good_vs_rest(good);
    let block_probabilities = born_probabilities(&amplified, &partition)?;
    let measurement = sample_shot(&amplified, &partition, options.seed, options.shot)?;

    let mut final_state = None;
    let mut fidelity = None;
    if let Some(step) = final_step {
        if measurement.block_index == 0 {
            let out = propagate(spec, &step.pulse, &measurement.collapsed)?;
            if let Some(target) = &step.target {
                fidelity = Some(out.fidelity(target)?);
            }
            final_state = Some(out);
        }
    }

    Ok(RunReport {
        algorithm: kind,
        pre_rotation,
        pre_amplification: initial.magnitudes(),
        post_amplification: amplified.magnitudes(),
        predicted_success: plan.predicted_success,
        prepared,
        plan,
        amplified,
        block_probabilities,
        partition,
        measurement,
        final_state,
        fidelity,
        controllability: None,
        warnings,
    })
}

/// Eigenstate-target run: amplify `e_good_index`, measure, and on success
/// apply the optional final pulse.
pub fn run_algorithm1(
    spec: &SystemSpec,
    initial: &StateVector,
    good_index: usize,
    options: &RunOptions,
    final_step: Option<&FinalStep>,
) -> Result<RunReport> {
    let good = GoodSubspace::single(good_index, spec.dim())?;
    run(AlgorithmKind::EigenstateTarget, spec, initial, &good, options, final_step)
}

/// Subspace-target run. Attaches the controllability verdict of the
/// connectivity component equal to `subspace`, or warns when `subspace` is
/// not a component.
pub fn run_algorithm2(
    spec: &SystemSpec,
    initial: &StateVector,
    subspace: &GoodSubspace,
    options: &RunOptions,
    controllability: &ControllabilityConfig,
    final_step: Option<&FinalStep>,
) -> Result<RunReport> {
    let mut report = run(AlgorithmKind::Subspace, spec, initial, subspace, options, final_step)?;
    let assessment = assess(spec, controllability)?;
    match assessment.component_matching(subspace.indices()) {
        Some(c) => {
            report.controllability = Some(ControllabilityNote { component: c.vertices.clone(), verdict: c.verdict });
        }
        None => report.warnings.push(format!(
            "subspace {:?} is not a connected component of the coupling graph (components: {:?})",
            subspace.indices(),
            assessment.components
        )),
    }
    Ok(report)
}
