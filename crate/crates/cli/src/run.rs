//! Mode dispatch.

use incoherent_core::algorithms::{run_algorithm1, run_algorithm2, RunOptions, RunReport};
use incoherent_core::amplification::{mixing_rotation, AmplificationPlan, Iterations, ZERO_OVERLAP};
use incoherent_core::controllability::assess;
use incoherent_core::measurement::{sample_shot, shot_histogram, MeasurementPartition};
use incoherent_core::operator::apply_operator;
use incoherent_core::StateVector;

use crate::config::{Mode, RunConfig};
use crate::report::{
    amplitudes, one_based, AmplificationSection, ControllabilitySection, FinalSection, HistogramRecord,
    MeasurementSection, OutcomeRecord, Provenance, Report,
};

type Result<T> = std::result::Result<T, incoherent_core::Error>;

/// Runs `config` and returns the report. Failures become the report's error
/// record.
pub fn execute(config: &RunConfig, provenance: Provenance) -> Report {
    let mut report = Report::new(provenance.clone());
    match dispatch(config, &mut report) {
        Ok(()) => report,
        Err(e) => {
            let mut failed = Report::failed(provenance, "runtime", e.to_string());
            failed.warnings = report.warnings;
            failed
        }
    }
}

fn dispatch(config: &RunConfig, report: &mut Report) -> Result<()> {
    match config.mode {
        Mode::Analyze => analyze(config, report),
        Mode::Amplify => amplify(config, report),
        Mode::Algo1 | Mode::HydrogenCase1 if config.good.as_ref().is_some_and(|g| g.indices().len() == 1) => {
            algorithm(config, report)
        }
        Mode::Algo1 | Mode::HydrogenCase1 => {
            Err(incoherent_core::Error::InvalidGoodSubspace("algo1 needs a single good index".into()))
        }
        Mode::Algo2 | Mode::HydrogenCase2 => algorithm(config, report),
        Mode::MeasureStats => measure_stats(config, report),
    }
}

fn analyze(config: &RunConfig, report: &mut Report) -> Result<()> {
    let assessment = assess(&config.system.spec(), &config.controllability)?;
    let mut section = ControllabilitySection::from(&assessment);
    if let Some(good) = &config.good {
        match assessment.component_matching(good.indices()) {
            Some(c) => section.subspace_verdict = Some(c.verdict.label().to_string()),
            None => report.warnings.push(format!(
                "subspace {:?} is not a connected component of the coupling graph",
                one_based(good.indices())
            )),
        }
    }
    report.controllability = Some(section);
    Ok(())
}

fn amplification_section(
    config: &RunConfig,
    plan: &AmplificationPlan,
    initial: &StateVector,
    amplified: &StateVector,
    pre_rotated: bool,
) -> AmplificationSection {
    AmplificationSection {
        good: one_based(plan.good.indices()),
        phases: [plan.phases.phi1, plan.phases.phi2],
        iterations: plan.iterations,
        auto_iterations: config.iterations == Iterations::Auto,
        l_max: config.l_max,
        pre_rotation_applied: pre_rotated,
        initial_good_weight: plan.initial_good_weight,
        theta: plan.theta(),
        predicted_success: plan.predicted_success,
        pre_amplification: initial.magnitudes(),
        post_amplification: amplified.magnitudes(),
        amplified_state: amplitudes(amplified),
    }
}

fn amplify(config: &RunConfig, report: &mut Report) -> Result<()> {
    let initial = config.initial.as_ref().expect("validated");
    let good = config.good.as_ref().expect("validated");
    let mut prepared = initial.clone();
    let mut rotated = false;
    if initial.weight_on(good.indices()) <= ZERO_OVERLAP && config.pre_rotation {
        prepared = apply_operator(&mixing_rotation(initial, good)?, initial)?;
        rotated = true;
        report.warnings.push("initial state had no good component; applied pre-rotation".into());
    }
    let plan = AmplificationPlan::new(&prepared, good, config.phases, config.iterations, config.l_max)?;
    let amplified = plan.amplify()?;
    report.amplification = Some(amplification_section(config, &plan, initial, &amplified, rotated));
    Ok(())
}

fn run_once(config: &RunConfig, shot: u64) -> Result<RunReport> {
    let spec = config.system.spec();
    let initial = config.initial.as_ref().expect("validated");
    let good = config.good.as_ref().expect("validated");
    let options = RunOptions {
        phases: config.phases,
        iterations: config.iterations,
        l_max: config.l_max,
        pre_rotation: config.pre_rotation,
        seed: config.seed.expect("validated"),
        shot,
    };
    let final_step = config.final_step.as_ref();
    match config.mode {
        Mode::Algo1 | Mode::HydrogenCase1 => run_algorithm1(&spec, initial, good.indices()[0], &options, final_step),
        _ => run_algorithm2(&spec, initial, good, &options, &config.controllability, final_step),
    }
}

fn algorithm(config: &RunConfig, report: &mut Report) -> Result<()> {
    let seed = config.seed.expect("validated");
    let attempts_allowed = if config.repeat_until_success { config.max_attempts } else { 1 };
    let mut run = run_once(config, 0)?;
    let mut attempts = 1;
    while !run.succeeded() && attempts < attempts_allowed {
        run = run_once(config, attempts)?;
        attempts += 1;
    }
    if config.repeat_until_success && !run.succeeded() {
        report.warnings.push(format!("no successful measurement in {attempts} attempts"));
    }
    report.warnings.extend(run.warnings.iter().cloned());

    let initial = config.initial.as_ref().expect("validated");
    report.amplification =
        Some(amplification_section(config, &run.plan, initial, &run.amplified, run.pre_rotation.is_some()));

    if let Some(note) = &run.controllability {
        let assessment = assess(&config.system.spec(), &config.controllability)?;
        let mut section = ControllabilitySection::from(&assessment);
        section.subspace_verdict = Some(note.verdict.label().to_string());
        report.controllability = Some(section);
    }

    let histogram = if config.shots > 1 {
        Some(HistogramRecord::from(&shot_histogram(&run.amplified, &run.partition, seed, config.shots)?))
    } else {
        None
    };
    report.measurement = Some(MeasurementSection {
        seed,
        partition: run.partition.blocks().iter().map(|b| one_based(b)).collect(),
        probabilities: run.block_probabilities.clone(),
        outcome: Some(OutcomeRecord {
            block: run.measurement.block_index + 1,
            probability: run.measurement.probability,
            success: run.succeeded(),
            collapsed: amplitudes(&run.measurement.collapsed),
            attempts,
        }),
        histogram,
    });

    if let (Some(step), Some(state)) = (&config.final_step, &run.final_state) {
        report.final_step = Some(FinalSection {
            pulse_duration: step.pulse.total_duration(),
            segments: step.pulse.segments().len(),
            state: amplitudes(state),
            fidelity: run.fidelity,
        });
    } else if config.final_step.is_some() {
        report.warnings.push("measurement missed the good block; final pulse not applied".into());
    }
    Ok(())
}

fn measure_stats(config: &RunConfig, report: &mut Report) -> Result<()> {
    let seed = config.seed.expect("validated");
    let state = config.initial.as_ref().expect("validated");
    let partition = match (&config.partition, &config.good) {
        (Some(p), _) => p.clone(),
        (None, Some(g)) => MeasurementPartition::good_vs_rest(g),
        (None, None) => MeasurementPartition::singletons(state.dim()),
    };
    let first = sample_shot(state, &partition, seed, 0)?;
    let histogram = shot_histogram(state, &partition, seed, config.shots)?;
    report.measurement = Some(MeasurementSection {
        seed,
        partition: partition.blocks().iter().map(|b| one_based(b)).collect(),
        probabilities: histogram.probabilities.clone(),
        outcome: Some(OutcomeRecord {
            block: first.block_index + 1,
            probability: first.probability,
            success: config.good.is_some() && first.block_index == 0,
            collapsed: amplitudes(&first.collapsed),
            attempts: 1,
        }),
        histogram: Some(HistogramRecord::from(&histogram)),
    });
    Ok(())
}
