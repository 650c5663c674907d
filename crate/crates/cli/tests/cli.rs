use std::fs;
use std::process::{Command, Output};

use incoherent_cli::report::Report;
use incoherent_cli::summary;

fn incoherent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incoherent")).args(args).output().expect("binary runs")
}

fn report_of(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("stdout carries a JSON report")
}

#[test]
fn analyze_hydrogen() {
    let out = incoherent(&["--mode", "analyze", "--system", "hydrogen", "--subspace", "1,2,3"]);
    assert!(out.status.success());
    let r = report_of(&out);
    let c = r.controllability.unwrap();
    assert_eq!(c.edges, vec![[1, 3], [2, 3]]);
    assert_eq!(c.components, vec![vec![1, 2, 3], vec![4], vec![5]]);
    assert_eq!(c.global_verdict, "violated");
    assert_eq!(c.subspace_verdict.as_deref(), Some("inconclusive-relaxed-controllable"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("global verdict: violated"));
}

#[test]
fn hydrogen_case2_statistics() {
    let out = incoherent(&["--mode", "hydrogen-case2", "--shots", "100000", "--seed", "7"]);
    assert!(out.status.success());
    let r = report_of(&out);
    let a = r.amplification.unwrap();
    assert_eq!(a.iterations, 5);
    let m = r.measurement.unwrap();
    let h = m.histogram.unwrap();
    assert_eq!(h.shots, 100_000);
    let p = a.predicted_success;
    assert!((p - 0.9999).abs() < 1e-4);
    let sigma = (p * (1.0 - p) / 1e5).sqrt();
    assert!((h.frequencies[0] - p).abs() <= 3.0 * sigma, "{} vs {p}", h.frequencies[0]);
}

#[test]
fn zero_overlap_fails_with_remedy() {
    let out = incoherent(&[
        "--mode",
        "algo1",
        "--system",
        "hydrogen",
        "--initial",
        "0.6,0.8,0,0,0",
        "--good",
        "5",
        "--seed",
        "3",
    ]);
    assert!(!out.status.success());
    let r = report_of(&out);
    let e = r.error.unwrap();
    assert!(e.message.contains("pre-rotation"), "{}", e.message);

    let out = incoherent(&[
        "--mode",
        "algo1",
        "--system",
        "hydrogen",
        "--initial",
        "0.6,0.8,0,0,0",
        "--good",
        "5",
        "--seed",
        "3",
        "--pre-rotation",
    ]);
    assert!(out.status.success());
    assert!(report_of(&out).amplification.unwrap().pre_rotation_applied);
}

#[test]
fn validation_errors_exit_nonzero_with_record() {
    let out = incoherent(&["--mode", "hydrogen-case1"]);
    assert!(!out.status.success());
    let e = report_of(&out).error.unwrap();
    assert_eq!(e.kind, "config");
    assert!(e.message.starts_with("seed:"), "{}", e.message);

    let out =
        incoherent(&["--mode", "amplify", "--system", "hydrogen", "--initial", "0.7,0.5,0.3,0.4,0.2", "--good", "5"]);
    assert!(!out.status.success());
    assert!(report_of(&out).error.unwrap().message.contains("norm 1.01"));
}

#[test]
fn identical_inputs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"mode": "algo2", "system": "hydrogen", "initial": [0.1, 0.06, 0.08, 0.7, 0.7],
            "subspace": [1, 2, 3], "seed": 99, "shots": 500}"#,
    )
    .unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = incoherent(&["--config", config.to_str().unwrap(), "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let other = dir.path().join("c.json");
    incoherent(&["--config", config.to_str().unwrap(), "--seed", "100", "--out", other.to_str().unwrap()]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&other).unwrap());
}

#[test]
fn report_round_trips_to_the_same_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out =
        incoherent(&["--mode", "hydrogen-case1", "--seed", "5", "--shots", "1000", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let printed = String::from_utf8(out.stdout).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(summary::render(&report), printed);
    assert_eq!(report.to_json(), text);
    let a = report.amplification.unwrap();
    assert_eq!(a.iterations, 7);
    assert!((a.predicted_success - 0.9953).abs() < 5e-4);
}

#[test]
fn inline_system_and_final_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("two.json");
    fs::write(
        &config,
        r#"{"mode": "algo1",
            "system": {"drift": [0, 0], "coupling": [[0, 1], [1, 0]]},
            "initial": [0.6, [0, 0.8]], "good": 2, "seed": 4, "repeat_until_success": true,
            "final_pulse": [{"duration": 1.5707963267948966, "value": 1.0}],
            "target": [1, 0]}"#,
    )
    .unwrap();
    let out = incoherent(&["--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report_of(&out);
    assert!(r.measurement.unwrap().outcome.unwrap().success);
    assert!((r.final_step.unwrap().fidelity.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn measure_stats_over_singletons() {
    let out = incoherent(&[
        "--mode",
        "measure-stats",
        "--system",
        "hydrogen",
        "--initial",
        "0.7,0.5,0.3,0.4,0.1",
        "--seed",
        "1",
        "--shots",
        "20000",
    ]);
    assert!(out.status.success());
    let m = report_of(&out).measurement.unwrap();
    assert_eq!(m.partition.len(), 5);
    let h = m.histogram.unwrap();
    assert!(h.deviation_sigmas.iter().all(|&s| s < 4.0), "{:?}", h.deviation_sigmas);
}
