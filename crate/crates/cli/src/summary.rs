//! Human-readable summary, rendered from a [`Report`] alone so that a report
//! read back from disk reproduces it exactly.

use std::fmt::Write;

use crate::report::Report;

pub fn render(report: &Report) -> String {
    let mut s = String::new();
    let p = &report.provenance;
    let _ = writeln!(
        s,
        "mode {}  system {}  seed {}",
        p.mode.as_deref().unwrap_or("-"),
        p.system.as_deref().unwrap_or("-"),
        p.seed.map_or("-".to_string(), |x| x.to_string())
    );

    if let Some(c) = &report.controllability {
        let _ = writeln!(s, "edges {:?}", c.edges);
        for comp in &c.subspace_verdicts {
            let _ = writeln!(s, "component {:?}: {}", comp.vertices, comp.verdict);
        }
        let _ = writeln!(s, "global verdict: {}", c.global_verdict);
        if let Some(v) = &c.subspace_verdict {
            let _ = writeln!(s, "subspace verdict: {v}");
        }
    }

    if let Some(a) = &report.amplification {
        let _ = writeln!(s, "{:>5}  {:>12}  {:>12}", "index", "|c| before", "|c| after");
        for (i, (before, after)) in a.pre_amplification.iter().zip(&a.post_amplification).enumerate() {
            let mark = if a.good.contains(&(i + 1)) { "*" } else { " " };
            let _ = writeln!(s, "{:>4}{mark}  {before:>12.6}  {after:>12.6}", i + 1);
        }
        let _ = writeln!(
            s,
            "good {:?}  g = {:.6}  L = {}{}  predicted success = {:.6}",
            a.good,
            a.initial_good_weight,
            a.iterations,
            if a.auto_iterations { " (auto)" } else { "" },
            a.predicted_success
        );
    }

    if let Some(m) = &report.measurement {
        if let Some(o) = &m.outcome {
            let _ = writeln!(
                s,
                "measurement: block {} {:?} with p = {:.6}{}{}",
                o.block,
                m.partition[o.block - 1],
                o.probability,
                if o.success { ", success" } else { "" },
                if o.attempts > 1 { format!(" after {} attempts", o.attempts) } else { String::new() }
            );
        }
        if let Some(h) = &m.histogram {
            let _ = writeln!(
                s,
                "empirical block-1 frequency = {:.6} over {} shots ({:.2} sigma from {:.6})",
                h.frequencies[0], h.shots, h.deviation_sigmas[0], m.probabilities[0]
            );
        }
    }

    if let Some(f) = &report.final_step {
        match f.fidelity {
            Some(x) => {
                let _ = writeln!(s, "final pulse ({:.4} time units): fidelity {x:.6}", f.pulse_duration);
            }
            None => {
                let _ = writeln!(s, "final pulse ({:.4} time units) applied", f.pulse_duration);
            }
        }
    }

    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    if let Some(e) = &report.error {
        let _ = writeln!(s, "error ({}): {}", e.kind, e.message);
    }
    s
}
