use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use incoherent_cli::config::Mode;
use incoherent_cli::report::{Provenance, Report};
use incoherent_cli::{config_hash, run_value, summary};
use serde_json::{json, Map, Value};

/// Incoherent control of finite-level quantum systems: controllability
/// analysis, amplitude amplification and seeded measurement.
///
/// Options given on the command line override the same fields of --config.
/// Basis indices are 1-based.
#[derive(Debug, Parser)]
#[command(name = "incoherent", version)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Preset name ("hydrogen") or path to a JSON system file.
    #[arg(long)]
    system: Option<String>,
    /// Initial amplitudes, comma separated reals or a JSON array.
    #[arg(long, allow_hyphen_values = true)]
    initial: Option<String>,
    /// Good basis index (algo1, amplify).
    #[arg(long)]
    good: Option<usize>,
    /// Good subspace indices, comma separated (algo2, amplify).
    #[arg(long)]
    subspace: Option<String>,
    /// "phi1,phi2"; each a number, "pi" or "pi/2".
    #[arg(long)]
    phases: Option<String>,
    /// "auto" or a fixed count.
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rotate a zero-overlap initial state into the good subspace first.
    #[arg(long)]
    pre_rotation: bool,
    #[arg(long)]
    l_max: Option<u64>,
    /// Measure again (next shot of the same seed) until the good block is hit.
    #[arg(long)]
    repeat_until_success: bool,
    #[arg(long)]
    max_attempts: Option<u64>,
}

fn list(text: &str, what: &str) -> anyhow::Result<Value> {
    let text = text.trim();
    if text.starts_with('[') {
        return serde_json::from_str(text).with_context(|| format!("--{what} is not valid JSON"));
    }
    text.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(x) if x.fract() == 0.0 && x >= 0.0 && !t.contains('.') => Ok(json!(x as u64)),
                Ok(x) => Ok(json!(x)),
                Err(_) => Ok(json!(t)),
            }
        })
        .collect::<anyhow::Result<Vec<Value>>>()
        .map(Value::Array)
}

fn system_value(text: &str) -> anyhow::Result<Value> {
    let path = Path::new(text);
    if path.is_file() {
        let raw = fs::read_to_string(path).with_context(|| format!("reading system file {text}"))?;
        serde_json::from_str(&raw).with_context(|| format!("system file {text} is not valid JSON"))
    } else {
        Ok(Value::String(text.to_string()))
    }
}

/// The configuration file overlaid with command-line options.
fn effective_config(args: &Args) -> anyhow::Result<Value> {
    let mut map = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            match serde_json::from_str(&text).with_context(|| format!("config {} is not valid JSON", path.display()))? {
                Value::Object(m) => m,
                _ => anyhow::bail!("config {} must be a JSON object", path.display()),
            }
        }
        None => Map::new(),
    };
    let mut set = |k: &str, v: Value| {
        map.insert(k.to_string(), v);
    };
    if let Some(m) = args.mode {
        set("mode", json!(m));
    }
    if let Some(s) = &args.system {
        set("system", system_value(s)?);
    }
    if let Some(s) = &args.initial {
        set("initial", list(s, "initial")?);
    }
    if let Some(g) = args.good {
        set("good", json!(g));
    }
    if let Some(s) = &args.subspace {
        set("subspace", list(s, "subspace")?);
    }
    if let Some(s) = &args.phases {
        set("phases", list(s, "phases")?);
    }
    if let Some(s) = &args.iterations {
        set("iterations", s.trim().parse::<u64>().map_or_else(|_| json!(s.trim()), |l| json!(l)));
    }
    if let Some(x) = args.seed {
        set("seed", json!(x));
    }
    if let Some(x) = args.shots {
        set("shots", json!(x));
    }
    if let Some(p) = &args.out {
        set("out", json!(p));
    }
    if args.pre_rotation {
        set("pre_rotation", json!(true));
    }
    if let Some(x) = args.l_max {
        set("l_max", json!(x));
    }
    if args.repeat_until_success {
        set("repeat_until_success", json!(true));
    }
    if let Some(x) = args.max_attempts {
        set("max_attempts", json!(x));
    }
    Ok(Value::Object(map))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (report, out) = match effective_config(&args) {
        Ok(config) => {
            let out = config.get("out").and_then(Value::as_str).map(PathBuf::from);
            (run_value(config), out)
        }
        Err(e) => {
            let prov = Provenance {
                tool: "incoherent".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config_sha256: config_hash(&Value::Null),
                mode: args.mode.map(|m| m.name().to_string()),
                system: None,
                seed: args.seed,
            };
            (Report::failed(prov, "config", format!("{e:#}")), args.out.clone())
        }
    };

    let json = report.to_json();
    let table = summary::render(&report);
    match &out {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                eprintln!("error: writing report to {}: {e}", path.display());
                return ExitCode::from(2);
            }
            print!("{table}");
        }
        None => {
            let _ = std::io::stdout().write_all(json.as_bytes());
            eprint!("{table}");
        }
    }
    if report.error.is_some() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
