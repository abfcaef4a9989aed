mod args;
mod output;
mod report;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use misinfo::cuts::{cluster_bound, WeightedGraph};
use misinfo::gossip::{estimate_consensus_weights, run_to_consensus, spread_decay_profile, SimulationConfig};
use misinfo::influence::bounds_report;
use misinfo::kernel::decompose;
use misinfo::network::{self, validate, Example2Case, ForcefulSpec, GeneratorKind, GeneratorParams};
use misinfo::{Error, Network, Result};
use serde::Serialize;
use serde_json::json;

use args::{Case, Cli, Command, Format, GenerateArgs, Kind, SimulateArgs};
use report::{AnalyzeRequest, Settings, SCHEMA_VERSION};

/// Exit status for an error: parse and I/O problems are 2, the rest 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::Io(_) => "io",
        Error::Validation(_) => "validation",
        Error::BadParams(_) | Error::BadEpsilon(_) | Error::DimensionMismatch { .. } | Error::IndexOutOfRange { .. } => {
            "bad_parameters"
        }
        Error::TooLargeForExact { .. } => "too_large_for_exact",
        _ => "domain",
    }
}

fn error_json(e: &Error) -> serde_json::Value {
    let mut v = json!({ "error": { "kind": error_kind(e), "message": e.to_string() } });
    match e {
        Error::Validation(r) => v["error"]["violations"] = serde_json::to_value(&r.violations).expect("violations serialize"),
        Error::Parse { line, field, .. } => {
            v["error"]["line"] = json!(line);
            v["error"]["field"] = json!(field);
        }
        _ => {}
    }
    v
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).expect("report serializes");
    writeln!(out)?;
    Ok(())
}

fn load(path: &std::path::Path) -> Result<Network> {
    network::load(path, true)
}

fn parse_push(s: &str) -> Result<ForcefulSpec> {
    let bad = || Error::BadParams(format!("--forceful expects FORCEFUL:INFLUENCED:ALPHA, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [f, i, a] = parts.as_slice() else { return Err(bad()) };
    Ok(ForcefulSpec {
        forceful: f.trim().parse().map_err(|_| bad())?,
        influenced: i.trim().parse().map_err(|_| bad())?,
        alpha: a.trim().parse().map_err(|_| bad())?,
    })
}

fn generator_kind(a: &GenerateArgs, seed: u64) -> Result<GeneratorKind> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::BadParams(format!("--{name} is required for this kind")));
    Ok(match a.kind {
        Kind::Dyad => GeneratorKind::Dyad,
        Kind::Complete => GeneratorKind::Complete { n: need(a.n, "n")? },
        Kind::Ring => GeneratorKind::Ring { n: need(a.n, "n")? },
        Kind::Path => GeneratorKind::Path { n: need(a.n, "n")? },
        Kind::Barbell => GeneratorKind::Barbell {
            n1: need(a.n1, "n1")?,
            n2: a.n2.unwrap_or(0),
        },
        Kind::Bridged => {
            if a.sizes.is_empty() {
                return Err(Error::BadParams("--sizes is required for bridged".into()));
            }
            GeneratorKind::BridgedClusters { sizes: a.sizes.clone() }
        }
        Kind::Example2 => GeneratorKind::Example2 {
            case: match a.case {
                Some(Case::A) => Example2Case::A,
                Some(Case::B) => Example2Case::B,
                None => return Err(Error::BadParams("--case is required for example2".into())),
            },
        },
        Kind::RandomRegular => GeneratorKind::RandomRegular {
            n: need(a.n, "n")?,
            degree: need(a.degree, "degree")?,
            seed,
        },
    })
}

fn cmd_generate(a: &GenerateArgs, seed: u64) -> Result<()> {
    let kind = generator_kind(a, seed)?;
    let params = GeneratorParams {
        epsilon: a.epsilon,
        forceful: a.forceful.iter().map(|s| parse_push(s)).collect::<Result<_>>()?,
    };
    let net: Network = network::generate(&kind, &params)?;
    match &a.out {
        Some(p) => network::save(&net, p),
        None => {
            io::stdout().lock().write_all(network::to_json_string(&net).as_bytes())?;
            Ok(())
        }
    }
}

/// Returns whether the network is valid.
fn cmd_validate(path: &std::path::Path, fmt: Format) -> Result<bool> {
    let net: Network = network::load(path, false)?;
    let rep = validate(&net);
    match fmt {
        Format::Json => print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "valid": rep.is_valid(),
            "violations": rep.violations,
        }))?,
        Format::Csv => output::violations_csv(&rep)?,
    }
    Ok(rep.is_valid())
}

fn cmd_simulate(a: &SimulateArgs, s: &Settings, fmt: Format) -> Result<()> {
    let net = load(&a.path)?;
    let cfg = SimulationConfig {
        seed: s.seed,
        tolerance: s.tolerance,
        max_events: a.max_events,
        trials: a.trials,
        decimation: a.decimation,
    };
    match (&a.x0, a.decay) {
        (Some(x0), true) => {
            report::check_len(&net, x0)?;
            let prof = spread_decay_profile(&net, x0, &cfg)?;
            match fmt {
                Format::Json => print_json(&json!({ "schema_version": SCHEMA_VERSION, "config": cfg, "decay": prof })),
                Format::Csv => output::decay_csv(&prof),
            }
        }
        (Some(x0), false) => {
            report::check_len(&net, x0)?;
            let run = run_to_consensus(&net, x0, &cfg)?;
            match fmt {
                Format::Json => print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "config": cfg,
                    "run": {
                        "consensus": run.consensus,
                        "events": run.events,
                        "terminated": run.terminated,
                        "monotone": run.monotone,
                        "spread_trace": run.spread_trace,
                    }
                })),
                Format::Csv => output::trace_csv(&run.spread_trace),
            }
        }
        (None, _) => {
            let est = estimate_consensus_weights(&net, &cfg)?;
            let pi = misinfo::markov::stationary(&decompose(&net).w_tilde)?.pi;
            match fmt {
                Format::Json => print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "config": cfg,
                    "estimate": est,
                    "analytic": pi,
                    "max_deviation": est.max_deviation(&pi),
                    "agrees": est.agrees_with(&pi, 3.0, 0.02),
                })),
                Format::Csv => output::estimate_csv(&est, &pi),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let s = Settings {
        seed: cli.seed,
        tolerance: cli.tolerance,
        require_exact: cli.exact_cuts,
    };
    if !(s.tolerance > 0.0) {
        return Err(Error::BadParams(format!("--tolerance must be positive, got {}", s.tolerance)));
    }
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { path } => {
            return Ok(if cmd_validate(path, fmt)? { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Generate(a) => cmd_generate(a, s.seed)?,
        Command::Analyze(a) => {
            let net = load(&a.path)?;
            let cluster = match a.cluster.as_deref() {
                Some([x, y]) => Some((*x, *y)),
                _ => None,
            };
            let req = AnalyzeRequest {
                x0: a.x0.as_deref(),
                simulate: a.simulate,
                cluster,
                max_events: a.max_events,
            };
            let rep = report::analyze(&net, &req, &s)?;
            match fmt {
                Format::Json => print_json(&rep)?,
                Format::Csv => output::analysis_csv(&rep)?,
            }
        }
        Command::Bounds { path, x0 } => {
            let net = load(path)?;
            if let Some(x) = x0 {
                report::check_len(&net, x)?;
            }
            let mode = s.cut_mode(net.n())?;
            let b = bounds_report(&net, x0.as_deref(), mode)?;
            match fmt {
                Format::Json => print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "cut_mode": mode,
                    "certifications": report::certifications(&b, None),
                    "bounds": b,
                }))?,
                Format::Csv => output::bounds_csv(&b, s.tolerance)?,
            }
        }
        Command::Cluster { path, a, b } => {
            let net = load(path)?;
            let mode = s.cut_mode(net.n())?;
            let g = WeightedGraph::from_social(&decompose(&net).t)?;
            let tr = cluster_bound(&g, *a, *b, mode)?;
            match fmt {
                Format::Json => print_json(&json!({ "schema_version": SCHEMA_VERSION, "cut_mode": mode, "trace": tr }))?,
                Format::Csv => output::cluster_csv(&tr)?,
            }
        }
        Command::Simulate(a) => cmd_simulate(a, &s, fmt)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io::stderr(), "{}", serde_json::to_string_pretty(&error_json(&e)).expect("error serializes"));
            ExitCode::from(exit_code(&e))
        }
    }
}
