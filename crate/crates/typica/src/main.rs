//! Command-line front end: parse a knowledge base file or builtin, run
//! inference, print verdicts and optional traces, and optionally
//! cross-check effecting steps against the power-set oracle.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use typica::engine::{infer, query, KnowledgeState, Verdict};
use typica::error::Error;
use typica::kb::{KnowledgeBase, Options};
use typica::parser::parse_kb;
use typica::trace::{oracle_check, render_trace, render_verdict, OracleReport};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_SCHEDULE: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_ORACLE_MISMATCH: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

/// Default reasoning over possibility-qualified rules.
#[derive(Debug, Parser)]
#[command(name = "typica", disable_help_subcommand = true)]
struct Cli {
    /// Knowledge base file (alternative to --builtin)
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,

    /// Bundled knowledge base: nixon, nixon-quaker-only,
    /// nixon-republican-only, nixon-both, yale
    #[arg(long, value_name = "NAME", conflicts_with = "file")]
    builtin: Option<String>,

    /// Comma-separated variables to query, or `all`. Defaults to the
    /// query statements in the knowledge base, then to all variables.
    #[arg(long, value_name = "VAR[,VAR...]|all")]
    query: Option<String>,

    /// Print the full inference trace
    #[arg(long)]
    trace: bool,

    /// Re-derive effecting steps through the power-set oracle
    #[arg(long)]
    oracle_check: bool,

    /// Verdict threshold in (0.5, 1]
    #[arg(long, value_name = "T", default_value_t = 1.0)]
    threshold: f64,

    /// Joint-space cell limit
    #[arg(long, value_name = "N")]
    max_cells: Option<usize>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn exit_for(error: &Error) -> u8 {
    match error {
        Error::ScheduleCycle { .. } => EXIT_SCHEDULE,
        Error::CellLimit { .. } | Error::OracleLimit { .. } | Error::DisjunctCap { .. } => {
            EXIT_RESOURCE
        }
        _ => EXIT_PARSE,
    }
}

#[derive(Serialize)]
struct MachineEntry {
    set: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    possibility: f64,
    certainty: f64,
    classification: String,
}

#[derive(Serialize)]
struct MachineQuery {
    variable: String,
    classification: String,
    projected: std::collections::BTreeMap<String, f64>,
    entries: Vec<MachineEntry>,
}

#[derive(Serialize)]
struct MachineOracle {
    checked: usize,
    mismatches: Vec<String>,
}

#[derive(Serialize)]
struct MachineReport {
    input: String,
    threshold: f64,
    consistent: bool,
    height: f64,
    schedule: Vec<Vec<String>>,
    queries: Vec<MachineQuery>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_check: Option<MachineOracle>,
}

fn machine_query(verdict: &Verdict) -> MachineQuery {
    let projected = verdict
        .projected
        .universe()
        .elements()
        .iter()
        .cloned()
        .zip(verdict.projected.grades().iter().copied())
        .collect();
    MachineQuery {
        variable: verdict.variable.clone(),
        classification: verdict.classification.to_string(),
        projected,
        entries: verdict
            .entries
            .iter()
            .map(|e| MachineEntry {
                set: e.set.to_string(),
                label: e.label.clone(),
                possibility: e.possibility,
                certainty: e.certainty,
                classification: e.classification.to_string(),
            })
            .collect(),
    }
}

fn run(cli: &Cli) -> Result<(String, u8), (String, u8)> {
    let fail = |e: Error| (format!("error: {e}"), exit_for(&e));

    let (input_name, text) = if let Some(name) = &cli.builtin {
        let kb = KnowledgeBase::builtin(name).map_err(fail)?;
        (format!("builtin:{name}"), kb.to_dsl())
    } else if let Some(path) = &cli.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| (format!("error: cannot read {}: {e}", path.display()), EXIT_PARSE))?;
        (path.display().to_string(), text)
    } else {
        return Err((
            "error: provide a knowledge base file or --builtin NAME".into(),
            EXIT_USAGE,
        ));
    };

    let mut kb = parse_kb(&text).map_err(fail)?;
    let options = Options {
        cell_limit: cli.max_cells.unwrap_or(typica::relation::DEFAULT_CELL_LIMIT),
        threshold: cli.threshold,
        oracle_check: cli.oracle_check,
        ..Options::default()
    };
    kb.set_options(options).map_err(fail)?;

    let queries: Vec<String> = match cli.query.as_deref() {
        Some("all") => kb.variables().iter().map(|v| v.name().to_string()).collect(),
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None if !kb.queries().is_empty() => kb.queries().to_vec(),
        None => kb.variables().iter().map(|v| v.name().to_string()).collect(),
    };

    let state: KnowledgeState = infer(&kb).map_err(fail)?;
    let mut verdicts = Vec::new();
    for name in &queries {
        verdicts.push(query(&state, name, None).map_err(fail)?);
    }
    let oracle: Option<OracleReport> = if cli.oracle_check {
        Some(oracle_check(&state).map_err(fail)?)
    } else {
        None
    };

    let mut out = String::new();
    match cli.format {
        Format::Text => {
            if cli.trace {
                out.push_str(&render_trace(&state));
            }
            for v in &verdicts {
                out.push_str(&render_verdict(v));
                out.push('\n');
            }
            if let Some(report) = &oracle {
                if report.passed() {
                    out.push_str(&format!(
                        "oracle check: {} steps verified against the power-set path\n",
                        report.checked
                    ));
                } else {
                    for m in &report.mismatches {
                        out.push_str(&format!("oracle mismatch: {m}\n"));
                    }
                }
            }
        }
        Format::Machine => {
            let report = MachineReport {
                input: input_name,
                threshold: cli.threshold,
                consistent: state.is_consistent(),
                height: state.h().height(),
                schedule: state.schedule().layers().to_vec(),
                queries: verdicts.iter().map(machine_query).collect(),
                trace: cli.trace.then(|| render_trace(&state)),
                oracle_check: oracle.as_ref().map(|r| MachineOracle {
                    checked: r.checked,
                    mismatches: r.mismatches.clone(),
                }),
            };
            out.push_str(&serde_json::to_string_pretty(&report).expect("report serializes"));
            out.push('\n');
        }
    }

    let code = match &oracle {
        Some(report) if !report.passed() => EXIT_ORACLE_MISMATCH,
        _ => 0,
    };
    Ok((out, code))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if !(cli.threshold > 0.5 && cli.threshold <= 1.0) {
        eprintln!("error: --threshold {} outside (0.5, 1]", cli.threshold);
        return ExitCode::from(EXIT_USAGE);
    }
    if let Some(0) = cli.max_cells {
        eprintln!("error: --max-cells must be at least 1");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err((message, code)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}
