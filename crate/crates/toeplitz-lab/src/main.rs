//! Thin experiment-runner binary over the library.
//!
//! Usage:
//!   toeplitz-lab --config PATH|bank:NAME [--out DIR] [--seed U64]
//!                [--kind KIND] [--no-timestamp] [--max-n N]
//!   toeplitz-lab --list-bank
//!
//! Exit codes: 0 = consistent/inconclusive, 2 = inconsistent, 1 = error.

use std::path::PathBuf;
use std::process::ExitCode;
use toeplitz_lab::experiment::{
    bank, emit_report, run_experiment, ExperimentConfig, ReportFormat, Verdict,
};

struct Args {
    config: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    kind: Option<String>,
    no_timestamp: bool,
    max_n: Option<usize>,
    list_bank: bool,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut args = Args {
        config: None,
        out: None,
        seed: None,
        kind: None,
        no_timestamp: false,
        max_n: None,
        list_bank: false,
    };
    let mut it = argv.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next().cloned().ok_or_else(|| format!("{name} requires a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(value("--config")?),
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--seed" => {
                args.seed =
                    Some(value("--seed")?.parse().map_err(|_| "--seed expects a u64".to_string())?)
            }
            "--kind" => args.kind = Some(value("--kind")?),
            "--no-timestamp" => args.no_timestamp = true,
            "--max-n" => {
                args.max_n = Some(
                    value("--max-n")?
                        .parse()
                        .map_err(|_| "--max-n expects an integer".to_string())?,
                )
            }
            "--list-bank" => args.list_bank = true,
            "--help" | "-h" => return Err(HELP.to_string()),
            other => return Err(format!("unknown flag '{other}'\n{HELP}")),
        }
    }
    Ok(args)
}

const HELP: &str = "toeplitz-lab --config PATH|bank:NAME [--out DIR] [--seed U64] \
[--kind KIND] [--no-timestamp] [--max-n N] | --list-bank";

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(1);
        }
    };
    if args.list_bank {
        for name in bank::names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(config_arg) = args.config else {
        eprintln!("missing --config\n{HELP}");
        return ExitCode::from(1);
    };
    let mut config = match load_config(&config_arg) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(out) = args.out {
        config.out = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(kind) = args.kind {
        match kind.parse() {
            Ok(k) => config.kind = k,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    if args.no_timestamp {
        config.timestamp = false;
    }
    if let Some(cap) = args.max_n {
        config.cap_grid(cap);
        if config.n_grid.is_empty() {
            eprintln!("error: --max-n {cap} removed every grid point");
            return ExitCode::from(1);
        }
    }

    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let dir = config.out.clone();
    for fmt in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::SvgData] {
        match emit_report(&report, fmt, &dir) {
            Ok(path) => println!("wrote {}", path.display()),
            Err(e) => {
                eprintln!("error writing report: {e}");
                return ExitCode::from(1);
            }
        }
    }
    println!(
        "{}: verdict = {:?}{}",
        report.label,
        report.verdict,
        report
            .fitted_rate
            .map(|r| format!(", fitted rate {:.3} +- {:.3}", r.slope, r.ci))
            .unwrap_or_default()
    );
    for note in &report.notes {
        println!("  note: {note}");
    }
    for err in &report.errors {
        println!("  error: {err}");
    }
    match report.verdict {
        Verdict::Inconsistent => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}

fn load_config(arg: &str) -> Result<ExperimentConfig, String> {
    if let Some(name) = arg.strip_prefix("bank:") {
        bank::by_name(name).map_err(|e| e.to_string())
    } else {
        let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
        ExperimentConfig::parse(&text).map_err(|e| e.to_string())
    }
}
