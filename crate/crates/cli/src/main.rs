use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use jrc_sar::scenario::{parse_config, run_scenario, Mode, DEFAULT_SCENARIO};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Point,
    Ship,
    Comm,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Point => Mode::Point,
            ModeArg::Ship => Mode::Ship,
            ModeArg::Comm => Mode::Comm,
        }
    }
}

/// Simulate and process a bistatic JRC SAR scenario.
#[derive(Debug, Parser)]
#[command(name = "jrcsar", version)]
struct Args {
    /// Scenario file; the built-in default scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "point")]
    mode: ModeArg,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `run.output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `clutter.snr_list`, dB; `clean` for no interference.
    #[arg(long, value_delimiter = ',', value_parser = parse_snr)]
    snr_list: Option<Vec<f64>>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn parse_snr(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("clean") || s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    s.trim_end_matches("dB").trim().parse().map_err(|e| format!("bad SNR `{s}`: {e}"))
}

fn run(args: Args) -> Result<bool> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => DEFAULT_SCENARIO.to_string(),
    };
    let mut cfg = parse_config(&text).context("parsing scenario")?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.run.output = out;
    }
    if let Some(list) = args.snr_list {
        cfg.clutter.snr_list = list;
    }
    if args.print_config {
        print!("{}", cfg.to_text());
        return Ok(true);
    }
    let out = cfg.run.output.clone();
    let manifest = run_scenario(&cfg, args.mode.into(), &out)?;
    for s in &manifest.stages {
        eprintln!("{:<28} {}", s.stage, s.status);
    }
    println!("{} artifacts in {}", manifest.artifacts.len(), out.display());
    Ok(!manifest.failed())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            // library errors already print their causes
            let mut parts = Vec::new();
            for cause in e.chain() {
                parts.push(cause.to_string());
                if cause.is::<jrc_sar::Error>() {
                    break;
                }
            }
            eprintln!("error: {}", parts.join(": "));
            ExitCode::FAILURE
        }
    }
}
