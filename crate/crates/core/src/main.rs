//! Command-line front end: `verify` sweeps identity checkers over a prime
//! range, `table` emits per-prime summary data. Exit codes: 0 all-pass,
//! 1 usage/internal error, 2 at least one check verified false.

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qresidue::sweep::{
    run_sweep, table_rows, write_reports_csv, write_reports_json, write_table_csv,
    write_table_json, DeltaPolicy, ParamPolicy, SweepConfig,
};
use qresidue::Claim;

#[derive(Parser)]
#[command(name = "qresidue", version, about = "Exact verification of quadratic-residue identities over prime ranges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity checkers over a prime range and emit one report per check
    Verify(VerifyArgs),
    /// Emit a per-prime table of residue statistics, units and class numbers
    Table(TableArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated claim names, or "all"
    #[arg(long, default_value = "all")]
    claims: String,
    #[arg(long)]
    pmin: u64,
    #[arg(long)]
    pmax: u64,
    /// Values of a: "all" or "sample:N"
    #[arg(long, default_value = "sample:4")]
    a: ParamPolicy,
    /// Values of b (thm_3_1 only): "all" or "sample:N"
    #[arg(long, default_value = "sample:4")]
    b: ParamPolicy,
    /// Delta values for thm_1_3: "1", "2" or "both"
    #[arg(long, default_value = "both")]
    delta: DeltaPolicy,
    #[command(flatten)]
    output: OutputArgs,
    /// Stop scheduling new checks after the first failure
    #[arg(long)]
    fail_fast: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    pmin: u64,
    #[arg(long)]
    pmax: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Output path, or "-" for stdout
    #[arg(long, default_value = "-")]
    out: String,
    /// Bound on concurrent tasks (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
}

impl OutputArgs {
    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match self.out.as_str() {
            "-" => Box::new(io::stdout().lock()),
            path => Box::new(File::create(path)?),
        })
    }
}

fn parse_claims(s: &str) -> Result<Vec<Claim>, String> {
    if s == "all" {
        return Ok(Claim::ALL.to_vec());
    }
    s.split(',').map(|name| name.trim().parse()).collect()
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    let claims = parse_claims(&args.claims)?;
    let mut cfg = SweepConfig::new(claims, args.pmin, args.pmax);
    cfg.a_policy = args.a;
    cfg.b_policy = args.b;
    cfg.delta = args.delta;
    cfg.jobs = args.output.jobs;
    cfg.fail_fast = args.fail_fast;
    let reports = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let out = args.output.writer().map_err(|e| e.to_string())?;
    match args.output.format.as_str() {
        "csv" => write_reports_csv(&reports, out).map_err(|e| e.to_string())?,
        _ => write_reports_json(&reports, out).map_err(|e| e.to_string())?,
    }
    Ok(if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_table(args: &TableArgs) -> Result<ExitCode, String> {
    if args.pmin > args.pmax {
        return Err(format!("empty range: pmin={} > pmax={}", args.pmin, args.pmax));
    }
    let rows = table_rows(args.pmin, args.pmax, args.output.jobs).map_err(|e| e.to_string())?;
    let out = args.output.writer().map_err(|e| e.to_string())?;
    match args.output.format.as_str() {
        "csv" => write_table_csv(&rows, out).map_err(|e| e.to_string())?,
        _ => write_table_json(&rows, out).map_err(|e| e.to_string())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Table(args) => run_table(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
