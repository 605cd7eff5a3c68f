use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use skewcomm::groups::parse_group_spec;
use skewcomm::harness::{
    check_instance, default_group_specs, default_ring_specs, emit_report, render_report,
    run_campaign, CampaignConfig, EvalOptions, ReportFormat,
};
use skewcomm::rings::parse_ring_spec;

#[derive(Parser)]
#[command(
    name = "skewcomm",
    version,
    about = "Cross-check anticommutativity of skew elements in group rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the oracle and all classifiers over an instance campaign.
    Campaign {
        /// JSON config; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        fail_fast: bool,
    },
    /// Evaluate a single instance file.
    Check {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Print the default group catalog with orders.
    ListGroups,
    /// Print the default ring list with characteristic and size.
    ListRings,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Campaign {
            config,
            out,
            format,
            workers,
            fail_fast,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    CampaignConfig::from_json(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => CampaignConfig::default(),
            };
            if let Some(f) = format {
                cfg.report_format = f.into();
            }
            if let Some(w) = workers {
                cfg.parallel_workers = w;
            }
            cfg.fail_fast |= fail_fast;
            let report = run_campaign(&cfg)?;
            match out {
                Some(path) => emit_report(&report, cfg.report_format, &path)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => {
                    let bytes = render_report(&report, cfg.report_format)?;
                    print!("{}", String::from_utf8_lossy(&bytes));
                }
            }
            let s = &report.summary;
            eprintln!(
                "instances={} anticommutative={} disagreements={} errors={} timed_out={} vacuous={}",
                s.instances, s.anticommutative, s.disagreements, s.errors, s.timed_out, s.vacuous
            );
            Ok(report.passed())
        }
        Command::Check { instance } => {
            let opts = EvalOptions::from(&CampaignConfig::default());
            let rec = check_instance(&instance, &opts)
                .with_context(|| format!("checking {}", instance.display()))?;
            println!("{}", serde_json::to_string_pretty(&rec)?);
            Ok(!rec.is_failure())
        }
        Command::ListGroups => {
            for spec in default_group_specs() {
                let g = parse_group_spec(&spec)?;
                println!("{spec}\torder={}\tabelian={}", g.order(), g.is_abelian());
            }
            Ok(true)
        }
        Command::ListRings => {
            for spec in default_ring_specs() {
                let r = parse_ring_spec(&spec)?;
                println!(
                    "{spec}\tcharacteristic={}\tsize={}",
                    r.characteristic(),
                    r.size()
                );
            }
            Ok(true)
        }
    }
}
