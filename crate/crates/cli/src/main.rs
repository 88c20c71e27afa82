use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use soulcurv::report::{run, RunConfig, RunReport, Suite, SuiteStatus, CONFIG_ERROR_EXIT};
use soulcurv::zoo::zoo_catalog;

/// Curvature checks on a catalog of explicit Riemannian metrics.
#[derive(Parser)]
#[command(name = "soulcurv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites named in a TOML config and write a JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; stdout if neither this nor the config names one.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List catalog entries and their expectations.
    List,
    /// Run the tensor identity suite on one entry.
    Validate {
        #[arg(long)]
        entry: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR_EXIT as u8)
        }
    }
}

fn dispatch(command: Command) -> soulcurv::Result<ExitCode> {
    match command {
        Command::Run {
            config,
            seed,
            out,
            threads,
        } => {
            let mut cfg = RunConfig::from_path(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if out.is_some() {
                cfg.output = out;
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let started = Instant::now();
            let report = run(&cfg)?;
            match &cfg.output {
                Some(path) => report.write(path)?,
                None => println!("{}", report.to_json()?),
            }
            summarize(&report);
            eprintln!("wall time {:.2} s", started.elapsed().as_secs_f64());
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::List => {
            for e in zoo_catalog() {
                let soul = e.soul.as_ref().map_or_else(
                    || "-".to_string(),
                    |s| format!("dim {} rank {}", s.param_dim(), s.normal_rank()),
                );
                let flags: Vec<String> =
                    e.metric.flags().iter().map(|f| format!("{f:?}")).collect();
                println!(
                    "{:<14} dim {}  soul: {:<14} flags: [{}]",
                    e.name,
                    e.metric.dim(),
                    soul,
                    flags.join(", ")
                );
                println!("{:<14} {}", "", e.description);
                let x = &e.expected;
                let mut claims = Vec::new();
                if let Some(k) = x.constant_curvature {
                    claims.push(format!("K = {k}"));
                }
                if let Some(split) = x.expected_split {
                    claims.push(format!("split = {split}"));
                }
                if let Some(chi) = x.euler_abs {
                    claims.push(format!("|euler| = {chi}"));
                }
                if let Some(k) = x.soul_tangent_curvature {
                    claims.push(format!("soul K = {k}"));
                }
                if !claims.is_empty() {
                    println!("{:<14} expects {}", "", claims.join(", "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { entry } => {
            let report = run(&RunConfig::for_entries([entry], &[Suite::Identities]))?;
            for e in &report.entries {
                for s in &e.suites {
                    for c in &s.checks {
                        let mark = if c.passed { "ok  " } else { "FAIL" };
                        println!(
                            "{mark} {} {}: {:e} ({:?} {:e})",
                            e.name, c.name, c.value, c.comparison, c.limit
                        );
                    }
                }
            }
            summarize(&report);
            Ok(ExitCode::from(report.exit_code() as u8))
        }
    }
}

fn summarize(report: &RunReport) {
    for e in &report.entries {
        let statuses: Vec<String> = e
            .suites
            .iter()
            .map(|s| {
                let tag = match s.status {
                    SuiteStatus::Passed => "pass",
                    SuiteStatus::Failed => "FAIL",
                    SuiteStatus::NotApplicable => "n/a",
                    SuiteStatus::Error => "ERROR",
                };
                format!("{}={tag}", s.suite)
            })
            .collect();
        eprintln!("{:<14} {}", e.name, statuses.join(" "));
    }
    for f in &report.failures {
        eprintln!(
            "failure: {} / {} / {}: {}",
            f.entry, f.suite, f.check, f.detail
        );
    }
}
